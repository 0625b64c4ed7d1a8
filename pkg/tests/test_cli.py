import json

import numpy as np
import pytest

import eitlab.cli as cli


def write_config(tmp_path, payload, name="scenario.json"):
    path = tmp_path / name
    path.write_text(json.dumps(payload), encoding="utf-8")
    return path


BASE_FORWARD = {
    "version": 1,
    "experiment": "forward",
    "seed": 7,
    "partition": {"n_strips": 2},
    "mesh": {"h": 1 / 16},
    "admittivity": {"values": [[1, 0], [1, 1]], "lambda": 10.0},
    "params": {"datum": "x1"},
}


def test_list_has_ten_kinds(capsys):
    assert cli.main(["list"]) == 0
    out = capsys.readouterr().out
    assert len(cli.EXPERIMENTS) == 10
    for kind in cli.EXPERIMENTS:
        assert kind in out


def test_list_json(capsys):
    assert cli.main(["list", "--json"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert len(payload) == 10
    assert {"kind", "description", "params"} <= set(payload[0])


def test_forward_smoke(tmp_path, capsys):
    cfg = write_config(tmp_path, BASE_FORWARD)
    out = tmp_path / "out"
    assert cli.main(["run", str(cfg), "--out", str(out)]) == 0
    assert (out / "solution.csv").exists()
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["experiment"] == "forward"
    assert manifest["config"] == BASE_FORWARD
    assert manifest["mesh_hash"]
    assert manifest["outputs"] == ["solution.csv"]
    header = (out / "solution.csv").read_text().splitlines()[0]
    assert header == "node_index,x,y,re_u,im_u"


def test_identity_check_rel_err(tmp_path):
    cfg = write_config(tmp_path, {
        "version": 1,
        "experiment": "identity-check",
        "seed": 3,
        "partition": {"n_strips": 2},
        "mesh": {"h": 1 / 16},
        "admittivity": {"values": [[1, 0], [2, 1]], "lambda": 10.0},
        "params": {"n_pairs": 3},
    })
    out = tmp_path / "out"
    assert cli.main(["run", str(cfg), "--out", str(out)]) == 0
    lines = (out / "identity.csv").read_text().splitlines()
    assert lines[0] == "pair_id,lhs_re,lhs_im,rhs_re,rhs_im,rel_err"
    for line in lines[1:]:
        assert float(line.split(",")[-1]) <= 1e-10


def test_validation_error_names_ellipticity(tmp_path, capsys):
    bad = dict(BASE_FORWARD)
    bad["admittivity"] = {"values": [[1, 0], [0, 1]], "lambda": 10.0}
    cfg = write_config(tmp_path, bad)
    assert cli.main(["run", str(cfg)]) == 2
    err = capsys.readouterr().err
    assert "ellipticity" in err
    assert "admittivity 2" in err


def test_validation_unknown_key(tmp_path, capsys):
    bad = dict(BASE_FORWARD)
    bad["extra"] = True
    cfg = write_config(tmp_path, bad)
    assert cli.main(["run", str(cfg)]) == 2
    assert "unknown keys" in capsys.readouterr().err


def test_validation_parse_error(tmp_path, capsys):
    path = tmp_path / "broken.json"
    path.write_text("{not json", encoding="utf-8")
    assert cli.main(["run", str(path)]) == 2
    assert "parse error" in capsys.readouterr().err


def test_validation_too_coarse(tmp_path, capsys):
    bad = dict(BASE_FORWARD)
    bad["mesh"] = {"h": 0.75}
    cfg = write_config(tmp_path, bad)
    assert cli.main(["run", str(cfg)]) == 2
    assert "resolve" in capsys.readouterr().err


def test_reproducible_outputs(tmp_path):
    cfg = write_config(tmp_path, {
        "version": 1,
        "experiment": "identity-check",
        "seed": 11,
        "partition": {"n_strips": 2},
        "mesh": {"h": 1 / 16},
        "admittivity": {"values": [[1, 0], [2, 1]], "lambda": 10.0},
        "params": {"n_pairs": 2},
    })
    out1, out2 = tmp_path / "a", tmp_path / "b"
    assert cli.main(["run", str(cfg), "--out", str(out1)]) == 0
    assert cli.main(["run", str(cfg), "--out", str(out2)]) == 0
    assert (out1 / "identity.csv").read_bytes() == (out2 / "identity.csv").read_bytes()


def test_seed_override_changes_random_outputs(tmp_path):
    cfg = write_config(tmp_path, {
        "version": 1,
        "experiment": "identity-check",
        "seed": 11,
        "partition": {"n_strips": 2},
        "mesh": {"h": 1 / 16},
        "admittivity": {"values": [[1, 0], [2, 1]], "lambda": 10.0},
        "params": {"n_pairs": 2},
    })
    out1, out2 = tmp_path / "a", tmp_path / "b"
    assert cli.main(["run", str(cfg), "--out", str(out1)]) == 0
    assert cli.main(["run", str(cfg), "--out", str(out2), "--seed", "99"]) == 0
    assert (out1 / "identity.csv").read_bytes() != (out2 / "identity.csv").read_bytes()
    m2 = json.loads((out2 / "manifest.json").read_text())
    assert m2["seed"] == 99


def test_constant_bound_experiment(tmp_path):
    cfg = write_config(tmp_path, {
        "version": 1,
        "experiment": "constant-bound",
        "params": {"n_max": 4, "C": 1.0, "dim": 3},
    })
    out = tmp_path / "out"
    assert cli.main(["run", str(cfg), "--out", str(out)]) == 0
    lines = (out / "constant_bound.csv").read_text().splitlines()
    assert lines[0] == "N,log10_bound,tower_depth,tower_value"
    first = lines[1].split(",")
    assert float(first[1]) == pytest.approx(110.878, abs=0.1)
    assert len(lines) == 5


def test_sweep_experiment_with_threads(tmp_path):
    cfg = write_config(tmp_path, {
        "version": 1,
        "experiment": "sweep",
        "partition": {"n_strips": 2},
        "mesh": {"h": 1 / 16},
        "admittivities": [
            {"values": [[1, 0], [1, 0]], "lambda": 10.0},
            {"values": [[1.25, 0], [1, 0]], "lambda": 10.0},
            {"values": [[1, 0], [1.25, 0]], "lambda": 10.0},
        ],
        "params": {"arc": "bottom"},
    })
    out = tmp_path / "out"
    assert cli.main(["run", str(cfg), "--out", str(out), "--threads", "2"]) == 0
    lines = (out / "sweep.csv").read_text().splitlines()
    assert lines[0] == "scenario_id,N,E,eps,ratio,h"
    ratios = [float(line.split(",")[4]) for line in lines[1:]]
    assert ratios[1] > ratios[0]      # deeper strip is harder to see


def test_numeric_failure_exit_code(tmp_path, monkeypatch):
    def broken(scn, rng):
        raise cli.NumericFailure("synthetic breakdown")
    monkeypatch.setitem(cli.EXPERIMENTS, "forward",
                        (broken,) + cli.EXPERIMENTS["forward"][1:])
    cfg = write_config(tmp_path, BASE_FORWARD)
    assert cli.main(["run", str(cfg)]) == 3


def test_asymptotics_experiment(tmp_path):
    cfg = write_config(tmp_path, {
        "version": 1,
        "experiment": "asymptotics",
        "partition": {"n_strips": 2},
        "mesh": {"h": 1 / 32},
        "admittivity": {"values": [[1, 0], [2, 1]], "lambda": 10.0},
        "params": {"link": 2, "radii_over_r0": [0.25, 0.125, 0.0625]},
    })
    out = tmp_path / "out"
    assert cli.main(["run", str(cfg), "--out", str(out)]) == 0
    lines = (out / "asymptotics.csv").read_text().splitlines()
    assert lines[0] == "r,deviation,grad_deviation"
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["results"]["verdict"] == "bounded"
