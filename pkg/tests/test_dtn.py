import numpy as np
import pytest
import scipy.linalg as sla

import eitlab as el
from eitlab.dtn import (boundary_operators, dtn_matrix, h_half_gram, local_dtn,
                        operator_norm)
from eitlab.forward import Admittivity


def boundary_angles(mesh):
    pts = mesh.nodes[mesh.boundary_nodes]
    return np.arctan2(pts[:, 1], pts[:, 0])


def test_disk_steklov_spectrum(disk_mesh32):
    d = dtn_matrix(disk_mesh32, Admittivity([1.0]))
    w = np.sort(sla.eigh(d.matrix.real, d.mass, eigvals_only=True))
    assert abs(w[0]) <= 1e-8
    ks = np.repeat(np.arange(1, 9), 2)
    rel = np.abs(w[1:17] - ks) / ks
    assert rel.max() <= 0.02


def test_dtn_constant_kernel_and_symmetry(strips2_mesh64):
    p, m = strips2_mesh64
    d = dtn_matrix(m, Admittivity([1.0, 2.0 + 1.0j]))
    scale = np.abs(d.matrix).max()
    assert np.abs(d.matrix @ np.ones(d.n)).max() <= 1e-10 * scale
    assert np.abs(d.matrix - d.matrix.T).max() <= 1e-10 * scale


def test_dtn_real_coefficients_give_real_symmetric(strips2_mesh64):
    p, m = strips2_mesh64
    d = dtn_matrix(m, Admittivity([1.0, 3.0]))
    assert np.abs(d.matrix.imag).max() <= 1e-12 * np.abs(d.matrix.real).max()
    assert np.allclose(d.matrix.real, d.matrix.real.T, atol=1e-10)


def test_gram_endpoint_identities(disk_mesh32):
    M, B = boundary_operators(disk_mesh32)
    W0 = h_half_gram(M, B, 0.0)
    W1 = h_half_gram(M, B, 1.0)
    assert np.abs(W0 - M).max() <= 1e-12 * np.abs(M).max()
    assert np.abs(W1 - (M + B)).max() <= 1e-12 * np.abs(B).max()
    with pytest.raises(ValueError):
        h_half_gram(M, B, 1.5)


def test_gram_half_circle_modes(disk_mesh32):
    d = dtn_matrix(disk_mesh32, Admittivity([1.0]))
    W = d.gram_half()
    th = boundary_angles(disk_mesh32)
    for k in [0, 1, 2, 4, 8]:
        f = np.exp(1j * k * th)
        n2 = np.real(np.conj(f) @ (W @ f))
        target = 2 * np.pi * np.sqrt(1.0 + k * k)
        assert n2 == pytest.approx(target, rel=0.05)


def test_gram_half_positive_definite(disk_mesh32):
    d = dtn_matrix(disk_mesh32, Admittivity([1.0]))
    W = d.gram_half()
    assert np.all(sla.eigvalsh(W) > 0)


def test_operator_norm_zero_and_homogeneity(disk_mesh32):
    d1 = dtn_matrix(disk_mesh32, Admittivity([1.0]))
    d3 = dtn_matrix(disk_mesh32, Admittivity([3.0]))
    W = d1.gram_half()
    assert operator_norm(np.zeros_like(d1.matrix), W) == 0.0
    # scaling a constant admittivity scales the whole map, and the norm
    assert np.abs(d3.matrix - 3 * d1.matrix).max() <= 1e-12 * np.abs(d3.matrix).max()
    delta = d3.matrix - d1.matrix
    assert operator_norm(2 * delta, W) == pytest.approx(
        2 * operator_norm(delta, W), rel=1e-10)


def test_operator_norm_requires_spd_gram():
    with pytest.raises(ValueError):
        operator_norm(np.eye(3, dtype=complex), -np.eye(3))


def test_fourier_mode_rayleigh_sequence(disk_mesh32):
    # mode-subspace pairings approach |g1-g2| from below as the mode grows
    d1 = dtn_matrix(disk_mesh32, Admittivity([1.0]))
    d2 = dtn_matrix(disk_mesh32, Admittivity([2.0]))
    delta = d2.matrix - d1.matrix
    W = d1.gram_half()
    th = boundary_angles(disk_mesh32)
    rs = []
    for k in range(1, 9):
        f = np.exp(1j * k * th)
        num = abs(np.conj(f) @ (delta @ f))
        den = np.real(np.conj(f) @ (W @ f))
        rs.append(num / den)
        assert rs[-1] == pytest.approx(k / np.sqrt(1 + k * k), rel=0.02)
    assert all(rs[i] < rs[i + 1] for i in range(len(rs) - 1))
    assert rs[-1] >= 0.9
    # the full operator norm dominates every mode pairing
    assert operator_norm(delta, W) >= rs[-1]


def test_local_dtn_full_arc_equals_global(strips2_mesh64):
    p, m = strips2_mesh64
    d = dtn_matrix(m, Admittivity([1.0, 2.0]))
    nb = d.n
    arc = np.arange(nb + 1) % nb      # wraps once around: interior = everything
    loc = local_dtn(d, arc)
    assert loc.matrix.shape == (nb - 1, nb - 1)
    assert np.allclose(loc.matrix, d.matrix[1:nb, 1:nb])


def test_local_dtn_monotone(strips2_mesh64):
    p, m = strips2_mesh64
    a1, a2 = Admittivity([1.0, 2.0]), Admittivity([1.0, 3.0])
    d1, d2 = dtn_matrix(m, a1), dtn_matrix(m, a2)
    g = operator_norm(d1.matrix - d2.matrix, d1.gram_half())
    nx = int(np.sum(m.nodes[m.boundary_nodes, 1] == 0.0))
    arc = np.arange(nx)                # bottom edge
    l1, l2 = local_dtn(d1, arc), local_dtn(d2, arc)
    ln = operator_norm(l1.matrix - l2.matrix, l1.gram_half())
    assert ln <= g


def test_local_dtn_errors(strips2_mesh64):
    p, m = strips2_mesh64
    d = dtn_matrix(m, Admittivity([1.0, 2.0]))
    with pytest.raises(ValueError):
        local_dtn(d, np.array([0, 1]))            # no interior nodes
    with pytest.raises(ValueError):
        local_dtn(d, np.array([0, 2, 4]))         # not contiguous
    with pytest.raises(ValueError):
        local_dtn(d, np.array([], dtype=int))


def test_dtn_csv_export(tmp_path, strips2_mesh64):
    p, m = strips2_mesh64
    d = dtn_matrix(m, Admittivity([1.0, 2.0 + 1.0j]))
    path = tmp_path / "dtn.csv"
    d.to_csv(path)
    text = path.read_text().splitlines()
    assert text[0].startswith("# dtn v1")
    assert d.mesh_hash in text[0]
