import numpy as np
import pytest

import eitlab as el
from eitlab.forward import (Admittivity, EllipticityError, assemble,
                            caccioppoli_ratio, coefficient_tensor,
                            elasticity_quadratic_form, field_from_function,
                            region_stiffness, solve_dirichlet, solve_real_system)
from eitlab.geometry import GeometryError, Mesh
from eitlab.stability import random_harmonic_polynomial


def layered_profile(values, thicknesses):
    """1D layered-medium oracle: piecewise-linear potential, slope 1/gamma_j.

    Returns (profile callable of height, total flux) for unit voltage drop.
    """
    values = [complex(v) for v in values]
    resist = sum(t / g for t, g in zip(thicknesses, values))
    q = 1.0 / resist
    levels = [0.0 + 0.0j]
    for t, g in zip(thicknesses, values):
        levels.append(levels[-1] + q * t / g)

    def profile(y):
        y = np.asarray(y, dtype=float)
        out = np.zeros(y.shape, dtype=complex)
        y0 = 0.0
        for j, (t, g) in enumerate(zip(thicknesses, values)):
            sel = (y >= y0 - 1e-15) & (y <= y0 + t + 1e-15)
            out = np.where(sel, levels[j] + q * (y - y0) / g, out)
            y0 += t
        return out

    return profile, q


def test_admittivity_validation():
    with pytest.raises(EllipticityError):
        Admittivity([0.0 + 1j], lam=10.0)       # Re below 1/lambda
    with pytest.raises(EllipticityError):
        Admittivity([20.0], lam=10.0)           # modulus above lambda
    with pytest.raises(EllipticityError):
        Admittivity([1.0], lam=0.5)             # bound below 1
    a = Admittivity([1.0, 2.0 + 1j])
    assert a.value_for(0) == 1.0
    assert a.value_for(2) == 2.0 + 1j


def _single_triangle_mesh():
    nodes = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
    return Mesh(nodes=nodes, triangles=np.array([[0, 1, 2]]),
                tri_region=np.array([1]), boundary_nodes=np.array([0, 1, 2]),
                interface_edges={}, h=1.0)


def test_single_triangle_classical_stiffness():
    m = _single_triangle_mesh()
    K = region_stiffness(m)[1].toarray()
    expected = 0.5 * np.array([[2.0, -1.0, -1.0],
                               [-1.0, 1.0, 0.0],
                               [-1.0, 0.0, 1.0]])
    assert np.allclose(K, expected, atol=1e-14)


def test_stiffness_linear_in_gamma():
    p = el.build_partition(2)
    m = el.generate_mesh(p, 1 / 8)
    A1 = assemble(m, Admittivity([1.0, 1.0])).matrix
    A2 = assemble(m, Admittivity([2.0, 2.0])).matrix
    assert abs(A2 - 2 * A1).max() <= 1e-14
    # interface rows are affine in each strip value separately
    Ai = assemble(m, Admittivity([1.0, 1.0 + 1.0j])).matrix
    diff = (Ai - A1).toarray()
    expected = 1j * region_stiffness(m)[2].toarray()
    assert np.abs(diff - expected).max() <= 1e-14


def test_complex_symmetry_of_stiffness():
    p = el.build_partition(2)
    m = el.generate_mesh(p, 1 / 8)
    A = assemble(m, Admittivity([1.0, 2.0 + 1.0j])).matrix
    assert abs(A - A.T).max() == 0.0


def test_linear_field_exact():
    p = el.build_partition(3)
    m = el.generate_mesh(p, 1 / 12)
    u = solve_dirichlet(m, Admittivity([1.0, 1.0, 1.0]), lambda x, y: x)
    assert np.abs(u.values - m.nodes[:, 0]).max() <= 1e-12


def test_layered_real_oracle():
    p = el.build_partition(2)
    m = el.generate_mesh(p, 1 / 16)
    vals = [1.0, 3.0]
    profile, q = layered_profile(vals, [0.5, 0.5])
    assert q == pytest.approx(1.5)
    u = solve_dirichlet(m, Admittivity(vals), lambda x, y: profile(y))
    exact = profile(m.nodes[:, 1])
    assert np.abs(u.values - exact).max() <= 1e-10
    assert u.interpolate(np.array([[0.37, 0.5]]))[0].real == pytest.approx(0.75, abs=1e-10)
    # flux gamma * du/dy is the same constant in both strips
    grads = u.gradients()
    gam = Admittivity(vals).element_values(m)
    flux = gam * grads[:, 1]
    assert np.abs(flux - q).max() <= 1e-9


def test_layered_complex_oracle():
    p = el.build_partition(2)
    m = el.generate_mesh(p, 1 / 16)
    vals = [1.0, 1.0 + 1.0j]
    profile, q = layered_profile(vals, [0.5, 0.5])
    u = solve_dirichlet(m, Admittivity(vals), lambda x, y: profile(y))
    exact = profile(m.nodes[:, 1])
    assert np.abs(u.values - exact).max() <= 1e-10


def test_boundary_trace_exact():
    p = el.build_partition(2)
    m = el.generate_mesh(p, 1 / 8)
    f = np.cos(np.arange(len(m.boundary_nodes))) + 1j
    u = solve_dirichlet(m, Admittivity([1.0, 2.0]), f)
    assert np.abs(u.values[m.boundary_nodes] - f).max() == 0.0


def test_interior_residual_small():
    p = el.build_partition(2)
    m = el.generate_mesh(p, 1 / 32)
    sys_ = assemble(m, Admittivity([1.0, 2.0 + 1.0j]))
    u = sys_.solve(np.cos(np.linspace(0, 6, len(m.boundary_nodes))))
    assert u.interior_residual(sys_.matrix, sys_.interior) <= 1e-10


def test_real_system_agrees_with_complex():
    p = el.build_partition(2)
    m = el.generate_mesh(p, 1 / 16)
    a = Admittivity([1.0, 1.0 + 1.0j])
    f = lambda x, y: x + 1j * x * y
    u_c = solve_dirichlet(m, a, f)
    u_r = solve_real_system(m, a, f)
    assert np.abs(u_c.values - u_r.values).max() <= 1e-10


def test_real_system_decouples_for_real_gamma():
    p = el.build_partition(2)
    m = el.generate_mesh(p, 1 / 16)
    a = Admittivity([1.0, 2.5])
    f = lambda x, y: x + 1j * (x * x - y * y)
    u = solve_real_system(m, a, f)
    u_im = solve_dirichlet(m, a, lambda x, y: (x * x - y * y) + 0j)
    assert np.abs(u.values.imag - u_im.values.real).max() <= 1e-10


def test_strong_ellipticity_quadratic_form(rng):
    lam = 10.0
    for _ in range(30):
        g = complex(rng.uniform(1 / lam, 3.0), rng.uniform(-2.0, 2.0))
        if abs(g) > lam:
            continue
        xi = rng.standard_normal((2, 2))
        q = elasticity_quadratic_form(g, xi)
        n2 = float(np.sum(xi * xi))
        assert q == pytest.approx(g.real * n2, rel=1e-12)
        assert n2 / lam - 1e-12 <= q <= lam * n2 + 1e-12


def test_coefficient_tensor_shape():
    c = coefficient_tensor(2.0 + 0.5j)
    assert c.shape == (2, 2, 2, 2)
    # diagonal-in-derivatives structure: c[l,j,h,k] = 0 when h != k
    assert np.all(c[:, :, 0, 1] == 0) and np.all(c[:, :, 1, 0] == 0)


def test_galerkin_orthogonality():
    p = el.build_partition(2)
    m = el.generate_mesh(p, 1 / 16)
    a = Admittivity([1.0, 2.0 + 1.0j])
    sys_ = assemble(m, a)
    u = sys_.solve(np.exp(1j * np.linspace(0, 2, len(m.boundary_nodes))))
    resid = sys_.matrix @ u.values
    assert np.abs(resid[sys_.interior]).max() <= 1e-12 * np.abs(sys_.matrix.data).max()


def test_disk_harmonic_h1_convergence():
    errs = []
    for h in [1 / 8, 1 / 16, 1 / 32]:
        m = el.generate_disk_mesh(h)
        u = solve_dirichlet(m, Admittivity([1.0]), lambda x, y: x * x - y * y)
        grads = u.gradients()
        cen = m.centroids()
        exact = np.column_stack([2 * cen[:, 0], -2 * cen[:, 1]])
        err2 = np.sum(m.areas() * np.abs(grads - exact).sum(axis=1) ** 2)
        errs.append(np.sqrt(err2))
    assert errs[0] / errs[1] >= 1.7
    assert errs[1] / errs[2] >= 1.7


def test_interface_transmission_under_refinement():
    # one-sided gradients at matched interface points: the tangential
    # derivative is continuous, the flux jump gamma du/dn shrinks with h
    p = el.build_partition(2)
    a = Admittivity([1.0, 2.0 + 1.0j])

    def jumps(h):
        m = el.generate_mesh(p, h)
        u = solve_dirichlet(m, a, lambda x, y: np.cos(2 * x) * np.exp(y))
        edges = m.interface_edges[2]
        mids = 0.5 * (m.nodes[edges[:, 0]] + m.nodes[edges[:, 1]])
        eps = h / 10
        g_up = u.gradient_at(mids + [0.0, eps])
        g_dn = u.gradient_at(mids - [0.0, eps])
        gam_up, gam_dn = a.value_for(2), a.value_for(1)
        tang = np.abs(g_up[:, 0] - g_dn[:, 0]).mean()
        flux = np.abs(gam_up * g_up[:, 1] - gam_dn * g_dn[:, 1]).mean()
        return tang, flux

    t1, f1 = jumps(1 / 16)
    t2, f2 = jumps(1 / 32)
    assert t1 <= 1e-10 and t2 <= 1e-10
    assert f2 <= f1 / 1.5


def test_caccioppoli_trivial_and_linear():
    p = el.build_partition(1)
    m = el.generate_mesh(p, 1 / 32)
    const = field_from_function(m, lambda x, y: np.full_like(x, 2.0 + 1.0j, dtype=complex))
    assert caccioppoli_ratio(const, (0.5, 0.5), 0.2, 0.4) == 0.0
    zero = field_from_function(m, lambda x, y: np.zeros_like(x, dtype=complex))
    assert caccioppoli_ratio(zero, (0.5, 0.5), 0.2, 0.4) == 0.0
    lin = field_from_function(m, lambda x, y: (x - 0.5) + 0j)
    # exact integrals of a linear field: (R-rho)^2 * (pi rho^2) / (pi R^4 / 4)
    got = caccioppoli_ratio(lin, (0.5, 0.5), 0.25, 0.5, depth=8)
    assert got == pytest.approx(0.25, abs=1e-3)


def test_caccioppoli_errors():
    p = el.build_partition(1)
    m = el.generate_mesh(p, 1 / 16)
    u = field_from_function(m, lambda x, y: x + 0j)
    with pytest.raises(ValueError):
        caccioppoli_ratio(u, (0.5, 0.5), 0.4, 0.2)
    with pytest.raises(GeometryError):
        caccioppoli_ratio(u, (0.9, 0.9), 0.1, 0.5)


def test_caccioppoli_harmonic_suite_stable(rng):
    p = el.build_partition(1)
    ratios = {}
    for h in [1 / 16, 1 / 32]:
        m = el.generate_mesh(p, h)
        rng_local = np.random.default_rng(5)
        vals = []
        for _ in range(15):
            u = random_harmonic_polynomial(rng_local, 4, center=(0.5, 0.5))
            fld = field_from_function(m, u)
            vals.append(caccioppoli_ratio(fld, (0.5, 0.5), 0.15, 0.3, depth=6))
        ratios[h] = max(vals)
    assert np.isfinite(ratios[1 / 16]) and np.isfinite(ratios[1 / 32])
    assert ratios[1 / 16] == pytest.approx(ratios[1 / 32], rel=0.1)


def test_field_csv_export(tmp_path):
    p = el.build_partition(1)
    m = el.generate_mesh(p, 1 / 4)
    u = solve_dirichlet(m, Admittivity([1.0]), lambda x, y: x + 1j * y)
    path = tmp_path / "sol.csv"
    u.to_csv(path)
    lines = path.read_text().splitlines()
    assert lines[0] == "node_index,x,y,re_u,im_u"
    assert len(lines) == 1 + m.n_nodes
