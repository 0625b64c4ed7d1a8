"""Singular solutions with prescribed point sources, probe integrals, and the
interior/boundary energy identity.

A singular solution is the two-phase kernel of the interface nearest the
source plus a finite-energy corrector: G(., y) = Gamma_l(., y) + w(., y).
The corrector solves

    div(gamma grad w) = -div(gtilde grad Gamma_l),   w = -Gamma_l on the
    outer boundary,

where gtilde is the coefficient minus its two-phase approximation, so the
right-hand side vanishes identically on the two strips adjacent to the
source and all integrands are smooth where they matter.  The weak defining
property  sum gamma grad G . grad phi = phi(y)  is testable with a plateau
bump and is exercised in the tests.

Probe integrals S_k pair the gradients of two singular solutions (bilinear,
no conjugation) over the unexplored strips above depth k.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import dblquad

from .dtn import apply_dtn
from .forward import Admittivity, FemSystem, FieldSolution, assemble, solve_dirichlet
from .fundsol import TwoPhaseCoeffs, laplace_gamma, laplace_gamma_grad, \
    two_phase_gamma, two_phase_gamma_grad
from .geometry import GeometryError, Mesh, Partition, Rect, Region, generate_mesh
from .quadrature import TRI7_W, clipped_quadrature, tri7_points

__all__ = [
    "PlacementError",
    "MeshMismatchError",
    "SingularSolution",
    "CorrectorSolver",
    "default_link",
    "green_correction",
    "asymptotics_check",
    "AsymptoticsRow",
    "s_k_evaluate",
    "s_k_on_grid",
    "probe_field_residual",
    "alessandrini_pair",
    "half_space_probe_integral",
    "half_space_probe_rate",
]


class PlacementError(ValueError):
    """Source point violates the placement rules for singular solutions."""


class MeshMismatchError(ValueError):
    """Operands built over different meshes."""


def default_link(p: Partition, y) -> int:
    """Index of the nearest interface carrying a genuine region pair."""
    yy = float(y[1])
    best, dist = None, math.inf
    for s in p.interfaces:
        if s.below is None:
            continue
        d = abs(yy - s.y)
        if d < dist:
            best, dist = s.index, d
    if best is None:
        raise PlacementError("partition has no interface with regions on both sides")
    return best


@dataclass
class SingularSolution:
    """Evaluator for G = Gamma_l + w and its gradient."""

    y: np.ndarray
    link: int | None
    coeffs: TwoPhaseCoeffs | None     # None: uniform medium around the source
    iface_y: float
    uniform_gamma: complex
    w: FieldSolution
    mesh: Mesh
    adm: Admittivity

    def _local(self, points: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        pts = np.atleast_2d(np.asarray(points, dtype=float)).copy()
        pts[:, 1] -= self.iface_y
        ysrc = np.array([self.y[0], self.y[1] - self.iface_y])
        return pts, ysrc

    def kernel(self, points) -> np.ndarray:
        """Two-phase kernel part Gamma_l(points, y)."""
        pts, ysrc = self._local(points)
        if self.coeffs is None:
            vals = laplace_gamma(pts, ysrc, n=2) / self.uniform_gamma
        else:
            vals = two_phase_gamma(pts, ysrc, self.coeffs, n=2)
        return vals if np.ndim(points) > 1 else vals[0]

    def kernel_grad(self, points) -> np.ndarray:
        pts, ysrc = self._local(points)
        if self.coeffs is None:
            g = laplace_gamma_grad(pts, ysrc, n=2) / self.uniform_gamma
        else:
            g = two_phase_gamma_grad(pts, ysrc, self.coeffs, n=2)
        return g if np.ndim(points) > 1 else g[0]

    def evaluate(self, points) -> np.ndarray:
        return self.kernel(points) + self.w.interpolate(points)

    def gradient(self, points) -> np.ndarray:
        return self.kernel_grad(points) + self.w.gradient_at(points)

    def h1_energy_excluding_ball(self, r: float, depth: int = 6) -> float:
        """Squared H1 norm of G over the domain minus the ball B_r(y)."""
        mesh = self.mesh
        tp = mesh.tri_points()
        w_vals = self.w.values[mesh.triangles]
        w_grads = self.w.gradients()

        def density(points, parents):
            gk = self.kernel_grad(points)
            vk = self.kernel(points)
            p0 = tp[parents, 0]
            gw = w_grads[parents]
            vw = w_vals[parents, 0] + ((points - p0) * gw).sum(axis=1)
            grad2 = np.abs(gk + gw) ** 2
            return grad2.sum(axis=1) + np.abs(vk + vw) ** 2

        total = clipped_quadrature(tp, density, self.y, r, inside=False, depth=depth)
        return float(np.sqrt(np.real(total)))


class CorrectorSolver:
    """Factorizes one admittivity once and serves many source points."""

    def __init__(self, mesh: Mesh, adm: Admittivity, system: FemSystem | None = None):
        self.mesh = mesh
        self.adm = adm
        self.system = system if system is not None else assemble(mesh, adm)
        self._qpts = tri7_points(mesh.tri_points())      # (nt, 7, 2)
        self._elem_gamma = adm.element_values(mesh)

    def _check_placement(self, y: np.ndarray) -> None:
        mesh = self.mesh
        if np.min(np.linalg.norm(mesh.nodes - y[None, :], axis=1)) < 1e-10:
            raise PlacementError("source must not coincide with a mesh node")
        p = mesh.partition
        if p is None:
            return
        for s in p.interfaces:
            if abs(y[1] - s.y) < 1e-12:
                raise PlacementError(f"source lies on interface {s.index}")
        if not p.chain_set_contains(y):
            raise PlacementError(f"source {tuple(y)} lies outside the probe set K")

    def correction(self, y, link: int | None = None,
                   check_placement: bool = True) -> SingularSolution:
        y = np.asarray(y, dtype=float)
        mesh, adm = self.mesh, self.adm
        if check_placement:
            self._check_placement(y)

        p = mesh.partition
        if p is None or (link is None and adm.n == 1 and not (p and p.with_extension)):
            # uniform single-region domain (e.g. the disk): no interface pair
            region = 1 if p is None else p.region_of_point(y)
            gamma_y = adm.value_for(region)
            coeffs, iface_y = None, 0.0
        else:
            if link is None:
                link = default_link(p, y)
            s = p.interface_by_index(link)
            if s.below is None:
                raise PlacementError(
                    f"interface {link} has no region below it; extend the domain")
            region_y = p.region_of_point(y)
            if region_y not in (s.below, s.above):
                raise PlacementError(
                    f"source region {region_y} is not adjacent to interface {link}")
            coeffs = TwoPhaseCoeffs(adm.value_for(s.above), adm.value_for(s.below))
            iface_y = s.y
            gamma_y = adm.value_for(region_y)

        sol = SingularSolution(y=y, link=link, coeffs=coeffs, iface_y=iface_y,
                               uniform_gamma=gamma_y, w=None, mesh=mesh, adm=adm)

        # gtilde: coefficient minus its two-phase (or uniform) approximation
        cen = mesh.centroids()
        if coeffs is None:
            approx = np.full(mesh.n_triangles, gamma_y, dtype=complex)
        else:
            approx = np.where(cen[:, 1] > iface_y, coeffs.gamma_plus, coeffs.gamma_minus)
        gtilde = self._elem_gamma - approx

        b = np.zeros(mesh.n_nodes, dtype=complex)
        active = np.abs(gtilde) > 0
        if np.any(active):
            qp = self._qpts[active]                       # (m, 7, 2)
            gk = sol.kernel_grad(qp.reshape(-1, 2)).reshape(-1, 7, 2)
            from .forward import _p1_grads
            area, grads = _p1_grads(mesh)
            # b_i = -sum_T gtilde_T area_T sum_q w_q grad Gamma_l(x_q) . grad phi_i
            contrib = -np.einsum("m,m,mqd,q,mid->mi",
                                 gtilde[active], area[active], gk, TRI7_W,
                                 grads[active])
            np.add.at(b, mesh.triangles[active].ravel(), contrib.ravel())

        bnodes = mesh.boundary_nodes
        trace = -sol.kernel(mesh.nodes[bnodes])
        A = self.system.matrix
        ii = self.system.interior
        wvec = np.zeros(mesh.n_nodes, dtype=complex)
        wvec[bnodes] = trace
        rhs = b[ii] - A[np.ix_(ii, bnodes)] @ trace
        wvec[ii] = self.system.lu.solve(rhs)
        resid = A @ wvec - b
        scale = max(np.abs(wvec).max(), np.abs(b).max(), 1e-300) \
            * np.abs(A.data).max()
        if np.abs(resid[ii]).max() > 1e-8 * scale:
            raise RuntimeError("corrector solve produced an unacceptable residual")
        sol.w = FieldSolution(mesh=mesh, values=wvec, trace=trace, adm=adm)
        return sol


def green_correction(mesh: Mesh, adm: Admittivity, y, link: int | None = None,
                     solver: CorrectorSolver | None = None,
                     check_placement: bool = True) -> SingularSolution:
    """Singular solution G(., y) = Gamma_l(., y) + w for a source y in K."""
    sv = solver if solver is not None else CorrectorSolver(mesh, adm)
    return sv.correction(y, link=link, check_placement=check_placement)


@dataclass(frozen=True)
class AsymptoticsRow:
    r: float
    deviation: float
    grad_deviation: float


def asymptotics_check(solver: CorrectorSolver, link: int, radii,
                      P=None, lateral_shift: float | None = None):
    """Deviation of G from its cross-interface limit profile at dyadic radii.

    For each radius r the source sits at P - r*nu below the interface and the
    evaluation point at P + r*nu above it (nu is the upward unit normal); the
    deviation is |G - c Gamma| with c = 2/(gamma_below + gamma_above), and the
    gradient deviation its gradient analogue.  Returns (rows, slope, verdict)
    where slope fits log(deviation) against log(r) and the verdict is
    "bounded" when no monotone blow-up is present (slope >= -0.1).
    """
    p = solver.mesh.partition
    if p is None:
        raise GeometryError("asymptotics requires a strip partition")
    s = p.interface_by_index(link)
    if s.below is None:
        raise PlacementError(f"interface {link} has no region below it")
    radii = np.asarray(sorted(radii, reverse=True), dtype=float)
    if np.any(radii >= p.r0 / 2) or np.any(radii <= 0):
        raise GeometryError(
            f"radii must lie in (0, r0/2) = (0, {p.r0 / 2}) so both probe "
            "points stay inside the strips adjacent to the interface")

    if P is None:
        shift = 0.31 * solver.mesh.h if lateral_shift is None else lateral_shift
        P = (s.point[0] + shift, s.point[1])
    P = np.asarray(P, dtype=float)
    c = 2.0 / (solver.adm.value_for(s.below) + solver.adm.value_for(s.above))

    rows = []
    for r in radii:
        ybar = P - np.array([0.0, r])
        xbar = P + np.array([0.0, r])
        g = solver.correction(ybar, link=link)
        dev = abs(g.evaluate(xbar[None, :])[0] - c * laplace_gamma(xbar, ybar, n=2))
        gdev = float(np.linalg.norm(
            g.gradient(xbar[None, :])[0] - c * laplace_gamma_grad(xbar, ybar, n=2)))
        rows.append(AsymptoticsRow(float(r), float(dev), gdev))

    devs = np.array([max(row.deviation, 1e-300) for row in rows])
    if np.all(devs <= 1e-14):
        slope = 0.0
    else:
        slope = float(np.polyfit(np.log(radii), np.log(devs), 1)[0])
    verdict = "bounded" if slope >= -0.1 else "blow-up"
    return rows, slope, verdict


def _u_labels(mesh: Mesh, k: int) -> set[int]:
    p = mesh.partition
    if p is None:
        raise GeometryError("probe integrals require a strip partition")
    if not 0 <= k <= p.n_strips:
        raise ValueError(f"chain depth k must lie in [0, {p.n_strips}]")
    return p.u_labels(k)


def s_k_evaluate(g1: SingularSolution, g2: SingularSolution, k: int) -> complex:
    """Probe integral over the unexplored strips above depth k.

    Bilinear pairing (no conjugation) of the coefficient difference with the
    two singular-solution gradients; both solutions must share one mesh and
    neither source may sit inside the integration region.
    """
    if g1.mesh is not g2.mesh:
        raise MeshMismatchError("probe operands live on different meshes")
    mesh = g1.mesh
    labels = _u_labels(mesh, k)
    for g in (g1, g2):
        if mesh.partition.region_of_point(g.y) in labels:
            raise PlacementError("source lies inside the unexplored region")

    diff = g1.adm.element_values(mesh) - g2.adm.element_values(mesh)
    sel = np.isin(mesh.tri_region, sorted(labels)) & (np.abs(diff) > 0)
    if not np.any(sel):
        return 0.0 + 0.0j
    qp = tri7_points(mesh.tri_points()[sel])
    flat = qp.reshape(-1, 2)
    grad1 = g1.kernel_grad(flat).reshape(-1, 7, 2) + g1.w.gradients()[sel][:, None, :]
    grad2 = g2.kernel_grad(flat).reshape(-1, 7, 2) + g2.w.gradients()[sel][:, None, :]
    dots = (grad1 * grad2).sum(axis=2)          # bilinear, no conjugation
    area = mesh.areas()[sel]
    return complex(np.sum(diff[sel] * area * (dots @ TRI7_W)))


def s_k_on_grid(solver1: CorrectorSolver, solver2: CorrectorSolver, k: int,
                z, points, link1=None, link2=None) -> np.ndarray:
    """S_k(y_i, z) for many probe points y_i (shared factorizations).

    Grid points may land on the interface itself: the probe field extends
    continuously there (the kernel branches agree), so placement checks are
    relaxed for the moving source.
    """
    gz = solver2.correction(np.asarray(z, dtype=float), link=link2)
    out = np.empty(len(points), dtype=complex)
    for i, y in enumerate(points):
        gy = solver1.correction(np.asarray(y, dtype=float), link=link1,
                                check_placement=False)
        out[i] = s_k_evaluate(gy, gz, k)
    return out


def _box_partition(p: Partition, box: Rect) -> Partition:
    """Partition of a sub-box inheriting the strip labels it straddles."""
    regions = []
    interfaces = []
    for r in sorted(p.regions, key=lambda r: r.y0):
        lo, hi = max(r.y0, box.y0), min(r.y1, box.y1)
        if hi - lo > 1e-12:
            regions.append(Region(r.label, box.x0, box.x1, lo, hi))
    for s in p.interfaces:
        if box.y0 + 1e-12 < s.y < box.y1 - 1e-12:
            interfaces.append(s)
    if not regions:
        raise GeometryError("box does not meet the partition")
    t = min(r.thickness for r in regions)
    return Partition(domain=box, omega=box, regions=tuple(regions),
                     interfaces=tuple(interfaces), r0=t, L=0.0,
                     A=box.area / t ** 2, n_strips=p.n_strips,
                     with_extension=False)


def probe_field_residual(solver1: CorrectorSolver, solver2: CorrectorSolver,
                         k: int, z, box: Rect, h_box: float,
                         link1=None, link2=None):
    """Weak-divergence residual of y -> S_k(y, z) sampled on a box grid.

    The sampled field is interpolated on a conforming grid of the box and
    tested against every interior hat with the first admittivity's stiffness;
    for the true probe field the residual vanishes under grid refinement.
    Returns (max residual, sampled values, box mesh).
    """
    from .forward import region_stiffness

    p = solver1.mesh.partition
    bp = _box_partition(p, box)
    bmesh = generate_mesh(bp, h_box)
    svals = s_k_on_grid(solver1, solver2, k, z, bmesh.nodes, link1, link2)

    parts = region_stiffness(bmesh)
    A = sum(solver1.adm.value_for(lbl) * parts[lbl].astype(complex) for lbl in parts)
    resid = A @ svals
    interior = bmesh.interior_nodes()
    scale = max(np.abs(svals).max(), 1e-300)
    return float(np.abs(resid[interior]).max() / scale), svals, bmesh


def alessandrini_pair(a1: Admittivity, a2: Admittivity, f1, f2,
                      mesh: Mesh) -> tuple[complex, complex]:
    """Interior bilinear misfit of two solutions vs the boundary pairing.

    lhs = sum over triangles of (gamma1 - gamma2) grad u1 . grad u2 (exact for
    P1 fields); rhs = f1^T (Lam1 - Lam2) f2 through matrix-free DtN actions,
    pairing without conjugation.
    """
    sys1 = assemble(mesh, a1)
    sys2 = assemble(mesh, a2)
    u1 = solve_dirichlet(mesh, a1, f1, system=sys1)
    u2 = solve_dirichlet(mesh, a2, f2, system=sys2)

    diff = a1.element_values(mesh) - a2.element_values(mesh)
    dots = (u1.gradients() * u2.gradients()).sum(axis=1)
    lhs = complex(np.sum(diff * mesh.areas() * dots))

    t1 = u1.trace
    lam1_f2 = apply_dtn(mesh, a1, u2.trace, system=sys1)
    lam2_f2 = (sys2.matrix @ u2.values)[sys2.boundary]
    rhs = complex(t1 @ (lam1_f2 - lam2_f2))
    return lhs, rhs


def half_space_probe_integral(c1: TwoPhaseCoeffs, c2: TwoPhaseCoeffs,
                              jump: complex, r: float, rho0: float) -> complex:
    """3D quadrature of the probe integrand over the upper half-ball.

    The source sits at depth r below the interface, the integration region is
    {|x| < rho0, x_3 > 0}, and the integrand is jump * grad K1 . grad K2 for
    the two two-phase kernels.  Axisymmetry reduces the integral to the
    (radius, height) plane.
    """
    if not (0 < r and 0 < rho0):
        raise ValueError("radius and region size must be positive")
    y = np.array([0.0, 0.0, -float(r)])

    def integrand(rho, z):
        x = np.array([rho, 0.0, z])
        g1 = two_phase_gamma_grad(x, y, c1, n=3)
        g2 = two_phase_gamma_grad(x, y, c2, n=3)
        return 2.0 * np.pi * rho * complex(jump) * (g1 @ g2)

    re, _ = dblquad(lambda rho, z: integrand(rho, z).real, 0.0, rho0,
                    0.0, lambda z: math.sqrt(rho0 ** 2 - z ** 2))
    im, _ = dblquad(lambda rho, z: integrand(rho, z).imag, 0.0, rho0,
                    0.0, lambda z: math.sqrt(rho0 ** 2 - z ** 2))
    return complex(re, im)


def half_space_probe_rate(c1: TwoPhaseCoeffs, c2: TwoPhaseCoeffs, jump: complex,
                          radii, rho0: float):
    """Probe values at several depths plus the log-log slope of |value|."""
    radii = np.asarray(sorted(radii, reverse=True), dtype=float)
    vals = np.array([half_space_probe_integral(c1, c2, jump, r, rho0)
                     for r in radii])
    slope = float(np.polyfit(np.log(radii), np.log(np.abs(vals)), 1)[0])
    return radii, vals, slope
