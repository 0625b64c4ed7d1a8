"""P1 finite elements for div(gamma grad u) = 0 with complex piecewise-constant
coefficients and Dirichlet data.

The stiffness matrix is assembled exactly: the coefficient is constant per
region, so each element contributes its real Laplace stiffness scaled by the
region value, and the global matrix is an affine combination of per-region
real matrices.  Systems are complex symmetric (plain transpose) and solved by
sparse LU on the interior block.

`solve_real_system` re-solves the same problem as the equivalent 2x2 real
system in (Re u, Im u), which is the cross-check used to validate the complex
path, and `caccioppoli_ratio` measures interior gradient energy against
function energy on concentric balls.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

from .geometry import GeometryError, Mesh
from .quadrature import clipped_areas, clipped_quadrature

__all__ = [
    "EllipticityError",
    "SolverError",
    "Admittivity",
    "FieldSolution",
    "region_stiffness",
    "assemble",
    "FemSystem",
    "boundary_trace",
    "solve_dirichlet",
    "solve_real_system",
    "coefficient_tensor",
    "elasticity_quadratic_form",
    "caccioppoli_ratio",
    "field_from_function",
]


class EllipticityError(ValueError):
    """Coefficient outside the admissible set Re(g) >= 1/lambda, |g| <= lambda."""


class SolverError(RuntimeError):
    """Linear solve produced an unacceptable residual."""


@dataclass(frozen=True)
class Admittivity:
    """N complex strip values plus the ellipticity bound.

    The extension strip (region label 0) always carries the value 1.  Strip j
    (label j, 1-based) carries values[j-1].
    """

    values: tuple
    lam: float = 10.0

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(complex(v) for v in self.values))
        if self.lam < 1.0:
            raise EllipticityError(f"ellipticity bound must be >= 1, got {self.lam}")
        for j, g in enumerate(self.values, start=1):
            if g.real < 1.0 / self.lam - 1e-15:
                raise EllipticityError(
                    f"admittivity {j}: Re(gamma) = {g.real} violates the lower "
                    f"ellipticity bound 1/lambda = {1.0 / self.lam}")
            if abs(g) > self.lam + 1e-15:
                raise EllipticityError(
                    f"admittivity {j}: |gamma| = {abs(g)} exceeds lambda = {self.lam}")

    @property
    def n(self) -> int:
        return len(self.values)

    def value_for(self, label: int) -> complex:
        if label == 0:
            return 1.0 + 0.0j
        return self.values[label - 1]

    def element_values(self, mesh: Mesh) -> np.ndarray:
        table = {lbl: self.value_for(lbl) for lbl in np.unique(mesh.tri_region)}
        out = np.empty(mesh.n_triangles, dtype=complex)
        for lbl, g in table.items():
            out[mesh.tri_region == lbl] = g
        return out

    def max_jump(self, other: "Admittivity") -> float:
        """L-infinity distance between two coefficient vectors."""
        if other.n != self.n:
            raise ValueError("admittivities have different strip counts")
        return float(max(abs(a - b) for a, b in zip(self.values, other.values)))


def _p1_grads(mesh: Mesh):
    """Per-triangle constant gradients of the three hat functions."""
    if "p1" in mesh._cache:
        return mesh._cache["p1"]
    pts = mesh.tri_points()
    x, y = pts[..., 0], pts[..., 1]
    det = ((x[:, 1] - x[:, 0]) * (y[:, 2] - y[:, 0])
           - (x[:, 2] - x[:, 0]) * (y[:, 1] - y[:, 0]))
    area = 0.5 * det
    b = np.stack([y[:, 1] - y[:, 2], y[:, 2] - y[:, 0], y[:, 0] - y[:, 1]], axis=1)
    c = np.stack([x[:, 2] - x[:, 1], x[:, 0] - x[:, 2], x[:, 1] - x[:, 0]], axis=1)
    grads = np.stack([b, c], axis=2) / det[:, None, None]   # (nt, 3, 2)
    mesh._cache["p1"] = (area, grads)
    return area, grads


def region_stiffness(mesh: Mesh) -> dict[int, sp.csr_matrix]:
    """Real Laplace stiffness restricted to each region label."""
    if "region_stiffness" in mesh._cache:
        return mesh._cache["region_stiffness"]
    area, grads = _p1_grads(mesh)
    n = mesh.n_nodes
    out = {}
    for lbl in np.unique(mesh.tri_region):
        sel = mesh.tri_region == lbl
        tri = mesh.triangles[sel]
        loc = np.einsum("t,tid,tjd->tij", area[sel], grads[sel], grads[sel])
        rows = np.repeat(tri, 3, axis=1).ravel()
        cols = np.tile(tri, (1, 3)).ravel()
        out[int(lbl)] = sp.csr_matrix((loc.ravel(), (rows, cols)), shape=(n, n))
    mesh._cache["region_stiffness"] = out
    return out


class FemSystem:
    """Assembled complex-symmetric stiffness with a factorized interior block."""

    def __init__(self, mesh: Mesh, adm: Admittivity):
        self.mesh = mesh
        self.adm = adm
        parts = region_stiffness(mesh)
        labels = set(np.unique(mesh.tri_region).tolist())
        expected = set(range(0, adm.n + 1)) if 0 in labels else set(range(1, adm.n + 1))
        if labels != expected:
            raise GeometryError(
                f"mesh region labels {sorted(labels)} do not match an "
                f"{adm.n}-strip admittivity")
        A = sum(adm.value_for(lbl) * parts[lbl].astype(complex) for lbl in sorted(labels))
        self.matrix = A.tocsr()
        self.boundary = mesh.boundary_nodes
        self.interior = mesh.interior_nodes()
        self._lu = None

    @property
    def lu(self):
        if self._lu is None:
            ii = self.interior
            self._lu = splu(self.matrix[np.ix_(ii, ii)].tocsc())
        return self._lu

    def solve(self, trace) -> "FieldSolution":
        f = np.asarray(trace, dtype=complex)
        if f.shape != self.boundary.shape:
            raise ValueError("trace length does not match the boundary node count")
        u = np.zeros(self.mesh.n_nodes, dtype=complex)
        u[self.boundary] = f
        rhs = -(self.matrix[np.ix_(self.interior, self.boundary)] @ f)
        u[self.interior] = self.lu.solve(rhs)
        sol = FieldSolution(mesh=self.mesh, values=u, trace=f, adm=self.adm)
        res = sol.interior_residual(self.matrix, self.interior)
        if res > 1e-8:
            raise SolverError(
                f"interior residual {res:.3e} exceeds tolerance; system may be "
                "ill-conditioned (check the ellipticity bound)")
        return sol


def assemble(mesh: Mesh, adm: Admittivity) -> FemSystem:
    """Stiffness system for the given mesh and admittivity."""
    return FemSystem(mesh, adm)


def boundary_trace(mesh: Mesh, fn) -> np.ndarray:
    """Trace vector (in boundary order) of a callable fn(x, y)."""
    pts = mesh.nodes[mesh.boundary_nodes]
    return np.asarray(fn(pts[:, 0], pts[:, 1]), dtype=complex)


def solve_dirichlet(mesh: Mesh, adm: Admittivity, f, system: FemSystem | None = None):
    """Solve the Dirichlet problem; `f` is a trace vector or a callable."""
    sys_ = system if system is not None else assemble(mesh, adm)
    trace = boundary_trace(mesh, f) if callable(f) else np.asarray(f, dtype=complex)
    return sys_.solve(trace)


def solve_real_system(mesh: Mesh, adm: Admittivity, f) -> "FieldSolution":
    """Solve the equivalent 2x2 real system for (Re u, Im u).

    The real part satisfies div(sigma grad u1 - eps grad u2) = 0 and the
    imaginary part div(eps grad u1 + sigma grad u2) = 0, which is the block
    system [[Ks, -Ke], [Ke, Ks]] on stacked real unknowns.
    """
    parts = region_stiffness(mesh)
    labels = sorted(np.unique(mesh.tri_region).tolist())
    Ks = sum(adm.value_for(lbl).real * parts[lbl] for lbl in labels)
    Ke = sum(adm.value_for(lbl).imag * parts[lbl] for lbl in labels)
    A = sp.bmat([[Ks, -Ke], [Ke, Ks]], format="csr")

    n = mesh.n_nodes
    bnodes = mesh.boundary_nodes
    trace = boundary_trace(mesh, f) if callable(f) else np.asarray(f, dtype=complex)
    bdof = np.concatenate([bnodes, bnodes + n])
    bval = np.concatenate([trace.real, trace.imag])
    mask = np.ones(2 * n, dtype=bool)
    mask[bdof] = False
    idof = np.nonzero(mask)[0]

    u = np.zeros(2 * n)
    u[bdof] = bval
    rhs = -(A[np.ix_(idof, bdof)] @ bval)
    u[idof] = splu(A[np.ix_(idof, idof)].tocsc()).solve(rhs)
    return FieldSolution(mesh=mesh, values=u[:n] + 1j * u[n:], trace=trace, adm=adm)


def coefficient_tensor(gamma: complex) -> np.ndarray:
    """Rank-4 coefficient c[l, j, h, k] of the equivalent real system."""
    sigma, eps = complex(gamma).real, complex(gamma).imag
    c = np.zeros((2, 2, 2, 2))
    for l in range(2):
        for j in range(2):
            for h in range(2):
                for k in range(2):
                    val = sigma * (h == k) * (l == j)
                    val -= eps * (h == k) * ((l == 0) * (j == 1) - (l == 1) * (j == 0))
                    c[l, j, h, k] = val
    return c


def elasticity_quadratic_form(gamma: complex, xi: np.ndarray) -> float:
    """Quadratic form c_{lj}^{hk} xi^l_h xi^j_k for a 2x2 real matrix xi."""
    c = coefficient_tensor(gamma)
    return float(np.einsum("ljhk,lh,jk->", c, xi, xi))


@dataclass
class FieldSolution:
    """Complex nodal field over a mesh plus the data that produced it."""

    mesh: Mesh
    values: np.ndarray
    trace: np.ndarray | None = None
    adm: Admittivity | None = None
    _grads: np.ndarray | None = field(default=None, repr=False)

    def interior_residual(self, matrix, interior) -> float:
        r = matrix @ self.values
        scale = max(np.abs(self.values).max(), 1e-300) * max(np.abs(matrix.data).max(), 1e-300)
        return float(np.abs(r[interior]).max() / scale)

    def gradients(self) -> np.ndarray:
        """Per-triangle constant gradient, shape (nt, 2), complex."""
        if self._grads is None:
            _, grads = _p1_grads(self.mesh)
            vals = self.values[self.mesh.triangles]      # (nt, 3)
            self._grads = np.einsum("ti,tid->td", vals, grads)
        return self._grads

    def _locate(self, points: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Containing triangle and barycentric coordinates for each point."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        tp = self.mesh.tri_points()
        tri_idx = np.empty(len(pts), dtype=np.int64)
        bary_out = np.empty((len(pts), 3))
        # signed-area barycentric against all triangles, chunked over points
        x0, y0 = tp[:, 0, 0], tp[:, 0, 1]
        e1 = tp[:, 1] - tp[:, 0]
        e2 = tp[:, 2] - tp[:, 0]
        det = e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0]
        for start in range(0, len(pts), 256):
            chunk = pts[start:start + 256]
            dx = chunk[:, None, 0] - x0[None, :]
            dy = chunk[:, None, 1] - y0[None, :]
            l1 = (dx * e2[None, :, 1] - dy * e2[None, :, 0]) / det[None, :]
            l2 = (dy * e1[None, :, 0] - dx * e1[None, :, 1]) / det[None, :]
            l0 = 1.0 - l1 - l2
            viol = np.minimum(np.minimum(l0, l1), l2)
            best = viol.argmax(axis=1)
            rows = np.arange(len(chunk))
            if np.any(viol[rows, best] < -1e-9):
                raise GeometryError("point outside the meshed domain")
            tri_idx[start:start + 256] = best
            bary_out[start:start + 256] = np.stack(
                [l0[rows, best], l1[rows, best], l2[rows, best]], axis=1)
        return tri_idx, np.clip(bary_out, 0.0, 1.0)

    def interpolate(self, points) -> np.ndarray:
        tri_idx, bary = self._locate(points)
        vals = self.values[self.mesh.triangles[tri_idx]]
        out = np.einsum("pi,pi->p", bary, vals)
        return out[0] if np.ndim(points) == 1 else out

    def gradient_at(self, points) -> np.ndarray:
        tri_idx, _ = self._locate(points)
        g = self.gradients()[tri_idx]
        return g[0] if np.ndim(points) == 1 else g

    def to_csv(self, path_or_buf) -> None:
        """Rows `node_index, x, y, re_u, im_u`."""
        buf = path_or_buf if hasattr(path_or_buf, "write") else io.StringIO()
        buf.write("node_index,x,y,re_u,im_u\n")
        for i, ((x, y), v) in enumerate(zip(self.mesh.nodes, self.values)):
            buf.write(f"{i},{x!r},{y!r},{v.real!r},{v.imag!r}\n")
        if buf is not path_or_buf:
            with open(path_or_buf, "w", encoding="ascii", newline="\n") as f:
                f.write(buf.getvalue())


def field_from_function(mesh: Mesh, fn, adm: Admittivity | None = None) -> FieldSolution:
    """Nodal interpolant of a callable fn(x, y) (vectorized)."""
    vals = np.asarray(fn(mesh.nodes[:, 0], mesh.nodes[:, 1]), dtype=complex)
    return FieldSolution(mesh=mesh, values=vals,
                         trace=vals[mesh.boundary_nodes], adm=adm)


def caccioppoli_ratio(u: FieldSolution, x0, rho: float, R: float,
                      depth: int = 8) -> float:
    """(R - rho)^2 * grad energy on B_rho / function energy on B_R.

    Both balls must sit inside the meshed domain and rho < R.  For a field
    that solves the equation on B_R the ratio is bounded by a constant that
    depends only on the ellipticity bound; the suite records the empirical
    maximum.  Returns 0 for the identically-zero field.
    """
    if not rho < R:
        raise ValueError(f"need rho < R, got rho={rho}, R={R}")
    if not u.mesh.contains_ball(x0, R):
        raise GeometryError(f"ball of radius {R} at {tuple(x0)} leaves the domain")

    tp = u.mesh.tri_points()
    c = np.asarray(x0, dtype=float)
    # quick reject: triangles that cannot meet B_R
    near = np.linalg.norm(u.mesh.centroids() - c[None, :], axis=1) <= R + 2.5 * u.mesh.h
    grads2 = np.abs(u.gradients()[near]) ** 2
    grad_density = grads2.sum(axis=1)
    num = float(np.sum(grad_density * clipped_areas(tp[near], c, rho, depth=depth)))

    tri_sel = np.nonzero(near)[0]
    nodes_vals = u.values[u.mesh.triangles]

    def abs2(points, parents):
        orig = tri_sel[parents]
        p0 = tp[orig, 0]
        g = u.gradients()[orig]
        v0 = nodes_vals[orig, 0]
        vals = v0 + ((points - p0) * g).sum(axis=1)
        return np.abs(vals) ** 2

    den = float(np.real(clipped_quadrature(tp[near], abs2, c, R, inside=True,
                                           depth=depth,
                                           parents=np.arange(len(tri_sel)))))
    if den == 0.0:
        return 0.0
    return (R - rho) ** 2 * num / den
