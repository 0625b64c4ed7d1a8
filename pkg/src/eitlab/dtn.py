"""Discrete Dirichlet-to-Neumann maps and fractional boundary norms.

The DtN matrix is the Schur complement of the complex-symmetric stiffness
onto the boundary nodes, taken in the counterclockwise trace ordering; entry
(p, q) is the energy pairing of the hat trace at q against the hat trace at
p.  Fractional Sobolev norms on the boundary come from the generalized
eigenpairs of the 1D boundary mass/stiffness pencil: W_s = M V (I + D)^s V^T M
with B V = M V D, so W_0 = M and W_1 = M + B.

The operator norm of a DtN difference is the largest singular value of
L^{-1} Delta L^{-T} for the Cholesky factor W_{1/2} = L L^T, which realizes
the sup of |<Delta f, conj(psi)>| over unit fractional-norm trace vectors.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .forward import Admittivity, FemSystem, assemble
from .geometry import Mesh, mesh_hash

__all__ = [
    "DtNMap",
    "boundary_operators",
    "dtn_matrix",
    "apply_dtn",
    "h_half_gram",
    "operator_norm",
    "local_dtn",
]


@dataclass
class DtNMap:
    """Boundary operator matrix plus the discrete boundary Gram structure."""

    matrix: np.ndarray       # complex symmetric, boundary trace basis
    mass: np.ndarray         # boundary mass M (SPD)
    stiffness: np.ndarray    # boundary 1D Laplace-Beltrami B (PSD)
    mesh_hash: str = ""
    h: float = 0.0
    _gram_half: np.ndarray | None = None

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    def gram_half(self) -> np.ndarray:
        if self._gram_half is None:
            self._gram_half = h_half_gram(self.mass, self.stiffness, 0.5)
        return self._gram_half

    def norm_of_difference(self, other: "DtNMap") -> float:
        if other.matrix.shape != self.matrix.shape:
            raise ValueError("DtN maps of different sizes")
        return operator_norm(self.matrix - other.matrix, self.gram_half())

    def to_csv(self, path) -> None:
        """Dense export: re/im interleaved DtN, then M, then B."""
        n = self.n
        with open(path, "w", encoding="ascii", newline="\n") as f:
            f.write(f"# dtn v1 n={n} mesh={self.mesh_hash} h={self.h!r}\n")
            f.write(",".join(
                x for p in range(n) for x in (f"re_{p}", f"im_{p}")) + "\n")
            for row in self.matrix:
                f.write(",".join(f"{v.real!r},{v.imag!r}" for v in row) + "\n")
            f.write("# mass\n")
            for row in self.mass:
                f.write(",".join(repr(float(v)) for v in row) + "\n")
            f.write("# stiffness\n")
            for row in self.stiffness:
                f.write(",".join(repr(float(v)) for v in row) + "\n")


def boundary_operators(mesh: Mesh) -> tuple[np.ndarray, np.ndarray]:
    """Mass and 1D Laplace-Beltrami stiffness on the closed boundary loop."""
    bn = mesh.boundary_nodes
    nb = len(bn)
    pts = mesh.nodes[bn]
    ell = np.linalg.norm(np.roll(pts, -1, axis=0) - pts, axis=1)
    M = np.zeros((nb, nb))
    B = np.zeros((nb, nb))
    for i in range(nb):
        j = (i + 1) % nb
        le = ell[i]
        M[i, i] += le / 3.0
        M[j, j] += le / 3.0
        M[i, j] += le / 6.0
        M[j, i] += le / 6.0
        B[i, i] += 1.0 / le
        B[j, j] += 1.0 / le
        B[i, j] -= 1.0 / le
        B[j, i] -= 1.0 / le
    return M, B


def dtn_matrix(mesh: Mesh, adm: Admittivity,
               system: FemSystem | None = None) -> DtNMap:
    """Schur complement of the stiffness onto the boundary trace basis."""
    sys_ = system if system is not None else assemble(mesh, adm)
    A = sys_.matrix
    bb = sys_.boundary
    ii = sys_.interior
    A_ib = A[np.ix_(ii, bb)].toarray()
    X = sys_.lu.solve(A_ib)
    lam = A[np.ix_(bb, bb)].toarray() - A[np.ix_(bb, ii)] @ X
    M, B = boundary_operators(mesh)
    return DtNMap(matrix=lam, mass=M, stiffness=B,
                  mesh_hash=mesh_hash(mesh), h=mesh.h)


def apply_dtn(mesh: Mesh, adm: Admittivity, trace,
              system: FemSystem | None = None) -> np.ndarray:
    """Matrix-free DtN action: boundary residual of the harmonic lifting."""
    sys_ = system if system is not None else assemble(mesh, adm)
    u = sys_.solve(np.asarray(trace, dtype=complex))
    return (sys_.matrix @ u.values)[sys_.boundary]


def h_half_gram(M: np.ndarray, B: np.ndarray, s: float) -> np.ndarray:
    """Gram matrix of the order-s boundary norm, s in [-1, 1].

    Spectral definition through the pencil B V = M V diag(d) with V^T M V = I:
    W_s = M V (I + diag(d))^s V^T M.  s=0 returns M, s=1 returns M + B.
    """
    if not -1.0 <= s <= 1.0:
        raise ValueError(f"order s must lie in [-1, 1], got {s}")
    try:
        d, V = sla.eigh(B, M)
    except sla.LinAlgError as exc:   # pragma: no cover - guarded by SPD mass
        raise RuntimeError(f"boundary eigenproblem failed: {exc}") from exc
    d = np.maximum(d, 0.0)           # B is PSD; clip eigen roundoff
    core = V @ np.diag((1.0 + d) ** s) @ V.T
    W = M @ core @ M
    return 0.5 * (W + W.T)


def operator_norm(delta: np.ndarray, W_half: np.ndarray) -> float:
    """Largest singular value of L^{-1} delta L^{-T}, W_half = L L^T."""
    try:
        L = sla.cholesky(W_half, lower=True)
    except sla.LinAlgError as exc:
        raise ValueError("fractional Gram matrix is not positive definite") from exc
    t1 = sla.solve_triangular(L, delta, lower=True)
    core = sla.solve_triangular(L, t1.T, lower=True).T
    return float(sla.svdvals(core)[0])


def local_dtn(d: DtNMap, arc: np.ndarray) -> DtNMap:
    """Restriction to a contiguous boundary arc (positions in trace order).

    The restricted map is the principal submatrix on the arc's interior
    nodes, paired with the correspondingly restricted mass and stiffness; its
    Gram encodes traces supported on the arc (zero beyond the endpoints).
    """
    arc = np.asarray(arc, dtype=int)
    if arc.ndim != 1 or len(arc) == 0:
        raise ValueError("arc must be a nonempty 1D index array")
    n = d.n
    steps = np.mod(np.diff(arc), n)
    if np.any(steps != 1):
        raise ValueError("arc positions must be contiguous in the cyclic trace order")
    interior = arc[1:-1]
    if len(interior) == 0:
        raise ValueError("arc has no interior nodes")
    sub = np.ix_(interior, interior)
    return DtNMap(matrix=d.matrix[sub], mass=d.mass[sub],
                  stiffness=d.stiffness[sub], mesh_hash=d.mesh_hash, h=d.h)
