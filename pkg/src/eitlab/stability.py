"""Quantitative stability toolbox: the log-modulus calculus, chained bound
recursion, three-sphere checks, DtN sensitivity, and Gauss-Newton inversion.

The modulus omega(t) = |log t|^(-(n-2)/4) (capped at its value in t = e^-n)
measures how much information survives one interface crossing; composing it
M times and inverting produces stability constants of size exp(exp(...)),
which is why all constant arithmetic here runs on an iterated-exponential
representation rather than raw floats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from .dtn import boundary_operators, dtn_matrix, h_half_gram, operator_norm
from .forward import Admittivity, assemble, region_stiffness
from .geometry import Mesh

__all__ = [
    "TAU",
    "omega",
    "omega_inverse",
    "omega_inverse_log",
    "omega_iterate",
    "DeltaRecursion",
    "delta_recursion",
    "TowerFloat",
    "ConstantTracker",
    "ConstantBound",
    "constant_bound",
    "three_sphere_check",
    "random_harmonic_polynomial",
    "SensitivityResult",
    "sensitivity_jacobian",
    "ReconstructionResult",
    "gauss_newton_reconstruct",
    "perturb_dtn",
    "worst_case_perturbation",
    "SweepRecord",
    "stability_sweep",
]

TAU = math.log(4.0 / 3.0) / math.log(4.0)


def _check_dim(n: int) -> None:
    if not isinstance(n, int) or n < 3:
        raise ValueError(f"modulus requires dimension n >= 3 (n=2 is degenerate), got {n}")


def omega(t, n: int = 3):
    """Two-branch modulus: |log t|^(-(n-2)/4) for t <= e^-n, capped above."""
    _check_dim(n)
    arr = np.asarray(t, dtype=float)
    if np.any(arr <= 0.0):
        raise ValueError("modulus argument must be positive")
    p = (n - 2) / 4.0
    cap = float(n) ** (-p)
    small = arr < math.exp(-n)
    safe = np.where(small, arr, 0.5)
    out = np.where(small, np.abs(np.log(safe)) ** (-p), cap)
    return float(out) if np.isscalar(t) or np.ndim(t) == 0 else out


def omega_inverse(y, n: int = 3):
    """Inverse on the strictly increasing branch: exp(-y^(-4/(n-2))).

    Underflows to 0.0 for y below roughly 0.19 (n=3); use
    `omega_inverse_log` when the result itself is the quantity of interest.
    """
    return math.exp(omega_inverse_log(y, n))


def omega_inverse_log(y, n: int = 3) -> float:
    _check_dim(n)
    y = float(y)
    cap = float(n) ** (-(n - 2) / 4.0)
    if not 0.0 < y < cap:
        raise ValueError(f"inverse defined on (0, {cap}), got {y}")
    return -y ** (-4.0 / (n - 2))


def omega_iterate(t, k: int, n: int = 3):
    """k-fold self-composition of the modulus."""
    if k < 0:
        raise ValueError("iteration count must be nonnegative")
    out = float(t)
    for _ in range(k):
        out = omega(out, n)
    return out


@dataclass(frozen=True)
class DeltaRecursion:
    """Per-link bound sequence of the chained stability recursion."""

    deltas: tuple          # per-link coefficient bounds, delta_0 = 0
    bounds: tuple          # delta_k + eps in worst-case equality form
    final_bound: float     # last entry of `bounds`
    closed_form: float     # (C+1)^M (E+eps) omega_M(eps/(eps+E))


def delta_recursion(eps: float, E: float, C: float, M: int, n: int = 3) -> DeltaRecursion:
    """Iterate the one-link degradation bound with equality, M links deep.

    One link replaces the normalized data ratio t by omega(t) and the
    amplitude by (C+1) times itself, starting from t_0 = eps/(eps+E) and
    amplitude eps+E; the resulting bound sequence is
    b_k = (C+1)^k (E+eps) omega_k(t_0), reported together with its closed
    form for the cross-check b_M == closed form.
    """
    if eps < 0 or E < 0 or C <= 0 or M < 0:
        raise ValueError("need eps, E >= 0, C > 0, M >= 0")
    if eps == 0.0 and E == 0.0:
        zeros = tuple(0.0 for _ in range(M + 1))
        return DeltaRecursion(zeros, zeros, 0.0, 0.0)

    t = eps / (eps + E)
    amp = eps + E
    bounds = [amp * t]
    for _ in range(M):
        t = omega(t, n) if t > 0.0 else 0.0
        amp *= (C + 1.0)
        bounds.append(amp * t)
    t0 = eps / (eps + E)
    closed = (C + 1.0) ** M * (E + eps) * (omega_iterate(t0, M, n) if t0 > 0 else 0.0)
    deltas = tuple(max(b - eps, 0.0) for b in bounds)
    return DeltaRecursion(deltas, tuple(bounds), bounds[-1], closed)


_CAP = 700.0
_LOG_CAP = math.log(_CAP)


@dataclass(frozen=True)
class TowerFloat:
    """Number exp(exp(...exp(value))) with `depth` nested exponentials.

    Canonical form keeps depth 0 for plainly representable values and
    otherwise value in (log 700, 700], which makes the (depth, value) order
    the number order.  Only the operations needed by the constant tracker
    are provided.
    """

    depth: int
    value: float

    @staticmethod
    def from_float(x: float) -> "TowerFloat":
        return TowerFloat(0, float(x))._canonical()

    def _canonical(self) -> "TowerFloat":
        d, v = self.depth, self.value
        while d > 0 and v <= _LOG_CAP:
            v = math.exp(v)
            d -= 1
        while v > _CAP:
            v = math.log(v)
            d += 1
        return TowerFloat(d, v) if (d, v) != (self.depth, self.value) else self

    def ln(self) -> "TowerFloat":
        c = self._canonical()
        if c.depth >= 1:
            return TowerFloat(c.depth - 1, c.value)._canonical()
        if c.value <= 0:
            raise ValueError("log of a nonpositive tower value")
        return TowerFloat(0, math.log(c.value))

    def exp(self) -> "TowerFloat":
        c = self._canonical()
        return TowerFloat(c.depth + 1, c.value)._canonical()

    def add_float(self, s: float) -> "TowerFloat":
        c = self._canonical()
        if c.depth == 0:
            return TowerFloat.from_float(c.value + s)
        if c.depth == 1:                 # exp(v) still a float (v <= 700)
            return TowerFloat.from_float(math.exp(c.value) + s)
        return c   # additive term vanishes at this magnitude

    def mul(self, a: float) -> "TowerFloat":
        if a <= 0:
            raise ValueError("tower values are positive; factor must be > 0")
        c = self._canonical()
        if c.depth == 0:
            return TowerFloat.from_float(c.value * a)
        return c.ln().add_float(math.log(a)).exp()

    def to_float(self) -> float:
        c = self._canonical()
        if c.depth == 0:
            return c.value
        if c.depth == 1:                 # canonical keeps value <= 700
            return math.exp(c.value)
        return math.inf

    def _key(self):
        c = self._canonical()
        return (c.depth, c.value)

    def __lt__(self, other: "TowerFloat") -> bool:
        return self._key() < other._key()

    def __le__(self, other: "TowerFloat") -> bool:
        return self._key() <= other._key()

    def ge_times(self, other: "TowerFloat", q: float) -> bool:
        """self >= q * other, robust at any magnitude."""
        return other.mul(q)._key() <= self._key()

    def __repr__(self) -> str:
        c = self._canonical()
        if c.depth == 0:
            return f"{c.value!r}"
        return f"exp^{c.depth}({c.value!r})"


@dataclass(frozen=True)
class ConstantTracker:
    """Concrete inputs of the stability-constant calculus.

    The base constant and the sphere-chain count are inputs, not derived
    quantities; when `n1` is omitted it defaults to area/(c_n r1^n) + 1 with
    c_n the unit-ball volume.  The three-sphere exponent tau is fixed by the
    radius pattern (r, 3r, 4r).
    """

    n: int = 3
    c_base: float = 1.0
    delta1: float = 0.5
    r0: float = 1.0
    r1: float | None = None
    area: float = 1.0
    n1: float | None = None

    def __post_init__(self):
        _check_dim(self.n)
        if self.c_base <= 0:
            raise ValueError("base constant must be positive")
        if not 0.0 < self.delta1 < 1.0:
            raise ValueError("delta1 must lie in (0, 1)")
        if self.r1 is None:
            object.__setattr__(self, "r1", self.r0 / 8.0)
        if not 0.0 < self.r1 <= self.r0:
            raise ValueError("need 0 < r1 <= r0")
        if self.n1 is None:
            cn = math.pi ** (self.n / 2.0) / math.gamma(self.n / 2.0 + 1.0)
            object.__setattr__(self, "n1", self.area / (cn * self.r1 ** self.n) + 1.0)
        if self.n1 < 1:
            raise ValueError("sphere-chain count must be at least 1")

    @property
    def tau(self) -> float:
        return TAU

    def tau_r(self, r: float) -> float:
        if not 0.0 < r < self.r1:
            raise ValueError(f"radius must lie in (0, r1) = (0, {self.r1})")
        r1 = self.r1
        return math.log((3 * r1 - r) / (3 * r1 - 2 * r)) / math.log((3 * r1 - r) / r1)

    def mu_log(self, k: int, r: float) -> float:
        """log of the unique-continuation exponent tau^((k+1) n1) delta1^(k+1) tau_r."""
        if k < 0:
            raise ValueError("chain depth must be nonnegative")
        return ((k + 1) * self.n1 * math.log(TAU)
                + (k + 1) * math.log(self.delta1)
                + math.log(self.tau_r(r)))

    def mu(self, k: int, r: float) -> float:
        return math.exp(self.mu_log(k, r))


@dataclass(frozen=True)
class ConstantBound:
    """Stability constant for an N-region chain, held in log10 form."""

    n_regions: int
    log10: TowerFloat

    @property
    def linear(self) -> float:
        return math.pow(10.0, self.log10.to_float()) if self.log10.to_float() < 308 \
            else math.inf

    def __repr__(self) -> str:
        return f"ConstantBound(N={self.n_regions}, log10={self.log10!r})"


def constant_bound(N: int, tracker: ConstantTracker) -> ConstantBound:
    """Theoretical constant 1 / (2 omega_N^{-1}(1/(2(C+1)^N))) in log space.

    With L_j = -log of the j-th inverse iterate, one inversion maps
    L_j = exp(4/(n-2) * L_{j-1}); the result is an exponential tower of
    height N and is returned as a TowerFloat of its log10.
    """
    if N < 1:
        raise ValueError("region count must be at least 1")
    C = tracker.c_base
    n = tracker.n
    p = 4.0 / (n - 2)
    L0 = math.log(2.0) + N * math.log(C + 1.0)
    cap_log = -((n - 2) / 4.0) * math.log(n)
    if -L0 >= cap_log:
        raise ValueError(
            "starting value 1/(2(C+1)^N) is outside the invertible branch")
    L = TowerFloat.from_float(L0)
    for _ in range(N):
        L = L.mul(p).exp()
    ln_bound = L.add_float(-math.log(2.0))
    return ConstantBound(N, ln_bound.mul(1.0 / math.log(10.0)))


def three_sphere_check(u, center, r: float, n_angles: int = 2048):
    """Empirical three-sphere constant of a harmonic sample field.

    Returns sup|u| on the middle sphere divided by the tau-weighted product
    of the inner and outer sups (radii r, 3r, 4r); None when u vanishes.
    For pure angular monomials the ratio is exactly 1 because 4^(1-tau) = 3.
    """
    cx, cy = float(center[0]), float(center[1])
    th = 2 * np.pi * np.arange(n_angles) / n_angles
    cos, sin = np.cos(th), np.sin(th)

    def sup_on(rad: float) -> float:
        vals = u(cx + rad * cos, cy + rad * sin)
        return float(np.abs(vals).max())

    s1, s3, s4 = sup_on(r), sup_on(3 * r), sup_on(4 * r)
    if s4 == 0.0:
        return None
    return s3 / (s1 ** TAU * s4 ** (1.0 - TAU))


def random_harmonic_polynomial(rng: np.random.Generator, max_degree: int,
                               center=(0.0, 0.0)):
    """Random combination of harmonic monomials r^m cos/sin(m theta)."""
    a = rng.standard_normal(max_degree + 1)
    b = rng.standard_normal(max_degree + 1)
    cx, cy = center

    def u(x, y):
        z = (np.asarray(x) - cx) + 1j * (np.asarray(y) - cy)
        out = np.full(np.shape(z), a[0], dtype=float)
        zp = np.ones_like(z)
        for m in range(1, max_degree + 1):
            zp = zp * z
            out = out + a[m] * zp.real + b[m] * zp.imag
        return out

    return u


# --- DtN sensitivity and reconstruction -------------------------------------

def _weighted(L: np.ndarray, Z: np.ndarray) -> np.ndarray:
    t = sla.solve_triangular(L, Z, lower=True)
    return sla.solve_triangular(L, t.T, lower=True).T


def _phi(L: np.ndarray, Z: np.ndarray) -> np.ndarray:
    """Real coordinate vector of Z in the mode-averaged weighted metric.

    The whitened matrix is divided by sqrt(n_boundary): the raw Frobenius
    norm of a whitened DtN block grows like the square root of the mode
    count under refinement (its whitened singular values are O(1) per
    mode), so only the per-mode RMS gives h-stable sensitivities and
    misfits on the scale of the operator norm.
    """
    return _stack_real(_weighted(L, Z)) / math.sqrt(Z.shape[0])


def _dtn_and_columns(mesh: Mesh, adm: Admittivity):
    """DtN matrix and the exact per-strip derivative matrices d Lam / d gamma_j."""
    sys_ = assemble(mesh, adm)
    A = sys_.matrix
    bb, ii = sys_.boundary, sys_.interior
    X = sys_.lu.solve(A[np.ix_(ii, bb)].toarray())
    lam = A[np.ix_(bb, bb)].toarray() - A[np.ix_(bb, ii)] @ X
    parts = region_stiffness(mesh)
    cols = []
    for j in range(1, adm.n + 1):
        K = parts[j]
        Kbb = K[np.ix_(bb, bb)].toarray()
        KbiX = K[np.ix_(bb, ii)] @ X
        KiiX = K[np.ix_(ii, ii)] @ X
        Mj = Kbb - KbiX - KbiX.T + X.T @ KiiX
        cols.append(Mj)
    return lam, cols


def _stack_real(Z: np.ndarray) -> np.ndarray:
    return np.concatenate([Z.real.ravel(), Z.imag.ravel()])


@dataclass
class SensitivityResult:
    columns: list            # d Lam / d gamma_j, complex symmetric, unweighted
    jacobian: np.ndarray     # real (2 nb^2, 2N) in the weighted metric
    sigma_min: float
    sigma_max: float
    gram_half: np.ndarray
    chol: np.ndarray


def sensitivity_jacobian(mesh: Mesh, adm: Admittivity,
                         gram_half: np.ndarray | None = None) -> SensitivityResult:
    """Exact Jacobian of the coefficient-to-DtN map in the weighted metric.

    The stiffness is affine in every strip value, so each derivative matrix
    is the boundary reduction of one strip's real stiffness through the
    current harmonic lifting.  Columns are ordered (Re g_1, Im g_1, Re g_2,
    ...); the smallest singular value is the reciprocal of the local
    Lipschitz constant of the finite-dimensional inverse problem.
    """
    if gram_half is None:
        M, B = boundary_operators(mesh)
        gram_half = h_half_gram(M, B, 0.5)
    L = sla.cholesky(gram_half, lower=True)
    _, cols = _dtn_and_columns(mesh, adm)
    jac_cols = []
    for Mj in cols:
        jac_cols.append(_phi(L, Mj))
        jac_cols.append(_phi(L, 1j * Mj))
    J = np.column_stack(jac_cols)
    sv = sla.svdvals(J)
    if sv[-1] <= 0 or not np.isfinite(sv[-1]):
        raise RuntimeError(
            "rank-deficient sensitivity: discretization too coarse to "
            "separate the strip values")
    return SensitivityResult(columns=cols, jacobian=J, sigma_min=float(sv[-1]),
                             sigma_max=float(sv[0]), gram_half=gram_half, chol=L)


def _project_admissible(vals: np.ndarray, lam: float) -> np.ndarray:
    out = np.array(vals, dtype=complex)
    for _ in range(4):
        out.real = np.maximum(out.real, 1.0 / lam)
        mod = np.abs(out)
        over = mod > lam
        if not np.any(over):
            break
        out[over] *= lam / mod[over]
    out.real = np.maximum(out.real, 1.0 / lam)
    return out


@dataclass
class ReconstructionResult:
    admittivity: Admittivity
    history: list            # rows (iteration, misfit, err_inf or nan)
    converged: bool

    @property
    def iterations(self) -> int:
        return len(self.history) - 1


def gauss_newton_reconstruct(target, mesh: Mesh, guess: Admittivity,
                             max_iter: int = 30, tol: float = 1e-12,
                             truth: Admittivity | None = None,
                             gram_half: np.ndarray | None = None) -> ReconstructionResult:
    """Recover strip values by Gauss-Newton on the weighted DtN misfit.

    `target` is a DtN matrix (or DtNMap) generated on the same mesh; the
    misfit is the Frobenius norm of the whitened difference, the step solves
    the linearized least-squares problem with the exact Jacobian, and every
    iterate is projected back onto the admissible set.
    """
    target_mat = target.matrix if hasattr(target, "matrix") else np.asarray(target)
    if gram_half is None:
        M, B = boundary_operators(mesh)
        gram_half = h_half_gram(M, B, 0.5)
    L = sla.cholesky(gram_half, lower=True)

    lam_bound = guess.lam
    gam = _project_admissible(np.array(guess.values, dtype=complex), lam_bound)
    history = []
    converged = False
    for it in range(max_iter + 1):
        adm_it = Admittivity(tuple(gam), lam=lam_bound)
        lam_mat, cols = _dtn_and_columns(mesh, adm_it)
        rvec = _phi(L, lam_mat - target_mat)
        misfit = float(np.linalg.norm(rvec))
        err = float(adm_it.max_jump(truth)) if truth is not None else math.nan
        history.append((it, misfit, err))
        if misfit <= tol:
            converged = True
            break
        if it == max_iter:
            break
        jac_cols = []
        for Mj in cols:
            jac_cols.append(_phi(L, Mj))
            jac_cols.append(_phi(L, 1j * Mj))
        J = np.column_stack(jac_cols)
        step, *_ = np.linalg.lstsq(J, -rvec, rcond=None)
        dgam = step[0::2] + 1j * step[1::2]
        gam = _project_admissible(gam + dgam, lam_bound)
        if np.abs(dgam).max() < 1e-15 * max(np.abs(gam).max(), 1.0):
            break
    return ReconstructionResult(admittivity=Admittivity(tuple(gam), lam=lam_bound),
                                history=history, converged=converged)


def perturb_dtn(matrix: np.ndarray, gram_half: np.ndarray, eta: float,
                rng: np.random.Generator) -> np.ndarray:
    """Additive complex-symmetric noise of weighted Frobenius size eta."""
    n = matrix.shape[0]
    G = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    S = 0.5 * (G + G.T)
    L = sla.cholesky(gram_half, lower=True)
    scale = np.linalg.norm(_phi(L, S))
    return matrix + (eta / scale) * S


def worst_case_perturbation(sens: SensitivityResult) -> np.ndarray:
    """Unit-size symmetric DtN perturbation along the least-sensitive mode.

    Random full-matrix noise is almost orthogonal to the low-dimensional
    range of the sensitivity Jacobian, so it probes nothing; the linearized
    worst case is the left singular direction of the smallest singular
    value, whose whitened unvec is complex symmetric by construction.
    Scaling it by eta produces a parameter error of about eta / sigma_min.
    """
    U = np.linalg.svd(sens.jacobian, full_matrices=False)[0]
    u = U[:, -1]
    nb = sens.gram_half.shape[0]
    Zw = (u[:nb * nb] + 1j * u[nb * nb:]).reshape(nb, nb)
    Zw = 0.5 * (Zw + Zw.T)
    L = sens.chol
    S = L @ Zw @ L.T
    return S / np.linalg.norm(_phi(L, S))


@dataclass(frozen=True)
class SweepRecord:
    """One admittivity pair: coefficient gap E, data gap eps, their ratio."""

    values_1: tuple
    values_2: tuple
    E: float
    eps: float
    ratio: float
    h: float


def stability_sweep(pairs, mesh: Mesh, gram_half: np.ndarray | None = None,
                    threads: int = 1, arc=None) -> list[SweepRecord]:
    """E and eps for each admittivity pair over one shared mesh.

    With `arc` (contiguous boundary positions) the data gap eps is measured
    through the local DtN on that arc.  Depth experiments need this: the
    full map of a mirror-symmetric strip stack cannot order strips by depth,
    while bottom-edge data sees deeper strips exponentially more weakly.
    """
    from .dtn import local_dtn

    def lam_of(adm: Admittivity):
        key = adm.values
        if key not in cache:
            d = dtn_matrix(mesh, adm)
            cache[key] = local_dtn(d, arc) if arc is not None else d
        return cache[key]

    cache: dict[tuple, object] = {}
    if threads > 1:
        from concurrent.futures import ThreadPoolExecutor
        uniq = {a.values: a for pair in pairs for a in pair}
        with ThreadPoolExecutor(max_workers=threads) as ex:
            list(ex.map(lam_of, uniq.values()))

    if gram_half is None:
        if pairs:
            gram_half = lam_of(pairs[0][0]).gram_half()
        else:
            M, B = boundary_operators(mesh)
            gram_half = h_half_gram(M, B, 0.5)

    out = []
    for a1, a2 in pairs:
        E = a1.max_jump(a2)
        eps = operator_norm(lam_of(a1).matrix - lam_of(a2).matrix, gram_half)
        ratio = E / eps if eps > 0 else math.nan
        out.append(SweepRecord(a1.values, a2.values, E, eps, ratio, mesh.h))
    return out
