"""Tridiagonal-basis treatment of the well: assemble, diagonalize, synthesize.

In the sine coordinate y = sin(lam x) the weighted Jacobi basis renders the
wave operator tridiagonal, so the stationary equation becomes a symmetric
three-term recursion for the expansion coefficients.  Truncating at N basis
functions turns it into a real symmetric tridiagonal eigenproblem, solved
here by Sturm-count bisection (eigenvalues) and inverse iteration
(eigenvectors) with no external solver dependency.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import jacobi
from .errors import ValidationError
from .potential import ScarfParams


@dataclass(frozen=True)
class TridiagonalMatrix:
    diag: np.ndarray
    offdiag: np.ndarray

    def __post_init__(self):
        d = np.asarray(self.diag, dtype=float)
        e = np.asarray(self.offdiag, dtype=float)
        object.__setattr__(self, "diag", d)
        object.__setattr__(self, "offdiag", e)
        if e.shape != (max(d.size - 1, 0),):
            raise ValidationError("offdiag length must be len(diag) - 1")
        if not (np.all(np.isfinite(d)) and np.all(np.isfinite(e))):
            raise ValidationError("matrix entries must be finite")

    @property
    def size(self) -> int:
        return int(self.diag.size)

    def principal_minor(self, n: int) -> "TridiagonalMatrix":
        return TridiagonalMatrix(self.diag[:n].copy(), self.offdiag[:n - 1].copy())


@dataclass(frozen=True)
class TraSolution:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray  # column m is level m
    size: int


def build_wave_matrix(p: ScarfParams, N: int) -> TridiagonalMatrix:
    """Truncated wave-operator matrix whose eigenvalues are the eps levels.

    diag[n] = u1 (nu^2 - mu^2)/[(2n+mu+nu)(2n+mu+nu+2)] + [n+(mu+nu+1)/2]^2 + u0
    offdiag[n] couples n and n+1 through the y matrix element scaled by u1.
    The n = 0 diagonal coupling uses its algebraically cancelled form so the
    removable mu + nu = 0 singularity never evaluates as 0/0.
    """
    if N < 1:
        raise ValidationError("truncation size must be at least 1")
    mu, nu, u0, u1 = p.mu, p.nu, p.u0, p.u1
    diag = np.empty(N)
    off = np.empty(max(N - 1, 0))
    for n in range(N):
        if n == 0:
            coupling = (nu - mu) / (mu + nu + 2.0)
        else:
            s = 2.0 * n + mu + nu
            coupling = (nu * nu - mu * mu) / (s * (s + 2.0))
        diag[n] = u1 * coupling + (n + 0.5 * (mu + nu + 1.0)) ** 2 + u0
    for n in range(N - 1):
        s = 2.0 * n + mu + nu
        inner = (n + 1.0) * (n + mu + 1.0) * (n + nu + 1.0) * (n + mu + nu + 1.0) \
            / ((s + 1.0) * (s + 3.0))
        off[n] = u1 * 2.0 / (s + 2.0) * math.sqrt(inner)
    return TridiagonalMatrix(diag, off)


def _negcount(diag, off_sq, x):
    """Number of eigenvalues below each probe in x (vectorized over probes)."""
    x = np.asarray(x, dtype=float)
    tiny = np.finfo(float).tiny
    q = diag[0] - x
    count = (q < 0).astype(int)
    for i in range(1, diag.size):
        q = np.where(q == 0.0, tiny, q)
        q = diag[i] - x - off_sq[i - 1] / q
        count += q < 0
    return count


def sturm_count_below(T: TridiagonalMatrix, x) -> int:
    """Eigenvalues of T strictly below the probe value."""
    return int(_negcount(T.diag, T.offdiag ** 2, np.asarray([x]))[0])


def tridiag_eigenvalues(T: TridiagonalMatrix, rel_tol: float = 1e-15) -> np.ndarray:
    """All eigenvalues, ascending, by simultaneous Sturm-count bisection."""
    n = T.size
    d, e = T.diag, T.offdiag
    radius = np.zeros(n)
    if n > 1:
        radius[:-1] += np.abs(e)
        radius[1:] += np.abs(e)
    glo = float(np.min(d - radius))
    ghi = float(np.max(d + radius))
    span = max(ghi - glo, 1e-300)
    glo -= 1e-12 * span
    ghi += 1e-12 * span

    off_sq = e ** 2
    lo = np.full(n, glo)
    hi = np.full(n, ghi)
    scale = np.maximum(np.abs(lo), np.abs(hi)) + 1.0
    for _ in range(120):
        width = hi - lo
        if np.all(width <= rel_tol * scale):
            break
        mid = 0.5 * (lo + hi)
        counts = _negcount(d, off_sq, mid)
        ks = np.arange(n)
        below = counts > ks  # eigenvalue k is below its probe
        hi = np.where(below, mid, hi)
        lo = np.where(below, lo, mid)
        scale = np.maximum(np.abs(lo), np.abs(hi)) + 1.0
    return np.sort(0.5 * (lo + hi))


def _solve_shifted(d, e, shift, rhs):
    """Solve (T - shift I) v = rhs by Gaussian elimination with row pivoting.

    Near-singular pivots (the system is at an eigenvalue by construction) are
    floored at eps times the matrix scale, the usual inverse-iteration trick.
    """
    n = d.size
    scale = max(float(np.max(np.abs(d - shift)), ),
                float(np.max(np.abs(e))) if e.size else 0.0, 1e-30)
    floor = np.finfo(float).eps * scale
    # Band storage: sub, main, super, and the fill-in band above super.
    a = np.zeros(n)
    b = d - shift
    c = np.zeros(n)
    f = np.zeros(n)
    if n > 1:
        a[1:] = e
        c[:-1] = e
    x = rhs.astype(float).copy()
    for i in range(n - 1):
        if abs(a[i + 1]) > abs(b[i]):
            b[i], a[i + 1] = a[i + 1], b[i]
            c[i], b[i + 1] = b[i + 1], c[i]
            f[i], c[i + 1] = c[i + 1], f[i]
            x[i], x[i + 1] = x[i + 1], x[i]
        if abs(b[i]) < floor:
            b[i] = floor if b[i] >= 0 else -floor
        m = a[i + 1] / b[i]
        b[i + 1] -= m * c[i]
        c[i + 1] -= m * f[i]
        x[i + 1] -= m * x[i]
    if abs(b[-1]) < floor:
        b[-1] = floor if b[-1] >= 0 else -floor
    v = np.zeros(n)
    v[-1] = x[-1] / b[-1]
    if n > 1:
        v[-2] = (x[-2] - c[-2] * v[-1]) / b[-2]
    for i in range(n - 3, -1, -1):
        v[i] = (x[i] - c[i] * v[i + 1] - f[i] * v[i + 2]) / b[i]
    return v


def _eigenvector(T: TridiagonalMatrix, lam: float, seed_index: int) -> np.ndarray:
    rng = np.random.default_rng(1234 + seed_index)
    v = rng.standard_normal(T.size)
    v /= np.linalg.norm(v)
    for _ in range(3):
        v = _solve_shifted(T.diag, T.offdiag, lam, v)
        v /= np.linalg.norm(v)
    # Deterministic sign: largest-magnitude component positive.
    k = int(np.argmax(np.abs(v)))
    if v[k] < 0:
        v = -v
    return v


def solve(p: ScarfParams, N: int) -> TraSolution:
    """Eigenvalues and orthonormal eigenvectors of the truncated problem."""
    T = build_wave_matrix(p, N)
    evals = tridiag_eigenvalues(T)
    vecs = np.column_stack([_eigenvector(T, lam, i) for i, lam in enumerate(evals)])
    # Re-orthogonalize any near-degenerate clusters (not expected here, cheap).
    scale = np.max(np.abs(evals)) + 1.0
    for i in range(1, N):
        if evals[i] - evals[i - 1] < 1e-10 * scale:
            v = vecs[:, i] - vecs[:, i - 1] * (vecs[:, i - 1] @ vecs[:, i])
            vecs[:, i] = v / np.linalg.norm(v)
    return TraSolution(eigenvalues=evals, eigenvectors=vecs, size=N)


def tra_spectrum(p: ScarfParams, N: int) -> np.ndarray:
    """Ascending dimensionless eigenvalues of the size-N truncation."""
    return tridiag_eigenvalues(build_wave_matrix(p, N))


def expansion_coefficients(p: ScarfParams, N: int, level: int) -> np.ndarray:
    """Unit-norm coefficient vector of the requested level."""
    if not (0 <= level < N):
        raise IndexError(f"level {level} outside truncation of size {N}")
    return solve(p, N).eigenvectors[:, level]


def tra_wavefunction(p: ScarfParams, coeffs, x_samples) -> np.ndarray:
    """Sum of basis functions at y = sin(lam x), weighted by the coefficients."""
    xs = np.asarray(x_samples, dtype=float)
    y = np.clip(np.sin(p.lam * xs), -1.0, 1.0)
    out = np.zeros_like(y)
    for m, f in enumerate(coeffs):
        if f != 0.0:
            out += f * jacobi.basis_eval(p, m, y)
    return out


@dataclass(frozen=True)
class ConvergenceStudy:
    levels: tuple
    N_values: tuple
    eps: dict = field(repr=False)  # eps[level][N]
    diffs: dict = field(repr=False)  # |eps(N) - eps(N_max)|

    def is_converged(self, level: int, tol: float = 1e-9) -> bool:
        inner = [self.diffs[level][N] for N in self.N_values[:-1]]
        return bool(inner and inner[-1] <= tol * max(1.0, abs(self.eps[level][self.N_values[-1]])))


def convergence_study(p: ScarfParams, N_values, levels) -> ConvergenceStudy:
    """Truncation-error table: eigenvalues per level across matrix sizes."""
    N_values = tuple(sorted(int(N) for N in N_values))
    levels = tuple(sorted(int(m) for m in levels))
    if N_values and levels and N_values[0] < levels[-1] + 1:
        raise ValidationError("every N must exceed the largest requested level")
    spectra = {N: tra_spectrum(p, N) for N in N_values}
    n_max = N_values[-1]
    eps = {m: {N: float(spectra[N][m]) for N in N_values} for m in levels}
    diffs = {m: {N: abs(eps[m][N] - eps[m][n_max]) for N in N_values} for m in levels}
    return ConvergenceStudy(levels=levels, N_values=N_values, eps=eps, diffs=diffs)
