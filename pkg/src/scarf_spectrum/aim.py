"""Asymptotic iteration engine: pairs, recursion, quantization, plateaus.

The second-order equation is brought to the standard form
psi'' = k0 psi' + S0 psi in the sine coordinate y; the pair (k0, S0) is then
iterated through

    k_t = k'_{t-1} + S_{t-1} + k0 k_{t-1},   S_t = S'_{t-1} + S0 k_{t-1},

and energies are the roots of the termination combination
Delta_t = k_t S_{t-1} - k_{t-1} S_t evaluated at a starting point y0.  Each
step may jointly rescale (k_t, S_t) by an exact power of two; the zero set of
Delta_t is invariant under such joint scaling, and the scaling keeps
coefficients bounded out to a hundred iterations.

Three characteristic pairs are provided: the raw pair for arbitrary valid
parameters (whose double-pole term degrades convergence, as flagged in the
diagnostics), the regularized pair for V- = V0 = 0, and the sine-bottom
special case.  Extended-precision pairs carry mpmath coefficients; double
precision is fine through roughly ten iterations, after which roundoff in the
recursion visibly contaminates the roots.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from statistics import median

import mpmath as mp
import numpy as np
from scipy.integrate import quad

from .algebra import (
    DEFAULT_ROOT_WINDOW,
    EnergyPolynomial,
    RootSet,
    StructuredRational,
    real_roots,
    rf_add,
    rf_derivative,
    rf_mul,
)
from .errors import (
    CoefficientOverflowError,
    DomainError,
    PoleOnPathError,
    SingularPointError,
    ValidationError,
)
from .potential import ScarfParams

DEFAULT_EXTENDED_DPS = 50
#: step 0.01 grid clear of the singular points, per the default scan policy
DEFAULT_PLATEAU_GRID = tuple(round(-0.9 + 0.01 * i, 10) for i in range(181))
DEFAULT_PLATEAU_TOL = 1e-8


@dataclass(frozen=True)
class CharacteristicPair:
    """Standard-form pair (k0, S0) plus the bookkeeping to rebuild psi.

    ``weight_exponent`` is the exponent of the (1-y^2) factor stripped by the
    regularizing transformation; it re-enters when the wavefunction is
    assembled.  ``dps`` is None in double precision, otherwise the mpmath
    working precision the pair was built at.
    """

    k0: StructuredRational
    s0: StructuredRational
    provenance: str  # "general" | "case1" | "case2"
    params: ScarfParams
    weight_exponent: float
    dps: int | None = None
    convergence_caveat: str | None = None

    def workprec(self):
        return mp.workdps(self.dps) if self.dps else _NullCtx()


class _NullCtx:
    def __enter__(self):
        return self

    def __exit__(self, *exc):
        return False


def _couplings(p: ScarfParams, dps):
    """(u0, u1, uplus, uminus, alpha_or_None, one) in the working precision."""
    if dps is None:
        return p.u0, p.u1, p.uplus, p.uminus, p.aim_alpha, 1.0
    with mp.workdps(dps):
        lam2 = (mp.pi / mp.mpf(p.L)) ** 2
        u0 = 2 * mp.mpf(p.V0) / lam2
        u1 = 2 * mp.mpf(p.V1) / lam2
        up = 2 * mp.mpf(p.Vplus) / lam2
        um = 2 * mp.mpf(p.Vminus) / lam2
        alpha = (mp.sqrt(1 + 4 * up) - 1) / 4 if p.Vminus == 0.0 else None
        return u0, u1, up, um, alpha, mp.mpf(1)


def make_case1_pair(p: ScarfParams, *, extended: bool = False,
                    dps: int = DEFAULT_EXTENDED_DPS) -> CharacteristicPair:
    """Regularized pair for V- = V0 = 0; energy enters S0 through 1 - eps."""
    if p.Vminus != 0.0 or p.V0 != 0.0:
        raise ValidationError("regularized pair requires V- = 0 and V0 = 0")
    dps_eff = dps if extended else None
    _, u1, _, _, alpha, one = _couplings(p, dps_eff)
    k0 = StructuredRational(
        (EnergyPolynomial(()), EnergyPolynomial((one * (3 + 4 * alpha),))), 1)
    s0 = StructuredRational(
        (EnergyPolynomial((one * (1 + 4 * alpha * (alpha + 1)), -one)),
         EnergyPolynomial((u1,))), 1)
    return CharacteristicPair(k0=k0, s0=s0, provenance="case1", params=p,
                              weight_exponent=float(alpha), dps=dps_eff)


def make_case2_pair(p: ScarfParams, *, extended: bool = False,
                    dps: int = DEFAULT_EXTENDED_DPS) -> CharacteristicPair:
    """Sine-bottom well pair (V0 = V+ = V- = 0)."""
    if p.V0 != 0.0 or p.Vplus != 0.0 or p.Vminus != 0.0:
        raise ValidationError("sine-bottom pair requires V0 = V+ = V- = 0")
    dps_eff = dps if extended else None
    _, u1, _, _, _, one = _couplings(p, dps_eff)
    k0 = StructuredRational(
        (EnergyPolynomial(()), EnergyPolynomial((one * 3,))), 1)
    s0 = StructuredRational(
        (EnergyPolynomial((one, -one)), EnergyPolynomial((u1,))), 1)
    return CharacteristicPair(k0=k0, s0=s0, provenance="case2", params=p,
                              weight_exponent=0.0, dps=dps_eff)


def make_general_pair(p: ScarfParams, *, extended: bool = False,
                      dps: int = DEFAULT_EXTENDED_DPS) -> CharacteristicPair:
    """Raw pair for arbitrary valid parameters.

    S0 carries a (1-y^2)^-2 term whenever (u+, u-) != (0, 0); that double
    pole slows the termination condition badly, so the pair is flagged.
    """
    dps_eff = dps if extended else None
    u0, u1, up, um, _, one = _couplings(p, dps_eff)
    k0 = StructuredRational(
        (EnergyPolynomial(()), EnergyPolynomial((one * 3,))), 1)
    zero = EnergyPolynomial(())
    # (u0 + 1 - eps + u1 y)(1 - y^2) + (u+ - u- y), over (1 - y^2)^2
    base = [EnergyPolynomial((u0 + one, -one)), EnergyPolynomial((u1,))]
    num = [base[0] + EnergyPolynomial((up,)),
           base[1] + EnergyPolynomial((-um,)),
           -base[0],
           -base[1]]
    s0 = StructuredRational([q if q else zero for q in num], 2)
    caveat = None
    if p.uplus != 0.0 or p.uminus != 0.0:
        caveat = ("double-pole term present in S0; termination converges "
                  "slowly -- prefer the regularized pair when V- = V0 = 0")
    return CharacteristicPair(k0=k0, s0=s0, provenance="general", params=p,
                              weight_exponent=0.0, dps=dps_eff,
                              convergence_caveat=caveat)


@dataclass(frozen=True)
class AimState:
    """Iterates (k_t, S_t) for t = 0..T with the per-step joint scales."""

    pair: CharacteristicPair
    ks: tuple
    ss: tuple
    scales: tuple

    @property
    def iterations(self) -> int:
        return len(self.ks) - 1


def _frexp_exponent(m) -> int:
    if isinstance(m, mp.mpf):
        return int(mp.mag(m))
    return math.frexp(m)[1]


def aim_iterate(pair: CharacteristicPair, T: int, *,
                normalize: bool = True) -> AimState:
    """Run the recursion out to T iterations."""
    if T < 1:
        raise ValidationError("iteration count must be at least 1")
    with pair.workprec():
        k0, s0 = pair.k0, pair.s0
        ks, ss, scales = [k0], [s0], [1.0]
        half = mp.mpf("0.5") if pair.dps else 0.5
        for _ in range(T):
            kp, sp = ks[-1], ss[-1]
            k = rf_add(rf_add(rf_derivative(kp), sp), rf_mul(k0, kp))
            s = rf_add(rf_derivative(sp), rf_mul(s0, kp))
            c = 1.0
            m = max(k.max_abs_coeff(), s.max_abs_coeff())
            if normalize and m > 0:
                c = half ** _frexp_exponent(m)  # exact power of two
                k = k.scaled(c)
                s = s.scaled(c)
            elif not normalize and pair.dps is None and m > 1e290:
                raise CoefficientOverflowError(
                    f"coefficients reached {m:.3e}; enable normalization")
            ks.append(k)
            ss.append(s)
            scales.append(c)
    return AimState(pair=pair, ks=tuple(ks), ss=tuple(ss), scales=tuple(scales))


def termination_delta(state: AimState, t: int) -> StructuredRational:
    """Delta_t = k_t S_{t-1} - k_{t-1} S_t, canonicalized.

    t = 0 uses the convention k_{-1} = 1, S_{-1} = 0, i.e. Delta_0 = -S0.
    """
    if not (0 <= t <= state.iterations):
        raise IndexError(f"iteration {t} not in computed state (0..{state.iterations})")
    with state.pair.workprec():
        if t == 0:
            return state.ss[0].scaled(-1.0)
        return rf_add(rf_mul(state.ks[t], state.ss[t - 1]),
                      rf_mul(state.ks[t - 1], state.ss[t]).scaled(-1.0))


def delta_energy_polynomial(state: AimState, t: int, y0) -> EnergyPolynomial:
    """Energy polynomial whose roots quantize level energies at y = y0.

    Evaluates the four numerators at y0 first and combines scalars, which
    avoids materializing the symbolic product at high iteration counts.  The
    result differs from the canonical Delta numerator by the positive factor
    (1-y0^2)^j of cancelled denominators, which moves no roots.
    """
    if abs(y0) >= 1:
        raise SingularPointError(f"y0 = {y0} is at or beyond the singular points")
    with state.pair.workprec():
        one = mp.mpf(1) if state.pair.dps else 1.0
        y = one * y0
        w = 1 - y * y
        if t == 0:
            return -1.0 * state.ss[0].numerator_at_y(y)
        kt = state.ks[t].numerator_at_y(y)
        st = state.ss[t].numerator_at_y(y)
        ktm = state.ks[t - 1].numerator_at_y(y)
        stm = state.ss[t - 1].numerator_at_y(y)
        d1 = state.ks[t].denom_power + state.ss[t - 1].denom_power
        d2 = state.ks[t - 1].denom_power + state.ss[t].denom_power
        dmax = max(d1, d2)
        term1 = kt * stm * (w ** (dmax - d1))
        term2 = ktm * st * (w ** (dmax - d2))
        return term1 - term2


@dataclass(frozen=True)
class SpectrumResult:
    """Ascending quantized energies plus extraction diagnostics."""

    values: tuple
    iteration: int
    y0: float
    poly_degree: int
    n_in_window: int
    n_merged: int
    window: tuple

    def __iter__(self):
        return iter(self.values)

    def __len__(self):
        return len(self.values)


def aim_spectrum(pair: CharacteristicPair, t: int, y0: float, *,
                 window=DEFAULT_ROOT_WINDOW, state: AimState | None = None,
                 merge_tol: float = 1e-10) -> SpectrumResult:
    """Real roots of the termination polynomial at y0, ascending."""
    if t < 1:
        raise ValidationError("spectrum extraction needs at least one iteration")
    if state is None or state.iterations < t:
        state = aim_iterate(pair, t)
    poly = delta_energy_polynomial(state, t, y0)
    with pair.workprec():
        roots = real_roots(poly, window=window, merge_tol=merge_tol)
    return SpectrumResult(values=roots.roots, iteration=t, y0=float(y0),
                          poly_degree=poly.degree,
                          n_in_window=len(roots.roots),
                          n_merged=sum(1 for g in roots.merged if g),
                          window=tuple(float(v) for v in window))


# ---------------------------------------------------------------------------
# plateau of stability
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PlateauReport:
    """Stability intervals of each level across iteration counts.

    ``values[(level, t)]`` runs parallel to ``grid``; None marks a gap (no
    persistent root of that index at that starting point).  Intervals are the
    maximal contiguous grid runs agreeing with the per-(level, t) median to
    within the relative tolerance.
    """

    levels: tuple
    iterations: tuple
    grid: tuple
    tol: float
    values: dict
    intervals: dict
    widths: dict
    medians: dict
    recommended_y0: float
    recommendation_warning: str | None


def _persistent(current: RootSet, previous: RootSet | None):
    if previous is None or not previous.roots:
        return list(current.roots)
    kept = []
    for r in current.roots:
        for q in previous.roots:
            if abs(r - q) <= 0.1 * max(abs(r), abs(q), 1e-12):
                kept.append(r)
                break
    return kept


def _plateau_intervals(grid, vals, tol):
    """Maximal contiguous runs within tol of the median, plus the median."""
    present = [v for v in vals if v is not None]
    if not present:
        return (), 0.0, None
    med = median(present)
    ok = [v is not None and abs(v - med) <= tol * abs(med) for v in vals]
    intervals = []
    i = 0
    while i < len(grid):
        if ok[i]:
            j = i
            while j + 1 < len(grid) and ok[j + 1]:
                j += 1
            intervals.append((grid[i], grid[j]))
            i = j + 1
        else:
            i += 1
    width = sum(hi - lo for lo, hi in intervals)
    return tuple(intervals), width, med


def _recommend(levels, iterations, intervals):
    """Center of the plateau intersection at the largest iteration count."""
    t_max = max(iterations)
    per_level = []
    for m in levels:
        ivs = intervals.get((m, t_max), ())
        if ivs:
            per_level.append(list(ivs))
    if not per_level:
        return 0.0, "no plateau interval at the largest iteration count"
    common = per_level[0]
    for ivs in per_level[1:]:
        nxt = []
        for lo, hi in common:
            for lo2, hi2 in ivs:
                a, b = max(lo, lo2), min(hi, hi2)
                if a <= b:
                    nxt.append((a, b))
        common = nxt
    if not common:
        widest = max((iv for ivs in per_level for iv in ivs),
                     key=lambda iv: iv[1] - iv[0])
        return 0.5 * (widest[0] + widest[1]), \
            "plateau intervals of the requested levels do not intersect"
    widest = max(common, key=lambda iv: iv[1] - iv[0])
    return 0.5 * (widest[0] + widest[1]), None


def plateau_scan(pair: CharacteristicPair, levels, t_values, grid=None,
                 tol: float = DEFAULT_PLATEAU_TOL, *,
                 window=DEFAULT_ROOT_WINDOW, state: AimState | None = None,
                 max_workers: int | None = None) -> PlateauReport:
    """Map each level's stable-y0 intervals across iteration counts.

    Per-point failures (singularities, missing roots) become gaps rather
    than aborting the scan.  Grid points can be processed by a thread pool;
    assembly is keyed and sorted, so the output is order-independent.
    """
    levels = tuple(sorted(int(m) for m in levels))
    if not levels:
        raise ValidationError("at least one level index is required")
    t_values = tuple(sorted(int(t) for t in t_values))
    if not t_values or t_values[0] < 1:
        raise ValidationError("iteration counts must be positive")
    grid = DEFAULT_PLATEAU_GRID if grid is None else tuple(float(g) for g in grid)
    if any(abs(g) >= 1 for g in grid):
        raise ValidationError("grid points must lie strictly inside (-1, 1)")
    if tol <= 0:
        raise ValidationError("tolerance must be positive")
    if state is None or state.iterations < t_values[-1]:
        state = aim_iterate(pair, t_values[-1])

    def roots_for(t, y0):
        try:
            poly = delta_energy_polynomial(state, t, y0)
            with pair.workprec():
                return real_roots(poly, window=window)
        except (SingularPointError, ValueError, ArithmeticError):
            return RootSet((), (), (), (float(window[0]), float(window[1])))

    per_point = {}
    jobs = [(t, y0) for t in t_values for y0 in grid]
    if max_workers and max_workers > 1 and pair.dps is None:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            for key, rs in zip(jobs, pool.map(lambda j: roots_for(*j), jobs)):
                per_point[key] = rs
    else:
        for t, y0 in jobs:
            per_point[(t, y0)] = roots_for(t, y0)

    values = {}
    for i_t, t in enumerate(t_values):
        prev_t = t_values[i_t - 1] if i_t > 0 else None
        for m in levels:
            values[(m, t)] = []
        for y0 in grid:
            kept = _persistent(per_point[(t, y0)],
                               per_point.get((prev_t, y0)) if prev_t else None)
            for m in levels:
                values[(m, t)].append(kept[m] if m < len(kept) else None)
    values = {k: tuple(v) for k, v in values.items()}

    intervals, widths, medians = {}, {}, {}
    for key, vals in values.items():
        ivs, width, med = _plateau_intervals(grid, vals, tol)
        intervals[key] = ivs
        widths[key] = width
        medians[key] = med

    rec, warning = _recommend(levels, t_values, intervals)
    return PlateauReport(levels=levels, iterations=t_values, grid=grid, tol=tol,
                         values=values, intervals=intervals, widths=widths,
                         medians=medians, recommended_y0=rec,
                         recommendation_warning=warning)


def recommend_y0(report: PlateauReport) -> float:
    """Starting point at the center of the surviving plateau intersection."""
    if not report.levels:
        raise ValidationError("empty report")
    rec, _ = _recommend(report.levels, report.iterations, report.intervals)
    return rec


# ---------------------------------------------------------------------------
# wavefunction reconstruction
# ---------------------------------------------------------------------------

def _float_poly(rf: StructuredRational, eps: float) -> np.ndarray:
    """Numerator at fixed energy as float coefficients, ascending powers of y."""
    return np.array([float(p(eps)) for p in rf.num], dtype=float)


def _poly_eval(coeffs: np.ndarray, y):
    acc = np.zeros_like(np.asarray(y, dtype=float))
    for c in coeffs[::-1]:
        acc = acc * y + c
    return acc


def _mul_w(coeffs: np.ndarray, times: int) -> np.ndarray:
    out = coeffs
    for _ in range(times):
        expanded = np.zeros(out.size + 2)
        expanded[:out.size] += out
        expanded[2:] -= out
        out = expanded
    return out


def aim_wavefunction(pair: CharacteristicPair, state: AimState, t: int,
                     eps: float, x_samples) -> np.ndarray:
    """Unnormalized wavefunction samples for one quantized energy.

    The log-derivative ratio chi = S_t/k_t is integrated from a reference
    point by adaptive quadrature.  Simple poles of chi with residue -1 are
    the nodes of the state; they are peeled off analytically (contributing a
    signed linear factor each) and only the smooth remainder is quadratured.
    Any other pole on the path is a genuine obstruction and raises.
    """
    xs = np.asarray(x_samples, dtype=float)
    p = pair.params
    if np.any(np.abs(xs) >= p.L / 2):
        raise DomainError("samples must lie strictly inside the well")
    if not (1 <= t <= state.iterations):
        raise IndexError(f"iteration {t} not available in state")
    ys = np.clip(np.sin(p.lam * xs), -1.0, 1.0)

    a_num = _float_poly(state.ss[t], eps)
    b_num = _float_poly(state.ks[t], eps)
    da, db = state.ss[t].denom_power, state.ks[t].denom_power
    a_num = _mul_w(a_num, max(0, db - da))
    b_num = _mul_w(b_num, max(0, da - db))
    b_scale = np.max(np.abs(b_num))
    a_scale = np.max(np.abs(a_num))
    if b_scale == 0.0:
        raise PoleOnPathError("k_t vanishes identically at this energy")

    span_lo = min(float(np.min(ys)), 0.0) - 1e-9
    span_hi = max(float(np.max(ys)), 0.0) + 1e-9
    bpoly = EnergyPolynomial(b_num / b_scale)
    dbpoly = bpoly.derivative()
    apoly = EnergyPolynomial(a_num / (a_scale or 1.0))
    zeros = real_roots(bpoly, window=(max(span_lo, -1 + 1e-12),
                                      min(span_hi, 1 - 1e-12)))

    node_poles, residues, hint_points = [], [], []
    for z in zeros.roots:
        if abs(apoly(z)) < 1e-6:
            hint_points.append(z)  # removable: common factor of S_t and k_t
            continue
        rho = (apoly(z) * a_scale) / (dbpoly(z) * b_scale)
        if abs(rho + 1.0) < 0.1:
            node_poles.append(z)
            residues.append(rho)
            hint_points.append(z)
        else:
            raise PoleOnPathError(
                f"k_t vanishes at y = {z:.6g} with non-node residue {rho:.4g}")

    # Reference point: 0 unless a pole sits on it.
    y_ref = 0.0
    if any(abs(z) < 1e-6 for z in node_poles):
        cands = sorted(set(node_poles) | {span_lo, span_hi})
        gaps = [(cands[i + 1] - cands[i], 0.5 * (cands[i] + cands[i + 1]))
                for i in range(len(cands) - 1)]
        y_ref = max(gaps)[1]

    def chi_smooth(y):
        val = (_poly_eval(a_num, y)) / (_poly_eval(b_num, y))
        for z, rho in zip(node_poles, residues):
            val -= rho / (y - z)
        return val

    # Cumulative integral of the smooth part over the sorted sample set.
    order = np.argsort(ys)
    ys_sorted = ys[order]
    anchors = np.concatenate([[y_ref], ys_sorted]) if ys_sorted.size else np.array([y_ref])
    integral_sorted = np.zeros(ys_sorted.size)
    acc_from_ref = {}

    def integral_to(a, b):
        if a == b:
            return 0.0
        inside = sorted(z for z in hint_points if min(a, b) < z < max(a, b))
        val, _ = quad(chi_smooth, a, b, points=inside or None,
                      epsabs=1e-10, epsrel=1e-10, limit=300)
        return val

    running = 0.0
    prev = y_ref
    for idx, y in enumerate(ys_sorted):
        if idx == 0:
            running = integral_to(y_ref, y)
        else:
            running += integral_to(prev, y)
        integral_sorted[idx] = running
        prev = y

    log_smooth = np.empty_like(ys)
    log_smooth[order] = integral_sorted

    vals = np.exp(-log_smooth)
    for z, rho in zip(node_poles, residues):
        ratio = np.abs(ys - z) / abs(y_ref - z)
        vals *= ratio ** (-rho)
        vals *= np.where((ys - z) * (y_ref - z) < 0, -1.0, 1.0)

    weight = (1.0 - ys ** 2) ** pair.weight_exponent if pair.weight_exponent else 1.0
    psi = np.cos(p.lam * xs) * weight * vals
    return psi
