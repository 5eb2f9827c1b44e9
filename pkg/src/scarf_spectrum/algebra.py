"""Polynomial and rational-function arithmetic underlying the iteration engine.

Two layers:

* ``EnergyPolynomial`` -- univariate polynomials in the dimensionless energy
  with real coefficients.  Coefficients are ordinary floats by default; if any
  input coefficient is an ``mpmath.mpf`` the whole computation tower runs at
  the active mpmath precision, which is the extended-precision mode used for
  high iteration counts.
* ``StructuredRational`` -- rational functions of y whose numerator is a
  polynomial in y with EnergyPolynomial coefficients and whose denominator is
  restricted to (1-y^2)^d.  This family is closed under addition,
  multiplication and d/dy, which is exactly what the iteration recursion
  needs, and the restricted denominator makes cancellation exact.

Real roots are isolated by Sturm sign counting and polished by bisection plus
guarded Newton steps.  Near-multiple roots are merged and flagged rather than
resolved.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath as mp

from .errors import SingularPointError, ZeroPolynomialError

DEFAULT_ROOT_WINDOW = (-1.0e4, 1.0e4)


def _is_mp(x) -> bool:
    return isinstance(x, mp.mpf)


def _eps_for(sample) -> float:
    """Unit roundoff of the coefficient type in play."""
    if _is_mp(sample):
        return float(mp.eps)
    return 2.220446049250313e-16


def _cancel_tol(sample) -> float:
    # Far above accumulated roundoff, far below structural content.
    return _eps_for(sample) ** 0.6


class EnergyPolynomial:
    """Dense univariate polynomial; coeffs[k] multiplies the k-th power.

    Trailing coefficients that are exactly zero are trimmed, so the leading
    coefficient is nonzero unless the polynomial is identically zero (empty
    coefficient tuple, degree -1).
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=()):
        c = list(coeffs)
        while c and c[-1] == 0:
            c.pop()
        self.coeffs = tuple(c)

    @classmethod
    def zero(cls):
        return cls(())

    @classmethod
    def constant(cls, value):
        return cls((value,))

    @classmethod
    def from_roots(cls, roots, leading=1.0):
        p = cls((leading,))
        for r in roots:
            p = p * cls((-r, 1.0))
        return p

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    def __bool__(self):
        return bool(self.coeffs)

    def __eq__(self, other):
        return isinstance(other, EnergyPolynomial) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __add__(self, other):
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] = out[i] + c
        return EnergyPolynomial(out)

    def __neg__(self):
        return EnergyPolynomial(tuple(-c for c in self.coeffs))

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, EnergyPolynomial):
            a, b = self.coeffs, other.coeffs
            if not a or not b:
                return EnergyPolynomial(())
            out = [0.0 * (a[0] + b[0])] * (len(a) + len(b) - 1)
            for i, x in enumerate(a):
                for j, y in enumerate(b):
                    out[i + j] = out[i + j] + x * y
            return EnergyPolynomial(out)
        return EnergyPolynomial(tuple(c * other for c in self.coeffs))

    def __rmul__(self, other):
        return self.__mul__(other)

    def __call__(self, x):
        acc = 0.0 * x if self.coeffs else 0.0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def derivative(self):
        return EnergyPolynomial(tuple(k * c for k, c in enumerate(self.coeffs) if k))

    def max_abs(self):
        return max((abs(c) for c in self.coeffs), default=0.0)

    def trimmed(self, rel_tol):
        """Drop leading coefficients below ``rel_tol`` times the largest one."""
        if not self.coeffs:
            return self
        thresh = rel_tol * self.max_abs()
        c = list(self.coeffs)
        while c and abs(c[-1]) <= thresh:
            c.pop()
        return EnergyPolynomial(c)

    def monic(self):
        if not self.coeffs:
            raise ZeroPolynomialError("cannot normalize the zero polynomial")
        lead = self.coeffs[-1]
        return EnergyPolynomial(tuple(c / lead for c in self.coeffs))

    def __repr__(self):
        return f"EnergyPolynomial({list(self.coeffs)!r})"


def poly_divmod(a: EnergyPolynomial, b: EnergyPolynomial):
    """Euclidean division a = q*b + r, deg r < deg b."""
    if b.is_zero:
        raise ZeroDivisionError("polynomial division by zero")
    r = list(a.coeffs)
    db = b.degree
    lead = b.coeffs[-1]
    q = [0.0 * lead] * max(len(r) - db, 0)
    for k in range(len(r) - 1, db - 1, -1):
        c = r[k] / lead
        q[k - db] = c
        if c != 0:
            for j in range(db + 1):
                r[k - db + j] = r[k - db + j] - c * b.coeffs[j]
        r[k] = 0.0 * lead
    return EnergyPolynomial(q), EnergyPolynomial(r)


# ---------------------------------------------------------------------------
# rational functions with denominator (1 - y^2)^d
# ---------------------------------------------------------------------------

def _ytrim(num):
    num = list(num)
    while num and num[-1].is_zero:
        num.pop()
    return num


def _ymax(num):
    m = 0.0
    for p in num:
        v = p.max_abs()
        if v > m:
            m = v
    return m


def _ymul(a, b):
    if not a or not b:
        return []
    zero = EnergyPolynomial(())
    out = [zero] * (len(a) + len(b) - 1)
    for i, p in enumerate(a):
        if p.is_zero:
            continue
        for j, q in enumerate(b):
            if q.is_zero:
                continue
            out[i + j] = out[i + j] + p * q
    return _ytrim(out)


def _yadd(a, b):
    n = max(len(a), len(b))
    zero = EnergyPolynomial(())
    out = []
    for i in range(n):
        p = a[i] if i < len(a) else zero
        q = b[i] if i < len(b) else zero
        out.append(p + q)
    return _ytrim(out)


def _mul_one_minus_y2(num):
    """Multiply a y-polynomial by (1 - y^2)."""
    zero = EnergyPolynomial(())
    out = list(num) + [zero, zero]
    for i, p in enumerate(num):
        out[i + 2] = out[i + 2] - p
    return _ytrim(out)


def _div_one_minus_y2(num, tol_rel):
    """Try exact division by (1 - y^2); returns (quotient, ok)."""
    if len(num) < 3:
        return None, False
    rem = list(num)
    quot = [EnergyPolynomial(())] * (len(num) - 2)
    for k in range(len(num) - 1, 1, -1):
        q = -rem[k]
        quot[k - 2] = q
        rem[k] = EnergyPolynomial(())
        rem[k - 2] = rem[k - 2] - q
    scale = _ymax(num)
    resid = max(rem[0].max_abs(), rem[1].max_abs() if len(rem) > 1 else 0.0)
    if resid > tol_rel * scale:
        return None, False
    return _ytrim(quot), True


class StructuredRational:
    """num(y, eps) / (1 - y^2)^denom_power, canonicalized on construction.

    Canonical form: the numerator carries no (1 - y^2) factor while
    denom_power > 0.  Divisibility is decided against a roundoff threshold
    tied to the coefficient type, which is safe here because structural
    cancellations in the iteration are exact up to roundoff while genuine
    remainders are of order the coefficient scale.
    """

    __slots__ = ("num", "denom_power")

    def __init__(self, num, denom_power=0, _canonical=False):
        num = _ytrim([p if isinstance(p, EnergyPolynomial) else EnergyPolynomial(p)
                      for p in num])
        d = int(denom_power)
        if d < 0:
            raise ValueError("denominator power must be nonnegative")
        if not _canonical and num and d > 0:
            tol = _cancel_tol(num[-1].coeffs[-1])
            while d > 0:
                quot, ok = _div_one_minus_y2(num, tol)
                if not ok:
                    break
                num = quot
                d -= 1
        if not num:
            d = 0
        self.num = tuple(num)
        self.denom_power = d

    @classmethod
    def zero(cls):
        return cls((), 0)

    @classmethod
    def one(cls):
        return cls((EnergyPolynomial((1.0,)),), 0)

    @classmethod
    def from_constant(cls, value):
        return cls((EnergyPolynomial((value,)),), 0)

    @property
    def y_degree(self) -> int:
        return len(self.num) - 1

    @property
    def is_zero(self) -> bool:
        return not self.num

    def scaled(self, s):
        out = StructuredRational.__new__(StructuredRational)
        out.num = tuple(p * s for p in self.num)
        out.denom_power = self.denom_power if self.num else 0
        return out

    def max_abs_coeff(self):
        return _ymax(self.num)

    def numerator_at_y(self, y) -> EnergyPolynomial:
        """Evaluate the numerator's y-dependence, leaving a polynomial in energy."""
        acc = EnergyPolynomial(())
        for p in reversed(self.num):
            acc = acc * y + p
        return acc

    def trimmed(self, rel_tol):
        """Tolerance-trimmed copy (for structure inspection, not arithmetic)."""
        scale = self.max_abs_coeff()
        if scale == 0.0:
            return StructuredRational.zero()
        num = [p.trimmed(rel_tol * scale / p.max_abs()) if not p.is_zero else p
               for p in self.num]
        num = [p if p.max_abs() > rel_tol * scale else EnergyPolynomial(()) for p in num]
        return StructuredRational(num, self.denom_power)

    def __add__(self, other):
        return rf_add(self, other)

    def __mul__(self, other):
        if isinstance(other, StructuredRational):
            return rf_mul(self, other)
        return self.scaled(other)

    def __rmul__(self, other):
        return self.scaled(other)

    def __sub__(self, other):
        return rf_add(self, other.scaled(-1.0))

    def __neg__(self):
        return self.scaled(-1.0)

    def __eq__(self, other):
        return (isinstance(other, StructuredRational)
                and self.denom_power == other.denom_power
                and self.num == other.num)

    def __repr__(self):
        return f"StructuredRational(ydeg={self.y_degree}, d={self.denom_power})"


def rf_add(a: StructuredRational, b: StructuredRational) -> StructuredRational:
    """Sum in canonical form."""
    if a.is_zero:
        return b
    if b.is_zero:
        return a
    d = max(a.denom_power, b.denom_power)
    na = list(a.num)
    for _ in range(d - a.denom_power):
        na = _mul_one_minus_y2(na)
    nb = list(b.num)
    for _ in range(d - b.denom_power):
        nb = _mul_one_minus_y2(nb)
    return StructuredRational(_yadd(na, nb), d)


def rf_mul(a: StructuredRational, b: StructuredRational) -> StructuredRational:
    """Product in canonical form."""
    if a.is_zero or b.is_zero:
        return StructuredRational.zero()
    return StructuredRational(_ymul(list(a.num), list(b.num)),
                              a.denom_power + b.denom_power)


def rf_derivative(r: StructuredRational) -> StructuredRational:
    """d/dy, using (N/(w)^d)' = (N' w + 2 d y N) / w^{d+1} with w = 1 - y^2."""
    if r.is_zero:
        return StructuredRational.zero()
    nprime = _ytrim([r.num[k] * k for k in range(1, len(r.num))])
    if r.denom_power == 0:
        return StructuredRational(nprime, 0)
    term1 = _mul_one_minus_y2(nprime)
    shifted = [EnergyPolynomial(())] + [p * (2.0 * r.denom_power) for p in r.num]
    return StructuredRational(_yadd(term1, shifted), r.denom_power + 1)


def rf_eval(r: StructuredRational, y, eps):
    """Numerical value at (y, eps); raises at the |y| = 1 poles."""
    w = 1.0 - y * y
    if r.denom_power > 0 and w == 0.0:
        raise SingularPointError(f"evaluation at singular point y = {y}")
    acc = 0.0 * (y + eps)
    for p in reversed(r.num):
        acc = acc * y + p(eps)
    for _ in range(r.denom_power):
        acc = acc / w
    return acc


def rf_equal(a: StructuredRational, b: StructuredRational, rel_tol=0.0) -> bool:
    """Canonical equality via cross-multiplied numerators.

    With rel_tol == 0 the comparison is exact; otherwise coefficients may
    differ by rel_tol relative to the largest coefficient in play.
    """
    na = list(a.num)
    for _ in range(max(0, b.denom_power - a.denom_power)):
        na = _mul_one_minus_y2(na)
    nb = list(b.num)
    for _ in range(max(0, a.denom_power - b.denom_power)):
        nb = _mul_one_minus_y2(nb)
    diff = _yadd(na, [p * (-1.0) for p in nb])
    if not diff:
        return True
    if rel_tol == 0.0:
        return False
    scale = max(_ymax(na), _ymax(nb))
    return _ymax(diff) <= rel_tol * scale


# ---------------------------------------------------------------------------
# real roots by Sturm sign counting
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RootSet:
    """Real roots in ascending order with multiplicities.

    ``merged`` marks roots produced by collapsing a cluster that the
    isolator could not separate beyond ``merge_tol``.
    """

    roots: tuple
    multiplicities: tuple
    merged: tuple
    window: tuple

    def __iter__(self):
        return iter(self.roots)

    def __len__(self):
        return len(self.roots)


def _sturm_chain(p: EnergyPolynomial):
    """Negative-remainder chain; also reports a nontrivial gcd(p, p') tail.

    If the remainder sequence dies early the last surviving element is (up to
    scale) the gcd, whose roots are exactly the multiple roots of p.  The
    truncated chain still counts distinct real roots.
    """
    eps = _eps_for(p.coeffs[-1])
    drop = eps * 1e3
    chain = [p, p.derivative()]
    gcd_tail = None
    while chain[-1].degree > 0:
        _, rem = poly_divmod(chain[-2], chain[-1])
        rem = -rem
        scale = rem.max_abs()
        if scale == 0.0 or scale <= drop * chain[-2].max_abs():
            gcd_tail = chain[-1]
            break
        rem = rem.trimmed(drop)
        if rem.is_zero:
            gcd_tail = chain[-1]
            break
        chain.append(EnergyPolynomial(tuple(c / scale for c in rem.coeffs)))
    return chain, gcd_tail


def _multiplicity_at(x, gcd_tail):
    """1 plus the multiplicity of x inside the gcd tail, found recursively."""
    count = 1
    cur = gcd_tail
    while cur is not None and cur.degree >= 1:
        eps = _eps_for(cur.coeffs[-1])
        scale = sum(abs(c) * max(1.0, abs(x)) ** k for k, c in enumerate(cur.coeffs))
        if abs(cur(x)) > (eps ** 0.5) * scale:
            break
        count += 1
        _, cur = _sturm_chain(cur)
    return count


def _variations(chain, x):
    count = 0
    prev = 0
    for q in chain:
        v = q(x)
        s = 1 if v > 0 else (-1 if v < 0 else 0)
        if s == 0:
            continue
        if prev != 0 and s != prev:
            count += 1
        prev = s
    return count


def real_roots(p: EnergyPolynomial, window=None, *, merge_tol=1e-10,
               rel_accuracy=None) -> RootSet:
    """All real roots of ``p`` inside ``window``, ascending.

    Isolation by Sturm sign counting, refinement by bisection with a guarded
    Newton polish.  Roots closer than ``merge_tol`` are merged and flagged.
    """
    if p.is_zero:
        raise ZeroPolynomialError("root finding on the zero polynomial")
    if window is None:
        window = DEFAULT_ROOT_WINDOW
    lo, hi = window
    if p.degree == 0:
        return RootSet((), (), (), (float(lo), float(hi)))

    sample = p.coeffs[-1]
    eps = _eps_for(sample)
    if rel_accuracy is None:
        # Contract is 1e-13 relative; in extended precision push further but
        # cap the bisection work (Newton does the final contraction).
        rel_accuracy = 1e-13 if not _is_mp(sample) else max(1e-20, eps * 1e2)

    one = sample / sample  # 1 in the working type
    lo = one * lo
    hi = one * hi

    # Cauchy bound caps the search to where roots can actually live.
    lead = abs(p.coeffs[-1])
    bound = one + max(abs(c) for c in p.coeffs[:-1]) / lead if p.degree > 0 else one
    lo = max(lo, -bound - 1)
    hi = min(hi, bound + 1)
    if lo >= hi:
        return RootSet((), (), (), (float(window[0]), float(window[1])))

    chain, gcd_tail = _sturm_chain(p)

    def count_between(a, b):
        return _variations(chain, a) - _variations(chain, b)

    # Nudge endpoints off roots of p (variations are endpoint-sensitive there).
    def nudge(x, direction):
        step = (abs(x) + 1) * eps * 8
        while p(x) == 0:
            x = x + direction * step
            step *= 2
        return x

    lo = nudge(lo, -1)
    hi = nudge(hi, 1)

    total = count_between(lo, hi)
    intervals = []
    stack = [(lo, hi, total)]
    min_width = merge_tol / 4
    while stack:
        a, b, n = stack.pop()
        if n <= 0:
            continue
        if n == 1 or (b - a) < min_width:
            intervals.append((a, b, n))
            continue
        mid = (a + b) / 2
        mid = nudge(mid, 1)
        nl = count_between(a, mid)
        stack.append((a, mid, nl))
        stack.append((mid, b, n - nl))

    intervals.sort(key=lambda t: t[0])

    dp = p.derivative()

    bisect_target = max(rel_accuracy, 1e-10)

    def refine(a, b, n):
        # Bisect on the sign when the bracket straddles (odd multiplicity),
        # otherwise on the Sturm count, then polish with guarded Newton.
        fa, fb = p(a), p(b)
        use_sign = fa != 0 and fb != 0 and (fa > 0) != (fb > 0)
        for _ in range(200):
            if (b - a) <= bisect_target * max(one, abs(a), abs(b)):
                break
            m = (a + b) / 2
            fm = p(m)
            if fm == 0:
                return m
            if use_sign:
                if (fa > 0) != (fm > 0):
                    b = m
                else:
                    a, fa = m, fm
            else:
                if count_between(a, m) >= (n + 1) // 2:
                    b = m
                else:
                    a = m
        x = (a + b) / 2
        width = b - a
        for _ in range(12):
            d = dp(x)
            if d == 0:
                break
            step = p(x) / d
            x2 = x - step
            if not (a - width <= x2 <= b + width):
                break
            x = x2
            if abs(step) <= rel_accuracy * max(one, abs(x)):
                break
        return x

    raw = []
    for a, b, n in intervals:
        x = refine(a, b, n)
        mult = _multiplicity_at(x, gcd_tail) if (gcd_tail is not None and n == 1) else n
        raw.append((x, mult, n > 1))
    raw.sort(key=lambda t: t[0])

    roots, mults, merged = [], [], []
    for x, n, clustered in raw:
        if roots and abs(x - roots[-1]) <= merge_tol:
            mults[-1] += n
            merged[-1] = True
            roots[-1] = (roots[-1] + x) / 2
        else:
            roots.append(x)
            mults.append(n)
            merged.append(clustered or n > 1)
    keep = [(float(x), m, g) for x, m, g in zip(roots, mults, merged)
            if window[0] <= x <= window[1]]
    return RootSet(tuple(k[0] for k in keep),
                   tuple(k[1] for k in keep),
                   tuple(k[2] for k in keep),
                   (float(window[0]), float(window[1])))
