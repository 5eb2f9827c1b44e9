"""Jacobi polynomials and the closed-form identities behind the basis method.

Evaluation uses the upward three-term recursion, which is stable on [-1, 1]
for the moderate degrees needed here.  The normalization constants and the
tridiagonal matrix elements of y come from the standard orthogonality and
recursion identities; gamma-function ratios go through log-gamma differences
so they survive degrees up to a few hundred.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ValidationError


@dataclass(frozen=True)
class JacobiOrder:
    """Degree n Jacobi polynomial with weight exponents (mu, nu)."""

    mu: float
    nu: float
    n: int

    def __post_init__(self):
        if not (self.mu > -1 and self.nu > -1):
            raise ValidationError(
                f"weight exponents must exceed -1, got mu={self.mu}, nu={self.nu}")
        if self.n < 0:
            raise ValidationError("degree must be nonnegative")


def _recursion_step(m, mu, nu, y, pm, pmm1):
    """P_{m+1} from P_m, P_{m-1} via the three-term recursion."""
    s = 2 * m + mu + nu
    if m == 0:
        # (nu^2 - mu^2)/((mu+nu)(mu+nu+2)) with the removable mu+nu = 0
        # singularity cancelled analytically.
        a = (nu - mu) / (mu + nu + 2.0)
    else:
        a = (nu * nu - mu * mu) / (s * (s + 2.0))
    b = 2.0 * (m + mu) * (m + nu) / (s * (s + 1.0)) if m > 0 else 0.0
    c = 2.0 * (m + 1.0) * (m + mu + nu + 1.0) / ((s + 1.0) * (s + 2.0))
    return ((y - a) * pm - b * pmm1) / c


def jacobi_eval(o: JacobiOrder, y, *, strict: bool = True):
    """P_n^(mu,nu)(y) by upward recursion; accepts scalars or arrays."""
    arr = np.asarray(y, dtype=float)
    if strict and (np.any(arr < -1.0) or np.any(arr > 1.0)):
        raise DomainError("argument outside [-1, 1]")
    pm = np.ones_like(arr)
    if o.n == 0:
        return pm if arr.shape else float(pm)
    pmm1 = np.zeros_like(arr)
    for m in range(o.n):
        pm, pmm1 = _recursion_step(m, o.mu, o.nu, arr, pm, pmm1), pm
    return pm if arr.shape else float(pm)


def _log_gamma_signed(x: float):
    """(log|Gamma(x)|, sign) valid for any non-pole real argument."""
    if x > 0:
        return math.lgamma(x), 1.0
    # Gamma alternates sign between negative integers.
    sign = 1.0 if math.floor(x) % 2 == 0 else -1.0
    return math.lgamma(x), sign


def basis_norm(o: JacobiOrder) -> float:
    """Normalization constant making the weighted polynomials orthonormal."""
    m, mu, nu = o.n, o.mu, o.nu
    log_terms = 0.0
    sign = 1.0
    for arg, up in ((m + 1.0, True), (m + mu + nu + 1.0, True),
                    (m + nu + 1.0, False), (m + mu + 1.0, False)):
        lg, s = _log_gamma_signed(arg)
        log_terms += lg if up else -lg
        sign *= s
    front = (2.0 * m + mu + nu + 1.0) / 2.0 ** (mu + nu + 1.0)
    value_sq = front * sign * math.exp(log_terms)
    if value_sq <= 0:
        raise ValidationError(
            f"normalization is not real for mu={mu}, nu={nu}, m={m}")
    return math.sqrt(value_sq)


def y_matrix_element(mu: float, nu: float, n: int, m: int) -> float:
    """<n|y|m> in the orthonormal basis: tridiagonal and symmetric in (n, m)."""
    if n < 0 or m < 0:
        raise ValidationError("indices must be nonnegative")
    if abs(n - m) > 1:
        return 0.0
    if n == m:
        if n == 0:
            return (nu - mu) / (mu + nu + 2.0)
        s = 2.0 * n + mu + nu
        return (nu * nu - mu * mu) / (s * (s + 2.0))
    k = min(n, m)  # coupling between k and k+1
    s = 2.0 * k + mu + nu
    inner = (k + 1.0) * (k + mu + 1.0) * (k + nu + 1.0) * (k + mu + nu + 1.0) \
        / ((s + 1.0) * (s + 3.0))
    return 2.0 / (s + 2.0) * math.sqrt(inner)


def basis_eval(p, m: int, y):
    """Basis function phi_m(y): normalized weight times Jacobi polynomial.

    The weight exponents are (mu + 1/2)/2 and (nu + 1/2)/2, which vanish at
    y = +-1 for the physical parameter range (mu, nu >= 0), enforcing the
    hard-wall boundary conditions.
    """
    order = JacobiOrder(p.mu, p.nu, m)
    arr = np.asarray(y, dtype=float)
    a_exp = 0.5 * (p.mu + 0.5)
    b_exp = 0.5 * (p.nu + 0.5)
    base = np.clip(1.0 - arr, 0.0, None) ** a_exp \
        * np.clip(1.0 + arr, 0.0, None) ** b_exp
    vals = basis_norm(order) * base * jacobi_eval(order, arr, strict=False)
    return vals if arr.shape else float(vals)
