"""Physical parameters of the generalized trigonometric Scarf well.

The potential on the finite segment |x| < L/2 (infinite walls outside) is

    V(x) = V0 + [V+ - V- sin(lam x)] / cos^2(lam x) + V1 sin(lam x),

with lam = pi/L.  Energies are tracked both in physical units E and in the
dimensionless form eps = 2 E / lam^2; couplings map to u_i = 2 V_i / lam^2.
Without the V1 term the well is exactly solvable and the closed-form spectrum
here serves as an oracle for both numerical methods.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError, ValidationError


@dataclass(frozen=True)
class ScarfParams:
    """Input couplings plus every derived dimensionless quantity.

    mu and nu are the (nonnegative) basis exponents; aim_alpha is the
    exponent of the regularizing (1-y^2)^alpha transformation and exists
    only on the V- = 0 branch where that transformation applies.
    """

    V0: float
    Vplus: float
    Vminus: float
    V1: float
    L: float
    lam: float
    u0: float
    u1: float
    uplus: float
    uminus: float
    mu: float
    nu: float
    Wplus: float
    Wminus: float
    aim_alpha: float | None


def derive_params(V0: float, Vplus: float, Vminus: float, V1: float,
                  L: float) -> ScarfParams:
    """Validate couplings and populate all derived quantities.

    Reality demands V- >= 0 and both basis exponents real, i.e.
    V+ - V- >= -lam^2/8 and V+ + V- >= -lam^2/8.
    """
    if not (L > 0):
        raise ValidationError(f"L must be positive, got {L}")
    if Vminus < 0:
        raise ValidationError(f"reality condition violated: V- = {Vminus} < 0")
    lam = math.pi / L
    lam2 = lam * lam
    mu_sq = 0.25 + 2.0 * (Vplus - Vminus) / lam2
    nu_sq = 0.25 + 2.0 * (Vplus + Vminus) / lam2
    if mu_sq < 0:
        raise ValidationError(
            f"reality condition violated: V+ - V- = {Vplus - Vminus} < -lam^2/8 = {-lam2 / 8}")
    if nu_sq < 0:
        raise ValidationError(
            f"reality condition violated: V+ + V- = {Vplus + Vminus} < -lam^2/8 = {-lam2 / 8}")
    uplus = 2.0 * Vplus / lam2
    aim_alpha = None
    if Vminus == 0.0:
        aim_alpha = 0.25 * (-1.0 + math.sqrt(1.0 + 4.0 * uplus))
    return ScarfParams(
        V0=float(V0), Vplus=float(Vplus), Vminus=float(Vminus), V1=float(V1),
        L=float(L), lam=lam,
        u0=2.0 * V0 / lam2, u1=2.0 * V1 / lam2,
        uplus=uplus, uminus=2.0 * Vminus / lam2,
        mu=math.sqrt(mu_sq), nu=math.sqrt(nu_sq),
        Wplus=Vplus + Vminus, Wminus=Vplus - Vminus,
        aim_alpha=aim_alpha,
    )


def potential_value(p: ScarfParams, x: float) -> float:
    """V(x) inside the well; the walls at |x| >= L/2 are out of domain."""
    if not (abs(x) < p.L / 2):
        raise DomainError(f"x = {x} outside the open well (-L/2, L/2), L = {p.L}")
    s = math.sin(p.lam * x)
    c = math.cos(p.lam * x)
    return p.V0 + (p.Vplus - p.Vminus * s) / (c * c) + p.V1 * s


def scarf_closed_spectrum(p: ScarfParams, n: int) -> float:
    """Closed-form E_n of the V1 = 0 well (the exactly solvable limit)."""
    if p.V1 != 0.0:
        raise ValidationError("closed-form spectrum requires V1 = 0")
    if n < 0:
        raise ValidationError("level index must be nonnegative")
    lam2 = p.lam * p.lam
    half_sum = 0.5 * (math.sqrt(0.25 + 2.0 * p.Wplus / lam2)
                      + math.sqrt(0.25 + 2.0 * p.Wminus / lam2))
    return 0.5 * lam2 * (n + 0.5 + half_sum) ** 2 + p.V0


def dimensionless_energy(p: ScarfParams, energy: float) -> float:
    """eps = 2 E / lam^2."""
    return 2.0 * energy / (p.lam * p.lam)


def physical_energy(p: ScarfParams, eps: float) -> float:
    """E = eps lam^2 / 2."""
    return 0.5 * eps * p.lam * p.lam
