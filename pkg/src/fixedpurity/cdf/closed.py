"""Closed-form marginal CDFs for dimensions 2, 3 and 4.

Conventions shared by all pieces:

- the radial coordinate is r = sqrt(purity - 1/N), with region breakpoints at
  the purities 1/(N-1), ..., 1/2 where a fixed-radius sphere starts leaving
  the eigenvalue simplex;
- a probe exactly at a breakpoint evaluates the upper-region branch
  (continuity makes the value identical, determinism wants one rule);
- conditional angle CDFs are ratios of one cumulative function evaluated at
  the probe and at the context-dependent upper limit.
"""

from __future__ import annotations

from functools import lru_cache
from math import acos, asin, pi, sqrt

from scipy.integrate import quad

from ..chamber import max_radius, phi2_lower
from ..errors import DomainError

PHI2_MAX = pi / 3.0
X3_SPLIT = 1.0 / sqrt(3.0)
R3_SPLIT = 1.0 / sqrt(6.0)
R4_SPLITS = (1.0 / (2.0 * sqrt(3.0)), 0.5)
R4_MAX = sqrt(3.0) / 2.0
R3_MAX = sqrt(2.0 / 3.0)
N3_RADIAL_NORM = 1.0 / (4.0 * sqrt(3.0))
N4_RADIAL_NORM = 1.0 / 72.0
N4_INSPHERE_ANGLE_NORM = pi / 6.0
_SLACK = 1e-12


def phi2_span(x3: float) -> float:
    """Length of the feasible phi2 interval for a given X_3."""
    return PHI2_MAX - phi2_lower(x3)


def x3_mass(x3: float) -> float:
    """Cumulative feasible phi2 measure from X_3 = 1/3 up to ``x3``.

    Below 1/sqrt(3) the lower phi2 limit is active and the integral has the
    arccos/arcsin closed form; above it the span is constant pi/3.
    """
    if x3 < 1.0 / 3.0 - _SLACK or x3 > 1.0 + _SLACK:
        raise DomainError(f"X_3={x3!r} outside [1/3, 1]")
    x3 = min(max(x3, 1.0 / 3.0), 1.0)
    if x3 >= X3_SPLIT:
        return (pi / 6.0) * (2.0 * x3 - 1.0)
    a = sqrt(2.0) * x3 / sqrt(1.0 - x3 * x3)
    y = acos(min(a, 1.0))
    sin_y = sqrt(max(1.0 - a * a, 0.0))
    return x3 * (PHI2_MAX - y) + asin(sin_y / sqrt(3.0)) - pi / 6.0


def cdf_r2(mu2: float) -> float:
    """Radial CDF for N=2 as a function of purity: sqrt(2 mu - 1)."""
    if not (0.5 - _SLACK <= mu2 <= 1.0 + _SLACK):
        raise DomainError(f"mu_2={mu2!r} outside [1/2, 1]")
    return sqrt(min(max(2.0 * mu2 - 1.0, 0.0), 1.0))


def cdf_phi2_n3(phi2: float, r3: float) -> float:
    """Conditional CDF of phi2 at fixed radius, N=3 (linear in phi2)."""
    if not (0.0 <= r3 <= R3_MAX + _SLACK):
        raise DomainError(f"r_3={r3!r} outside [0, sqrt(2/3)]")
    lo = acos(min(1.0 / (sqrt(6.0) * r3), 1.0)) if r3 > 0.0 else 0.0
    if phi2 < lo - 1e-9 or phi2 > PHI2_MAX + _SLACK:
        raise DomainError(f"phi2={phi2!r} outside [{lo!r}, pi/3] at r_3={r3!r}")
    if PHI2_MAX - lo <= _SLACK:
        return 1.0  # interval collapsed at the pure-state corner
    return min(max((phi2 - lo) / (PHI2_MAX - lo), 0.0), 1.0)


def cdf_r3(r3: float) -> float:
    """Radial CDF for N=3."""
    if not (0.0 <= r3 <= R3_MAX + _SLACK):
        raise DomainError(f"r_3={r3!r} outside [0, sqrt(2/3)]")
    r3 = min(r3, R3_MAX)
    # just past the split the two square-root terms of the upper branch are
    # sqrt-of-roundoff noise (~1e-8); the lower polynomial stays accurate to
    # ~1e-11 there, so the branch point is nudged right by 1e-7
    if r3 < R3_SPLIT + 1e-7:
        return (pi * r3 * r3 / 6.0) / N3_RADIAL_NORM
    g = (2.0 * pi * r3 * r3 + sqrt(max(6.0 * r3 * r3 - 1.0, 0.0))
         - 6.0 * r3 * r3 * acos(min(1.0 / (sqrt(6.0) * r3), 1.0))) / 12.0
    return min(g / N3_RADIAL_NORM, 1.0)


def cdf_phi2_n4(phi2: float, x3: float) -> float:
    """Conditional CDF of phi2 at fixed X_3, N=4 (linear in phi2)."""
    if x3 < 1.0 / 3.0 - _SLACK or x3 > 1.0 + _SLACK:
        raise DomainError(f"X_3={x3!r} outside [1/3, 1]")
    lo = phi2_lower(min(max(x3, 1.0 / 3.0), 1.0))
    if phi2 < lo - 1e-9 or phi2 > PHI2_MAX + _SLACK:
        raise DomainError(f"phi2={phi2!r} outside [{lo!r}, pi/3] at X_3={x3!r}")
    if PHI2_MAX - lo <= _SLACK:
        return 1.0
    return min(max((phi2 - lo) / (PHI2_MAX - lo), 0.0), 1.0)


def x3_upper(r4: float) -> float:
    """Feasible upper limit of X_3 at radius r4 (N=4)."""
    if r4 <= 0.0:
        return 1.0
    return min(1.0 / (2.0 * sqrt(3.0) * r4), 1.0)


def cdf_X3_n4(x3: float, r4: float) -> float:
    """Conditional CDF of X_3 at fixed radius, N=4."""
    if not (0.0 <= r4 <= R4_MAX + _SLACK):
        raise DomainError(f"r_4={r4!r} outside [0, sqrt(3)/2]")
    ub = x3_upper(r4)
    if x3 < 1.0 / 3.0 - _SLACK or x3 > ub + _SLACK:
        raise DomainError(f"X_3={x3!r} outside [1/3, {ub!r}] at r_4={r4!r}")
    total = x3_mass(ub)
    if total <= _SLACK:
        return 1.0  # pure-state corner, interval collapsed
    return min(max(x3_mass(min(x3, ub)) / total, 0.0), 1.0)


@lru_cache(maxsize=4096)
def _r4_region3_mass(r4: float) -> float:
    """Integral of s^2 * x3_mass(x3_upper(s)) from 1/2 to r4 (region 3).

    The defining integral is used directly; the printed simplification of
    this antiderivative is not trusted (see cdf_r4 continuity tests).
    """
    if r4 <= 0.5:
        return 0.0
    val, _ = quad(lambda s: s * s * x3_mass(x3_upper(s)), 0.5, min(r4, R4_MAX),
                  epsabs=2e-16, epsrel=1e-13, limit=200)
    return val


_F4_AT_SPLIT2 = 2.0 * sqrt(3.0) * pi * 0.25 - 4.0 * pi * 0.125 - pi / (6.0 * sqrt(3.0))


def cdf_r4(r4: float) -> float:
    """Radial CDF for N=4 (normalizing denominator 1/72)."""
    if not (0.0 <= r4 <= R4_MAX + _SLACK):
        raise DomainError(f"r_4={r4!r} outside [0, sqrt(3)/2]")
    r4 = min(r4, R4_MAX)
    if r4 < R4_SPLITS[0]:
        return 4.0 * pi * r4 ** 3
    if r4 < R4_SPLITS[1]:
        return 2.0 * sqrt(3.0) * pi * r4 * r4 - 4.0 * pi * r4 ** 3 - pi / (6.0 * sqrt(3.0))
    return min(_F4_AT_SPLIT2 + _r4_region3_mass(r4) / N4_RADIAL_NORM, 1.0)


def radial_cdf_closed(n: int, r: float) -> float:
    if n == 2:
        if not (0.0 <= r <= max_radius(2) + _SLACK):
            raise DomainError(f"r_2={r!r} outside [0, {max_radius(2)!r}]")
        return min(r / max_radius(2), 1.0)
    if n == 3:
        return cdf_r3(r)
    if n == 4:
        return cdf_r4(r)
    raise DomainError(f"no closed-form radial CDF for n={n}")


def radial_tail_closed(n: int, r: float) -> float:
    """1 - F computed in forms that keep relative accuracy in the flat tail."""
    if n == 2:
        mu = r * r + 0.5
        return 2.0 * (1.0 - mu) / (1.0 + sqrt(max(2.0 * mu - 1.0, 0.0)))
    if n == 3:
        return 1.0 - cdf_r3(r)
    if n == 4:
        if r >= R4_SPLITS[1]:
            return (_r4_region3_mass(R4_MAX) - _r4_region3_mass(r)) / N4_RADIAL_NORM
        return 1.0 - cdf_r4(r)
    raise DomainError(f"no closed-form radial CDF for n={n}")
