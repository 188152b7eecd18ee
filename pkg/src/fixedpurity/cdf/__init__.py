"""Marginal CDFs of the fixed-purity construction and their inverses.

Closed forms cover dimensions 2..4; a generic tabulated quadrature chain
covers any higher dimension (and doubles as an independent cross-check of the
closed forms).  See :func:`cdf_numeric`, :func:`invert_cdf`,
:func:`region_shares` and :func:`build_table`.
"""

from __future__ import annotations

from math import sqrt
from typing import Callable, NamedTuple

from ..chamber import max_radius
from ..errors import DimensionError, DomainError
from .chain import GridSpec, get_chain
from .closed import (
    N3_RADIAL_NORM,
    N4_INSPHERE_ANGLE_NORM,
    N4_RADIAL_NORM,
    PHI2_MAX,
    R3_SPLIT,
    R4_SPLITS,
    X3_SPLIT,
    cdf_phi2_n3,
    cdf_phi2_n4,
    cdf_r2,
    cdf_r3,
    cdf_r4,
    cdf_X3_n4,
    phi2_span,
    radial_cdf_closed,
    radial_tail_closed,
    x3_mass,
    x3_upper,
)
from .table import CdfTable, build_table
from scipy.optimize import brentq


class CdfValue(NamedTuple):
    """CDF evaluation with its achieved absolute tolerance."""

    value: float
    abs_tol: float
    converged: bool


def cdf_numeric(n: int, level: str | int, point: float, context: float | None = None,
                grid: GridSpec = GridSpec(), target_tol: float = 1e-8) -> CdfValue:
    """Evaluate a marginal CDF through the numeric chain.

    ``level`` is "radial" (or n) for the radial CDF, else the angle index k;
    angle levels below the top need the conditioning value.  Works for any
    n >= 3; for n <= 4 it is an independent cross-check of the closed forms.
    """
    chain = get_chain(n, grid)
    converged = chain.abs_tol <= target_tol
    if level in ("radial", n):
        return CdfValue(chain.radial_cdf(point), chain.abs_tol, converged)
    k = int(level)
    if context is None:
        raise DomainError("conditional CDFs need their conditioning value")
    return CdfValue(chain.angle_cdf(k, point, context), chain.abs_tol, converged)


def radial_cdf(n: int, r: float | None = None, mu: float | None = None) -> float:
    """Radial CDF at radius r or purity mu; closed forms for n <= 4."""
    if (r is None) == (mu is None):
        raise DomainError("pass exactly one of r or mu")
    if r is None:
        if not (1.0 / n - 1e-12 <= mu <= 1.0 + 1e-12):
            raise DomainError(f"mu={mu!r} outside [1/{n}, 1]")
        r = sqrt(max(mu - 1.0 / n, 0.0))
    if n <= 4:
        return radial_cdf_closed(n, r)
    return get_chain(n).radial_cdf(r)


def radial_tail(n: int, r: float | None = None, mu: float | None = None) -> float:
    """1 - radial CDF, evaluated in tail-accurate form."""
    if (r is None) == (mu is None):
        raise DomainError("pass exactly one of r or mu")
    if r is None:
        r = sqrt(max(mu - 1.0 / n, 0.0))
    if n <= 4:
        return radial_tail_closed(n, r)
    return get_chain(n).radial_tail(r)


def invert_radial(n: int, p: float) -> float:
    """Radius r with F_radial(r) = p."""
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"probability {p!r} outside [0, 1]")
    if n > 4:
        return get_chain(n).invert_radial(p)
    rmax = max_radius(n)
    if p > 0.9:
        g = lambda r: radial_tail_closed(n, r) - (1.0 - p)
        if g(rmax) >= 0.0:
            return rmax
        return brentq(g, 0.0, rmax, xtol=1e-14, rtol=8.9e-16)
    f = lambda r: radial_cdf_closed(n, r) - p
    if f(0.0) >= 0.0:
        return 0.0
    if f(rmax) <= 0.0:
        return rmax
    return brentq(f, 0.0, rmax, xtol=1e-14, rtol=8.9e-16)


def invert_cdf(table_or_fn, p: float, lo: float | None = None, hi: float | None = None,
               tail_fn: Callable[[float], float] | None = None) -> float:
    """Invert a CdfTable or a monotone closed-form callable on [lo, hi].

    Closed-form callables are bisected/brentq'd to 1e-12 in x; probabilities
    above 0.9 invert against ``tail_fn`` (1-F) when provided, preserving
    relative accuracy in flat tails.
    """
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"probability {p!r} outside [0, 1]")
    if isinstance(table_or_fn, CdfTable):
        return table_or_fn.invert(p)
    if lo is None or hi is None:
        raise DomainError("closed-form inversion needs the domain [lo, hi]")
    if p > 0.9 and tail_fn is not None:
        g = lambda x: tail_fn(x) - (1.0 - p)
        if g(hi) >= 0.0:
            return hi
        return brentq(g, lo, hi, xtol=1e-12, rtol=8.9e-16)
    f = lambda x: table_or_fn(x) - p
    if f(lo) >= 0.0:
        return lo
    if f(hi) <= 0.0:
        return hi
    return brentq(f, lo, hi, xtol=1e-12, rtol=8.9e-16)


def region_bounds(n: int) -> list[tuple[float, float]]:
    """Purity intervals [1/(n-i+1), 1/(n-i)] for regions i = 1..n-1."""
    return [(1.0 / (n - i + 1), 1.0 / (n - i)) for i in range(1, n)]


def region_shares(n: int) -> list[tuple[int, float]]:
    """Probability mass of each purity region under the flat chamber measure."""
    if n < 2:
        raise DimensionError(f"need n >= 2, got {n}")
    if n == 2:
        return [(1, 1.0)]
    shares = []
    prev = 0.0
    for i, (_, mu_hi) in enumerate(region_bounds(n), start=1):
        hi = radial_cdf(n, mu=mu_hi) if i < n - 1 else 1.0
        shares.append((i, hi - prev))
        prev = hi
    return shares


def region_tails(n: int, cuts: tuple[float, ...] = (0.95, 0.99)) -> list[tuple[float, float]]:
    """Upper-tail masses P[purity >= cut] for each cut."""
    return [(c, radial_tail(n, mu=c)) for c in cuts]
