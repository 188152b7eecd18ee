"""Geometry of the ordered-eigenvalue chamber.

Eigenvalue vectors sorted descending live in a simplex whose vertices are the
embedded maximally mixed states of dimensions 1..N.  An orthonormal basis
built from normalized successive differences of those vertices maps any
unit-trace vector to (1/sqrt(N), y_2..y_N) where the trailing block is a
point on a sphere of radius r = sqrt(purity - 1/N) centered on the maximally
mixed state.  This module provides that basis, the purity coordinates, the
coupled angle bounds, and the bidirectional eigenvalue <-> polar maps.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import acos, atan2, cos, pi, sin, sqrt
from typing import NamedTuple

import numpy as np

from .errors import DimensionError, DomainError, InfeasibleContextError, OutOfChamberError

PHI2_MAX = pi / 3.0
BOUND_SLACK = 1e-12
_ORDER_TOL = 1e-14
_SUM_TOL = 1e-13
_R_DEGENERATE = 1e-13


def max_radius(n: int) -> float:
    """Largest purity radius: sqrt(1 - 1/n), reached by pure states."""
    return sqrt(1.0 - 1.0 / n)


def chamber_vertices(n: int) -> np.ndarray:
    """Rows k=1..n: maximally mixed state of dimension k embedded in n dims."""
    if n < 2:
        raise DimensionError(f"chamber needs n >= 2, got {n}")
    v = np.zeros((n, n))
    for k in range(1, n + 1):
        v[k - 1, :k] = 1.0 / k
    return v


def e_matrix(n: int) -> np.ndarray:
    """Orthogonal basis: row 1 points to the maximally mixed state, row j+1 is
    the normalized difference of the embedded MMS of dims (n-j, n-j+1)."""
    if n < 2:
        raise DimensionError(f"chamber needs n >= 2, got {n}")
    e = np.zeros((n, n))
    e[0] = 1.0 / sqrt(n)
    for j in range(1, n):
        m = n - j
        e[j, :m] = 1.0 / sqrt(m * (m + 1))
        e[j, m] = -sqrt(m / (m + 1.0))
    return e


@dataclass(frozen=True)
class ChamberBasis:
    dim: int
    vertices: np.ndarray
    e_matrix: np.ndarray


def chamber_basis(n: int) -> ChamberBasis:
    return ChamberBasis(dim=n, vertices=chamber_vertices(n), e_matrix=e_matrix(n))


@dataclass(frozen=True)
class SimplexPoint:
    """Descending probability vector (eigenvalue spectrum) in the chamber."""

    lambdas: np.ndarray
    dim: int = field(default=0)

    def __post_init__(self):
        lam = np.asarray(self.lambdas, dtype=float)
        if lam.ndim != 1 or lam.size < 2:
            raise DimensionError("simplex point needs a 1-D vector of length >= 2")
        if np.any(np.diff(lam) > _ORDER_TOL):
            raise OutOfChamberError("eigenvalues are not sorted descending")
        if lam[-1] < -_ORDER_TOL:
            raise OutOfChamberError(f"negative eigenvalue {lam[-1]:.3e}")
        s = lam.sum()
        if abs(s - 1.0) > _SUM_TOL:
            raise DomainError(f"eigenvalues sum to {s!r}, not 1")
        lam = lam.copy()
        lam.flags.writeable = False
        object.__setattr__(self, "lambdas", lam)
        object.__setattr__(self, "dim", lam.size)

    @property
    def purity(self) -> float:
        return float(np.sum(self.lambdas ** 2))

    @property
    def radius(self) -> float:
        return sqrt(max(self.purity - 1.0 / self.dim, 0.0))


class AngleValues(NamedTuple):
    tan: float
    sin: float
    cos: float


def x_from_purities(k: int, mu_k: float, mu_km1: float) -> float:
    """Convex-combination coordinate x_k = sqrt((k mu_k - 1)/(k mu_{k-1} - 1)).

    mu_1 is 1 by definition, so pass mu_km1=1.0 for k=2.
    """
    if k < 2:
        raise DimensionError(f"purity coordinate index must be >= 2, got {k}")
    if not (1.0 / k - BOUND_SLACK <= mu_k <= 1.0 + BOUND_SLACK):
        raise DomainError(f"mu_{k}={mu_k!r} outside [1/{k}, 1]")
    if mu_k > mu_km1 + BOUND_SLACK:
        raise DomainError(f"purity chain must be nonincreasing: mu_{k}={mu_k!r} > mu_{k-1}={mu_km1!r}")
    num = k * mu_k - 1.0
    den = k * mu_km1 - 1.0
    if den <= 0.0:
        if num <= BOUND_SLACK:
            return 0.0
        raise DomainError(f"degenerate coordinate: mu_{k-1}=1/{k} but mu_{k}>1/{k}")
    return min(sqrt(max(num, 0.0) / den), 1.0)


def angle_from_purity(k: int, mu_k: float) -> AngleValues:
    """(tan, sin, cos) of the chamber angle whose purity coordinate is mu_k."""
    if k < 2:
        raise DimensionError(f"angle index must be >= 2, got {k}")
    if not (1.0 / k - BOUND_SLACK <= mu_k <= 1.0 + BOUND_SLACK):
        raise DomainError(f"mu_{k}={mu_k!r} outside [1/{k}, 1]")
    t = max(k * mu_k - 1.0, 0.0)
    tan = sqrt(k + 1.0) * sqrt(t)
    cosv = 1.0 / (sqrt(k) * sqrt((k + 1.0) * mu_k - 1.0))
    sinv = sqrt((k + 1.0) / k) * sqrt(t / ((k + 1.0) * mu_k - 1.0))
    return AngleValues(tan=tan, sin=sinv, cos=cosv)


def upper_bound_mid(k: int, x_next: float) -> float:
    """Feasible upper bound of X_k given X_{k+1} = x_next (middle angles)."""
    if x_next >= 1.0:
        return 1.0
    return min(sqrt((k + 2.0) / k) * x_next / sqrt(1.0 - x_next * x_next), 1.0)


def upper_bound_top(n: int, r: float) -> float:
    """Feasible upper bound of X_{n-1} given the purity radius r."""
    if r <= 0.0:
        return 1.0
    return min(1.0 / (r * sqrt(n * (n - 1.0))), 1.0)


def phi2_lower(x3: float) -> float:
    """Lower limit of the in-plane angle given X_3 (or given sqrt(6)*r for n=3)."""
    if x3 >= 1.0:
        return 0.0
    a = sqrt(2.0) * x3 / sqrt(1.0 - x3 * x3)
    return acos(min(a, 1.0))


def angle_bounds(n: int, k: int, context: float) -> tuple[float, float]:
    """Closed feasible interval for level-k coordinate given its conditioner.

    For k >= 3 the interval is in X = cos(angle); for k = 2 it is in the angle
    itself.  The conditioner is the radius for the top level (k = n-1) and
    X_{k+1} otherwise.
    """
    if n < 3:
        raise DimensionError(f"no angular levels for n={n}")
    if not 2 <= k <= n - 1:
        raise DimensionError(f"angle level k={k} outside 2..{n - 1}")
    if k == n - 1:
        if not (0.0 <= context <= max_radius(n) + BOUND_SLACK):
            raise DomainError(f"radius {context!r} outside [0, {max_radius(n)!r}]")
        upper = upper_bound_top(n, context)
        if k == 2:
            lo, hi = (acos(min(upper, 1.0)) if upper < 1.0 else 0.0, PHI2_MAX)
        else:
            lo, hi = (1.0 / k, upper)
    elif k == 2:
        if not (1.0 / 3 - BOUND_SLACK <= context <= 1.0 + BOUND_SLACK):
            raise DomainError(f"X_3 context {context!r} outside [1/3, 1]")
        lo, hi = (phi2_lower(context), PHI2_MAX)
    else:
        if not (1.0 / (k + 1) - BOUND_SLACK <= context <= 1.0 + BOUND_SLACK):
            raise DomainError(f"X_{k + 1} context {context!r} outside [1/{k + 1}, 1]")
        lo, hi = (1.0 / k, upper_bound_mid(k, context))
    if hi < lo - _ORDER_TOL:
        raise InfeasibleContextError(f"empty interval for level {k}: [{lo!r}, {hi!r}]")
    return lo, max(hi, lo)


@dataclass(frozen=True)
class PolarCoords:
    """(r, phi2, X_3..X_{N-1}) coordinates of a chamber point.

    The radius is sqrt(purity - 1/N); X_k = cos of the level-k angle.  The
    coupled feasibility bounds are validated on construction.
    """

    dim: int
    r: float
    phi2: float = 0.0
    X: tuple[float, ...] = ()

    def __post_init__(self):
        n = self.dim
        if n < 2:
            raise DimensionError(f"polar coords need dim >= 2, got {n}")
        if len(self.X) != max(n - 3, 0):
            raise DimensionError(f"expected {max(n - 3, 0)} X values for dim {n}, got {len(self.X)}")
        if not (0.0 <= self.r <= max_radius(n) + BOUND_SLACK):
            raise DomainError(f"radius {self.r!r} outside [0, {max_radius(n)!r}]")
        if n == 2:
            return
        if not (-BOUND_SLACK <= self.phi2 <= PHI2_MAX + BOUND_SLACK):
            raise DomainError(f"phi2 {self.phi2!r} outside [0, pi/3]")
        if self.r <= _R_DEGENERATE:
            return  # unique point; angles are conventional
        # X[i] is X_{i+3}; walk from the top angle down, checking coupling
        ctx = self.r
        for k in range(n - 1, 2, -1):
            xk = self.X[k - 3]
            lo, hi = angle_bounds(n, k, ctx)
            if not (lo - BOUND_SLACK <= xk <= hi + BOUND_SLACK):
                raise OutOfChamberError(f"X_{k}={xk!r} outside [{lo!r}, {hi!r}]")
            ctx = xk
        # compare in cosine space: the angle-space lower bound is an arccos
        # with unbounded sensitivity near its collapse point
        if not (-BOUND_SLACK <= self.phi2 <= PHI2_MAX + BOUND_SLACK):
            raise OutOfChamberError(f"phi2={self.phi2!r} outside [0, pi/3]")
        if n == 3:
            a = 1.0 / (sqrt(6.0) * self.r)  # phi2 is the top level, bound set by r
        elif ctx < 1.0:
            a = sqrt(2.0) * ctx / sqrt(1.0 - ctx * ctx)
        else:
            a = 1.0
        if a < 1.0 and cos(self.phi2) > a + BOUND_SLACK:
            raise OutOfChamberError(f"phi2={self.phi2!r} below its bound (cos cap {a!r})")

    @property
    def purity(self) -> float:
        return 1.0 / self.dim + self.r * self.r


def _y_from_polar(p: PolarCoords) -> np.ndarray:
    """Coordinates in the orthogonal basis: (1/sqrt N, radial block)."""
    n = p.dim
    y = np.zeros(n)
    y[0] = 1.0 / sqrt(n)
    if n == 2:
        y[1] = p.r
        return y
    scale = p.r
    # descending levels N-1 .. 3 carry cosines X_k, the rest of the radius
    # cascades through the sines; the last two slots split on phi2
    for i, k in enumerate(range(n - 1, 2, -1)):
        xk = p.X[k - 3]
        y[i + 1] = scale * xk
        scale *= sqrt(max(1.0 - xk * xk, 0.0))
    y[n - 2] = scale * cos(p.phi2)
    y[n - 1] = scale * sin(p.phi2)
    return y


def eigs_from_polar(p: PolarCoords) -> SimplexPoint:
    """Map polar coordinates to the descending eigenvalue vector."""
    n = p.dim
    lam = e_matrix(n).T @ _y_from_polar(p)
    if np.any(np.diff(lam) > 1e-11) or lam[-1] < -1e-11:
        raise OutOfChamberError("polar point maps outside the ordered chamber")
    lam = np.maximum(lam, 0.0)
    lam /= lam.sum()
    lam = np.sort(lam)[::-1]  # fp-level ties only; content already ordered
    sp = SimplexPoint(lam)
    if abs(sp.purity - p.purity) > 1e-12:
        raise DomainError("purity mismatch after coordinate transform")
    return sp


def polar_from_eigs(s: SimplexPoint) -> PolarCoords:
    """Inverse of :func:`eigs_from_polar`.

    At zero radius (and below any level where the angular content vanishes)
    the remaining coordinates are set to the collapsed feasible values: each
    X_k at its lower bound 1/k and phi2 at its context-dependent lower bound.
    """
    n = s.dim
    y = e_matrix(n) @ s.lambdas
    r = sqrt(max(float(np.sum(y[1:] ** 2)), 0.0))
    if n == 2:
        return PolarCoords(dim=2, r=0.0 if r <= _R_DEGENERATE else r)
    if r <= _R_DEGENERATE:
        xs = tuple(1.0 / k for k in range(3, n))
        return PolarCoords(dim=n, r=0.0, phi2=PHI2_MAX if n >= 4 else 0.0, X=xs)

    xs_desc: list[float] = []  # collected top angle first: X_{n-1}, ..., X_3
    scale = r
    degenerate = False
    for i, k in enumerate(range(n - 1, 2, -1)):
        if scale <= _R_DEGENERATE:
            degenerate = True
            xs_desc.append(1.0 / k)
            continue
        xk = min(max(y[i + 1] / scale, 0.0), 1.0)
        xs_desc.append(xk)
        scale *= sqrt(max(1.0 - xk * xk, 0.0))
    if degenerate or scale <= _R_DEGENERATE:
        x3 = xs_desc[-1] if xs_desc else 1.0
        phi2 = phi2_lower(x3)
    else:
        phi2 = atan2(y[n - 1], y[n - 2])
        phi2 = min(max(phi2, 0.0), PHI2_MAX)
    return PolarCoords(dim=n, r=r, phi2=phi2, X=tuple(reversed(xs_desc)))
