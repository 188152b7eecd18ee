"""Generic numeric CDF chain for arbitrary dimension.

The joint density on a fixed-radius slice of the chamber factorizes level by
level, so every conditional CDF is one context-free cumulative function
rescaled by the context:

    F_k(x; ctx) = H_k(x) / H_k(ub_k(ctx))

with H_k(x) the integral from 1/k to x of (1-t^2)^((k-3)/2) * A_{k-1}(t),
A_{k-1}(t) = H_{k-1}(ub_{k-1}(t)), and A_2 the length of the feasible phi2
interval.  The radial CDF integrates s^(n-2) * A_{n-1}(s).

Each H_k is tabulated once per dimension on a kink-aligned grid (panel
Gauss-Legendre, trig substitution absorbs the (1-t^2)^((k-3)/2) weight) and
interpolated monotonically.  A half-density rebuild provides the achieved
absolute tolerance estimate.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import pi, sqrt

import numpy as np
from scipy.optimize import brentq

from ..chamber import max_radius, upper_bound_mid, upper_bound_top
from ..errors import DimensionError, DomainError
from .closed import PHI2_MAX, X3_SPLIT

_SLACK = 1e-12


@dataclass(frozen=True)
class GridSpec:
    """Knot layout and quadrature order for the chain tables."""

    knots_per_region: int = 96
    gl_order: int = 16
    tail_refine: int = 12          # extra geometric knots toward the upper radial end
    truncate_large_n: bool = False  # opt-in large-N lower-limit truncation, n > 8 only


def phi2_span_vec(x3: np.ndarray) -> np.ndarray:
    """Feasible phi2 interval length as a function of X_3 (vectorized)."""
    x3 = np.asarray(x3, dtype=float)
    a = np.empty_like(x3)
    low = x3 < X3_SPLIT
    a[low] = np.sqrt(2.0) * x3[low] / np.sqrt(1.0 - x3[low] ** 2)
    a[~low] = 1.0
    return PHI2_MAX - np.arccos(np.minimum(a, 1.0))


@lru_cache(maxsize=32)
def _gl_nodes(order: int) -> tuple[np.ndarray, np.ndarray]:
    return np.polynomial.legendre.leggauss(order)


def _panel_integrals(f, edges: np.ndarray, order: int) -> tuple[np.ndarray, np.ndarray]:
    """Per-panel integrals of ``f`` between consecutive edges + error estimates."""
    xg, wg = _gl_nodes(order)
    xh, wh = _gl_nodes(max(order // 2, 4))
    mid = 0.5 * (edges[1:] + edges[:-1])
    half = 0.5 * (edges[1:] - edges[:-1])
    pts = mid[:, None] + half[:, None] * xg[None, :]
    vals = (f(pts.ravel()).reshape(pts.shape) * wg[None, :]).sum(axis=1) * half
    pts2 = mid[:, None] + half[:, None] * xh[None, :]
    vals2 = (f(pts2.ravel()).reshape(pts2.shape) * wh[None, :]).sum(axis=1) * half
    return vals, np.abs(vals - vals2)


def _region_knots(lo: float, hi: float, count: int, wedge: int = 14) -> np.ndarray:
    """Knots in [lo, hi]: Chebyshev-clustered plus geometric wedges into both
    edges.  Region edges carry square-root kinks of the integrands, and the
    geometric wedge keeps both the quadrature and the monotone-cubic
    interpolation accurate there."""
    t = np.cos(np.linspace(pi, 0.0, count))
    base = lo + (hi - lo) * 0.5 * (t + 1.0)
    w = (hi - lo) * 0.25 ** np.arange(1, wedge + 1)
    return np.unique(np.concatenate([base, lo + w, hi - w]))


def _dedupe(knots: np.ndarray) -> np.ndarray:
    """Merge knots closer than 1e-10 of the span (degenerate panels corrupt
    the slope caps); both endpoints are kept exactly."""
    knots = np.unique(knots)
    atol = (knots[-1] - knots[0]) * 1e-10
    keep = np.concatenate(([True], np.diff(knots) > atol))
    keep[-1] = True
    out = knots[keep]
    if out.size >= 2 and out[-1] - out[-2] <= atol:
        out = np.delete(out, -2)
    return out


def _inv_ub_mid(k: int, b: float) -> float:
    # inverse of upper_bound_mid(k, .) = b
    c = (k + 2.0) / k
    return b / sqrt(b * b + c)


def _fc_clamp(knots: np.ndarray, cum: np.ndarray, derivs: np.ndarray) -> np.ndarray:
    """Clamp knot slopes to 3x the adjacent secants (de Boor-Swartz box),
    which keeps the exact-derivative cubic Hermite monotone."""
    sec = np.diff(cum) / np.diff(knots)
    cap = np.empty_like(derivs)
    cap[0] = 3.0 * sec[0]
    cap[-1] = 3.0 * sec[-1]
    cap[1:-1] = 3.0 * np.minimum(sec[:-1], sec[1:])
    return np.minimum(np.maximum(derivs, 0.0), np.maximum(cap, 0.0))


class _CumTable:
    """Monotone cumulative table of one integrand over [lo, hi].

    Built from per-panel integrals plus the exact integrand values at the
    knots, interpolated by cubic Hermite (error O(h^4) with exact slopes).
    """

    def __init__(self, knots: np.ndarray, panel_vals: np.ndarray,
                 panel_errs: np.ndarray, derivs: np.ndarray):
        from scipy.interpolate import CubicHermiteSpline

        cum = np.concatenate(([0.0], np.cumsum(panel_vals)))
        self.knots = knots
        self.cum = cum
        self.total = float(cum[-1])
        # tail accumulated from the top knot down, for relative accuracy at F ~ 1
        self.rev = np.concatenate(([0.0], np.cumsum(panel_vals[::-1])))[::-1]
        self.panel_err = float(np.sum(panel_errs))
        d = _fc_clamp(knots, cum, np.asarray(derivs, dtype=float))
        self._fwd = CubicHermiteSpline(knots, cum, d)
        self._tail = CubicHermiteSpline(knots, self.rev, -d)

    def value(self, x) -> np.ndarray | float:
        x = np.clip(x, self.knots[0], self.knots[-1])
        return self._fwd(x)

    def tail(self, x) -> np.ndarray | float:
        x = np.clip(x, self.knots[0], self.knots[-1])
        return self._tail(x)

    def invert(self, target: float, lo: float, hi: float) -> float:
        f = lambda x: float(self._fwd(x)) - target
        flo, fhi = f(lo), f(hi)
        if flo >= 0.0:
            return lo
        if fhi <= 0.0:
            return hi
        return brentq(f, lo, hi, xtol=1e-13, rtol=8.9e-16)


class CdfChain:
    """All marginal/conditional CDFs for one dimension, numeric path."""

    def __init__(self, n: int, grid: GridSpec = GridSpec(), _estimate: bool = True):
        if n < 3:
            raise DimensionError(f"chain needs n >= 3, got {n}")
        if grid.truncate_large_n and n <= 8:
            raise DomainError("large-N truncation is opt-in for n > 8 only")
        self.n = n
        self.grid = grid
        self.levels: dict[int, _CumTable] = {}
        self.level_breaks: dict[int, list[float]] = {}
        self.abs_tol = 0.0
        self._build(grid)
        if _estimate:
            finer = GridSpec(knots_per_region=grid.knots_per_region * 3 // 2 + 1,
                             gl_order=grid.gl_order + 4,
                             tail_refine=grid.tail_refine + 2,
                             truncate_large_n=grid.truncate_large_n)
            self.abs_tol = self._estimate_tol(CdfChain(n, finer, _estimate=False))

    # -- construction ---------------------------------------------------

    def _lower_limit(self, k: int) -> float:
        # the sine-power concentration bound sqrt(2/(k-3)) only cuts anything
        # once it drops below 1, i.e. for levels k >= 6
        if self.grid.truncate_large_n and k >= 6:
            return max(1.0 / k, sqrt(2.0 / (k - 3.0)))
        return 1.0 / k

    def _build(self, grid: GridSpec) -> None:
        n = self.n
        breaks = [X3_SPLIT]  # kinks of the level-3 integrand
        for k in range(3, n):
            knots = self._level_knots(k, breaks, grid)
            integrand = self._level_integrand(k)
            self.levels[k] = self._integrate_level(k, knots, integrand, grid)
            self.level_breaks[k] = breaks
            nxt = [_inv_ub_mid(k, b) for b in breaks + [1.0]]
            breaks = sorted(b for b in nxt if self._lower_limit(k + 1) < b < 1.0)
        if n == 3:
            top_breaks = []  # the phi2 span itself has no interior kink in r
        else:
            top_breaks = self.level_breaks[n - 1]
        cands = [1.0 / (b * sqrt(n * (n - 1.0))) for b in top_breaks + [1.0]]
        self.radial_breaks = sorted(r for r in cands if 0.0 < r < max_radius(n))
        self.radial = self._build_radial(grid)

    def _level_knots(self, k: int, breaks: list[float], grid: GridSpec) -> np.ndarray:
        lo = self._lower_limit(k)
        pts = [lo] + [b for b in breaks if lo < b < 1.0] + [1.0]
        segs = [_region_knots(a, b, grid.knots_per_region) for a, b in zip(pts, pts[1:])]
        return _dedupe(np.concatenate(segs))

    def _level_integrand(self, k: int):
        if k == 3:
            return phi2_span_vec
        lower = self.levels[k - 1]

        def f(t: np.ndarray) -> np.ndarray:
            t = np.asarray(t)
            ub = np.minimum(sqrt((k + 1.0) / (k - 1.0)) * t / np.sqrt(np.maximum(1.0 - t * t, 1e-300)), 1.0)
            w = np.power(np.maximum(1.0 - t * t, 0.0), (k - 3.0) / 2.0)
            return w * np.asarray(lower.value(ub))

        return f

    def _integrate_level(self, k: int, knots: np.ndarray, integrand, grid: GridSpec) -> _CumTable:
        derivs = integrand(knots)
        if k == 3:
            vals, errs = _panel_integrals(integrand, knots, grid.gl_order)
            return _CumTable(knots, vals, errs, derivs)
        # integrate in theta = asin(t): absorbs the (1-t^2)^((k-3)/2) weight's
        # endpoint derivative blowup at t = 1
        lower = self.levels[k - 1]

        def g(theta: np.ndarray) -> np.ndarray:
            t = np.sin(theta)
            ub = np.minimum(sqrt((k + 1.0) / (k - 1.0)) * np.abs(np.tan(theta)), 1.0)
            w = np.cos(theta) ** (k - 2.0)
            return w * np.asarray(lower.value(ub))

        vals, errs = _panel_integrals(g, np.arcsin(knots), grid.gl_order)
        return _CumTable(knots, vals, errs, derivs)

    def _radial_integrand(self):
        n = self.n
        if n == 3:
            def f(r: np.ndarray) -> np.ndarray:
                r = np.asarray(r)
                ub = np.minimum(1.0 / (np.maximum(r, 1e-300) * sqrt(6.0)), 1.0)
                return r * (PHI2_MAX - np.arccos(ub))
            return f
        top = self.levels[n - 1]

        def f(r: np.ndarray) -> np.ndarray:
            r = np.asarray(r)
            ub = np.minimum(1.0 / (np.maximum(r, 1e-300) * sqrt(n * (n - 1.0))), 1.0)
            return r ** (n - 2.0) * np.asarray(top.value(ub))

        return f

    def _build_radial(self, grid: GridSpec) -> _CumTable:
        rmax = max_radius(self.n)
        pts = [0.0] + [b for b in self.radial_breaks if 0.0 < b < rmax] + [rmax]
        segs = [_region_knots(a, b, grid.knots_per_region) for a, b in zip(pts, pts[1:])]
        # geometric refinement of the flat upper tail
        extra = rmax - (rmax - pts[-2]) * 0.5 ** np.arange(1, grid.tail_refine + 1)
        knots = _dedupe(np.concatenate(segs + [extra]))
        f = self._radial_integrand()
        vals, errs = _panel_integrals(f, knots, grid.gl_order)
        return _CumTable(knots, vals, errs, f(knots))

    def _estimate_tol(self, ref: "CdfChain") -> float:
        probes = np.linspace(0.0, max_radius(self.n), 257)
        full = np.asarray(self.radial.value(probes)) / self.radial.total
        halfv = np.asarray(ref.radial.value(probes)) / ref.radial.total
        err = float(np.nanmax(np.abs(full - halfv)))
        for k in self.levels:
            xs = np.linspace(1.0 / k, 1.0, 129)
            a = np.asarray(self.levels[k].value(xs)) / self.levels[k].total
            b = np.asarray(ref.levels[k].value(xs)) / ref.levels[k].total
            err = max(err, float(np.nanmax(np.abs(a - b))))
        return max(err, self.radial.panel_err / self.radial.total, 1e-15)

    # -- evaluation -----------------------------------------------------

    def _upper(self, k: int, ctx: float) -> float:
        if k == self.n - 1:
            return upper_bound_top(self.n, ctx)
        return upper_bound_mid(k, ctx)

    def angle_cdf(self, k: int, x: float, ctx: float) -> float:
        """F_k(x; ctx); k=2 is exact (linear in the angle itself)."""
        n = self.n
        if not 2 <= k <= n - 1:
            raise DimensionError(f"angle level {k} outside 2..{n - 1}")
        if k == 2:
            ub = self._upper(2, ctx) if n == 3 else upper_bound_mid(2, ctx)
            lo = np.arccos(min(ub, 1.0))
            if x < lo - 1e-9 or x > PHI2_MAX + _SLACK:
                raise DomainError(f"phi2={x!r} outside [{lo!r}, pi/3]")
            if PHI2_MAX - lo <= _SLACK:
                return 1.0
            return min(max((x - lo) / (PHI2_MAX - lo), 0.0), 1.0)
        table = self.levels[k]
        ub = self._upper(k, ctx)
        if x < 1.0 / k - _SLACK or x > ub + _SLACK:
            raise DomainError(f"X_{k}={x!r} outside [1/{k}, {ub!r}]")
        total = float(table.value(ub))
        if total <= 1e-300:
            return 1.0
        return min(max(float(table.value(min(x, ub))) / total, 0.0), 1.0)

    def invert_angle(self, k: int, p: float, ctx: float) -> float:
        if not 0.0 <= p <= 1.0:
            raise DomainError(f"probability {p!r} outside [0, 1]")
        n = self.n
        if k == 2:
            ub = self._upper(2, ctx) if n == 3 else upper_bound_mid(2, ctx)
            lo = np.arccos(min(ub, 1.0))
            return float(lo + p * (PHI2_MAX - lo))
        table = self.levels[k]
        ub = self._upper(k, ctx)
        total = float(table.value(ub))
        if total <= 1e-300:
            return ub
        return table.invert(p * total, 1.0 / k, ub)

    def radial_cdf(self, r: float) -> float:
        rmax = max_radius(self.n)
        if not (0.0 <= r <= rmax + _SLACK):
            raise DomainError(f"r={r!r} outside [0, {rmax!r}]")
        return min(max(float(self.radial.value(min(r, rmax))) / self.radial.total, 0.0), 1.0)

    def radial_tail(self, r: float) -> float:
        rmax = max_radius(self.n)
        if not (0.0 <= r <= rmax + _SLACK):
            raise DomainError(f"r={r!r} outside [0, {rmax!r}]")
        return min(max(float(self.radial.tail(min(r, rmax))) / self.radial.total, 0.0), 1.0)

    def invert_radial(self, p: float) -> float:
        if not 0.0 <= p <= 1.0:
            raise DomainError(f"probability {p!r} outside [0, 1]")
        rmax = max_radius(self.n)
        if p > 0.9:  # invert on the tail accumulation to keep relative accuracy
            target = (1.0 - p) * self.radial.total
            f = lambda r: float(self.radial.tail(r)) - target
            if f(rmax) >= 0.0:
                return rmax
            return brentq(f, 0.0, rmax, xtol=1e-14, rtol=8.9e-16)
        return self.radial.invert(p * self.radial.total, 0.0, rmax)


@lru_cache(maxsize=64)
def get_chain(n: int, grid: GridSpec = GridSpec()) -> CdfChain:
    return CdfChain(n, grid)
