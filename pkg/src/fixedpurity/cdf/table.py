"""Persisted monotone CDF tables.

A table is a snapshot of one marginal CDF: knots, values and 1-CDF tail
values, with provenance (dim, kind, conditioning context, backend, achieved
tolerance).  Serialization is a versioned JSON document whose floats are
written as 17-significant-digit decimal strings, so a rebuilt table with the
same spec is byte-identical and round-trips bit-faithfully.

Tables built with the closed-form backend (dims 2..4) evaluate through the
registered closed forms; quadrature tables evaluate by monotone piecewise
cubic interpolation.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.interpolate import PchipInterpolator
from scipy.optimize import brentq

from ..chamber import max_radius, phi2_lower, upper_bound_mid, upper_bound_top
from ..errors import DimensionError, DomainError
from . import closed
from .chain import GridSpec, get_chain, _region_knots

TABLE_VERSION = 1
_TAIL_SWITCH = 0.9


def _fmt(x: float) -> str:
    return f"{float(x):.17g}"


@dataclass
class CdfTable:
    dim: int
    kind: str                      # "radial" or "angle<k>"
    context: float | None
    knots: np.ndarray
    values: np.ndarray
    tail_values: np.ndarray
    method: str                    # "closed-form" | "quadrature"
    abs_tol: float
    version: int = TABLE_VERSION

    def __post_init__(self):
        v = np.asarray(self.values)
        if np.any(np.diff(v) < -1e-12):
            raise DomainError("table values are not nondecreasing")
        if v[0] > 1e-12 or abs(v[-1] - 1.0) > 10.0 * max(self.abs_tol, 1e-15):
            raise DomainError("table endpoints are not normalized")
        if np.max(np.abs(v + np.asarray(self.tail_values) - 1.0)) > 1e-12:
            raise DomainError("values + tail_values must equal 1")

    # -- evaluation ------------------------------------------------------

    def _closed_eval(self) -> tuple[Callable[[float], float], Callable[[float], float]]:
        n, kind, ctx = self.dim, self.kind, self.context
        if kind == "radial":
            return (lambda x: closed.radial_cdf_closed(n, x),
                    lambda x: closed.radial_tail_closed(n, x))
        if (n, kind) == (3, "angle2"):
            return (lambda x: closed.cdf_phi2_n3(x, ctx),
                    lambda x: 1.0 - closed.cdf_phi2_n3(x, ctx))
        if (n, kind) == (4, "angle2"):
            return (lambda x: closed.cdf_phi2_n4(x, ctx),
                    lambda x: 1.0 - closed.cdf_phi2_n4(x, ctx))
        if (n, kind) == (4, "angle3"):
            return (lambda x: closed.cdf_X3_n4(x, ctx),
                    lambda x: 1.0 - closed.cdf_X3_n4(x, ctx))
        raise DimensionError(f"no closed form for dim={n} kind={kind}")

    def _interp(self) -> tuple[Callable, Callable]:
        cached = getattr(self, "_interp_cache", None)
        if cached is not None:
            return cached
        fwd = PchipInterpolator(self.knots, self.values, extrapolate=False)
        tail = PchipInterpolator(self.knots, self.tail_values, extrapolate=False)
        lo, hi = self.knots[0], self.knots[-1]
        pair = (lambda x: float(fwd(min(max(x, lo), hi))),
                lambda x: float(tail(min(max(x, lo), hi))))
        object.__setattr__(self, "_interp_cache", pair)
        return pair

    def evaluate(self, x: float) -> float:
        if self.method == "closed-form":
            return self._closed_eval()[0](x)
        return self._interp()[0](x)

    def tail(self, x: float) -> float:
        if self.method == "closed-form":
            return self._closed_eval()[1](x)
        return self._interp()[1](x)

    def invert(self, p: float) -> float:
        """x with F(x) = p; flat-tail probabilities invert on 1-F."""
        if not 0.0 <= p <= 1.0:
            raise DomainError(f"probability {p!r} outside [0, 1]")
        lo, hi = float(self.knots[0]), float(self.knots[-1])
        if p <= 0.0:
            return lo
        if p >= 1.0:
            return hi
        fwd, tail = (self._closed_eval() if self.method == "closed-form" else self._interp())
        if p > _TAIL_SWITCH:
            g = lambda x: tail(x) - (1.0 - p)
            if g(hi) >= 0.0:
                return hi
            return brentq(g, lo, hi, xtol=1e-14, rtol=8.9e-16)
        f = lambda x: fwd(x) - p
        if f(lo) >= 0.0:
            return lo
        return brentq(f, lo, hi, xtol=1e-14, rtol=8.9e-16)

    # -- serialization ---------------------------------------------------

    def to_json(self) -> str:
        doc = {
            "version": self.version,
            "dim": self.dim,
            "kind": self.kind,
            "context": None if self.context is None else _fmt(self.context),
            "knots": [_fmt(x) for x in self.knots],
            "values": [_fmt(x) for x in self.values],
            "tail_values": [_fmt(x) for x in self.tail_values],
            "method": self.method,
            "abs_tol": _fmt(self.abs_tol),
        }
        return json.dumps(doc, indent=1, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "CdfTable":
        doc = json.loads(text)
        if doc["version"] != TABLE_VERSION:
            raise DomainError(f"unsupported table version {doc['version']}")
        return cls(
            dim=int(doc["dim"]),
            kind=doc["kind"],
            context=None if doc["context"] is None else float(doc["context"]),
            knots=np.array([float(x) for x in doc["knots"]]),
            values=np.array([float(x) for x in doc["values"]]),
            tail_values=np.array([float(x) for x in doc["tail_values"]]),
            method=doc["method"],
            abs_tol=float(doc["abs_tol"]),
            version=int(doc["version"]),
        )


def _domain(n: int, kind: str, context: float | None) -> tuple[float, float]:
    if kind == "radial":
        return 0.0, max_radius(n)
    k = int(kind[5:])
    if k == 2:
        if n == 3:
            return (np.arccos(min(upper_bound_top(3, context), 1.0)), closed.PHI2_MAX)
        return (phi2_lower(context), closed.PHI2_MAX)
    ub = upper_bound_top(n, context) if k == n - 1 else upper_bound_mid(k, context)
    return (1.0 / k, ub)


def build_table(n: int, level: str | int, context: float | None = None,
                grid: GridSpec = GridSpec()) -> CdfTable:
    """Build the CDF table for one marginal.

    ``level`` is "radial" or an angle index k in 2..n-1; angle tables require
    the conditioning value (radius for the top level, X_{k+1} below).  Dims
    2..4 use the closed-form backend, higher dims the quadrature chain.
    """
    if n < 2:
        raise DimensionError(f"need n >= 2, got {n}")
    kind = "radial" if level in ("radial", n) else f"angle{int(level)}"
    if kind != "radial":
        k = int(kind[5:])
        if not 2 <= k <= n - 1:
            raise DimensionError(f"angle level {k} outside 2..{n - 1}")
        if context is None:
            raise DomainError("angle tables need a conditioning context")
    lo, hi = _domain(n, kind, context)
    if hi - lo <= 1e-12:
        knots = np.array([lo, lo + 1e-12])
        return CdfTable(dim=n, kind=kind, context=context, knots=knots,
                        values=np.array([0.0, 1.0]), tail_values=np.array([1.0, 0.0]),
                        method="closed-form" if n <= 4 else "quadrature", abs_tol=1e-15)

    closed_backend = n <= 4
    if closed_backend:
        if kind == "radial" and n >= 3:
            breaks = [b for b in ((closed.R3_SPLIT,) if n == 3 else closed.R4_SPLITS) if lo < b < hi]
        elif kind == "angle3":
            breaks = [b for b in (closed.X3_SPLIT,) if lo < b < hi]
        else:
            breaks = []
        pts = [lo] + breaks + [hi]
        knots = np.unique(np.concatenate(
            [_region_knots(a, b, grid.knots_per_region) for a, b in zip(pts, pts[1:])]))
        tmp = CdfTable(dim=n, kind=kind, context=context, knots=knots,
                       values=np.array([0.0, 1.0]), tail_values=np.array([1.0, 0.0]),
                       method="closed-form", abs_tol=1e-14)
        fwd, tail = tmp._closed_eval()
        values = np.array([fwd(x) for x in knots])
        tails = np.array([tail(x) for x in knots])
        # keep the stored invariant values + tails = 1 exactly
        tails = 1.0 - values
        return CdfTable(dim=n, kind=kind, context=context, knots=knots, values=values,
                        tail_values=tails, method="closed-form", abs_tol=1e-14)

    chain = get_chain(n, grid)
    if kind == "radial":
        pts = [0.0] + [b for b in chain.radial_breaks if 0.0 < b < hi] + [hi]
        knots = np.unique(np.concatenate(
            [_region_knots(a, b, grid.knots_per_region) for a, b in zip(pts, pts[1:])]))
        extra = hi - (hi - pts[-2]) * 0.5 ** np.arange(1, grid.tail_refine + 1)
        knots = np.unique(np.concatenate([knots, extra]))
        values = np.array([chain.radial_cdf(r) for r in knots])
        tails = np.array([chain.radial_tail(r) for r in knots])
    else:
        k = int(kind[5:])
        breaks = [b for b in chain.level_breaks.get(k, []) if lo < b < hi]
        pts = [lo] + breaks + [hi]
        knots = np.unique(np.concatenate(
            [_region_knots(a, b, grid.knots_per_region) for a, b in zip(pts, pts[1:])]))
        values = np.array([chain.angle_cdf(k, x, context) for x in knots])
        tails = 1.0 - values
    values = np.maximum.accumulate(values)  # guard fp wiggle at 1e-16 level
    resid = np.abs(values + tails - 1.0) > 1e-12
    tails[resid] = 1.0 - values[resid]
    table = CdfTable(dim=n, kind=kind, context=context, knots=knots, values=values,
                     tail_values=tails, method="quadrature", abs_tol=max(chain.abs_tol, 1e-12))
    # the snapshot interpolates with monotone cubics without derivative data;
    # record the achieved accuracy of that representation, not the backbone's
    probes = 0.5 * (knots[1:] + knots[:-1])
    if kind == "radial":
        err = max(abs(table.evaluate(float(x)) - chain.radial_cdf(float(x))) for x in probes)
    else:
        err = max(abs(table.evaluate(float(x)) - chain.angle_cdf(k, float(x), context))
                  for x in probes)
    table.abs_tol = max(chain.abs_tol, float(err))
    return table
