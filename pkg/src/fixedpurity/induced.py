"""Induced eigenvalue measures: the flat-conjugation (Hilbert-Schmidt)
density and the partial-trace family with a reservoir of dimension K >= N.

Densities are normalized over the full eigenvalue simplex; integrating over
the ordered chamber only picks up the N! symmetry factor.  Purity marginals
transform the density to the chamber polar coordinates (picking up the
constant 1/sqrt(N) hyperplane Jacobian, the r^(N-2) and angular volume
factors, and dr/dmu = 1/(2r)) and integrate the angles over their coupled
feasible ranges.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import exp, lgamma, log, pi, sqrt

import numpy as np
from scipy.special import hyp2f1

from .chamber import SimplexPoint, e_matrix, max_radius, phi2_lower
from .cdf.chain import _CumTable, _gl_nodes, _panel_integrals, _region_knots, _dedupe
from .cdf.closed import R3_SPLIT, R4_SPLITS, X3_SPLIT, PHI2_MAX, x3_upper
from .errors import DimensionError, DomainError
from .rng import RngStream, as_generator


@dataclass(frozen=True)
class InducedSpec:
    """System dimension n, reservoir dimension k >= n."""

    n: int
    k: int

    def __post_init__(self):
        if self.n < 2:
            raise DimensionError(f"system dimension must be >= 2, got {self.n}")
        if self.k < self.n:
            raise DomainError(f"reservoir dimension {self.k} < system dimension {self.n}")


def hs_log_norm(n: int) -> float:
    """log of the flat-conjugation normalization Gamma(n^2)/prod Gamma(m)Gamma(m+1)."""
    return lgamma(n * n) - sum(lgamma(m) + lgamma(m + 1) for m in range(1, n + 1))


def trace_log_norm(n: int, k: int) -> float:
    """log normalization of the partial-trace density.

    Gamma(nk) / prod_{j=0}^{n-1} Gamma(k-j) Gamma(n-j+1); reduces to the
    flat-conjugation constant at k = n and is fixed by the normalization
    self-tests.
    """
    return lgamma(n * k) - sum(lgamma(k - j) + lgamma(n - j + 1) for j in range(n))


def _vandermonde_sq(lams: np.ndarray) -> np.ndarray:
    """prod_{i<j} (l_i - l_j)^2 along the last axis."""
    diff = lams[..., :, None] - lams[..., None, :]
    iu = np.triu_indices(lams.shape[-1], k=1)
    return np.prod(diff[..., iu[0], iu[1]] ** 2, axis=-1)


def _as_lambdas(lambdas) -> np.ndarray:
    if isinstance(lambdas, SimplexPoint):
        return lambdas.lambdas
    lam = np.asarray(lambdas, dtype=float)
    if abs(lam.sum() - 1.0) > 1e-12:
        raise DomainError("eigenvalues must sum to 1")
    return lam


def p_hs(lambdas) -> float:
    """Flat-conjugation eigenvalue density at a simplex point."""
    lam = _as_lambdas(lambdas)
    return float(exp(hs_log_norm(lam.size)) * _vandermonde_sq(lam))


def p_trace(spec: InducedSpec, lambdas) -> float:
    """Partial-trace-induced eigenvalue density at a simplex point."""
    lam = _as_lambdas(lambdas)
    if lam.size != spec.n:
        raise DimensionError(f"point has dim {lam.size}, spec has n={spec.n}")
    extra = np.prod(np.power(lam, float(spec.k - spec.n)))
    return float(exp(trace_log_norm(spec.n, spec.k)) * _vandermonde_sq(lam) * extra)


# -- purity marginals --------------------------------------------------

def _p_mu_n2(spec: InducedSpec, mu: np.ndarray) -> np.ndarray:
    k = spec.k
    c = lgamma(2 * k) - (k - 1) * log(2.0) - lgamma(k) - lgamma(k - 1)
    return np.exp(c) * np.sqrt(2.0 * mu - 1.0) * (1.0 - mu) ** (k - 2)


def _f_mu_n2(spec: InducedSpec, mu: np.ndarray) -> np.ndarray:
    k = spec.k
    c = lgamma(2 * k) - np.log(3.0) - (2 * k - 3) * log(2.0) - lgamma(k) - lgamma(k - 1)
    z = 2.0 * mu - 1.0
    return np.exp(c) * z ** 1.5 * hyp2f1(1.5, 2.0 - k, 2.5, z)


def _angular_mass_n3(spec: InducedSpec, r: np.ndarray, order: int = 48) -> np.ndarray:
    """Integral over phi2 of the unnormalized density at radius r (n=3)."""
    e3 = e_matrix(3)
    xg, wg = _gl_nodes(order)
    r = np.atleast_1d(r)
    out = np.empty_like(r)
    for i, ri in enumerate(r):
        lo = np.arccos(min(1.0 / (sqrt(6.0) * ri), 1.0)) if ri > 0 else 0.0
        mid, half = 0.5 * (PHI2_MAX + lo), 0.5 * (PHI2_MAX - lo)
        phi = mid + half * xg
        y = np.stack([np.full_like(phi, 1.0 / sqrt(3.0)), ri * np.cos(phi), ri * np.sin(phi)], axis=-1)
        lam = np.clip(y @ e3, 0.0, None)
        vals = _vandermonde_sq(lam) * np.prod(lam ** (spec.k - 3), axis=-1)
        out[i] = float(np.sum(vals * wg) * half)
    return out


def _angular_mass_n4(spec: InducedSpec, r: np.ndarray, order: int = 32) -> np.ndarray:
    """Double angular integral of the unnormalized density at radius r (n=4)."""
    e4 = e_matrix(4)
    xg, wg = _gl_nodes(order)
    out = np.empty_like(r)
    for i, ri in enumerate(np.atleast_1d(r)):
        hi = x3_upper(ri)
        edges = [1.0 / 3.0] + ([X3_SPLIT] if 1.0 / 3.0 < X3_SPLIT < hi else []) + [hi]
        total = 0.0
        for a, b in zip(edges, edges[1:]):
            mid, half = 0.5 * (a + b), 0.5 * (b - a)
            x3 = mid + half * xg
            lo2 = np.array([phi2_lower(x) for x in x3])
            mid2, half2 = 0.5 * (PHI2_MAX + lo2), 0.5 * (PHI2_MAX - lo2)
            phi = mid2[:, None] + half2[:, None] * xg[None, :]
            s3 = np.sqrt(np.maximum(1.0 - x3 * x3, 0.0))
            y = np.stack([np.full_like(phi, 0.5),
                          np.broadcast_to((ri * x3)[:, None], phi.shape),
                          (ri * s3)[:, None] * np.cos(phi),
                          (ri * s3)[:, None] * np.sin(phi)], axis=-1)
            lam = np.clip(y @ e4, 0.0, None)
            vals = _vandermonde_sq(lam) * np.prod(lam ** (spec.k - 4), axis=-1)
            inner = (vals * wg[None, :]).sum(axis=1) * half2
            total += float(np.sum(inner * wg) * half)
        out[i] = total
    return out


def _radial_density_unnorm(spec: InducedSpec):
    n = spec.n
    ang = {3: _angular_mass_n3, 4: _angular_mass_n4}[n]

    def q(r: np.ndarray) -> np.ndarray:
        r = np.atleast_1d(np.asarray(r, dtype=float))
        return r ** (n - 2) * ang(spec, r)

    return q


@lru_cache(maxsize=64)
def _radial_table(spec: InducedSpec) -> _CumTable:
    n = spec.n
    rmax = max_radius(n)
    breaks = [R3_SPLIT] if n == 3 else list(R4_SPLITS)
    pts = [0.0] + [b for b in breaks if b < rmax] + [rmax]
    knots = _dedupe(np.concatenate(
        [_region_knots(a, b, 72) for a, b in zip(pts, pts[1:])]))
    q = _radial_density_unnorm(spec)
    vals, errs = _panel_integrals(q, knots, 16)
    return _CumTable(knots, vals, errs, q(knots))


def p_trace_mu(spec: InducedSpec, mu) -> float | np.ndarray:
    """Purity marginal density of the partial-trace measure.

    Normalized analytically (constant, N! chamber factor, 1/sqrt(N) plane
    Jacobian, polar volume element, dr/dmu); closed form for n=2, angular
    quadrature for n in {3, 4}.
    """
    n = spec.n
    mu_arr = np.atleast_1d(np.asarray(mu, dtype=float))
    if np.any(mu_arr < 1.0 / n - 1e-12) or np.any(mu_arr > 1.0 + 1e-12):
        raise DomainError(f"purity outside [1/{n}, 1]")
    if n == 2:
        out = _p_mu_n2(spec, np.clip(mu_arr, 0.5, 1.0))
    elif n in (3, 4):
        r = np.sqrt(np.maximum(mu_arr - 1.0 / n, 1e-300))
        const = exp(trace_log_norm(n, spec.k) + lgamma(n + 1)) / sqrt(n)
        q = _radial_density_unnorm(spec)
        out = const * q(r) / (2.0 * r)
    else:
        raise DimensionError(f"purity marginal implemented for n <= 4, got n={n}")
    return out if np.ndim(mu) else float(out[0])


def f_trace_mu(spec: InducedSpec, mu) -> float | np.ndarray:
    """Purity marginal CDF (ends at exactly 1)."""
    n = spec.n
    mu_arr = np.atleast_1d(np.asarray(mu, dtype=float))
    if np.any(mu_arr < 1.0 / n - 1e-12) or np.any(mu_arr > 1.0 + 1e-12):
        raise DomainError(f"purity outside [1/{n}, 1]")
    if n == 2:
        out = _f_mu_n2(spec, np.clip(mu_arr, 0.5, 1.0))
    elif n in (3, 4):
        table = _radial_table(spec)
        r = np.sqrt(np.maximum(mu_arr - 1.0 / n, 0.0))
        out = np.asarray(table.value(np.minimum(r, table.knots[-1]))) / table.total
    else:
        raise DimensionError(f"purity marginal implemented for n <= 4, got n={n}")
    out = np.clip(out, 0.0, 1.0)
    return out if np.ndim(mu) else float(out[0])


def p_trace_renyi(spec: InducedSpec, s2) -> float | np.ndarray:
    """Density of the collision entropy S2 = -ln(purity), n=2 closed form."""
    if spec.n != 2:
        raise DimensionError("collision-entropy density implemented for n=2")
    s = np.atleast_1d(np.asarray(s2, dtype=float))
    if np.any(s < -1e-12) or np.any(s > log(2.0) + 1e-12):
        raise DomainError("S2 outside [0, ln 2]")
    mu = np.exp(-np.clip(s, 0.0, log(2.0)))
    out = _p_mu_n2(spec, mu) * mu
    return out if np.ndim(s2) else float(out[0])


def sample_reduced_purities(spec: InducedSpec, count: int,
                            rng: RngStream | np.random.Generator,
                            chunk: int = 20000) -> np.ndarray:
    """Monte Carlo oracle: purities of reduced states of Haar-random pure
    states in dimension n*k (Ginibre construction)."""
    gen = as_generator(rng)
    n, k = spec.n, spec.k
    out = np.empty(count)
    done = 0
    while done < count:
        m = min(chunk, count - done)
        g = gen.standard_normal((2, m, n, k))
        a = g[0] + 1j * g[1]
        w = np.einsum("bij,bkj->bik", a, a.conj())
        tr = np.einsum("bii->b", w).real
        tr2 = np.einsum("bij,bji->b", w, w).real
        out[done:done + m] = tr2 / tr ** 2
        done += m
    return out
