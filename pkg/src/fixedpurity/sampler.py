"""Fixed-purity sampling pipeline.

Coordinates are drawn top-down by inverse CDF: given the purity radius, the
top angle cosine X_{N-1} is drawn from its radius-conditioned law, each lower
X_k from its X_{k+1}-conditioned law, and finally phi2 uniformly on its
feasible interval.  The eigenvalue vector is assembled in the ordered
chamber, optionally permuted uniformly over all orderings, and conjugated by
a fresh Haar unitary, so each sample has exactly the requested purity.

Sample i consumes the stream child(i) of the batch seed, which makes batches
reproducible and independent of how the work is scheduled.
"""

from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from math import sqrt

import numpy as np
from scipy.optimize import brentq

from .chamber import (
    PHI2_MAX,
    PolarCoords,
    SimplexPoint,
    eigs_from_polar,
    max_radius,
    phi2_lower,
    polar_from_eigs,
    upper_bound_mid,
    upper_bound_top,
)
from .cdf import x3_mass, x3_upper
from .cdf.chain import get_chain
from .errors import DomainError, ToleranceError
from .matrixcore import DensityMatrix, _haar_batch, random_density_purities
from .rng import RngStream, as_generator

PURITY_TOL = 1e-11


@dataclass(frozen=True)
class SampleConfig:
    """One sampling run: dimension, target purity, count and seed."""

    dim: int
    mu: float
    count: int
    seed: int
    emit_matrix: bool = False
    permute: bool = True

    def __post_init__(self):
        n = self.dim
        if n < 2:
            raise DomainError(f"dim must be >= 2, got {n}")
        if not (1.0 / n - 1e-12 <= self.mu <= 1.0 + 1e-12):
            raise DomainError(f"purity {self.mu!r} infeasible for dim {n}")
        if self.count < 1:
            raise DomainError("count must be >= 1")


@dataclass
class SampleRecord:
    eigs_desc: np.ndarray
    eigs_permuted: np.ndarray
    polar: PolarCoords
    purity: float
    matrix: np.ndarray | None = None


@dataclass
class SampleBatch:
    config: SampleConfig
    samples: list[SampleRecord] = field(default_factory=list)

    def purities(self) -> np.ndarray:
        return np.array([s.purity for s in self.samples])

    def matrices(self) -> list[np.ndarray]:
        if not self.config.emit_matrix:
            raise DomainError("batch was generated without matrices")
        return [s.matrix for s in self.samples]

    def to_json_doc(self) -> dict:
        doc = {
            "config": {
                "dim": self.config.dim, "mu": self.config.mu,
                "count": self.config.count, "seed": self.config.seed,
                "emit_matrix": self.config.emit_matrix, "permute": self.config.permute,
            },
            "samples": [],
        }
        for s in self.samples:
            rec = {
                "eigs_desc": [float(v) for v in s.eigs_desc],
                "eigs_permuted": [float(v) for v in s.eigs_permuted],
                "polar": {"r": s.polar.r, "phi2": s.polar.phi2,
                          "X": [float(v) for v in s.polar.X]},
                "purity": s.purity,
            }
            if s.matrix is not None:
                rec["matrix"] = {"re": s.matrix.real.tolist(), "im": s.matrix.imag.tolist()}
            doc["samples"].append(rec)
        return doc

    def to_json(self) -> str:
        return json.dumps(self.to_json_doc(), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "SampleBatch":
        doc = json.loads(text)
        c = doc["config"]
        cfg = SampleConfig(dim=c["dim"], mu=c["mu"], count=c["count"], seed=c["seed"],
                           emit_matrix=c.get("emit_matrix", False),
                           permute=c.get("permute", True))
        batch = cls(config=cfg)
        for rec in doc["samples"]:
            m = None
            if "matrix" in rec:
                m = np.array(rec["matrix"]["re"]) + 1j * np.array(rec["matrix"]["im"])
            batch.samples.append(SampleRecord(
                eigs_desc=np.array(rec["eigs_desc"]),
                eigs_permuted=np.array(rec["eigs_permuted"]),
                polar=PolarCoords(dim=cfg.dim, r=rec["polar"]["r"],
                                  phi2=rec["polar"]["phi2"], X=tuple(rec["polar"]["X"])),
                purity=rec["purity"], matrix=m))
        return batch


def _invert_x3(p: float, upper: float) -> float:
    """Closed-form inverse of the X_3 conditional law on [1/3, upper]."""
    total = x3_mass(upper)
    if total <= 1e-300:
        return upper
    target = p * total
    f = lambda x: x3_mass(x) - target
    if f(1.0 / 3.0) >= 0.0:
        return 1.0 / 3.0
    if f(upper) <= 0.0:
        return upper
    return brentq(f, 1.0 / 3.0, upper, xtol=1e-14, rtol=8.9e-16)


def sample_polar(n: int, mu: float, rng: RngStream | np.random.Generator) -> PolarCoords:
    """Draw chamber coordinates uniformly on the fixed-purity slice."""
    if not (1.0 / n - 1e-12 <= mu <= 1.0 + 1e-12):
        raise DomainError(f"purity {mu!r} infeasible for dim {n}")
    gen = as_generator(rng)
    r = sqrt(max(mu - 1.0 / n, 0.0))
    if mu <= 1.0 / n:
        return polar_from_eigs(SimplexPoint(np.full(n, 1.0 / n)))
    r = min(r, max_radius(n))
    if n == 2:
        return PolarCoords(dim=2, r=r)
    if n == 3:
        lo = np.arccos(min(upper_bound_top(3, r), 1.0))
        phi2 = lo + gen.random() * (PHI2_MAX - lo)
        return PolarCoords(dim=3, r=r, phi2=phi2)
    if n == 4:
        x3 = _invert_x3(gen.random(), x3_upper(r))
        lo = phi2_lower(x3)
        phi2 = lo + gen.random() * (PHI2_MAX - lo)
        return PolarCoords(dim=4, r=r, phi2=phi2, X=(x3,))
    chain = get_chain(n)
    xs_desc = []
    ctx = r
    for k in range(n - 1, 2, -1):
        xk = chain.invert_angle(k, gen.random(), ctx)
        lo_k = 1.0 / k
        hi_k = upper_bound_top(n, ctx) if k == n - 1 else upper_bound_mid(k, ctx)
        xs_desc.append(min(max(xk, lo_k), hi_k))
        ctx = xs_desc[-1]
    lo = phi2_lower(ctx)
    phi2 = lo + gen.random() * (PHI2_MAX - lo)
    return PolarCoords(dim=n, r=r, phi2=phi2, X=tuple(reversed(xs_desc)))


def sample_wc_eigs(n: int, mu: float, rng: RngStream | np.random.Generator) -> SimplexPoint:
    """Eigenvalue spectrum drawn uniformly on the fixed-purity chamber slice."""
    return eigs_from_polar(sample_polar(n, mu, rng))


def _one_sample(cfg: SampleConfig, index: int) -> SampleRecord:
    gen = RngStream(cfg.seed).child(index).generator()
    polar = sample_polar(cfg.dim, cfg.mu, gen)
    sp = eigs_from_polar(polar)
    if cfg.permute:
        perm = gen.permutation(cfg.dim)
    else:
        perm = np.arange(cfg.dim)
    lam_perm = sp.lambdas[perm]
    u = _haar_batch(cfg.dim, 1, gen)[0]
    rho = DensityMatrix.from_eigs(lam_perm, u)
    purity = rho.purity
    if abs(purity - cfg.mu) > PURITY_TOL:
        raise ToleranceError(f"sample {index}: purity {purity!r} misses target {cfg.mu!r}")
    return SampleRecord(eigs_desc=sp.lambdas, eigs_permuted=lam_perm, polar=polar,
                        purity=purity, matrix=rho.matrix if cfg.emit_matrix else None)


def _chunk(args) -> list[SampleRecord]:
    cfg, lo, hi = args
    return [_one_sample(cfg, i) for i in range(lo, hi)]


def sample_density(cfg: SampleConfig, jobs: int = 1) -> SampleBatch:
    """Generate the batch; output is identical for any jobs count."""
    if jobs <= 1 or cfg.count < 64:
        records = [_one_sample(cfg, i) for i in range(cfg.count)]
        return SampleBatch(config=cfg, samples=records)
    bounds = np.linspace(0, cfg.count, jobs + 1).astype(int)
    tasks = [(cfg, int(a), int(b)) for a, b in zip(bounds, bounds[1:]) if b > a]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        parts = list(pool.map(_chunk, tasks))
    records = [rec for part in parts for rec in part]
    return SampleBatch(config=cfg, samples=records)


def sample_matrices(n: int, mu: float, count: int, seed: int,
                    permute: bool = True, jobs: int = 1) -> list[DensityMatrix]:
    """Convenience: density matrices only."""
    cfg = SampleConfig(dim=n, mu=mu, count=count, seed=seed, emit_matrix=True,
                       permute=permute)
    return [DensityMatrix(s.matrix) for s in sample_density(cfg, jobs=jobs).samples]


def haar_purity_histogram(n: int, count: int, bins: int | float,
                          rng: RngStream | np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Histogram (edges, counts) of purities of unconstrained random states.

    ``bins`` is either the number of equal bins on [1/n, 1] or the bin width;
    bins are inclusive on the left edge.
    """
    mus = random_density_purities(n, count, rng)
    if isinstance(bins, float):
        edges = np.arange(1.0 / n, 1.0 + bins, bins)
    else:
        edges = np.linspace(1.0 / n, 1.0, bins + 1)
    counts, edges = np.histogram(mus, bins=edges)
    return edges, counts
