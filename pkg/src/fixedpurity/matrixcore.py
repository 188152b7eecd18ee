"""Random matrix primitives: Ginibre draws, Haar unitaries, flat simplex
eigenvalues and unconstrained random density matrices.

A Haar unitary is obtained from the QR decomposition of a Ginibre matrix with
the phase fix that makes the triangular factor's diagonal real and strictly
positive, which renders the factorization unique and the unitary factor
Haar-distributed.  ``numpy.linalg.qr`` (Householder reflections) does the
factorization; the phase fix is applied explicitly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, DomainError
from .rng import RngStream, as_generator

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
EIG_FLOOR = -1e-10
_QR_RETRIES = 3


def ginibre(n: int, rng: RngStream | np.random.Generator) -> np.ndarray:
    """n x n matrix of i.i.d. standard complex normal entries (g1 + i*g2)/sqrt(2)."""
    if n < 1:
        raise DimensionError(f"ginibre needs n >= 1, got {n}")
    gen = as_generator(rng)
    return _ginibre_batch(n, 1, gen)[0]


def _ginibre_batch(n: int, count: int, gen: np.random.Generator) -> np.ndarray:
    g = gen.standard_normal((2, count, n, n))
    return (g[0] + 1j * g[1]) / np.sqrt(2.0)


def haar_unitary(n: int, rng: RngStream | np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary via phase-fixed QR of a Ginibre matrix."""
    if n < 1:
        raise DimensionError(f"haar_unitary needs n >= 1, got {n}")
    gen = as_generator(rng)
    return _haar_batch(n, 1, gen)[0]


def _haar_batch(n: int, count: int, gen: np.random.Generator) -> np.ndarray:
    """Stack of `count` Haar unitaries drawn from `gen`."""
    for attempt in range(_QR_RETRIES + 1):
        z = _ginibre_batch(n, count, gen)
        q, r = np.linalg.qr(z)
        d = np.einsum("...ii->...i", r)
        mod = np.abs(d)
        if np.all(mod > 0.0):
            return q * (d / mod)[:, np.newaxis, :]
        # numerically singular draw: probability ~0, retry wholesale
    raise DomainError("QR of Ginibre draw kept a zero diagonal after retries")


def simplex_eigs_unsorted(n: int, rng: RngStream | np.random.Generator) -> np.ndarray:
    """Uniform point on the probability simplex, in construction order.

    lambda_k = [1 - xi_k^(1/(n-k))] * (1 - sum of earlier entries); the powers
    1/(n-k) make the simplex density flat, and the final entry closes the sum
    to 1 exactly.
    """
    if n < 2:
        raise DimensionError(f"simplex_eigs needs n >= 2, got {n}")
    gen = as_generator(rng)
    xi = gen.random(n - 1)
    lam = np.empty(n)
    remaining = 1.0
    for k in range(n - 1):
        lam[k] = (1.0 - xi[k] ** (1.0 / (n - 1 - k))) * remaining
        remaining -= lam[k]
    lam[n - 1] = 1.0 - lam[: n - 1].sum()
    return lam


def simplex_eigs(n: int, rng: RngStream | np.random.Generator) -> np.ndarray:
    """Uniform simplex point sorted descending (into the ordered chamber)."""
    lam = simplex_eigs_unsorted(n, rng)
    return np.sort(lam)[::-1].copy()


def assert_hermitian(a: np.ndarray, tol: float = HERMITIAN_TOL) -> None:
    dev = np.max(np.abs(a - a.conj().T))
    if dev > tol:
        raise DomainError(f"matrix is not Hermitian within {tol:g} (deviation {dev:.3e})")


@dataclass(frozen=True)
class DensityMatrix:
    """Unit-trace positive-semidefinite Hermitian matrix.

    Construction validates trace and Hermiticity; eigenvalues in
    [EIG_FLOOR, 0) are clipped to zero and the spectrum renormalized, more
    negative ones are rejected.
    """

    matrix: np.ndarray
    dim: int = field(default=0)

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DimensionError(f"density matrix must be square, got shape {m.shape}")
        n = m.shape[0]
        assert_hermitian(m)
        tr = m.trace().real
        if abs(tr - 1.0) > TRACE_TOL:
            raise DomainError(f"trace {tr!r} is not 1 within {TRACE_TOL:g}")
        eigmin = float(np.linalg.eigvalsh(m)[0])
        if eigmin < EIG_FLOOR:
            raise DomainError(f"minimum eigenvalue {eigmin:.3e} below {EIG_FLOOR:g}")
        if eigmin < 0.0:
            w, v = np.linalg.eigh(m)
            w = np.clip(w, 0.0, None)
            w /= w.sum()
            m = (v * w) @ v.conj().T
        m = m.copy()
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "dim", n)

    @classmethod
    def from_eigs(cls, eigs: np.ndarray, unitary: np.ndarray) -> "DensityMatrix":
        """rho = U diag(eigs) U† for a known-good spectrum."""
        m = (unitary * np.asarray(eigs)) @ unitary.conj().T
        m = 0.5 * (m + m.conj().T)
        return cls(m)

    @property
    def purity(self) -> float:
        return float(np.sum(np.abs(self.matrix) ** 2))

    def eigenvalues(self) -> np.ndarray:
        """Spectrum sorted descending."""
        return np.linalg.eigvalsh(self.matrix)[::-1]


def random_density(n: int, rng: RngStream | np.random.Generator) -> DensityMatrix:
    """Random density matrix: flat diagonal from |row of U'|^2, conjugated by
    a fresh Haar unitary."""
    if n < 2:
        raise DimensionError(f"random_density needs n >= 2, got {n}")
    gen = as_generator(rng)
    u_diag = _haar_batch(n, 1, gen)[0]
    row = int(gen.integers(0, n))
    p = np.abs(u_diag[row]) ** 2
    p /= p.sum()
    u = _haar_batch(n, 1, gen)[0]
    return DensityMatrix.from_eigs(p, u)


def random_density_purities(n: int, count: int, rng: RngStream | np.random.Generator,
                            chunk: int = 20000) -> np.ndarray:
    """Purities of `count` random_density draws, computed in batched chunks.

    Same construction as :func:`random_density`; only Tr[rho^2] is kept, so
    large histograms stay cheap.
    """
    if n < 2:
        raise DimensionError(f"random_density needs n >= 2, got {n}")
    if count < 1:
        raise DomainError("count must be >= 1")
    gen = as_generator(rng)
    out = np.empty(count)
    done = 0
    while done < count:
        m = min(chunk, count - done)
        u_diag = _haar_batch(n, m, gen)
        rows = gen.integers(0, n, size=m)
        p = np.abs(u_diag[np.arange(m), rows]) ** 2
        p /= p.sum(axis=1, keepdims=True)
        u = _haar_batch(n, m, gen)
        rho = np.einsum("bij,bj,bkj->bik", u, p, u.conj())
        out[done:done + m] = np.sum(np.abs(rho) ** 2, axis=(1, 2))
        done += m
    return out
