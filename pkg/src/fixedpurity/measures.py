"""Entanglement and correlation measures for bipartite states.

Entropies are in bits.  Spectra are floored at 1e-14 before logs, and
``0 log 0`` is 0.  The discord optimizer follows a coarse Bloch-sphere grid
with Nelder-Mead refinement from the best grid points.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import floor, log2, sqrt

import numpy as np
from scipy.optimize import minimize

from .errors import DimensionError, DomainError
from .matrixcore import DensityMatrix

_EIG_FLOOR = 1e-14


@dataclass(frozen=True)
class BipartiteSplit:
    dim_a: int
    dim_b: int

    def __post_init__(self):
        if self.dim_a < 2 or self.dim_b < 2:
            raise DimensionError("both subsystems need dimension >= 2")

    @property
    def dim(self) -> int:
        return self.dim_a * self.dim_b

    def check(self, rho: DensityMatrix) -> None:
        if rho.dim != self.dim:
            raise DimensionError(f"state dim {rho.dim} != {self.dim_a}x{self.dim_b}")


def purity(rho: DensityMatrix) -> float:
    return rho.purity


def _entropy_bits(p: np.ndarray) -> float:
    p = np.asarray(p, dtype=float)
    p = p[p > _EIG_FLOOR]
    return float(-np.sum(p * np.log2(p)))


def vn_entropy(rho: DensityMatrix) -> float:
    """von Neumann entropy in bits."""
    return _entropy_bits(np.linalg.eigvalsh(rho.matrix))


def partial_trace(rho: DensityMatrix, split: BipartiteSplit, keep: str = "a") -> DensityMatrix:
    """Reduced state of subsystem 'a' or 'b'."""
    split.check(rho)
    da, db = split.dim_a, split.dim_b
    t = rho.matrix.reshape(da, db, da, db)
    if keep == "a":
        red = np.einsum("ijkj->ik", t)
    elif keep == "b":
        red = np.einsum("ijil->jl", t)
    else:
        raise DomainError(f"keep must be 'a' or 'b', got {keep!r}")
    return DensityMatrix(red)


def concurrence(rho: DensityMatrix) -> float:
    """Two-qubit concurrence from the spin-flipped spectrum."""
    if rho.dim != 4:
        raise DimensionError("concurrence is defined for two qubits (dim 4)")
    sy = np.array([[0.0, -1.0j], [1.0j, 0.0]])
    flip = np.kron(sy, sy)
    m = rho.matrix
    mtilde = flip @ m.conj() @ flip
    ev = np.linalg.eigvals(m @ mtilde)
    s = np.sqrt(np.abs(np.sort(ev.real)[::-1]))
    return max(0.0, s[0] - s[1] - s[2] - s[3])


def partial_transpose(rho: DensityMatrix, split: BipartiteSplit) -> np.ndarray:
    split.check(rho)
    da, db = split.dim_a, split.dim_b
    t = rho.matrix.reshape(da, db, da, db)
    return np.einsum("ijkl->ilkj", t).reshape(rho.dim, rho.dim)


def negativity(rho: DensityMatrix, split: BipartiteSplit) -> float:
    """Sum of |negative eigenvalues| of the partial transpose."""
    w = np.linalg.eigvalsh(partial_transpose(rho, split))
    return float(-w[w < 0.0].sum())


def log_negativity(rho: DensityMatrix, split: BipartiteSplit) -> float:
    return log2(1.0 + 2.0 * negativity(rho, split))


def delta_le(rho: DensityMatrix, split: BipartiteSplit) -> float:
    """Purity-difference entanglement witness, clamped at zero.

    Compares how far the joint state and its reduction sit above their
    respective maximally mixed purities, normalized to 1 for a maximally
    entangled pure state.
    """
    split.check(rho)
    n = rho.dim
    mu_ab = rho.purity
    mu_a = partial_trace(rho, split, "a").purity
    raw = ((mu_ab - 1.0 / n) - (mu_a - 1.0 / split.dim_a)) / (1.0 - 1.0 / n)
    return max(0.0, raw)


def delta_le_prime(rho: DensityMatrix, split: BipartiteSplit) -> float:
    """Concavity-adjusted variant: sqrt(2 (1 - purity_a) * delta_le)."""
    mu_a = partial_trace(rho, split, "a").purity
    return sqrt(2.0 * max(1.0 - mu_a, 0.0) * delta_le(rho, split))


def qmi(rho: DensityMatrix, split: BipartiteSplit) -> float:
    """Quantum mutual information S(A) + S(B) - S(AB), bits."""
    split.check(rho)
    sa = vn_entropy(partial_trace(rho, split, "a"))
    sb = vn_entropy(partial_trace(rho, split, "b"))
    return sa + sb - vn_entropy(rho)


def computational_basis(d: int) -> np.ndarray:
    return np.eye(d, dtype=complex)


def fourier_basis(d: int) -> np.ndarray:
    """Columns are the discrete-Fourier conjugate basis (Hadamard for d=2)."""
    j, k = np.meshgrid(np.arange(d), np.arange(d), indexing="ij")
    return np.exp(2.0j * np.pi * j * k / d) / sqrt(d)


def _check_basis(basis: np.ndarray, d: int) -> None:
    if basis.shape != (d, d):
        raise DimensionError(f"basis shape {basis.shape} != ({d},{d})")
    if np.max(np.abs(basis.conj().T @ basis - np.eye(d))) > 1e-12:
        raise DomainError("measurement basis is not orthonormal")


def joint_outcome_probs(rho: DensityMatrix, split: BipartiteSplit,
                        basis_a: np.ndarray, basis_b: np.ndarray) -> np.ndarray:
    """P(i, j) for projective measurements in the given local bases."""
    split.check(rho)
    da, db = split.dim_a, split.dim_b
    _check_basis(basis_a, da)
    _check_basis(basis_b, db)
    t = rho.matrix.reshape(da, db, da, db)
    # <a_i b_j| rho |a_i b_j>
    p = np.einsum("ai,bj,abcd,ci,dj->ij", basis_a.conj(), basis_b.conj(), t,
                  basis_a, basis_b).real
    p = np.clip(p, 0.0, None)
    return p / p.sum()


def cmi(rho: DensityMatrix, split: BipartiteSplit,
        basis_a: np.ndarray, basis_b: np.ndarray) -> float:
    """Classical mutual information of the joint outcome distribution, bits."""
    p = joint_outcome_probs(rho, split, basis_a, basis_b)
    return _entropy_bits(p.sum(axis=1)) + _entropy_bits(p.sum(axis=0)) - _entropy_bits(p.ravel())


def cmi_zx(rho: DensityMatrix, split: BipartiteSplit) -> float:
    """CMI in the computational bases plus CMI in their Fourier conjugates.

    For qubits these are the Z and X eigenbases; the Fourier basis is the
    mutually unbiased generalization for larger local dimensions.
    """
    za, zb = computational_basis(split.dim_a), computational_basis(split.dim_b)
    xa, xb = fourier_basis(split.dim_a), fourier_basis(split.dim_b)
    return cmi(rho, split, za, zb) + cmi(rho, split, xa, xb)


def _bloch_projectors(theta: float, phi: float) -> tuple[np.ndarray, np.ndarray]:
    c, s = np.cos(theta / 2.0), np.sin(theta / 2.0)
    v = np.array([c, np.exp(1j * phi) * s])
    p0 = np.outer(v, v.conj())
    return p0, np.eye(2) - p0


def _classical_corr_at(rho4: np.ndarray, sa: float, theta: float, phi: float) -> float:
    """S(A) - sum_m p_m S(A | outcome m) for a Bloch-direction measurement on b."""
    t = rho4.reshape(2, 2, 2, 2)
    total = 0.0
    for proj in _bloch_projectors(theta, phi):
        sub = np.einsum("ajbk,jk->ab", t, proj.T)
        pm = sub.trace().real
        if pm < 1e-14:
            continue
        w = np.linalg.eigvalsh(sub / pm)
        total += pm * _entropy_bits(w)
    return sa - total


def discord_and_classical(rho: DensityMatrix, measured_side: str = "b",
                          grid: tuple[int, int] = (48, 96),
                          xtol: float = 1e-7) -> tuple[float, float]:
    """(quantum discord, classical correlations) for a two-qubit state.

    Classical correlations maximize S(A) - S(A|{M_b}) over projective
    measurements on the measured side; discord is the QMI remainder.
    """
    if rho.dim != 4:
        raise DimensionError("discord implemented for two qubits (dim 4)")
    split = BipartiteSplit(2, 2)
    if measured_side == "b":
        m = rho.matrix
    elif measured_side == "a":
        m = rho.matrix.reshape(2, 2, 2, 2).transpose(1, 0, 3, 2).reshape(4, 4)
    else:
        raise DomainError("measured_side must be 'a' or 'b'")
    sa = vn_entropy(partial_trace(DensityMatrix(m), split, "a"))

    nt, np_ = grid
    thetas = np.linspace(0.0, np.pi, nt)
    phis = np.linspace(0.0, 2.0 * np.pi, np_, endpoint=False)
    best: list[tuple[float, float, float]] = []
    for th in thetas:
        for ph in phis:
            val = _classical_corr_at(m, sa, th, ph)
            best.append((val, th, ph))
    best.sort(key=lambda t: -t[0])
    j_opt = best[0][0]
    for val, th, ph in best[:3]:
        res = minimize(lambda x: -_classical_corr_at(m, sa, x[0], x[1]), [th, ph],
                       method="Nelder-Mead", options={"xatol": 1e-6, "fatol": xtol})
        j_opt = max(j_opt, -float(res.fun))
    i_ab = qmi(DensityMatrix(m), split)
    j_opt = min(j_opt, i_ab)  # supremum cannot exceed the QMI
    return i_ab - j_opt, j_opt


def s_min_bound(mu: float, n: int) -> float:
    """Least joint entropy (bits) compatible with purity mu in dimension n.

    The minimizing spectrum has kappa equal entries and one remainder, with
    kappa the integer part of 1/mu (snapped when 1/mu is an integer up to
    1e-12).
    """
    if not (1.0 / n - 1e-12 <= mu <= 1.0 + 1e-12):
        raise DomainError(f"mu={mu!r} outside [1/{n}, 1]")
    mu = min(max(mu, 1.0 / n), 1.0)
    inv = 1.0 / mu
    kappa = floor(inv + 1e-12)
    g = sqrt(max(kappa * (mu * (kappa + 1.0) - 1.0), 0.0))
    one_minus = 1.0 - g
    k_plus = kappa + g
    total = 0.0
    if one_minus > _EIG_FLOOR:
        total -= one_minus * log2(one_minus / (1.0 + kappa))
    if k_plus > _EIG_FLOOR:
        total -= k_plus * log2(k_plus / (kappa * (1.0 + kappa)))
    return total / (1.0 + kappa)


def max_qmi_curve(mu: float, n: int = 4) -> float:
    """Largest QMI compatible with joint purity mu (maximal marginals)."""
    if n != 4:
        raise DimensionError("the QMI ceiling curve is defined for dim 4 here")
    return 2.0 - s_min_bound(mu, 4)


# -- Werner family ------------------------------------------------------

@dataclass(frozen=True)
class WernerSpec:
    d: int
    p: float

    def __post_init__(self):
        if self.d < 2:
            raise DimensionError("local dimension must be >= 2")
        if not 0.0 <= self.p <= 1.0:
            raise DomainError(f"mixing probability {self.p!r} outside [0, 1]")


def bell_state(d: int) -> np.ndarray:
    """Maximally entangled |Phi+> column vector in d x d."""
    v = np.zeros(d * d, dtype=complex)
    v[:: d + 1] = 1.0 / sqrt(d)
    return v


def werner_state(spec: WernerSpec) -> DensityMatrix:
    d, p = spec.d, spec.p
    v = bell_state(d)
    m = p * np.outer(v, v.conj()) + (1.0 - p) * np.eye(d * d) / (d * d)
    return DensityMatrix(m)


def werner_negativity(spec: WernerSpec) -> float:
    d, p = spec.d, spec.p
    return max(0.0, 0.5 * (d - 1.0) / d * ((d + 1.0) * p - 1.0))


def werner_ln(spec: WernerSpec) -> float:
    return log2(1.0 + 2.0 * werner_negativity(spec))


def werner_mu(spec: WernerSpec) -> float:
    """Purity of the Werner state: p^2 + (1 - p^2)/d^2."""
    d, p = spec.d, spec.p
    return p * p + (1.0 - p * p) / (d * d)


def werner_p_of_mu(d: int, mu: float) -> float:
    """Mixing probability at a given purity: sqrt((d^2 mu - 1)/(d^2 - 1)).

    The convex combination gives mu = p^2 + (1-p^2)/d^2, so p enters
    quadratically; inverting requires the square root.
    """
    if d < 2:
        raise DimensionError("local dimension must be >= 2")
    if not (1.0 / (d * d) - 1e-12 <= mu <= 1.0 + 1e-12):
        raise DomainError(f"mu={mu!r} outside [1/{d * d}, 1]")
    return sqrt(min(max((d * d * mu - 1.0) / (d * d - 1.0), 0.0), 1.0))


def werner_mu_star(d: int) -> float:
    """Purity at the entanglement sudden-death point p = 1/(d+1)."""
    if d < 2:
        raise DimensionError("local dimension must be >= 2")
    return 2.0 / (d * (d + 1.0))


def perturbation_unitary(n: int, eps: float, rng) -> np.ndarray:
    """exp(-i eps H) with H a Gaussian Hermitian matrix: a unitary near 1."""
    from scipy.linalg import expm

    from .rng import as_generator

    gen = as_generator(rng)
    g = gen.standard_normal((n, n)) + 1j * gen.standard_normal((n, n))
    h = (g + g.conj().T) / 2.0
    return expm(-1j * eps * h)
