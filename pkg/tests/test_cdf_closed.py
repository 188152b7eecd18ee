from math import pi, sqrt

import numpy as np
import pytest
from scipy.integrate import quad

from fixedpurity.cdf import (
    N4_RADIAL_NORM,
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
    radial_tail,
    x3_mass,
    x3_upper,
)
from fixedpurity.errors import DomainError

R3_MAX = sqrt(2.0 / 3.0)
R4_MAX = sqrt(3.0) / 2.0


def test_cdf_r2_examples():
    assert cdf_r2(0.5) == 0.0
    assert cdf_r2(1.0) == 1.0
    assert cdf_r2(0.75) == pytest.approx(sqrt(0.5), abs=1e-15)
    with pytest.raises(DomainError):
        cdf_r2(0.4)


def test_cdf_phi2_n3_examples():
    assert cdf_phi2_n3(pi / 6.0, 0.2) == pytest.approx(0.5, abs=1e-15)
    assert cdf_phi2_n3(pi / 3.0, 0.5) == 1.0
    # collapsed interval at the pure-state corner
    assert cdf_phi2_n3(pi / 3.0, R3_MAX) == 1.0


def test_cdf_r3_table_values():
    assert cdf_r3(R3_SPLIT) == pytest.approx(0.60460, abs=5e-6)
    assert cdf_r3(R3_MAX) == 1.0
    # exact tail at mu=0.95 is 0.195749e-2; the printed 0.20 is a 2-decimal round
    tail = 1.0 - cdf_r3(sqrt(0.95 - 1.0 / 3.0))
    assert tail == pytest.approx(0.0019575, abs=2e-7)
    assert tail == pytest.approx(0.0020, abs=1e-4)


def test_cdf_phi2_n4_examples():
    assert cdf_phi2_n4(pi / 6.0, 0.8) == pytest.approx(0.5, abs=1e-15)  # X3 above the split
    assert cdf_phi2_n4(pi / 3.0, 1.0 / 3.0) == 1.0  # collapsed interval
    # linearity oracle at X3 = 0.5
    lo = np.arccos(sqrt(2.0) * 0.5 / sqrt(0.75))
    mid = 0.5 * (lo + pi / 3.0)
    assert cdf_phi2_n4(mid, 0.5) == pytest.approx(0.5, abs=1e-12)


def test_cdf_x3_n4_junction_and_endpoints():
    r_region1 = 0.2
    val = cdf_X3_n4(X3_SPLIT, r_region1)
    assert val == pytest.approx(2.0 / sqrt(3.0) - 1.0, abs=1e-12)
    assert cdf_X3_n4(1.0 / 3.0, 0.7) == 0.0
    assert cdf_X3_n4(1.0, r_region1) == 1.0


def test_x3_mass_branch_continuity():
    eps = 1e-12
    assert abs(x3_mass(X3_SPLIT - eps) - x3_mass(X3_SPLIT + eps)) <= 1e-9
    assert x3_mass(1.0 / 3.0) == pytest.approx(0.0, abs=1e-15)
    assert x3_mass(1.0) == pytest.approx(pi / 6.0, abs=1e-15)


def test_insphere_angular_normalizer():
    # full angular mass over the top-level interval equals pi/6 = 4 pi / 4!
    total, _ = quad(phi2_span, 1.0 / 3.0, 1.0, points=[X3_SPLIT], epsabs=1e-15, limit=200)
    assert total == pytest.approx(pi / 6.0, abs=1e-12)


def test_n4_radial_denominator_exact():
    den, _ = quad(lambda s: s * s * x3_mass(x3_upper(s)), 0.0, R4_MAX,
                  points=list(R4_SPLITS), epsabs=2e-16, epsrel=1e-13, limit=300)
    assert abs(den - 1.0 / 72.0) <= 1e-12
    assert N4_RADIAL_NORM == 1.0 / 72.0


def test_cdf_r4_table_values():
    assert cdf_r4(R4_SPLITS[0]) == pytest.approx(0.30230, abs=5e-6)
    assert cdf_r4(0.5) == pytest.approx(0.84770, abs=1e-4)  # exact 0.8476028
    assert cdf_r4(0.5) == pytest.approx(0.8476028255, abs=1e-9)
    assert cdf_r4(R4_MAX) == pytest.approx(1.0, abs=1e-12)
    tail = radial_tail(4, mu=0.99)
    assert tail == pytest.approx(5.1e-7, rel=0.02)


def test_region1_is_in_sphere_form():
    for r in np.linspace(1e-3, R4_SPLITS[0] - 1e-9, 20):
        assert cdf_r4(float(r)) == pytest.approx(4.0 * pi * r ** 3, abs=1e-14)


def _junction_gap(f, bp: float, eps: float = 1e-11) -> float:
    # one-sided limits with the sqrt(eps) modulus extrapolated away:
    # f(bp +- eps) = L +- a sqrt(eps) + O(eps), and 2 f(eps) - f(4 eps)
    # cancels the sqrt term exactly
    lim_minus = 2.0 * f(bp - eps) - f(bp - 4.0 * eps)
    lim_plus = 2.0 * f(bp + eps) - f(bp + 4.0 * eps)
    return abs(lim_plus - lim_minus)


def test_piecewise_continuity_all_breakpoints():
    # radial N=3 at r = 1/sqrt(6)
    assert _junction_gap(cdf_r3, R3_SPLIT) <= 1e-9
    # radial N=4 at both region boundaries
    for bp in R4_SPLITS:
        assert _junction_gap(cdf_r4, bp) <= 1e-9
    # conditional phi2 (N=3) as the radius crosses the in-circle
    for phi in (0.3, 0.7, 1.0):
        assert _junction_gap(lambda r: cdf_phi2_n3(phi, r), R3_SPLIT) <= 1e-9
    # conditional phi2 (N=4) as X3 crosses 1/sqrt(3)
    for phi in (0.3, 0.7, 1.0):
        assert _junction_gap(lambda x3: cdf_phi2_n4(phi, x3), X3_SPLIT) <= 1e-9
    # conditional X3 (N=4) as the radius crosses each region boundary
    for bp in R4_SPLITS:
        for x in (0.35, 0.45):
            assert _junction_gap(lambda r: cdf_X3_n4(x, r), bp) <= 1e-9
    # conditional X3 in its own argument at the branch point
    assert _junction_gap(lambda x: cdf_X3_n4(x, 0.2), X3_SPLIT) <= 1e-9


def test_monotonicity_fuzz():
    rng = np.random.default_rng(3)
    pairs = np.sort(rng.uniform(0.0, R4_MAX, size=(1000, 2)), axis=1)
    for a, b in pairs:
        assert cdf_r4(float(a)) <= cdf_r4(float(b)) + 1e-12
    pairs = np.sort(rng.uniform(0.0, R3_MAX, size=(1000, 2)), axis=1)
    for a, b in pairs:
        assert cdf_r3(float(a)) <= cdf_r3(float(b)) + 1e-12


def test_domain_errors():
    with pytest.raises(DomainError):
        cdf_r3(1.0)
    with pytest.raises(DomainError):
        cdf_r4(0.9)
    with pytest.raises(DomainError):
        cdf_X3_n4(0.2, 0.3)  # X3 below 1/3
    with pytest.raises(DomainError):
        cdf_phi2_n3(1.3, 0.1)  # phi2 beyond pi/3
