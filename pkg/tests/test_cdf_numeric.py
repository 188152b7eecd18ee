import time
from math import sqrt

import numpy as np
import pytest

from fixedpurity.cdf import (
    build_table,
    cdf_numeric,
    cdf_r3,
    cdf_r4,
    cdf_X3_n4,
    invert_cdf,
    invert_radial,
    radial_cdf,
    radial_tail,
    region_shares,
    region_tails,
    x3_mass,
)
from fixedpurity.cdf.chain import CdfChain, GridSpec, get_chain
from fixedpurity.cdf.table import CdfTable
from fixedpurity.errors import DimensionError, DomainError


def test_numeric_matches_closed_n3_n4():
    probes = np.linspace(1e-3, sqrt(2.0 / 3.0) - 1e-9, 100)
    for r in probes:
        assert abs(cdf_numeric(3, "radial", float(r)).value - cdf_r3(float(r))) <= 1e-7
    probes = np.linspace(1e-3, sqrt(3.0) / 2.0 - 1e-9, 100)
    for r in probes:
        assert abs(cdf_numeric(4, "radial", float(r)).value - cdf_r4(float(r))) <= 1e-7


def test_numeric_level3_matches_closed_conditional():
    # independent level-3 route (numeric) against the closed cumulative
    chain = get_chain(4)
    for r4 in (0.2, 0.45, 0.7):
        ubs = np.linspace(1.0 / 3.0 + 1e-6, chain._upper(3, r4) - 1e-9, 40)
        for x in ubs:
            assert abs(chain.angle_cdf(3, float(x), r4) - cdf_X3_n4(float(x), r4)) <= 1e-7


def test_n5_paper_anchors():
    t0 = time.monotonic()
    v = cdf_numeric(5, "radial", 1.0 / sqrt(20.0))
    assert abs(v.value - 0.1324146) <= 1e-4
    # region-1 power-law coefficient
    r = 0.5 / sqrt(20.0)
    coef = cdf_numeric(5, "radial", r).value / r ** 4
    assert abs(coef - 52.96586) <= 1e-3
    assert time.monotonic() - t0 < 60.0


def test_n6_normalization():
    v = cdf_numeric(6, "radial", sqrt(5.0 / 6.0))
    assert abs(v.value - 1.0) <= 1e-6
    assert v.abs_tol <= 1e-8
    assert v.converged


def test_tolerance_flag_n5_n6():
    for n in (5, 6):
        assert get_chain(n).abs_tol <= 1e-8


def test_monotone_and_endpoints():
    rng = np.random.default_rng(9)
    for n in (5, 6, 7):
        chain = get_chain(n)
        rmax = sqrt(1.0 - 1.0 / n)
        pairs = np.sort(rng.uniform(0.0, rmax, size=(1000, 2)), axis=1)
        for a, b in pairs:
            assert chain.radial_cdf(float(a)) <= chain.radial_cdf(float(b)) + 1e-12
        assert chain.radial_cdf(0.0) == 0.0
        assert chain.radial_cdf(rmax) == pytest.approx(1.0, abs=1e-10)


def test_derivative_consistency():
    # numeric derivative of the radial CDF is nonnegative and trapezoid
    # integration reconstructs the CDF
    chain = get_chain(5)
    rmax = sqrt(1.0 - 0.2)
    rs = np.linspace(0.0, rmax, 4001)
    f = np.array([chain.radial_cdf(float(r)) for r in rs])
    d = np.gradient(f, rs)
    assert d.min() >= -1e-9
    recon = np.concatenate(([0.0], np.cumsum(0.5 * (d[1:] + d[:-1]) * np.diff(rs))))
    assert np.max(np.abs(recon - f)) <= 1e-6


def test_invert_radial_examples():
    # N=2: F = sqrt(2 mu - 1), so p = 0.5 -> mu = 0.625
    r = invert_radial(2, 0.5)
    assert r * r + 0.5 == pytest.approx(0.625, abs=1e-10)
    assert invert_radial(3, 0.0) == 0.0
    # N=4: invert the exact cumulative at r = 1/2 back to 1/2
    p_half = cdf_r4(0.5)
    assert invert_radial(4, p_half) == pytest.approx(0.5, abs=1e-8)
    # the printed cumulative 0.84770 is a rounded table value; inverting it
    # lands within the print precision of r = 1/2
    assert invert_radial(4, 0.84770) == pytest.approx(0.5, abs=1e-4)


def test_invert_roundtrip_accuracy():
    for n in (2, 3, 4, 5, 6):
        for p in (0.0, 1e-6, 0.2, 0.5, 0.9, 0.99, 0.999999, 1.0):
            r = invert_radial(n, p)
            if p > 0.9:
                assert abs(radial_tail(n, r=r) - (1.0 - p)) <= 1e-10
            else:
                assert abs(radial_cdf(n, r=r) - p) <= 1e-10


def test_invert_cdf_dispatch():
    table = build_table(4, "radial")
    x = invert_cdf(table, 0.5)
    assert abs(table.evaluate(x) - 0.5) <= 1e-10
    x = invert_cdf(lambda r: cdf_r3(r), 0.25, lo=0.0, hi=sqrt(2.0 / 3.0))
    assert abs(cdf_r3(x) - 0.25) <= 1e-10
    with pytest.raises(DomainError):
        invert_cdf(table, 1.5)


def test_region_shares_sum():
    for n in range(2, 9):
        shares = region_shares(n)
        assert len(shares) == max(n - 1, 1)
        assert sum(s for _, s in shares) == pytest.approx(1.0, abs=1e-8)
        assert all(s >= 0.0 for _, s in shares)


def test_region_tails_n5_consistency():
    # tail from the chain equals 1 - F within table tolerance
    for cut, tail in region_tails(5):
        f = radial_cdf(5, mu=cut)
        assert tail == pytest.approx(1.0 - f, abs=1e-8)


def test_build_table_n4_against_closed():
    table = build_table(4, "radial", grid=GridSpec(knots_per_region=53))  # ~200 knots + wedges
    assert table.method == "closed-form"
    assert 150 <= len(table.knots) <= 400
    rng = np.random.default_rng(2)
    probes = rng.uniform(0.0, sqrt(3.0) / 2.0, 500)
    for r in probes:
        assert abs(table.evaluate(float(r)) - cdf_r4(float(r))) <= 1e-10


def test_build_table_n6_endpoints_monotone():
    table = build_table(6, "radial")
    assert table.method == "quadrature"
    assert np.all(np.diff(table.values) >= -1e-12)
    assert table.values[0] <= 1e-12
    assert abs(table.values[-1] - 1.0) <= 10.0 * table.abs_tol
    assert np.max(np.abs(table.values + table.tail_values - 1.0)) <= 1e-12


def test_build_table_n5_anchor():
    table = build_table(5, "radial")
    assert abs(table.evaluate(1.0 / sqrt(20.0)) - 0.1324146) <= 1e-4


def test_table_serialization_roundtrip_byte_identical():
    t1 = build_table(5, "radial")
    t2 = build_table(5, "radial")
    assert t1.to_json() == t2.to_json()
    loaded = CdfTable.from_json(t1.to_json())
    assert loaded.to_json() == t1.to_json()
    assert abs(loaded.evaluate(0.4) - t1.evaluate(0.4)) == 0.0


def test_angle_table_with_context():
    table = build_table(4, 3, context=0.45)
    for x in np.linspace(1.0 / 3.0 + 1e-9, table.knots[-1] - 1e-9, 50):
        assert abs(table.evaluate(float(x)) - cdf_X3_n4(float(x), 0.45)) <= 1e-10
    with pytest.raises(DomainError):
        build_table(4, 3)  # angle tables need a context


def test_angle_table_numeric_chain():
    table = build_table(6, 4, context=0.5)
    assert table.method == "quadrature"
    assert table.abs_tol <= 1e-5  # snapshot interpolation accuracy, honestly recorded
    chain = get_chain(6)
    for x in np.linspace(0.25 + 1e-9, table.knots[-1] - 1e-9, 50):
        assert abs(table.evaluate(float(x)) - chain.angle_cdf(4, float(x), 0.5)) <= 2.0 * table.abs_tol


def test_large_n_truncation_flag():
    with pytest.raises(DomainError):
        CdfChain(6, GridSpec(truncate_large_n=True))
    chain = CdfChain(10, GridSpec(truncate_large_n=True), _estimate=False)
    # truncated lower limits: max(1/k, sqrt(2/(k-3)))
    assert chain.levels[9].knots[0] == pytest.approx(max(1.0 / 9.0, sqrt(2.0 / 6.0)), abs=1e-14)
    default = CdfChain(10, _estimate=False)
    assert default.levels[9].knots[0] == pytest.approx(1.0 / 9.0, abs=1e-14)


def test_cdf_numeric_needs_context_for_angles():
    with pytest.raises(DomainError):
        cdf_numeric(5, 3, 0.5)
    with pytest.raises(DimensionError):
        get_chain(2)
