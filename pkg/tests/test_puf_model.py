import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, stats
from scipy.special import ndtr

from qpuf import puf_model as pm

UNIFORM = pm.PufModelParams(1.0, 0.0)

# reference values from a 40-digit mpmath evaluation of the closed forms
INV_CDF_QUARTER = 3.574517679558398849e-08
INV_CDF_HALF = 0.5687232102537547649
ONE_MINUS_INV_CDF_3Q = 4.915079691616133939e-09
CDF_HALF = 0.4916228278382488376
MEAN_ONE_PROB = 0.5083162233329561807
ABER_MAJORITY = 0.03841488422467787856
ABER_SINGLE = 0.05426074456854373211


def test_cdf_examples():
    assert pm.cdf_one_probability(0.5) == pytest.approx(CDF_HALF, abs=1e-15)
    x = np.linspace(0.01, 0.99, 33)
    assert np.allclose(pm.cdf_one_probability(x, UNIFORM), x, atol=1e-15)


def test_cdf_rejects_closed_endpoints():
    with pytest.raises(ValueError):
        pm.cdf_one_probability(0.0)
    with pytest.raises(ValueError):
        pm.inv_cdf(1.0)
    with pytest.raises(ValueError):
        pm.PufModelParams(0.0, 0.0)


def test_inv_cdf_examples():
    assert pm.inv_cdf(0.25) == pytest.approx(INV_CDF_QUARTER, rel=1e-12)
    assert pm.inv_cdf(0.5) == pytest.approx(INV_CDF_HALF, rel=1e-14)
    assert pm.inv_cdf(0.3, UNIFORM) == pytest.approx(0.3, abs=1e-15)


@settings(max_examples=60, deadline=None)
@given(st.floats(1e-5, 0.7))  # below ~2.4e-6 x underflows; above ~0.7 x crowds against 1
def test_inv_cdf_round_trip_and_rootfind(p):
    x = pm.inv_cdf(p)
    assert pm.cdf_one_probability(x) == pytest.approx(p, abs=1e-10)
    assert pm.inv_cdf_rootfind(p) == pytest.approx(x, rel=1e-9, abs=1e-300)


def test_cdf_inverse_identity_on_interior():
    x = np.linspace(0.01, 0.99, 99)
    assert np.allclose(pm.inv_cdf(pm.cdf_one_probability(x)), x, atol=1e-10, rtol=0)


def test_upper_quartile_saturates_near_one():
    # the 3/4 quantile sits 4.9e-9 below 1 and is still representable
    assert 1.0 - pm.inv_cdf(0.75) == pytest.approx(ONE_MINUS_INV_CDF_3Q, rel=1e-6)
    assert pm.inv_cdf(0.95) < 1.0


def test_pdf_normalization_and_uniform():
    assert np.allclose(pm.pdf_one_probability(np.linspace(0.05, 0.95, 19), UNIFORM), 1.0)
    # integrate on the probit axis t (dx = phi(t) dt); beyond t = 5 the point x
    # is too close to 1 to resolve, so the two tails come from F directly
    f = lambda t: pm.pdf_one_probability(float(ndtr(t))) * stats.norm.pdf(t)  # noqa: E731
    lo, hi = -37.0, 5.0
    total = sum(integrate.quad(f, a, b, limit=400)[0] for a, b in ((lo, -0.2), (-0.2, 0.2), (0.2, hi)))
    total += pm.cdf_one_probability(float(ndtr(lo))) + 1.0 - pm.cdf_one_probability(float(ndtr(hi)))
    assert total == pytest.approx(1.0, abs=1e-6)
    # interval masses agree with the cdf
    for a_, b_ in ((1e-6, 0.1), (0.1, 0.5), (0.5, 0.99)):
        got = integrate.quad(pm.pdf_one_probability, a_, b_, limit=200, points=[0.01] if a_ < 0.01 else None)[0]
        assert got == pytest.approx(pm.cdf_one_probability(b_) - pm.cdf_one_probability(a_), rel=1e-6)


@pytest.mark.parametrize("x", [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9])
def test_pdf_is_derivative_of_cdf(x):
    h = 1e-6
    fd = (pm.cdf_one_probability(x + h) - pm.cdf_one_probability(x - h)) / (2 * h)
    assert pm.pdf_one_probability(x) == pytest.approx(fd, abs=1e-6)


def test_sample_cells_mean_and_ks():
    x = pm.sample_cells(pm.SRAM, 10**6, 1)
    assert x.mean() == pytest.approx(MEAN_ONE_PROB, abs=0.002)
    # about a sixth of the mass lies within a few ulps of 1, where doubles are
    # too coarse for F to be compared pointwise; KS runs on the part below a
    # cut and the mass above it is checked separately
    cut = 1.0 - 1e-12
    f_cut = pm.cdf_one_probability(cut)
    lower = x[(x <= cut) & (x > 0)]
    zeros = np.mean(x == 0.0)
    assert zeros < 1e-4

    def cdf(v):
        return pm.cdf_one_probability(np.clip(v, 1e-300, cut)) / f_cut

    assert stats.kstest(lower, cdf).statistic < 0.002
    assert np.mean(x > cut) == pytest.approx(1.0 - f_cut, abs=0.002)


def test_sample_cells_deterministic():
    a = pm.sample_cells(pm.SRAM, 40000, 9)
    assert np.array_equal(a, pm.sample_cells(pm.SRAM, 40000, 9))
    assert not np.array_equal(a, pm.sample_cells(pm.SRAM, 40000, 10))
    # a prefix does not depend on the total count
    assert np.array_equal(pm.sample_cells(pm.SRAM, 100, 9), a[:100])


def test_evaluate():
    assert pm.evaluate(pm.PufCell(0.0), 50, 1).ones == 0
    assert pm.evaluate(pm.PufCell(1.0), 50, 1).ones == 50
    r = pm.evaluate(pm.PufCell(0.4), 1000, 3)
    assert r == pm.evaluate(pm.PufCell(0.4), 1000, 3)
    assert r.one_frequency == r.ones / 1000
    ones = pm.evaluate_cells(np.full(10**5, 0.3), 100, 4)
    assert (ones / 100).mean() == pytest.approx(0.3, abs=0.005)
    assert not np.array_equal(ones, pm.evaluate_cells(np.full(10**5, 0.3), 100, 5))
    with pytest.raises(ValueError):
        pm.EvaluationRecord(10, 11)


def test_expected_aber():
    assert pm.expected_aber() == pytest.approx(ABER_MAJORITY, rel=1e-9)
    assert pm.expected_aber(reference="single") == pytest.approx(ABER_SINGLE, rel=1e-9)
    assert pm.expected_aber(UNIFORM, "single") == pytest.approx(1 / 3, abs=1e-10)
    assert pm.expected_aber(UNIFORM, "majority") == pytest.approx(1 / 4, abs=1e-10)
    # deterministic cells are the small-lambda1 limit
    assert pm.expected_aber(pm.PufModelParams(1e-4, 0.0)) < 1e-4
    with pytest.raises(ValueError):
        pm.expected_aber(reference="other")


def test_expected_aber_matches_monte_carlo():
    x = pm.sample_cells(pm.SRAM, 10**6, 2)
    assert np.minimum(x, 1 - x).mean() == pytest.approx(ABER_MAJORITY, abs=1e-3)
