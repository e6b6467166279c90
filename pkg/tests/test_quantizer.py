import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qpuf import puf_model as pm
from qpuf import quantizer as qz

T = qz.QuantizerThresholds(0.2, 0.5, 0.8)
UNIFORM = pm.PufModelParams(1.0, 0.0)

TABLE_ENTROPY = [
    (0.25, 2.0000),
    (0.265, 1.9991),
    (0.268, 1.9988),
    (0.271, 1.9983),
    (0.274, 1.9978),
    (0.277, 1.9973),
    (0.28, 1.9966),
]


def test_quantize_intervals():
    assert qz.quantize(0.3, T) == 1
    assert qz.quantize(0.0, T) == 0
    assert qz.quantize(1.0, T) == 3
    assert qz.quantize(0.8, T) == 3
    assert qz.quantize(0.2, T) == 1
    assert qz.quantize([0.1, 0.5, 0.79], T).tolist() == [0, 2, 2]


def test_threshold_validation():
    with pytest.raises(ValueError):
        qz.QuantizerThresholds(0.5, 0.5, 0.8)
    with pytest.raises(ValueError):
        qz.ResponseDistribution(0.5, 0.5, 0.5, 0.5)


@given(st.lists(st.floats(0, 1), min_size=2, max_size=50))
def test_quantize_monotone(fs):
    fs = sorted(fs)
    assert np.all(np.diff(qz.quantize(fs, T).astype(int)) >= 0)


@given(st.integers(1, 5000), st.data())
def test_quantize_counts_matches_float_path(trials, data):
    ones = np.array(data.draw(st.lists(st.integers(0, trials), min_size=1, max_size=30)))
    assert np.array_equal(qz.quantize_counts(ones, trials, T), qz.quantize(ones / trials, T))


def test_thresholds_for_uniform():
    t = qz.thresholds_for_uniform()
    assert t.a == pytest.approx(3.574517679558398849e-08, rel=1e-12)
    assert t.b == pytest.approx(0.5687232102537547649, rel=1e-14)
    assert 1 - t.c == pytest.approx(4.915079691616133939e-09, rel=1e-6)
    u = qz.thresholds_for_uniform(UNIFORM)
    assert u.astuple() == pytest.approx((0.25, 0.5, 0.75), abs=1e-15)
    m = qz.response_masses_asymptotic(pm.SRAM, t).asarray()
    assert m == pytest.approx(np.full(4, 0.25), abs=1e-10)


def test_masses_asymptotic_example():
    m = qz.response_masses_asymptotic(pm.SRAM, qz.QuantizerThresholds(0.5687232102537547, 0.99, 0.999))
    assert m.p0 == pytest.approx(0.5, abs=1e-12)
    assert m.p1 + m.p2 + m.p3 == pytest.approx(0.5, abs=1e-12)


@given(st.floats(0.01, 0.3), st.floats(0.35, 0.6), st.floats(0.65, 0.99))
def test_masses_sum_to_one(a, b, c):
    m = qz.response_masses_asymptotic(pm.SRAM, qz.QuantizerThresholds(a, b, c))
    assert sum(m.astuple()) == pytest.approx(1.0, abs=1e-12)


def test_thresholds_hit_biased_targets():
    target = qz.ResponseDistribution.from_p0(0.28)
    t = qz.thresholds_for_masses(pm.SRAM, target)
    assert qz.response_masses_asymptotic(pm.SRAM, t).asarray() == pytest.approx(target.asarray(), abs=1e-9)


def test_finite_trial_masses():
    t = qz.thresholds_for_uniform()
    m = qz.response_masses_finite(pm.SRAM, t, 1000)
    # frozen from the binomial-mixture quadrature (1200 Gauss-Legendre panels)
    assert m.asarray() == pytest.approx([0.339509, 0.160461, 0.145023, 0.355006], abs=2e-6)
    one = qz.response_masses_finite(pm.SRAM, t, 1)
    assert sum(one.astuple()) == pytest.approx(1.0)
    assert one.p1 == pytest.approx(0.0, abs=1e-12) and one.p2 == pytest.approx(0.0, abs=1e-12)
    tb = qz.QuantizerThresholds(0.2, 0.5, 0.8)
    big = qz.response_masses_finite(pm.SRAM, tb, 10**4).asarray()
    assert big == pytest.approx(qz.response_masses_asymptotic(pm.SRAM, tb).asarray(), abs=0.005)


def test_finite_trial_masses_match_simulation():
    t = qz.thresholds_for_uniform()
    n = 10**6
    q = qz.extract_responses(pm.sample_cells(pm.SRAM, n, 5), 1000, t, 5)
    freq = np.bincount(q, minlength=4) / n
    m = qz.response_masses_finite(pm.SRAM, t, 1000).asarray()
    se = np.sqrt(m * (1 - m) / n)
    assert np.all(np.abs(freq - m) < 3 * se)


def test_large_trial_frequencies_match_asymptotic():
    t = qz.QuantizerThresholds(0.2, 0.5, 0.8)
    n = 10**6
    q = qz.extract_responses(pm.sample_cells(pm.SRAM, n, 6), 10**6, t, 6)
    freq = np.bincount(q, minlength=4) / n
    m = qz.response_masses_finite(pm.SRAM, t, 10**6).asarray()
    assert np.all(np.abs(freq - m) < 3 * np.sqrt(m * (1 - m) / n))


@pytest.mark.parametrize("p0,want", TABLE_ENTROPY)
def test_table_entropies(p0, want):
    assert qz.response_entropy(qz.ResponseDistribution.from_p0(p0)) == pytest.approx(want, abs=1e-4)


def test_entropy_degenerate():
    assert qz.response_entropy((1.0, 0.0, 0.0, 0.0)) == 0.0
