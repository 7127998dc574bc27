import math
import warnings

import mpmath
import pytest
from hypothesis import given
import hypothesis.strategies as st

from oneshot_ent.asymptotics import (
    DegenerateVarianceWarning, binary_entropy, coherent_information_from_spectra,
    entropy_variance, one_way_distill_bound, second_order_cost, second_order_distill,
    shannon_entropy, std_normal_cdf, std_normal_cdf_inv,
)
from oneshot_ent.probvec import make_prob_vec

from conftest import prob_lists

mpmath.mp.dps = 40


def mp_entropy(p):
    return float(-mpmath.fsum(mpmath.mpf(x) * mpmath.log(x, 2) for x in p if x > 0))


def mp_variance(p):
    h = -mpmath.fsum(mpmath.mpf(x) * mpmath.log(x, 2) for x in p if x > 0)
    return float(mpmath.fsum(mpmath.mpf(x) * (-mpmath.log(x, 2) - h) ** 2 for x in p if x > 0))


def mp_quantile(a):
    return float(mpmath.sqrt(2) * mpmath.erfinv(2 * mpmath.mpf(a) - 1))


def test_entropy_examples():
    assert shannon_entropy(make_prob_vec([0.5, 0.5])) == 1.0
    assert shannon_entropy(make_prob_vec([1.0, 0.0])) == 0.0
    assert shannon_entropy(make_prob_vec([0.9, 0.1])) == pytest.approx(0.468996, abs=1e-6)
    assert shannon_entropy(make_prob_vec([0.9, 0.1])) == pytest.approx(mp_entropy([0.9, 0.1]), abs=1e-14)


def test_variance_examples():
    assert entropy_variance(make_prob_vec([0.25] * 4)) == 0.0
    assert entropy_variance(make_prob_vec([1.0, 0.0])) == 0.0
    v = entropy_variance(make_prob_vec([0.9, 0.1]))
    assert v == pytest.approx(0.904358, abs=1e-6)
    assert v == pytest.approx(mp_variance([0.9, 0.1]), abs=1e-13)


def test_normal_examples():
    assert std_normal_cdf_inv(0.5) == 0.0
    assert std_normal_cdf(0.0) == 0.5
    assert std_normal_cdf(1.96) == pytest.approx(float(mpmath.ncdf(1.96)), abs=1e-15)
    assert std_normal_cdf(1.96) == pytest.approx(0.9750021, abs=1e-7)
    for a in (0.0, 1.0, -0.1, 1.5):
        with pytest.raises(ValueError):
            std_normal_cdf_inv(a)


@pytest.mark.parametrize("a", [1e-9, 1e-4, 0.01, 0.1, 0.3, 0.77, 0.999])
def test_quantile_against_mpmath(a):
    assert std_normal_cdf_inv(a) == pytest.approx(mp_quantile(a), abs=1e-9)


def test_quantile_antisymmetric():
    for i in range(1, 1000):
        a = i / 1000
        assert abs(std_normal_cdf_inv(1 - a) + std_normal_cdf_inv(a)) <= 1e-9


def test_second_order_examples():
    p = make_prob_vec([0.9, 0.1])
    h, v = mp_entropy([0.9, 0.1]), mp_variance([0.9, 0.1])
    z = mp_quantile(0.1)
    cost = second_order_cost(p, 100, 0.1)
    dist = second_order_distill(p, 100, 0.1)
    assert cost.estimate == pytest.approx(100 * h - z * math.sqrt(100 * v), abs=1e-9)
    assert dist.estimate == pytest.approx(100 * h + z * math.sqrt(100 * v), abs=1e-9)
    assert cost.estimate == pytest.approx(59.087, abs=1e-3)
    assert dist.estimate == pytest.approx(34.712, abs=1e-3)
    assert second_order_cost(p, 100, 0.5).estimate == pytest.approx(100 * h, abs=1e-12)
    assert second_order_distill(p, 100, 0.5).estimate == pytest.approx(100 * h, abs=1e-12)


def test_second_order_preconditions():
    p = make_prob_vec([0.9, 0.1])
    with pytest.raises(ValueError):
        second_order_cost(p, 0, 0.1)
    with pytest.raises(ValueError):
        second_order_distill(p, 10, 0.0)


def test_degenerate_variance_flagged():
    with pytest.warns(DegenerateVarianceWarning):
        est = second_order_distill(make_prob_vec([0.25] * 4), 10, 0.1)
    assert est.degenerate
    assert est.estimate == pytest.approx(20.0)


def test_binary_entropy_examples():
    assert binary_entropy(0.5) == 1.0
    assert binary_entropy(0.0) == 0.0
    assert binary_entropy(0.11) == pytest.approx(mp_entropy([0.11, 0.89]), abs=1e-14)


def test_one_way_bound_examples():
    assert one_way_distill_bound(1.0, 1e-9) == pytest.approx(1.0, abs=1e-6)
    assert one_way_distill_bound(0.0, 0.25) == pytest.approx(2.5 * mp_entropy([0.2, 0.8]), abs=1e-12)
    assert one_way_distill_bound(0.0, 0.25) == pytest.approx(1.80482, abs=1e-5)
    for eps in (0.0, 0.5):
        with pytest.raises(ValueError):
            one_way_distill_bound(1.0, eps)


@given(st.floats(0.0, 100.0), st.floats(1e-9, 0.49))
def test_one_way_bound_dominates(E, eps):
    assert one_way_distill_bound(E, eps) >= E


def test_one_way_bound_increasing():
    vals = [one_way_distill_bound(0.7, e / 1000) for e in range(1, 491)]
    assert all(b > a for a, b in zip(vals, vals[1:]))


def test_coherent_information_examples():
    phi = make_prob_vec([0.5, 0.5])
    assert coherent_information_from_spectra(make_prob_vec([1.0]), phi) == 1.0
    assert coherent_information_from_spectra(phi, phi) == 0.0
    p = make_prob_vec([0.7, 0.2, 0.1])
    assert coherent_information_from_spectra(make_prob_vec([1.0]), p) == shannon_entropy(p)


@given(prob_lists(max_dim=8))
def test_entropy_bounds(a):
    p = make_prob_vec(a)
    h = shannon_entropy(p)
    assert 0.0 <= h <= math.log2(p.dim) + 1e-12
    assert entropy_variance(p) >= 0.0
