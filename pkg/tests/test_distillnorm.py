import math

import pytest
from hypothesis import given
import hypothesis.strategies as st

from oneshot_ent import oracle
from oneshot_ent.distillnorm import (
    MonotonicityError, e_d_regula, fidelity_of_distillation, k_star, regula_dim,
)
from oneshot_ent.probvec import make_prob_vec
from oneshot_ent.tensorpower import build_spectrum

from conftest import prob_lists


def spec(p, n=1):
    return build_spectrum(make_prob_vec(p), n)


def test_k_star_examples():
    assert k_star(spec([0.5, 0.5]), 2) == 1
    assert k_star(spec([1.0]), 2) == 1
    ds = oracle.dense_tensor_power([0.9, 0.1], 2)
    assert k_star(spec([0.9, 0.1], 2), 3) == oracle.oracle_kstar(ds, 3)


def test_k_star_rejects_small_m():
    with pytest.raises(ValueError):
        k_star(spec([0.5, 0.5]), 1)


def test_fidelity_examples():
    f = fidelity_of_distillation(spec([0.5, 0.5]), 2)
    assert f.fidelity == pytest.approx(1.0, abs=1e-12)
    assert f.k_star == 1
    assert fidelity_of_distillation(spec([1.0]), 2).fidelity == pytest.approx(0.5, abs=1e-12)


def test_regula_examples():
    assert e_d_regula(make_prob_vec([0.5, 0.5]), 1, 0.0) == 1.0
    assert e_d_regula(make_prob_vec([1.0]), 1, 0.4) == 0.0
    ds = oracle.dense_tensor_power([0.9, 0.1], 4)
    m, _ = regula_dim(spec([0.9, 0.1], 4), 0.1)
    assert m == oracle.oracle_regula(ds, 0.1)


def test_regula_uniform_power():
    assert e_d_regula(make_prob_vec([0.25] * 4), 3, 0.0) == pytest.approx(6.0)


def test_regula_large_copies():
    # the fidelity search runs on the block structure alone
    val = e_d_regula(make_prob_vec([0.9, 0.1]), 600, 0.1)
    assert 0.0 < val < 600


@given(prob_lists(max_dim=3), st.integers(1, 5))
def test_fidelity_laws_exhaustive(a, n):
    p = make_prob_vec(a)
    s = build_spectrum(p, n)
    ds = oracle.dense_tensor_power(p.support, n)
    total = s.total_count
    prev = 1.0
    for m in range(2, 2 * total + 3):
        f = fidelity_of_distillation(s, m)
        assert 0.0 <= f.fidelity <= 1.0
        assert f.fidelity <= prev + 1e-12
        assert f.fidelity <= total / m + 1e-12
        assert f.k_star == oracle.oracle_kstar(ds, m)
        h = oracle._h_values(ds, m)
        assert h[f.k_star - 1] <= h.min() * (1.0 + 1e-10) + 1e-300
        assert f.fidelity == pytest.approx(oracle.oracle_fidelity(ds, m), abs=1e-10)
        prev = f.fidelity


@given(prob_lists(max_dim=3), st.integers(1, 4), st.floats(0.0, 0.9))
def test_regula_monotone_check(a, n, eps):
    s = spec(make_prob_vec(a).entries, n)
    plain = regula_dim(s, eps)
    checked = regula_dim(s, eps, check_monotone=True)
    assert plain == checked


def test_monotonicity_error_type():
    assert issubclass(MonotonicityError, AssertionError)
