import math

import pytest
from hypothesis import given
import hypothesis.strategies as st

from oneshot_ent import oracle
from oneshot_ent.probvec import make_prob_vec
from oneshot_ent.singleshot import (
    CqEnsemble, EntResult, PruningMismatch, cost_eps, cost_upper_from_decomposition,
    distill_eps, hmax_cond_cq, pruning_residual, smoothed_hmax, smoothed_hmax_dim,
)
from oneshot_ent.tensorpower import build_spectrum

from conftest import prob_lists


def spec(p, n=1):
    return build_spectrum(make_prob_vec(p), n)


@pytest.mark.parametrize("m,n", [(2, 1), (2, 5), (3, 4), (4, 3)])
def test_distill_uniform(m, n):
    res = distill_eps(spec([1 / m] * m, n), 0.0)
    assert res.m == m**n
    assert res.log2_m == pytest.approx(n * math.log2(m), abs=1e-12)


def test_distill_examples():
    assert distill_eps(spec([0.6, 0.3, 0.1]), 0.0).m == 1
    res = distill_eps(spec([0.75, 0.25]), 0.25)
    assert (res.m, res.log2_m) == (2, 1.0)


def test_cost_examples():
    assert cost_eps(spec([0.5, 0.5]), 0.0).m == 2
    assert cost_eps(spec([0.9, 0.1]), 0.05).m == 2
    # 1 - eps = 0.9 sits exactly on a Ky-Fan value
    assert cost_eps(spec([0.6, 0.3, 0.1]), 0.1).m == 2


def test_eps_range():
    for f in (distill_eps, cost_eps):
        with pytest.raises(ValueError):
            f(spec([0.5, 0.5]), 1.0)
        with pytest.raises(ValueError):
            f(spec([0.5, 0.5]), -0.1)


def test_ent_result_log():
    r = EntResult.from_m(2**2000)
    assert r.log2_m == 2000.0
    with pytest.raises(ValueError):
        EntResult.from_m(0)


def test_smoothed_hmax_examples():
    assert smoothed_hmax(make_prob_vec([0.5, 0.5]), 0.0) == 1.0
    assert smoothed_hmax(make_prob_vec([1.0, 0.0]), 0.3) == 0.0
    assert smoothed_hmax(make_prob_vec([0.6, 0.3, 0.1]), 0.05) == pytest.approx(math.log2(3))


MIXED = CqEnsemble.of([(0.5, [1.0, 0.0]), (0.5, [0.5, 0.5])])


def test_hmax_cq_examples():
    assert hmax_cond_cq(MIXED, 0.25) == 0.0
    assert hmax_cond_cq(CqEnsemble.of([(0.5, [0.5, 0.5]), (0.5, [0.5, 0.5])]), 0.0) == 1.0
    p = make_prob_vec([0.6, 0.3, 0.1])
    assert hmax_cond_cq(CqEnsemble.of([(1.0, p)]), 0.05) == smoothed_hmax(p, 0.05)


def test_cost_upper_bound_examples():
    assert cost_upper_from_decomposition(MIXED, 0.0) == 1.0
    assert cost_upper_from_decomposition(MIXED, 0.25) == 0.0


def test_pruning_examples():
    single = CqEnsemble.of([(1.0, [0.5, 0.5])])
    assert pruning_residual(single, 1) == pytest.approx(0.5, abs=1e-15)
    assert pruning_residual(single, 2) == pytest.approx(0.0, abs=1e-15)
    assert pruning_residual(MIXED, 1) == pytest.approx(0.25, abs=1e-15)


def test_pruning_mismatch_is_reported():
    with pytest.raises(PruningMismatch):
        pruning_residual(MIXED, 1, tol=-1.0)


def test_ensemble_validation():
    with pytest.raises(ValueError):
        CqEnsemble.of([(0.5, [1.0])])
    with pytest.raises(ValueError):
        CqEnsemble.of([])


@given(prob_lists(max_dim=4), st.integers(1, 4),
       st.floats(0.0, 0.9), st.floats(0.0, 0.9))
def test_monotone_in_eps(a, n, e1, e2):
    s = spec(make_prob_vec(a).entries, n)
    lo, hi = sorted((e1, e2))
    assert distill_eps(s, lo).m <= distill_eps(s, hi).m
    assert cost_eps(s, lo).m >= cost_eps(s, hi).m


@given(prob_lists(max_dim=8), st.floats(0.0, 0.99))
def test_cost_equals_hmax(a, eps):
    p = make_prob_vec(a)
    assert cost_eps(build_spectrum(p, 1), eps).m == smoothed_hmax_dim(p, eps)


@given(prob_lists(max_dim=3), st.integers(1, 5), st.floats(0.0, 0.95))
def test_against_dense_oracle(a, n, eps):
    p = make_prob_vec(a)
    s = build_spectrum(p, n)
    ds = oracle.dense_tensor_power(p.support, n)
    assert distill_eps(s, eps).m == oracle.oracle_distill(ds, eps)
    assert cost_eps(s, eps).m == oracle.oracle_cost(ds, eps)


@given(st.lists(st.tuples(st.floats(0.01, 1.0), prob_lists(max_dim=6)), min_size=1, max_size=5))
def test_pruning_routes_agree(members):
    total = math.fsum(w for w, _ in members)
    ens = CqEnsemble.of([(w / total, s) for w, s in members])
    for m in range(1, ens.max_dim + 1):
        pruning_residual(ens, m)
