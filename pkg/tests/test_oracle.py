import numpy as np
import pytest

from oneshot_ent import oracle
from oneshot_ent.probvec import ky_fan, make_prob_vec, t_star


def test_dense_examples():
    ds = oracle.dense_tensor_power([0.9, 0.1], 2)
    assert np.allclose(ds.entries, [0.81, 0.09, 0.09, 0.01])
    assert list(oracle.dense_tensor_power([1.0], 3).entries) == [1.0]
    assert np.allclose(oracle.dense_tensor_power([0.5, 0.5], 2).entries, [0.25] * 4)


def test_dense_size_guard():
    with pytest.raises(oracle.OracleSizeError):
        oracle.dense_tensor_power([0.5, 0.5], 25)


def test_oracle_examples():
    assert oracle.oracle_cost(oracle.dense_tensor_power([0.9, 0.1], 1), 0.05) == 2
    assert oracle.oracle_distill(oracle.dense_tensor_power([0.25] * 4, 1), 0.0) == 4
    p = make_prob_vec([0.5, 0.3, 0.2])
    ds = oracle.dense_tensor_power(p.entries, 1)
    for k in range(4):
        assert oracle.oracle_ky_fan(ds, k) == pytest.approx(ky_fan(p, k), abs=1e-15)


def test_tstar_2d_examples():
    assert oracle.oracle_tstar_2d([0.5, 0.5], [1 / 3] * 3) == pytest.approx(1 / 3, abs=1e-5)
    assert oracle.oracle_tstar_2d([0.7, 0.3], [0.7, 0.3]) == pytest.approx(0.0, abs=1e-5)
    assert oracle.oracle_tstar_2d([1.0, 0.0], [0.5, 0.5]) == pytest.approx(0.5, abs=1e-5)
    with pytest.raises(ValueError):
        oracle.oracle_tstar_2d([0.5, 0.3, 0.2], [1.0])


def test_tstar_2d_matches_closed_form(rng):
    for _ in range(20):
        a = rng.random()
        q = [rng.random() for _ in range(rng.randint(1, 4))]
        q = [x / sum(q) for x in q]
        p = make_prob_vec([a, 1 - a])
        assert oracle.oracle_tstar_2d(p.entries, q) == pytest.approx(
            t_star(p, make_prob_vec(q)), abs=1e-5)


def test_harness_passes():
    rep = oracle.run_verification(seed=3, cases=15)
    assert rep.ok, rep.failures
    assert rep.checks >= 4 * rep.cases


@pytest.mark.parametrize("fault", oracle.FAULTS)
def test_harness_detects_faults(fault):
    rep = oracle.run_verification(seed=3, cases=5, fault=fault)
    assert not rep.ok


def test_harness_zero_cases():
    assert oracle.run_verification(cases=0).ok
