"""Brute-force references on the fully expanded tensor power.

Nothing here calls into the fast paths: the spectrum is materialized by
repeated outer products, sorted with numpy, and every quantity is the literal
formula evaluated over all indices. Only the tolerance conventions are shared
so that integer outputs are comparable.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

DENSE_LIMIT = 2**24
REGULA_LIMIT = 4096
REL = 1e-12
TIE = 1e-12


class OracleSizeError(ValueError):
    pass


@dataclass(frozen=True)
class DenseSpectrum:
    """All ``d**n`` entries of ``p^{(x)n}`` in non-increasing order."""

    entries: np.ndarray
    head: np.ndarray = field(repr=False)  # head[k] = sum of the k largest
    tail: np.ndarray = field(repr=False)  # tail[k] = sum of entries after the k largest

    @property
    def size(self) -> int:
        return len(self.entries)

    def ky(self, k: int) -> float:
        return float(self.head[min(k, self.size)])

    def rest(self, k: int) -> float:
        return float(self.tail[min(k, self.size)])


def _running_sum(values) -> np.ndarray:
    """Prefix sums with a Neumaier correction, element by element."""
    out = [0.0]
    s = c = 0.0
    for x in values:
        t = s + x
        if abs(s) >= abs(x):
            c += (s - t) + x
        else:
            c += (x - t) + s
        s = t
        out.append(s + c)
    return np.array(out)


def dense_tensor_power(p: Sequence[float], n: int) -> DenseSpectrum:
    vec = np.array([float(x) for x in p], dtype=float)
    if n < 1:
        raise ValueError("n must be >= 1")
    if len(vec) ** n > DENSE_LIMIT:
        raise OracleSizeError(f"{len(vec)}^{n} entries exceed the dense limit {DENSE_LIMIT}")
    vec = vec / vec.sum()
    full = vec.copy()
    for _ in range(n - 1):
        full = np.multiply.outer(full, vec).ravel()
    full = -np.sort(-full, kind="mergesort")
    if abs(full.sum() - 1.0) > 1e-8:
        raise ValueError("dense spectrum does not sum to one")
    head = _running_sum(full)
    tail = _running_sum(full[::-1])[::-1]
    return DenseSpectrum(full, head, tail)


def oracle_ky_fan(ds: DenseSpectrum, k: int) -> float:
    if k < 0:
        raise ValueError("k must be >= 0")
    return ds.ky(k)


def oracle_distill(ds: DenseSpectrum, eps: float) -> int:
    """``floor(min_{k >= ell} k / (||p||_(k) - eps))`` by exhaustive evaluation."""
    N = ds.size
    level = eps * (1.0 + REL)
    ks = np.arange(1, N + 1)
    heads = ds.head[1:].copy()
    heads[-1] = 1.0
    ok = heads > level if eps > 0.0 else np.ones(N, dtype=bool)
    ratios = np.full(N, np.inf)
    ratios[ok] = ks[ok] / (heads[ok] - eps)
    best = float(ratios.min())
    return max(1, math.floor(best * (1.0 + REL)))


def oracle_cost(ds: DenseSpectrum, eps: float) -> int:
    """Smallest ``m`` whose discarded tail is at most ``eps``."""
    if eps == 0.0:
        return int(np.count_nonzero(ds.entries))
    level = eps * (1.0 + REL)
    for m in range(1, ds.size + 1):
        if ds.rest(m) <= level:
            return m
    return ds.size


def _h_values(ds: DenseSpectrum, m: int) -> np.ndarray:
    """``h(k) = (1 - ||p||_(m-k)) / k`` for k = 1..m."""
    ks = np.arange(1, m + 1)
    idx = np.minimum(m - ks, ds.size)
    return ds.tail[idx] / ks


def _run_ends(entries: np.ndarray) -> np.ndarray:
    """``ends[i]``: 1-based last index of the run of equal entries holding index ``i + 1``.

    Neighbours whose logs agree to a relative 1e-12 count as equal.
    """
    logs = np.log(entries)
    same = np.abs(np.diff(logs)) <= 1e-12 * np.maximum(1.0, np.abs(logs[:-1]))
    lasts = np.append(np.flatnonzero(~same) + 1, len(entries))
    return lasts[np.searchsorted(lasts, np.arange(1, len(entries) + 1))]


def oracle_kstar(ds: DenseSpectrum, m: int) -> int:
    """Smallest minimizer of ``h(k) = (1 - ||p||_(m-k)) / k`` over ``1 <= k <= m``.

    Every step ``h(k+1) - h(k) = t(k) / (k (k+1))`` is evaluated, with
    ``t(k) = k p_{m-k} - tail(m-k)``. Inside a run of equal entries ending at
    ``e`` this equals ``p_{m-k} (m - e) - tail(e)``, which avoids cancelling
    two nearly equal terms. A step with ``|t|`` within a relative 1e-12 of
    those terms is a tie; the answer is the first ``k`` where h stops
    strictly decreasing.
    """
    if m < 2:
        raise ValueError("m must be >= 2")
    N = ds.size
    ends = _run_ends(ds.entries)
    ks = np.arange(1, m)
    idx = m - ks
    inside = idx <= N  # past the support p_i = tail(i) = 0, so t(k) = 0
    i = idx[inside]
    e = ends[i - 1]
    lead = ds.entries[i - 1] * (m - e)
    rest = ds.tail[e]
    ok = np.ones(m - 1, dtype=bool)
    ok[inside] = lead - rest >= -TIE * np.maximum(np.abs(lead), rest)
    return int(np.argmax(ok)) + 1 if ok.any() else m


def oracle_fidelity(ds: DenseSpectrum, m: int) -> float:
    ks = oracle_kstar(ds, m)
    i = m - ks
    roots = np.sqrt(ds.entries[:min(i, ds.size)])
    a = math.fsum(roots.tolist())
    b = math.sqrt(ks * ds.rest(i))
    return min(max((a + b) ** 2 / m, 0.0), 1.0)


def oracle_regula(ds: DenseSpectrum, eps: float) -> int:
    """Largest ``m`` in ``[2, floor(d^n/(1-eps)^2)]`` with ``F >= 1 - eps``; 1 if none."""
    cap = max(2, math.floor(ds.size / (1.0 - eps) ** 2))
    if cap > REGULA_LIMIT:
        raise OracleSizeError(f"scan up to {cap} exceeds {REGULA_LIMIT}")
    target = 1.0 - eps - 1e-12
    best = 1
    for m in range(2, cap + 1):
        if oracle_fidelity(ds, m) >= target:
            best = m
    return best


def oracle_tstar_2d(p: Sequence[float], q: Sequence[float], step: float = 1e-6) -> float:
    """Grid minimum of half the l1 distance to ``q`` over the distributions ``r`` majorizing ``p``.

    ``p`` lives on two levels; ``r`` ranges over two-level vectors whose
    larger entry is at least ``max(p)``.
    """
    pv = [float(x) for x in p]
    while len(pv) > 2 and pv[-1] == 0.0:
        pv.pop()
    if len(pv) > 2:
        raise ValueError("source must have dimension 2")
    p1 = max(pv + [0.0])
    qv = np.sort(np.array([float(x) for x in q]))[::-1]
    length = max(2, len(qv))
    qv = np.concatenate((qv, np.zeros(length - len(qv))))
    grid = np.arange(p1, 1.0 + step / 2, step)
    grid = np.concatenate((grid, 1.0 - grid))
    dist = np.abs(grid - qv[0]) + np.abs(1.0 - grid - qv[1]) + qv[2:].sum()
    return 0.5 * float(dist.min())


# ---------------------------------------------------------------------------
# randomized equivalence harness


@dataclass
class VerifyReport:
    cases: int = 0
    checks: int = 0
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


FAULTS = ("distill_off_by_one", "cost_off_by_one", "ky_fan_shift")


def random_case(rng: random.Random, max_size: int = 65536) -> tuple[list[float], int]:
    d = rng.choice((2, 3, 4))
    raw = [rng.random() for _ in range(d)]
    total = math.fsum(raw)
    p = [x / total for x in raw]
    n_max = int(math.log(max_size) / math.log(d) + 1e-9)
    return p, rng.randint(1, n_max)


def run_verification(seed: int = 0, cases: int = 200, fault: str | None = None) -> VerifyReport:
    """Compare the fast paths with the oracles on random spectra.

    ``fault`` perturbs one fast-path output as a negative control.
    """
    # late import keeps the oracle definitions free of fast-path code
    from . import distillnorm, singleshot, tensorpower
    from .probvec import make_prob_vec

    if fault is not None and fault not in FAULTS:
        raise ValueError(f"unknown fault {fault!r}")
    rng = random.Random(seed)
    rep = VerifyReport()

    def check(name, fast, ref, exact=True):
        rep.checks += 1
        bad = fast != ref if exact else abs(fast - ref) > 1e-9
        if bad:
            rep.failures.append((rep.cases, name, fast, ref))

    for _ in range(cases):
        p, n = random_case(rng)
        eps = rng.uniform(0.0, 0.95)
        pv = make_prob_vec(p)
        spec = tensorpower.build_spectrum(pv, n)
        ds = dense_tensor_power(pv.support, n)
        N = ds.size

        k = rng.randint(0, N)
        ky = tensorpower.tp_ky_fan(spec, k)
        if fault == "ky_fan_shift":
            ky += 1e-6
        check("ky_fan", ky, oracle_ky_fan(ds, k), exact=False)

        m_d = singleshot.distill_eps(spec, eps).m
        if fault == "distill_off_by_one":
            m_d += 1
        check("distill", m_d, oracle_distill(ds, eps))

        m_c = singleshot.cost_eps(spec, eps).m
        if fault == "cost_off_by_one":
            m_c += 1
        check("cost", m_c, oracle_cost(ds, eps))

        m = rng.randint(2, 2 * N + 1)
        check("k_star", distillnorm.k_star(spec, m), oracle_kstar(ds, m))

        # shrink n until the exhaustive regula scan fits
        n_reg = n
        while n_reg > 1 and math.floor(len(p) ** n_reg / (1.0 - eps) ** 2) > REGULA_LIMIT:
            n_reg -= 1
        if math.floor(len(p) ** n_reg / (1.0 - eps) ** 2) <= REGULA_LIMIT:
            spec_r = spec if n_reg == n else tensorpower.build_spectrum(pv, n_reg)
            ds_r = ds if n_reg == n else dense_tensor_power(pv.support, n_reg)
            m_r, _ = distillnorm.regula_dim(spec_r, eps)
            check("regula", m_r, oracle_regula(ds_r, eps))
        rep.cases += 1
    return rep
