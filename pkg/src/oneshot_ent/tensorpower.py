"""Compressed spectrum of ``p^{(x)n}``: distinct values with exact multiplicities.

The tensor power of a d-dimensional distribution has ``d**n`` entries but only
``C(n+d-1, d-1)`` distinct values. :class:`TensorPowerSpectrum` stores the
distinct values ``s_1 > s_2 > ... > s_r`` together with

* ``v_j``: how many times ``s_j`` occurs (exact Python int),
* ``N_j``: cumulative count ``v_1 + ... + v_j`` (exact Python int),
* ``P_j``: cumulative mass ``v_1 s_1 + ... + v_j s_j`` (float),
* ``Q_j``: tail mass ``1 - P_j``, summed from the small end (float).

Values and masses are handled in log space so that ``n`` in the 1e5 range
works even though ``s_j`` underflows. Exact counts come from one of two
sources. With two distinct base values, sorted neighbours differ by a unit
move, so multinomials are chained along a lazily walked frontier and only the
prefix a query touches is materialized. With three or more, the counts are
summed modulo a set of word-sized primes in vectorized form and recovered by
the Chinese remainder theorem.

Ky-Fan norms inside block ``j`` are linear in the index:
``||p^n||_(k) = P_{j-1} + s_j (k - N_{j-1})`` for ``N_{j-1} <= k <= N_j``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterator, NamedTuple

import numpy as np
from scipy.special import gammaln

try:
    from gmpy2 import divexact as _divexact
    from gmpy2 import mpz as _big
except ImportError:  # plain ints are exact too, only slower
    _big = int

    def _divexact(a, b):
        return a // b

from .probvec import ProbVec, as_prob_vec

MAX_BLOCKS = 10**8
LOG_MERGE_TOL = 1e-12
REL_TOL = 1e-12
STRATEGIES = ("scan", "bisect")

_LN2 = math.log(2.0)


class ResourceGuardError(RuntimeError):
    """The requested tensor power has too many distinct values to enumerate."""


class Block(NamedTuple):
    value: float
    log_value: float
    count: int
    cum_count: int
    cum_mass: float


# ---------------------------------------------------------------------------
# integer helpers


def floor_exp(log_x: float) -> int:
    """``floor(exp(log_x))`` as a Python int, valid far beyond float range.

    Above 2**52 the result carries the float's relative precision only.
    """
    if log_x < 36.0:
        return math.floor(math.exp(log_x))
    log2_x = log_x / _LN2
    shift = math.floor(log2_x) - 52
    mantissa = 2.0 ** (log2_x - shift)
    return int(mantissa) << shift


def ceil_exp(log_x: float) -> int:
    if log_x < 36.0:
        return math.ceil(math.exp(log_x))
    return floor_exp(log_x) + 1


def floor_ratio(x: float, denom_log: float, denom: float) -> int:
    """``floor(x / d)`` for ``x >= 0`` where ``d = exp(denom_log)`` may underflow."""
    if x <= 0.0:
        return 0
    if denom > 1e-290:
        q = x / denom
        if q < 2.0**52:
            return math.floor(q)
    return floor_exp(math.log(x) - denom_log)


def ceil_ratio(x: float, denom_log: float, denom: float) -> int:
    if x <= 0.0:
        return 0
    if denom > 1e-290:
        q = x / denom
        if q < 2.0**52:
            return math.ceil(q)
    return ceil_exp(math.log(x) - denom_log)


def int_log(x: int) -> float:
    """Natural log of a positive Python int of any size."""
    return math.log(x)


def floor_tol(numer: int, denom: float) -> int:
    """``floor(numer / denom)`` exactly, nudged up when within ``REL_TOL`` of the next integer."""
    q = Fraction(numer) / Fraction(denom)
    m = math.floor(q)
    if (m + 1) - q <= Fraction(REL_TOL) * q:
        m += 1
    return m


# ---------------------------------------------------------------------------
# composition enumeration


@lru_cache(maxsize=None)
def _compositions_cached(n: int, t: int) -> np.ndarray:
    if t == 1:
        return np.array([[n]], dtype=np.int64)
    if t == 2:
        a = np.arange(n, -1, -1, dtype=np.int64)
        return np.column_stack([a, n - a])
    parts = []
    for a in range(n, -1, -1):
        sub = _compositions_cached(n - a, t - 1)
        parts.append(np.column_stack([np.full(len(sub), a, dtype=np.int64), sub]))
    return np.concatenate(parts)


def compositions(n: int, t: int) -> np.ndarray:
    """All ``(n_1..n_t)`` with non-negative entries summing to ``n``, one per row."""
    out = _compositions_cached(n, t)
    _compositions_cached.cache_clear()
    return out


def _group_support(support: tuple[float, ...]) -> tuple[list[float], list[int]]:
    values: list[float] = []
    mult: list[int] = []
    for x in support:
        if values and x == values[-1]:
            mult[-1] += 1
        else:
            values.append(x)
            mult.append(1)
    return values, mult


def _compensated_cumsum(x: np.ndarray) -> np.ndarray:
    """Prefix sums with the rounding error of every step added back.

    ``np.cumsum`` is sequential, so the error of step ``i`` is the TwoSum
    residual of ``(s_{i-1}, x_i)``; accumulating those residuals gives
    Kahan-level accuracy without a Python loop.
    """
    s = np.cumsum(x)
    prev = np.concatenate(([0.0], s[:-1]))
    bp = s - prev
    ap = s - bp
    err = (prev - ap) + (x - bp)
    return s + np.cumsum(err)


# ---------------------------------------------------------------------------
# exact counts


class _ExactCounts:
    """Lazy exact ``N_j`` over blocks of sorted compositions.

    A frontier walks forward once; every ``stride`` blocks a checkpoint is
    stored so that any earlier ``N_j`` costs at most ``stride`` block steps.
    """

    def __init__(self, comps: np.ndarray, starts: np.ndarray, weights: list[int], n: int,
                 stride: int = 64):
        self.comps = comps
        self.starts = starts
        self.weights = weights
        self.n = n
        self.stride = stride
        self._weighted = any(w != 1 for w in weights)
        # chained ratios need exact predecessors; the factorial table does not
        self._fact = None
        if n <= 4000 and len(weights) > 2:
            self._fact = [_big(1)] * (n + 1)
            for i in range(1, n + 1):
                self._fact[i] = self._fact[i - 1] * i
        # state: (block index, cumulative count, last composition, its count)
        self._frontier = (0, _big(0), None, _big(0))
        self._checkpoints = {0: self._frontier}

    def _direct(self, comp: tuple[int, ...]) -> int:
        if self._fact is not None:
            val = _divexact(self._fact[self.n], math.prod(self._fact[c] for c in comp))
        else:
            val, rest = _big(1), self.n
            for c in comp:
                val *= math.comb(rest, c)
                rest -= c
        if self._weighted:
            val *= math.prod(w**c for c, w in zip(comp, self.weights) if w != 1)
        return val

    def _chained(self, comp: tuple[int, ...], prev: tuple[int, ...] | None, prev_val: int) -> int:
        """Multinomial of ``comp`` from its predecessor when they differ by one unit move."""
        if prev is not None:
            down = up = -1
            for i, (a, b) in enumerate(zip(prev, comp)):
                if a == b:
                    continue
                if b == a - 1 and down < 0:
                    down = i
                elif b == a + 1 and up < 0:
                    up = i
                else:
                    return self._direct(comp)
            if down >= 0 and up >= 0:
                num = prev_val * prev[down] * self.weights[up]
                return _divexact(num, comp[up] * self.weights[down])
        return self._direct(comp)

    def _values(self, i0: int, i1: int, last, last_val) -> list[int]:
        """Exact weights of compositions ``i0 .. i1-1``."""
        rows = self.comps[i0:i1].tolist()
        if self._fact is not None:
            F = self._fact
            Fn = F[self.n]
            if len(rows[0]) == 2:
                vals = [_divexact(Fn, F[a] * F[b]) for a, b in rows]
            elif len(rows[0]) == 3:
                vals = [_divexact(Fn, F[a] * F[b] * F[c]) for a, b, c in rows]
            else:
                vals = [_divexact(Fn, math.prod([F[c] for c in row])) for row in rows]
            if self._weighted:
                ws = self.weights
                vals = [v * math.prod([w**c for c, w in zip(row, ws) if w != 1])
                        for v, row in zip(vals, rows)]
            return vals
        vals = []
        for row in rows:
            comp = tuple(row)
            last_val = self._chained(comp, last, last_val)
            last = comp
            vals.append(last_val)
        return vals

    def _walk(self, state, target: int, record: bool, chunk: int = 1 << 14):
        b, cum, last, last_val = state
        starts = self.starts
        batched = self._fact is not None
        while b < target:
            # blocks b+1 .. e; batched chunks span about `chunk` compositions
            i0 = int(starts[b])
            e = b + 1
            if batched:
                limit = i0 + chunk
                while e < target and starts[e + 1] <= limit:
                    e += 1
            i1 = int(starts[e])
            vals = self._values(i0, i1, last, last_val)
            last = tuple(self.comps[i1 - 1].tolist())
            last_val = vals[-1]
            for bb in range(b, e):
                cum += sum(vals[int(starts[bb]) - i0:int(starts[bb + 1]) - i0])
                if record and (bb + 1) % self.stride == 0:
                    stop = int(starts[bb + 1])
                    self._checkpoints[bb + 1] = (bb + 1, cum, tuple(self.comps[stop - 1].tolist()),
                                                 vals[stop - 1 - i0])
            b = e
        return (b, cum, last, last_val)

    def cum(self, j: int) -> int:
        """Exact ``N_j`` (``N_0 = 0``)."""
        if j <= self._frontier[0]:
            base = (j // self.stride) * self.stride
            state = self._checkpoints.get(base)
            if state is None or state[0] > j:
                state = self._checkpoints[0]
            if state[0] == j:
                return int(state[1])
            if j == self._frontier[0]:
                return int(self._frontier[1])
            return int(self._walk(state, j, record=False)[1])
        self._frontier = self._walk(self._frontier, j, record=True)
        return int(self._frontier[1])

    def iter_cum(self) -> Iterator[int]:
        """Yield ``N_1, N_2, ...`` by a fresh sequential walk."""
        state = self._checkpoints[0]
        for j in range(1, len(self.starts)):
            state = self._walk(state, j, record=False)
            yield int(state[1])


_PRIME_CACHE: list[int] = []
MODULAR_BUDGET = 400_000_000


def _word_primes(count: int) -> list[int]:
    """The ``count`` largest primes below 2**31."""
    cand = _PRIME_CACHE[-1] - 2 if _PRIME_CACHE else 2**31 - 1
    while len(_PRIME_CACHE) < count:
        if all(cand % f for f in range(3, math.isqrt(cand) + 1, 2)):
            _PRIME_CACHE.append(cand)
        cand -= 2
    return _PRIME_CACHE[:count]


class _ModularCounts:
    """Exact ``N_j`` from residues modulo word-sized primes, joined by CRT.

    Block residues are summed once with vectorized arithmetic; cumulative
    residues are kept every ``stride`` blocks and the rest is recomputed from
    the nearest checkpoint on demand.
    """

    def __init__(self, comps: np.ndarray, starts: np.ndarray, weights: list[int], n: int,
                 total: int, stride: int = 64):
        self.comps = comps
        self.starts = starts
        self.stride = stride
        count = (2 * total).bit_length() // 30 + 2
        self.primes = _word_primes(count)
        self._tables = [self._prime_tables(q, weights, n) for q in self.primes]
        modulus = math.prod(self.primes)
        self.modulus = modulus
        self._crt = [(modulus // q) * pow(modulus // q, -1, q) for q in self.primes]

        r = len(starts) - 1
        marks = np.arange(0, r + 1, stride)
        self._marks = np.zeros((len(self.primes), len(marks)), dtype=np.int64)
        for i, q in enumerate(self.primes):
            blocks = np.add.reduceat(self._terms(i, 0, len(comps)), starts[:-1]) % q
            cum = np.concatenate(([0], np.cumsum(blocks) % q))
            self._marks[i] = cum[marks]

    @staticmethod
    def _prime_tables(q: int, weights: list[int], n: int):
        fact = [1] * (n + 1)
        for i in range(1, n + 1):
            fact[i] = fact[i - 1] * i % q
        inv = [1] * (n + 1)
        inv[n] = pow(fact[n], q - 2, q)
        for i in range(n, 0, -1):
            inv[i - 1] = inv[i] * i % q
        inv_fact = np.array(inv, dtype=np.int64)
        cols = []
        for w in weights:
            if w == 1:
                cols.append(inv_fact)
                continue
            pw = [1] * (n + 1)
            for i in range(1, n + 1):
                pw[i] = pw[i - 1] * w % q
            cols.append(inv_fact * np.array(pw, dtype=np.int64) % q)
        return fact[n], cols

    def _terms(self, i: int, lo: int, hi: int) -> np.ndarray:
        q = self.primes[i]
        head, cols = self._tables[i]
        rows = self.comps[lo:hi]
        out = np.full(hi - lo, head, dtype=np.int64)
        for c, col in enumerate(cols):
            out = out * col[rows[:, c]] % q
        return out

    def _residues(self, j: int) -> list[int]:
        base = j // self.stride
        lo, hi = int(self.starts[base * self.stride]), int(self.starts[j])
        out = []
        for i, q in enumerate(self.primes):
            extra = int(self._terms(i, lo, hi).sum()) if hi > lo else 0
            out.append((int(self._marks[i, base]) + extra) % q)
        return out

    def _join(self, residues) -> int:
        return sum(r * c for r, c in zip(residues, self._crt)) % self.modulus

    def cum(self, j: int) -> int:
        """Exact ``N_j`` (``N_0 = 0``)."""
        return self._join(self._residues(j))

    def iter_cum(self) -> Iterator[int]:
        r = len(self.starts) - 1
        for base in range(0, r, self.stride):
            top = min(base + self.stride, r)
            lo, hi = int(self.starts[base]), int(self.starts[top])
            cols = []
            for i, q in enumerate(self.primes):
                blocks = np.add.reduceat(self._terms(i, lo, hi), self.starts[base:top] - lo)
                cols.append((self._marks[i, base // self.stride] + np.cumsum(blocks)) % q)
            for k in range(top - base):
                yield self._join(int(col[k]) for col in cols)


def _exact_counts(comps, starts, weights, n, total):
    if len(weights) >= 3:
        primes = (2 * total).bit_length() // 30 + 2
        if primes * len(comps) <= MODULAR_BUDGET:
            return _ModularCounts(comps, starts, weights, n, total)
    return _ExactCounts(comps, starts, weights, n)


# ---------------------------------------------------------------------------


@dataclass(eq=False)
class TensorPowerSpectrum:
    """Sorted distinct values of ``p^{(x)n}`` with exact multiplicities.

    Arrays indexed by block ``j`` use a leading sentinel so that index ``j``
    refers to the quantity after block ``j`` (``cum_mass[0] == 0``,
    ``tail_mass[r] == 0``). Build with :func:`build_spectrum`.
    """

    base: ProbVec
    copies: int
    log_values: np.ndarray      # (r,)
    values: np.ndarray          # (r,), may underflow to 0
    log_counts: np.ndarray      # (r,), natural log of v_j
    log_cum_counts: np.ndarray  # (r,), natural log of N_j
    cum_mass: np.ndarray        # (r+1,)
    tail_mass: np.ndarray       # (r+1,)
    log_cum_sqrt: np.ndarray    # (r+1,), log of sum_{i<=j} v_i sqrt(s_i); [0] = -inf
    total_count: int
    _exact: _ExactCounts | _ModularCounts

    @property
    def num_blocks(self) -> int:
        return len(self.values)

    # -- exact counts -------------------------------------------------------

    def cum_count(self, j: int) -> int:
        """Exact ``N_j`` for ``0 <= j <= r``."""
        if j >= self.num_blocks:
            return self.total_count
        return self._exact.cum(j)

    def count(self, j: int) -> int:
        """Exact ``v_j`` for ``1 <= j <= r``."""
        return self.cum_count(j) - self.cum_count(j - 1)

    def blocks(self) -> list[Block]:
        """Materialize every block with exact counts. Desk scale only."""
        out = []
        prev = 0
        for j, cum in enumerate(self._exact.iter_cum(), start=1):
            out.append(Block(float(self.values[j - 1]), float(self.log_values[j - 1]),
                             cum - prev, cum, float(self.cum_mass[j])))
            prev = cum
        return out

    # -- helpers --------------------------------------------------------------

    def scaled_value(self, j: int, count: int) -> float:
        """``count * s_j`` as a float, through logs when either factor is extreme."""
        if count <= 0:
            return 0.0
        s = float(self.values[j - 1])
        if s > 1e-290 and count < 2**53:
            return count * s
        log_x = int_log(count) + float(self.log_values[j - 1])
        return math.exp(log_x) if log_x < 709.0 else math.inf

    def locate_index(self, k: int, strategy: str = "bisect") -> int:
        """Block ``j`` with ``N_{j-1} < k <= N_j`` for ``1 <= k <= total_count``."""
        _check_strategy(strategy)
        if strategy == "scan":
            for j, cum in enumerate(self._exact.iter_cum(), start=1):
                if k <= cum:
                    return j
            raise AssertionError("index beyond total count")
        guess = int(np.searchsorted(self.log_cum_counts, int_log(k))) + 1
        return boundary_search(1, self.num_blocks, lambda j: self.cum_count(j) >= k, guess)

    def tail_at(self, k: int, strategy: str = "bisect") -> float:
        """``1 - ||p^n||_(k)``, summed from the small end."""
        if k <= 0:
            return 1.0
        if k >= self.total_count:
            return 0.0
        j = self.locate_index(k, strategy)
        return float(self.tail_mass[j]) + self.scaled_value(j, self.cum_count(j) - k)

    def sqrt_ky_fan_log(self, k: int, strategy: str = "bisect") -> float:
        """Natural log of the Ky-Fan norm of the entrywise square root at ``k``."""
        if k <= 0:
            return -math.inf
        if k >= self.total_count:
            return float(self.log_cum_sqrt[-1])
        j = self.locate_index(k, strategy)
        offset = k - self.cum_count(j - 1)
        inner = int_log(offset) + 0.5 * float(self.log_values[j - 1])
        return float(np.logaddexp(self.log_cum_sqrt[j - 1], inner))


def boundary_search(lo: int, hi: int, pred, guess: int) -> int:
    """Smallest ``j`` in ``[lo, hi]`` with ``pred(j)``; ``hi + 1`` if there is none.

    ``pred`` must be monotone (False...False True...True). Starting from
    ``guess``, the bracket is widened geometrically and then bisected, so a
    good guess costs O(log distance) evaluations of ``pred``.
    """
    f, t = lo - 1, hi + 1
    if lo > hi:
        return t
    g = min(max(guess, lo), hi)
    step = 1
    if pred(g):
        t = g
        while t - step > f:
            x = t - step
            if pred(x):
                t = x
                step *= 2
            else:
                f = x
                break
    else:
        f = g
        while f + step < t:
            x = f + step
            if pred(x):
                t = x
                break
            f = x
            step *= 2
    while t - f > 1:
        c = (f + t) // 2
        if pred(c):
            t = c
        else:
            f = c
    return t


def _check_strategy(strategy: str) -> None:
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}; expected one of {STRATEGIES}")


def build_spectrum(p: ProbVec, n: int) -> TensorPowerSpectrum:
    """Enumerate the distinct entries of ``p^{(x)n}``.

    Zero entries are dropped and repeated entries of ``p`` are grouped, so a
    composition over ``t`` distinct values carries the weight
    ``multinomial(n; n_1..n_t) * prod c_i**n_i``. Compositions whose log values
    agree to a relative 1e-12 are merged.

    Raises:
        ResourceGuardError: more than ``MAX_BLOCKS`` compositions.
    """
    p = as_prob_vec(p)
    if n < 1:
        raise ValueError("copies must be >= 1")
    vals, mult = _group_support(p.support)
    t = len(vals)
    ncomp = math.comb(n + t - 1, t - 1)
    if ncomp > MAX_BLOCKS:
        raise ResourceGuardError(f"{ncomp} distinct values exceed the limit of {MAX_BLOCKS}")

    comps = compositions(n, t)
    log_u = np.log(np.array(vals))
    log_c = np.log(np.array(mult, dtype=float))
    lv = comps @ log_u
    lc = gammaln(n + 1.0) - gammaln(comps + 1.0).sum(axis=1) + comps @ log_c

    order = np.argsort(-lv, kind="stable")
    comps, lv, lc = comps[order], lv[order], lc[order]

    gaps = lv[:-1] - lv[1:]
    tol = LOG_MERGE_TOL * np.maximum(1.0, np.abs(lv[:-1]))
    new_block = np.concatenate(([True], gaps > tol))
    starts = np.flatnonzero(new_block)
    block_lv = lv[starts]
    block_lc = np.logaddexp.reduceat(lc, starts) if len(lc) > 1 else lc.copy()
    starts_full = np.append(starts, len(lv))

    mass = np.exp(block_lc + block_lv)
    head = _compensated_cumsum(mass)
    tail = _compensated_cumsum(mass[::-1])[::-1]
    total = head[-1]
    cum_mass = np.concatenate(([0.0], head / total))
    # tail_mass[j]: mass strictly after block j
    tail_mass = np.append(tail / total, 0.0)
    tail_mass[0] = 1.0

    log_cum_counts = np.logaddexp.accumulate(block_lc)
    log_cum_sqrt = np.concatenate(([-np.inf], np.logaddexp.accumulate(block_lc + 0.5 * block_lv)))

    total_count = len(p.support) ** n
    exact = _exact_counts(comps, starts_full, mult, n, total_count)
    return TensorPowerSpectrum(
        base=p,
        copies=n,
        log_values=block_lv,
        values=np.exp(block_lv),
        log_counts=block_lc,
        log_cum_counts=log_cum_counts,
        cum_mass=cum_mass,
        tail_mass=tail_mass,
        log_cum_sqrt=log_cum_sqrt,
        total_count=total_count,
        _exact=exact,
    )


# ---------------------------------------------------------------------------
# queries


def tp_ky_fan(spec: TensorPowerSpectrum, k: int, strategy: str = "bisect") -> float:
    """``||p^{(x)n}||_(k)``: interpolate linearly inside the block holding index ``k``."""
    _check_strategy(strategy)
    if k < 0 or k > spec.total_count:
        raise ValueError(f"k={k} outside [0, {spec.total_count}]")
    if k == 0:
        return 0.0
    if k == spec.total_count:
        return 1.0
    j = spec.locate_index(k, strategy)
    offset = k - spec.cum_count(j - 1)
    return float(spec.cum_mass[j - 1]) + spec.scaled_value(j, offset)


def _first_block(arr: np.ndarray, pred, strategy: str) -> int:
    """Smallest ``j`` in ``1..r`` with ``pred(arr[j])`` for a monotone predicate."""
    r = len(arr) - 1
    if strategy == "scan":
        for j in range(1, r + 1):
            if pred(arr[j]):
                return j
        return r
    lo, hi = 0, r  # pred false at lo (or lo == 0), true at hi
    while hi - lo > 1:
        c = (lo + hi) // 2
        if pred(arr[c]):
            hi = c
        else:
            lo = c
    return hi


def tp_threshold(spec: TensorPowerSpectrum, eps: float, strict: bool = True,
                 strategy: str = "bisect") -> int:
    """Smallest ``m`` with ``||p^n||_(m) > eps`` (strict) or ``>= eps`` (non-strict).

    Values within a relative 1e-12 of ``eps`` count as equal to it, so the two
    variants differ exactly when ``eps`` sits on a Ky-Fan value.
    """
    _check_strategy(strategy)
    if not 0.0 <= eps < 1.0:
        raise ValueError("eps must lie in [0, 1)")
    P = spec.cum_mass
    if strict:
        if eps == 0.0:
            return 1
        level = eps * (1.0 + REL_TOL)
        j = _first_block(P, lambda x: x > level, strategy)
        base = spec.cum_count(j - 1)
        gap = level - float(P[j - 1])
        off = floor_ratio(gap, float(spec.log_values[j - 1]), float(spec.values[j - 1])) + 1
    else:
        if eps == 0.0:
            return 0
        level = eps * (1.0 - REL_TOL)
        j = _first_block(P, lambda x: x >= level, strategy)
        base = spec.cum_count(j - 1)
        gap = level - float(P[j - 1])
        off = ceil_ratio(gap, float(spec.log_values[j - 1]), float(spec.values[j - 1]))
    width = spec.cum_count(j) - base
    return base + min(max(off, 1), width)
