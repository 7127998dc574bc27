"""Schmidt spectra and single-copy majorization quantities."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

ZERO_THRESHOLD = 1e-15
NEG_CLAMP = 1e-12
SUM_TOL = 1e-9
CMP_TOL = 1e-12


class ProbVecError(ValueError):
    """Raised for malformed probability vectors or out-of-range indices."""


@dataclass(frozen=True)
class ProbVec:
    """Probability vector stored in non-increasing order.

    Use :func:`make_prob_vec` to build one from raw values.
    """

    entries: tuple[float, ...]

    @property
    def dim(self) -> int:
        return len(self.entries)

    @property
    def schmidt_rank(self) -> int:
        return sum(1 for x in self.entries if x > ZERO_THRESHOLD)

    @property
    def support(self) -> tuple[float, ...]:
        return self.entries[: self.schmidt_rank]

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)


def make_prob_vec(values: Iterable[float]) -> ProbVec:
    """Validate, clamp and sort ``values`` into a :class:`ProbVec`.

    Entries in ``[-1e-12, 0)`` are clamped to zero. The vector is rescaled by
    its (compensated) sum so that downstream tensor powers stay normalized;
    the rescaling is at most a relative 1e-9 change.

    Raises:
        ProbVecError: empty input, a non-finite or clearly negative entry,
            or a sum further than 1e-9 from one.
    """
    vals = [float(v) for v in values]
    if not vals:
        raise ProbVecError("probability vector must be non-empty")
    for v in vals:
        if not math.isfinite(v):
            raise ProbVecError(f"non-finite entry {v!r}")
        if v < -NEG_CLAMP:
            raise ProbVecError(f"negative entry {v!r}")
    vals = [max(v, 0.0) for v in vals]
    total = math.fsum(vals)
    if abs(total - 1.0) > SUM_TOL:
        raise ProbVecError(f"entries sum to {total!r}, not 1")
    if total != 1.0:
        vals = [v / total for v in vals]
    vals.sort(reverse=True)
    return ProbVec(tuple(vals))


def _padded(p: ProbVec, length: int) -> list[float]:
    return list(p.entries) + [0.0] * (length - p.dim)


def ky_fan(p: ProbVec, k: int) -> float:
    """Sum of the ``k`` largest entries of ``p``."""
    if k < 0 or k > p.dim:
        raise ProbVecError(f"k={k} outside [0, {p.dim}]")
    return math.fsum(p.entries[:k])


def _ky_fan_profile(p: ProbVec, length: int) -> list[float]:
    """Ky-Fan norms for k = 0..length of the zero-padded vector."""
    padded = _padded(p, length)
    return [math.fsum(padded[:k]) for k in range(length + 1)]


def majorizes(p: ProbVec, q: ProbVec) -> bool:
    """True when ``p`` majorizes ``q`` (shorter vector zero-padded)."""
    length = max(p.dim, q.dim)
    kp = _ky_fan_profile(p, length)
    kq = _ky_fan_profile(q, length)
    return all(a >= b - CMP_TOL for a, b in zip(kp, kq))


def t_star_with_argmax(p: ProbVec, q: ProbVec) -> tuple[float, int]:
    """Star conversion distance from ``p`` to ``q`` and the maximizing ``k``.

    The maximum runs over ``k = 1..schmidt_rank(p)``. The returned ``k`` is the
    smallest maximizer; it is reported even when the distance clamps to 0.
    """
    length = max(p.dim, q.dim)
    kp = _ky_fan_profile(p, length)
    kq = _ky_fan_profile(q, length)
    best, best_k = -math.inf, 1
    for k in range(1, p.schmidt_rank + 1):
        gap = kp[k] - kq[k]
        if gap > best:
            best, best_k = gap, k
    return min(max(best, 0.0), 1.0), best_k


def t_star(p: ProbVec, q: ProbVec) -> float:
    """Star conversion distance ``max_k (||p||_(k) - ||q||_(k))``, clamped to [0, 1]."""
    return t_star_with_argmax(p, q)[0]


def e_k(p: ProbVec, k: int) -> float:
    """Pure-state monotone ``1 - ||p||_(k)`` for ``1 <= k <= dim``."""
    if k < 1 or k > p.dim:
        raise ProbVecError(f"k={k} outside [1, {p.dim}]")
    # tail sum keeps small values accurate
    return math.fsum(p.entries[k:])


def p2_cost_pure(p: ProbVec, m: int) -> float:
    """Squared purified conversion distance from Phi_m to the pure state ``p``."""
    if m < 1:
        raise ProbVecError("m must be >= 1")
    return e_k(p, min(m, p.dim))


def uniform(m: int) -> ProbVec:
    """Schmidt vector of the maximally entangled state of dimension ``m``."""
    if m < 1:
        raise ProbVecError("m must be >= 1")
    return ProbVec((1.0 / m,) * m)


def as_prob_vec(p: ProbVec | Sequence[float]) -> ProbVec:
    return p if isinstance(p, ProbVec) else make_prob_vec(p)
