"""Single-shot distillable entanglement and entanglement cost of pure states.

Results are expressed through the dimension ``m`` of the maximally entangled
state, with ``log2_m`` in ebits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .probvec import ProbVec, as_prob_vec
from .tensorpower import (
    REL_TOL,
    TensorPowerSpectrum,
    _check_strategy,
    _first_block,
    boundary_search,
    floor_ratio,
    floor_tol,
    tp_ky_fan,
    tp_threshold,
)


@dataclass(frozen=True)
class EntResult:
    m: int
    log2_m: float
    info: dict = field(default_factory=dict, compare=False)

    @classmethod
    def from_m(cls, m: int, **info) -> "EntResult":
        if m < 1:
            raise ValueError("m must be >= 1")
        return cls(m, math.log2(m), info)


@dataclass(frozen=True)
class CqEnsemble:
    """Weighted spectra ``{(p_x, rho_x^A)}`` of a classical-quantum state."""

    members: tuple[tuple[float, ProbVec], ...]

    def __post_init__(self):
        if not self.members:
            raise ValueError("ensemble needs at least one member")
        for w, _ in self.members:
            if not 0.0 <= w <= 1.0:
                raise ValueError(f"weight {w} outside [0, 1]")
        total = math.fsum(w for w, _ in self.members)
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"weights sum to {total}, not 1")

    @classmethod
    def of(cls, members: Sequence[tuple[float, Sequence[float] | ProbVec]]) -> "CqEnsemble":
        return cls(tuple((float(w), as_prob_vec(s)) for w, s in members))

    @property
    def max_dim(self) -> int:
        return max(s.dim for _, s in self.members)


def _check_eps(eps: float) -> None:
    if not 0.0 <= eps < 1.0:
        raise ValueError("eps must lie in [0, 1)")


# ---------------------------------------------------------------------------
# distillation


def _g_block(spec: TensorPowerSpectrum, j: int, eps: float) -> float:
    # g(k) = ||p||_(k) - k p_{k+1} - eps is constant while index k+1 stays in block j
    return float(spec.cum_mass[j - 1]) - spec.scaled_value(j, spec.cum_count(j - 1)) - eps


def _g_estimate(spec: TensorPowerSpectrum, eps: float) -> np.ndarray:
    """Float estimate of g on every block (index 0 unused), used only as a search hint."""
    log_prev = np.concatenate(([-np.inf], spec.log_cum_counts[:-1]))
    with np.errstate(over="ignore"):
        est = spec.cum_mass[:-1] - np.exp(spec.log_values + log_prev) - eps
    return np.concatenate(([-np.inf], est))


def distill_minimizer(spec: TensorPowerSpectrum, eps: float, strategy: str = "bisect"
                      ) -> tuple[int, int]:
    """Return ``(ell, k_min)`` where ``k_min`` minimizes ``k / (||p^n||_(k) - eps)`` over
    ``k in [ell, d^n]``.

    ``g(k) = ||p^n||_(k) - k p_{k+1} - eps`` is non-decreasing, so ``f`` falls
    while ``g < 0`` and rises after. Because ``g`` only changes where index
    ``k+1`` enters a new block, the sign change is located over block indices;
    the minimizer is then ``ell``, ``d^n``, or the first ``k`` of the block
    where ``g`` turns non-negative. That is the same ``k`` an index-wise
    bisection would return.
    """
    _check_eps(eps)
    _check_strategy(strategy)
    total = spec.total_count
    r = spec.num_blocks
    ell = tp_threshold(spec, eps, strict=True, strategy=strategy)
    if ell >= total:
        return ell, total

    j_ell = spec.locate_index(ell + 1, strategy)
    if _g_block(spec, j_ell, eps) >= 0.0:
        return ell, ell
    if _g_block(spec, r, eps) <= 0.0:
        return ell, total

    def pred(j: int) -> bool:
        return _g_block(spec, j, eps) >= 0.0

    if strategy == "scan":
        j = next(j for j in range(j_ell + 1, r + 1) if pred(j))
    else:
        est = _g_estimate(spec, eps)
        guess = j_ell + 1 + int(np.argmax(est[j_ell + 1:] >= 0.0))
        j = boundary_search(j_ell + 1, r, pred, guess)
    return ell, spec.cum_count(j - 1)


def distill_eps(spec: TensorPowerSpectrum, eps: float, strategy: str = "bisect") -> EntResult:
    """Largest ``m`` with ``T_star(psi^n -> Phi_m) <= eps``.

    ``m = floor(min_k k / (||p^n||_(k) - eps))``; the floor is exact rational
    arithmetic on the float denominator, nudged upward within a relative 1e-12
    of an integer.
    """
    ell, k = distill_minimizer(spec, eps, strategy)
    ky = 1.0 if k >= spec.total_count else tp_ky_fan(spec, k, strategy)
    m = floor_tol(k, ky - eps)
    return EntResult.from_m(m, ell=ell, k_min=k)


# ---------------------------------------------------------------------------
# cost


def cost_eps(spec: TensorPowerSpectrum, eps: float, strategy: str = "bisect") -> EntResult:
    """Smallest ``m`` with ``||p^n||_(m) >= 1 - eps``.

    Evaluated on tail masses: block ``j`` is the first whose remaining mass is
    at most ``eps`` and ``m = N_j - floor((eps - Q_j) / s_j)``. Working from the
    tail keeps ``eps = 0`` exact (``m = sr(p)^n``) and small ``eps`` accurate.
    """
    _check_eps(eps)
    _check_strategy(strategy)
    r = spec.num_blocks
    if eps == 0.0:
        j = r
    else:
        level = eps * (1.0 + REL_TOL)
        Q = spec.tail_mass
        # tail_mass is non-increasing; find first j with Q_j <= level
        neg = -Q
        j = _first_block(neg, lambda x: x >= -level, strategy)
    top = spec.cum_count(j)
    width = top - spec.cum_count(j - 1)
    slack = (eps * (1.0 + REL_TOL) - float(spec.tail_mass[j])) if eps > 0.0 else 0.0
    back = floor_ratio(slack, float(spec.log_values[j - 1]), float(spec.values[j - 1]))
    back = min(max(back, 0), width - 1)
    return EntResult.from_m(top - back, block=j)


# ---------------------------------------------------------------------------
# smoothed max-entropies


def _tail_profile(p: ProbVec, length: int) -> list[float]:
    """``1 - ||p||_(m)`` for m = 0..length, summed from the small end.

    Entries below the Schmidt-rank threshold count as zero.
    """
    padded = list(p.support) + [0.0] * (length - p.schmidt_rank)
    out = [0.0] * (length + 1)
    acc = []
    for m in range(length, -1, -1):
        out[m] = math.fsum(acc)
        if m > 0:
            acc.append(padded[m - 1])
    out[0] = 1.0
    return out


def smoothed_hmax_dim(p: ProbVec, eps: float) -> int:
    """Smallest ``m`` with ``||p||_(m) >= 1 - eps``."""
    _check_eps(eps)
    p = as_prob_vec(p)
    tails = _tail_profile(p, p.dim)
    level = eps * (1.0 + REL_TOL)
    for m in range(1, p.dim + 1):
        if tails[m] <= level:
            return m
    return p.dim


def smoothed_hmax(p: ProbVec, eps: float) -> float:
    """Smoothed max-entropy of the reduced state, in bits."""
    return math.log2(smoothed_hmax_dim(p, eps))


def hmax_cond_cq_dim(ens: CqEnsemble, eps: float) -> int:
    _check_eps(eps)
    length = ens.max_dim
    profiles = [(w, _tail_profile(s, length)) for w, s in ens.members]
    level = eps * (1.0 + REL_TOL)
    for m in range(1, length + 1):
        if math.fsum(w * t[m] for w, t in profiles) <= level:
            return m
    return length


def hmax_cond_cq(ens: CqEnsemble, eps: float) -> float:
    """``log2 min{m : sum_x w_x ||rho_x||_(m) >= 1 - eps}``."""
    return math.log2(hmax_cond_cq_dim(ens, eps))


def cost_upper_from_decomposition(ens: CqEnsemble, eps: float) -> float:
    """Upper bound on the mixed-state cost from one pure-state decomposition.

    The cost is an infimum over all classical extensions; the supplied
    decomposition is one feasible point, so this only bounds it from above.
    """
    return hmax_cond_cq(ens, eps)


class PruningMismatch(AssertionError):
    pass


def pruning_residual(ens: CqEnsemble, m: int, tol: float = 1e-12) -> float:
    """Trace distance between the cq-state and its m-pruned version.

    Computed as ``1 - sum_x w_x ||rho_x||_(m)`` and cross-checked against the
    half l1 distance of the explicitly pruned distributions.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    closed = 1.0 - math.fsum(w * math.fsum(s.entries[:m]) for w, s in ens.members)

    diffs = []
    for w, s in ens.members:
        head = s.entries[:m]
        kept = math.fsum(head)
        for x in head:
            diffs.append(abs(w * x / kept - w * x))
        for x in s.entries[m:]:
            diffs.append(w * x)
    direct = 0.5 * math.fsum(diffs)
    if abs(direct - closed) > tol:
        raise PruningMismatch(f"pruning identity violated: {closed!r} vs {direct!r}")
    return closed
