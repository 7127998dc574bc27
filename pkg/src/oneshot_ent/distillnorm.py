"""Fidelity of distillation for ``psi^{(x)n}`` via the distillation norm.

``F(psi^n, m) = (1/m) * (||sqrt(p)^n||_(m-k*) + sqrt(k* (1 - ||p^n||_(m-k*))))^2``
where ``k*`` minimizes ``(1 - ||p^n||_(m-k)) / k`` over ``1 <= k <= m``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .probvec import ProbVec, as_prob_vec
from .tensorpower import TensorPowerSpectrum, boundary_search, build_spectrum, int_log

TIE_TOL = 1e-12
ACCEPT_TOL = 1e-12


class MonotonicityError(AssertionError):
    """F(psi^n, m) increased along the search path."""


@dataclass(frozen=True)
class DistillFidelity:
    m: int
    k_star: int
    fidelity: float


def _t_parts(spec: TensorPowerSpectrum, j: int, m: int) -> tuple[float, float]:
    # with index m-k in block j: t = k p_{m-k} - tail(m-k) = s_j (m - N_j) - Q_j
    diff = m - spec.cum_count(j)
    lead = spec.scaled_value(j, abs(diff))
    return (lead if diff >= 0 else -lead), float(spec.tail_mass[j])


def _t_negative(spec: TensorPowerSpectrum, j: int, m: int) -> bool:
    """``t < 0`` beyond a relative tie band of ``TIE_TOL`` on its two terms."""
    lead, rest = _t_parts(spec, j, m)
    return lead - rest < -TIE_TOL * max(abs(lead), rest)


def _t_estimate(spec: TensorPowerSpectrum, m: int) -> np.ndarray:
    """Float estimate of t on every block (index 0 unused), a search hint only."""
    log_m = int_log(m)
    lc = spec.log_cum_counts
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        hi = np.maximum(lc, log_m)
        lo = np.minimum(lc, log_m)
        log_gap = hi + np.log1p(-np.exp(lo - hi))
        lead = np.sign(log_m - lc) * np.exp(spec.log_values + log_gap)
        est = lead - spec.tail_mass[1:]
    return np.concatenate(([np.inf], est))


def k_star(spec: TensorPowerSpectrum, m: int, strategy: str = "bisect") -> int:
    """Smallest minimizer of ``h(k) = (1 - ||p^n||_(m-k)) / k`` on ``[1, m]``.

    ``h(k+1) - h(k) = t(k) / (k (k+1))`` with
    ``t(k) = ||p^n||_(m-k) + k p_{m-k} - 1`` non-decreasing in ``k``, so the
    minimizer is the first ``k`` with ``t(k) >= 0`` (1 if ``t(1) >= 0``, ``m`` if
    ``t(m-1) < 0``). ``t`` is constant while index ``m-k`` stays inside one
    block, which lets the sign change be located over blocks. It is evaluated
    from tail masses so tiny tails keep their precision; values of ``t``
    within a relative 1e-12 of zero are ties and resolve toward the smaller
    ``k``.
    """
    if m < 2:
        raise ValueError("m must be >= 2")
    total = spec.total_count
    if m - 1 > total:
        # index m-1 lies past the support: p_{m-1} = 0 and the norm is 1, so t(1) = 0
        return 1
    j_top = spec.locate_index(m - 1, strategy)
    if not _t_negative(spec, j_top, m):
        return 1
    if _t_negative(spec, 1, m):
        return m

    # t falls with the block index; find the first block where it is negative
    def neg(j: int) -> bool:
        return _t_negative(spec, j, m)

    if strategy == "scan":
        j_neg = next(j for j in range(2, j_top + 1) if neg(j))
    else:
        est = _t_estimate(spec, m)
        guess = 2 + int(np.argmax(est[2:j_top + 1] < 0.0))
        j_neg = boundary_search(2, j_top, neg, guess)
    # last block with t >= 0 is j_neg - 1; its largest index gives the smallest k
    return m - spec.cum_count(j_neg - 1)


def fidelity_of_distillation(spec: TensorPowerSpectrum, m: int,
                             strategy: str = "bisect") -> DistillFidelity:
    """Maximal overlap of an LOCC image of ``psi^n`` with ``Phi_m``."""
    ks = k_star(spec, m, strategy)
    i = m - ks
    log_a = spec.sqrt_ky_fan_log(i, strategy)
    rest = spec.tail_at(i, strategy)
    log_b = 0.5 * (int_log(ks) + math.log(rest)) if rest > 0.0 else -math.inf
    log_norm = float(np.logaddexp(log_a, log_b))
    fid = math.exp(2.0 * log_norm - int_log(m))
    return DistillFidelity(m, ks, min(max(fid, 0.0), 1.0))


def regula_search_cap(spec: TensorPowerSpectrum, eps: float) -> int:
    """``floor(sr^n / (1 - eps)^2)``: beyond it F stays below ``1 - eps``."""
    one_minus = 1 - Fraction(eps)
    return max(2, math.floor(Fraction(spec.total_count) / one_minus**2))


def regula_dim(spec: TensorPowerSpectrum, eps: float, strategy: str = "bisect",
               check_monotone: bool = False) -> tuple[int, int | None]:
    """Largest ``m >= 2`` with ``F(psi^n, m) >= 1 - eps`` and its ``k*``; ``(1, None)`` if none.

    Binary search relies on F being non-increasing in m. With
    ``check_monotone`` every probe is compared against the bracket ends and a
    :class:`MonotonicityError` is raised on an increase.
    """
    if not 0.0 <= eps < 1.0:
        raise ValueError("eps must lie in [0, 1)")
    target = 1.0 - eps - ACCEPT_TOL

    def fid(m: int) -> DistillFidelity:
        return fidelity_of_distillation(spec, m, strategy)

    f2 = fid(2)
    if f2.fidelity < target:
        return 1, None
    cap = regula_search_cap(spec, eps)
    fcap = fid(cap)
    if fcap.fidelity >= target:
        return cap, fcap.k_star

    a, b = 2, cap
    fa, fb = f2, fcap
    while b > a + 1:
        c = (a + b) // 2
        fc = fid(c)
        if check_monotone and not (fb.fidelity - 1e-12 <= fc.fidelity <= fa.fidelity + 1e-12):
            raise MonotonicityError(
                f"F not monotone: F({a})={fa.fidelity}, F({c})={fc.fidelity}, F({b})={fb.fidelity}")
        if fc.fidelity < target:
            b, fb = c, fc
        else:
            a, fa = c, fc
    return a, fa.k_star


def e_d_regula(p: ProbVec, n: int, eps: float, strategy: str = "bisect",
               check_monotone: bool = False) -> float:
    """``log2 max{m >= 2 : F(psi^n, m) >= 1 - eps}``, or 0 when even m = 2 fails."""
    spec = build_spectrum(as_prob_vec(p), n)
    m, _ = regula_dim(spec, eps, strategy, check_monotone)
    return math.log2(m)
