"""Entropies, the Gaussian CDF and second-order estimates, all in bits."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from statistics import NormalDist

from .probvec import ProbVec, as_prob_vec

_STD_NORMAL = NormalDist()


class DegenerateVarianceWarning(UserWarning):
    """The entropy variance vanishes, so the square-root correction is absent."""


@dataclass(frozen=True)
class AsymptoticEstimate:
    """``n H +/- z sqrt(n V)`` with its ingredients.

    Attributes:
        entropy_H: Shannon entropy of the Schmidt spectrum (bits).
        variance_V: entropy variance (bits squared).
        z: ``Phi^{-1}(eps)``.
        estimate: the second-order approximation (bits).
        degenerate: True when ``V == 0``.
    """

    entropy_H: float
    variance_V: float
    z: float
    estimate: float
    degenerate: bool = False


def shannon_entropy(p: ProbVec) -> float:
    """``-sum p_i log2 p_i`` with ``0 log 0 = 0``."""
    p = as_prob_vec(p)
    return max(math.fsum(-x * math.log2(x) for x in p.support), 0.0)


def entropy_variance(p: ProbVec) -> float:
    """Variance of the surprisal ``-log2 p_i`` under ``p``."""
    p = as_prob_vec(p)
    sup = p.support
    if len(set(sup)) <= 1:
        return 0.0
    h = shannon_entropy(p)
    return math.fsum(x * (-math.log2(x) - h) ** 2 for x in sup)


def std_normal_cdf(x: float) -> float:
    return _STD_NORMAL.cdf(x)


def std_normal_cdf_inv(a: float) -> float:
    """Quantile of the standard normal for ``a`` in the open interval (0, 1)."""
    if not 0.0 < a < 1.0:
        raise ValueError("quantile level must lie strictly between 0 and 1")
    if a > 0.5:
        # evaluate on the lower half so that the result is exactly odd
        return -_STD_NORMAL.inv_cdf(1.0 - a)
    return _STD_NORMAL.inv_cdf(a)


def _second_order(p: ProbVec, n: int, eps: float, sign: int) -> AsymptoticEstimate:
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise ValueError("n must be a positive integer")
    if not 0.0 < eps < 1.0:
        raise ValueError("eps must lie in (0, 1)")
    h = shannon_entropy(p)
    v = entropy_variance(p)
    z = std_normal_cdf_inv(eps)
    if v == 0.0:
        warnings.warn("entropy variance is zero; estimate reduces to n*H",
                      DegenerateVarianceWarning, stacklevel=3)
        return AsymptoticEstimate(h, v, z, n * h, degenerate=True)
    return AsymptoticEstimate(h, v, z, n * h + sign * z * math.sqrt(n * v))


def second_order_cost(p: ProbVec, n: int, eps: float) -> AsymptoticEstimate:
    """``n H(p) - Phi^{-1}(eps) sqrt(n V(p))``."""
    return _second_order(p, n, eps, -1)


def second_order_distill(p: ProbVec, n: int, eps: float) -> AsymptoticEstimate:
    """``n H(p) + Phi^{-1}(eps) sqrt(n V(p))``."""
    return _second_order(p, n, eps, +1)


def binary_entropy(x: float) -> float:
    if not 0.0 <= x <= 1.0:
        raise ValueError("argument must lie in [0, 1]")
    if x == 0.0 or x == 1.0:
        return 0.0
    return -x * math.log2(x) - (1.0 - x) * math.log2(1.0 - x)


def one_way_distill_bound(E: float, eps: float) -> float:
    """``E/(1-2eps) + (1+eps)/(1-2eps) * h(eps/(1+eps))``.

    Args:
        E: one-way distillable entanglement in bits, non-negative.
        eps: error, strictly between 0 and 1/2.
    """
    if not (math.isfinite(E) and E >= 0.0):
        raise ValueError("E must be a finite non-negative number")
    if not 0.0 < eps < 0.5:
        raise ValueError("eps must lie in (0, 0.5)")
    scale = 1.0 - 2.0 * eps
    return E / scale + (1.0 + eps) / scale * binary_entropy(eps / (1.0 + eps))


def coherent_information_from_spectra(spec_AB: ProbVec, spec_B: ProbVec) -> float:
    """``H(B) - H(AB)`` from the two spectra."""
    return shannon_entropy(spec_B) - shannon_entropy(spec_AB)
