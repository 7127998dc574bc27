"""Single-shot entanglement distillation and dilution of pure bipartite states.

Exact tensor-power spectra, closed-form single-shot rates, the fidelity of
distillation, second-order estimates and brute-force oracles.
"""

from .asymptotics import (
    AsymptoticEstimate,
    binary_entropy,
    coherent_information_from_spectra,
    entropy_variance,
    one_way_distill_bound,
    second_order_cost,
    second_order_distill,
    shannon_entropy,
    std_normal_cdf,
    std_normal_cdf_inv,
)
from .distillnorm import DistillFidelity, e_d_regula, fidelity_of_distillation, k_star
from .probvec import (
    ProbVec,
    ProbVecError,
    e_k,
    ky_fan,
    majorizes,
    make_prob_vec,
    p2_cost_pure,
    t_star,
)
from .singleshot import (
    CqEnsemble,
    EntResult,
    cost_eps,
    cost_upper_from_decomposition,
    distill_eps,
    hmax_cond_cq,
    pruning_residual,
    smoothed_hmax,
)
from .tensorpower import (
    ResourceGuardError,
    TensorPowerSpectrum,
    build_spectrum,
    tp_ky_fan,
    tp_threshold,
)

__version__ = "0.1.0"
