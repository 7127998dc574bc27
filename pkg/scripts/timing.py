"""Wall-clock timings of the exact rates on large tensor powers."""

import time

from oneshot_ent.probvec import make_prob_vec
from oneshot_ent.singleshot import cost_eps, distill_eps
from oneshot_ent.tensorpower import build_spectrum

CASES = [
    ((0.9, 0.1), 100_000),
    ((0.6, 0.4), 100_000),
    ((0.5, 0.3, 0.2), 1000),
    ((0.4, 0.3, 0.2, 0.1), 200),
]


def main(eps: float = 0.1):
    for p, n in CASES:
        t0 = time.perf_counter()
        spec = build_spectrum(make_prob_vec(p), n)
        d = distill_eps(spec, eps).log2_m
        c = cost_eps(spec, eps).log2_m
        print(f"p={p} n={n}: {spec.num_blocks} blocks, distill {d:.3f}, cost {c:.3f} bits "
              f"({time.perf_counter() - t0:.2f}s)")


if __name__ == "__main__":
    main()
