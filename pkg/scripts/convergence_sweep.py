"""Exact single-shot rates against their second-order estimates over a range of n.

Writes a CSV with the same columns as ``oneshot-ent sweep``.

    python scripts/convergence_sweep.py --schmidt 0.9,0.1 --eps 0.1 --out sweep.csv
"""

import argparse
import sys
import time
from dataclasses import dataclass

from oneshot_ent.cli import sweep_csv, sweep_row
from oneshot_ent.probvec import make_prob_vec


@dataclass
class SweepConfig:
    schmidt: tuple[float, ...] = (0.9, 0.1)
    eps: float = 0.1
    n_values: tuple[int, ...] = (64, 128, 256, 512, 1024, 2048, 4096)
    strategy: str = "bisect"


def run(cfg: SweepConfig):
    p = make_prob_vec(cfg.schmidt)
    rows = []
    for n in cfg.n_values:
        t0 = time.perf_counter()
        rows.append(sweep_row(p, n, cfg.eps, cfg.strategy))
        r = rows[-1]
        print(f"n={n:6d}  res_distill={r.residual_distill_per_sqrt_n:.4f}  "
              f"res_cost={r.residual_cost_per_sqrt_n:.4f}  ({time.perf_counter() - t0:.2f}s)",
              file=sys.stderr)
    return rows


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--schmidt", default="0.9,0.1")
    ap.add_argument("--eps", type=float, default=0.1)
    ap.add_argument("--n", default=None, help="comma-separated list of n")
    ap.add_argument("--out", default=None)
    args = ap.parse_args()
    cfg = SweepConfig(schmidt=tuple(float(x) for x in args.schmidt.split(",")), eps=args.eps)
    if args.n:
        cfg.n_values = tuple(int(x) for x in args.n.split(","))
    text = sweep_csv(run(cfg))
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


if __name__ == "__main__":
    main()
