"""Run the randomized oracle-equivalence harness over several seeds.

    python scripts/verify_oracles.py --seeds 0-4 --cases 200
"""

import argparse
import sys
import time
from dataclasses import dataclass

from oneshot_ent.oracle import FAULTS, run_verification


@dataclass
class VerifyConfig:
    seeds: tuple[int, ...] = (0,)
    cases: int = 200
    controls: bool = True  # also confirm every injected fault is caught


def _seeds(text: str) -> tuple[int, ...]:
    if "-" in text:
        lo, hi = (int(x) for x in text.split("-"))
        return tuple(range(lo, hi + 1))
    return tuple(int(x) for x in text.split(","))


def run(cfg: VerifyConfig) -> bool:
    ok = True
    for seed in cfg.seeds:
        t0 = time.perf_counter()
        rep = run_verification(seed, cfg.cases)
        status = "ok" if rep.ok else f"FAILED {rep.failures[:3]}"
        print(f"seed {seed}: {rep.cases} cases, {rep.checks} checks, {status} "
              f"({time.perf_counter() - t0:.1f}s)")
        ok &= rep.ok
    if cfg.controls:
        for fault in FAULTS:
            caught = not run_verification(cfg.seeds[0], 10, fault=fault).ok
            print(f"negative control {fault}: {'caught' if caught else 'MISSED'}")
            ok &= caught
    return ok


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seeds", default="0")
    ap.add_argument("--cases", type=int, default=200)
    ap.add_argument("--no-controls", action="store_true")
    args = ap.parse_args()
    cfg = VerifyConfig(_seeds(args.seeds), args.cases, not args.no_controls)
    sys.exit(0 if run(cfg) else 1)


if __name__ == "__main__":
    main()
