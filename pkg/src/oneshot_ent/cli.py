"""Command-line front end.

Exit codes: 0 ok, 1 verification failure, 2 bad input, 3 resource guard,
4 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import asymptotics, distillnorm, oracle, probvec, singleshot, tensorpower

EXIT_OK, EXIT_VERIFY, EXIT_INPUT, EXIT_GUARD, EXIT_IO = 0, 1, 2, 3, 4

SWEEP_HEADER = ("n", "exact_distill", "exact_cost", "est_distill", "est_cost",
                "res_distill", "res_cost")


MAX_DECIMAL_BITS = 3_300_000  # about a million decimal digits


class InputError(ValueError):
    pass


def _dec(m: int) -> str:
    """Decimal string of a big integer, refusing sizes that would take minutes."""
    if m.bit_length() > MAX_DECIMAL_BITS:
        raise tensorpower.ResourceGuardError(
            f"m has {m.bit_length()} bits; too large to render in decimal")
    return str(m)


@dataclass(frozen=True)
class StateInput:
    schmidt: tuple[float, ...]
    copies: int = 1

    def prob_vec(self) -> probvec.ProbVec:
        return probvec.make_prob_vec(self.schmidt)


@dataclass(frozen=True)
class SweepRow:
    n: int
    exact_distill_log2m: float
    exact_cost_log2m: float
    est_distill: float
    est_cost: float
    residual_distill_per_sqrt_n: float
    residual_cost_per_sqrt_n: float

    def as_csv(self) -> list[str]:
        return [str(self.n)] + [repr(float(x)) for x in (
            self.exact_distill_log2m, self.exact_cost_log2m, self.est_distill,
            self.est_cost, self.residual_distill_per_sqrt_n, self.residual_cost_per_sqrt_n)]


# ---------------------------------------------------------------------------
# input handling


def _parse_floats(text: str) -> tuple[float, ...]:
    try:
        vals = tuple(float(x) for x in text.replace(" ", "").split(",") if x)
    except ValueError as exc:
        raise InputError(f"cannot parse {text!r} as comma-separated numbers") from exc
    if not vals:
        raise InputError("empty coefficient list")
    return vals


def _load_json(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError:
        raise
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON ({exc})") from exc
    if not isinstance(data, dict):
        raise InputError(f"{path}: expected a JSON object")
    return data


def _file_data(args) -> dict:
    path = getattr(args, "input", None)
    return _load_json(path) if path else {}


def _state(args, data: dict) -> StateInput:
    if getattr(args, "schmidt", None) is not None:
        schmidt = _parse_floats(args.schmidt)
    elif "schmidt" in data:
        try:
            schmidt = tuple(float(x) for x in data["schmidt"])
        except (TypeError, ValueError) as exc:
            raise InputError("'schmidt' must be a list of numbers") from exc
    else:
        raise InputError("no state given: use --schmidt a,b,... or --input FILE")
    copies = getattr(args, "copies", None)
    if copies is None:
        copies = data.get("copies", 1)
    if isinstance(copies, bool) or not isinstance(copies, int) or copies < 1:
        raise InputError("copies must be a positive integer")
    return StateInput(schmidt, copies)


def _number(args, data: dict, name: str, default=None):
    val = getattr(args, name, None)
    if val is None:
        val = data.get(name, default)
    if val is None:
        raise InputError(f"--{name} is required")
    return val


def _eps(args, data: dict, lo_open: bool = False, hi: float = 1.0) -> float:
    try:
        eps = float(_number(args, data, "eps"))
    except (TypeError, ValueError) as exc:
        raise InputError("eps must be a number") from exc
    if not (0.0 < eps if lo_open else 0.0 <= eps) or not eps < hi:
        raise InputError(f"eps={eps} out of range")
    return eps


def _ensemble(data: dict) -> singleshot.CqEnsemble:
    try:
        members = [(m["weight"], m["spectrum"]) for m in data["members"]]
    except (KeyError, TypeError) as exc:
        raise InputError("ensemble input needs {'members': [{'weight': w, 'spectrum': [...]}]}") from exc
    return singleshot.CqEnsemble.of(members)


# ---------------------------------------------------------------------------
# commands; each returns a JSON-ready dict


def _state_fields(state: StateInput) -> dict:
    return {"schmidt": list(state.schmidt), "copies": state.copies}


BOUNDARY_TOL = 1e-12


def _boundary_flag(spec, masses, level: float, tie: bool, m: int) -> bool:
    """Whether the answer sits on a tolerance-dependent boundary.

    True when ``level`` is within ``BOUNDARY_TOL`` of a block boundary in
    ``masses``, or when a tie was detected inside a block whose entries are
    larger than the tolerance band (below that every index ties).
    """
    if bool(np.any(np.abs(masses - level) <= BOUNDARY_TOL)):
        return True
    if not tie or m > spec.total_count:
        return False
    j = spec.locate_index(max(m, 1))
    return float(spec.values[j - 1]) > 2.0 * BOUNDARY_TOL


def cmd_distill(args) -> dict:
    data = _file_data(args)
    state = _state(args, data)
    eps = _eps(args, data)
    spec = tensorpower.build_spectrum(state.prob_vec(), state.copies)
    res = singleshot.distill_eps(spec, eps, args.strategy)
    strict = tensorpower.tp_threshold(spec, eps, strict=True, strategy=args.strategy)
    loose = tensorpower.tp_threshold(spec, eps, strict=False, strategy=args.strategy)
    flag = eps > 0.0 and _boundary_flag(spec, spec.cum_mass, eps, strict != loose, strict)
    return {"command": "distill", "m": _dec(res.m), "log2_m": res.log2_m, "eps": eps,
            "n": state.copies, "boundary_flag": bool(flag),
            "ell": _dec(res.info["ell"]), "ell_non_strict": _dec(loose),
            "k_min": _dec(res.info["k_min"]), **_state_fields(state)}


def cmd_cost(args) -> dict:
    data = _file_data(args)
    state = _state(args, data)
    eps = _eps(args, data)
    spec = tensorpower.build_spectrum(state.prob_vec(), state.copies)
    res = singleshot.cost_eps(spec, eps, args.strategy)
    m = res.m
    # a tie means the Ky-Fan norm at m meets 1 - eps exactly
    tie = abs(tensorpower.tp_ky_fan(spec, m, args.strategy) - (1.0 - eps)) <= BOUNDARY_TOL
    boundary = eps > 0.0 and _boundary_flag(spec, spec.tail_mass, eps, tie, m)
    return {"command": "cost", "m": _dec(m), "log2_m": res.log2_m, "eps": eps,
            "n": state.copies, "boundary_flag": bool(boundary),
            "block": res.info["block"], **_state_fields(state)}


def cmd_tstar(args) -> dict:
    data = _file_data(args)
    state = _state(args, data)
    target = getattr(args, "target", None)
    if target is None:
        target = data.get("target")
        if target is None:
            raise InputError("--target is required")
        target = ",".join(str(x) for x in target)
    p = state.prob_vec()
    q = probvec.make_prob_vec(_parse_floats(target))
    dist, k = probvec.t_star_with_argmax(p, q)
    return {"command": "tstar", "t_star": dist, "k": k,
            "source": list(state.schmidt), "target": list(q.entries)}


def cmd_fidelity(args) -> dict:
    data = _file_data(args)
    state = _state(args, data)
    try:
        m = int(_number(args, data, "m"))
    except (TypeError, ValueError) as exc:
        raise InputError("m must be an integer") from exc
    if m < 2:
        raise InputError("m must be >= 2")
    spec = tensorpower.build_spectrum(state.prob_vec(), state.copies)
    res = distillnorm.fidelity_of_distillation(spec, m, args.strategy)
    return {"command": "fidelity", "m": _dec(m), "fidelity": res.fidelity,
            "k_star": _dec(res.k_star), "n": state.copies, **_state_fields(state)}


def cmd_regula(args) -> dict:
    data = _file_data(args)
    state = _state(args, data)
    eps = _eps(args, data)
    spec = tensorpower.build_spectrum(state.prob_vec(), state.copies)
    m, ks = distillnorm.regula_dim(spec, eps, args.strategy)
    return {"command": "regula", "m": _dec(m), "log2_m": math.log2(m), "eps": eps,
            "k_star": None if ks is None else _dec(ks), "n": state.copies,
            **_state_fields(state)}


def cmd_hmax_cq(args) -> dict:
    data = _file_data(args)
    if "members" not in data:
        raise InputError("hmax-cq needs --input FILE with a 'members' list")
    ens = _ensemble(data)
    eps = _eps(args, data)
    m = singleshot.hmax_cond_cq_dim(ens, eps)
    return {"command": "hmax-cq", "m": _dec(m), "hmax": math.log2(m), "eps": eps,
            "cost_upper_bound": singleshot.cost_upper_from_decomposition(ens, eps),
            "members": data["members"]}


def cmd_asymptotics(args) -> dict:
    data = _file_data(args)
    state = _state(args, data)
    eps = _eps(args, data, lo_open=True)
    p = state.prob_vec()
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", asymptotics.DegenerateVarianceWarning)
        cost = asymptotics.second_order_cost(p, state.copies, eps)
        dist = asymptotics.second_order_distill(p, state.copies, eps)
    return {"command": "asymptotics", "H": cost.entropy_H, "V": cost.variance_V, "z": cost.z,
            "est_cost": cost.estimate, "est_distill": dist.estimate,
            "degenerate": cost.degenerate, "eps": eps, "n": state.copies,
            **_state_fields(state)}


def _sweep_ns(args) -> list[int]:
    lo, hi = args.n_min, args.n_max
    if lo is None or hi is None:
        raise InputError("--n-min and --n-max are required")
    if lo < 1 or lo > hi:
        raise InputError("need 1 <= n_min <= n_max")
    if args.geom is not None:
        if args.geom <= 1.0:
            raise InputError("--geom must exceed 1")
        ns, x = [], float(lo)
        while round(x) <= hi:
            if not ns or round(x) != ns[-1]:
                ns.append(int(round(x)))
            x *= args.geom
        return ns
    step = args.n_step if args.n_step is not None else 1
    if step < 1:
        raise InputError("--n-step must be positive")
    return list(range(lo, hi + 1, step))


def sweep_row(p: probvec.ProbVec, n: int, eps: float, strategy: str = "bisect") -> SweepRow:
    spec = tensorpower.build_spectrum(p, n)
    d = singleshot.distill_eps(spec, eps, strategy).log2_m
    c = singleshot.cost_eps(spec, eps, strategy).log2_m
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", asymptotics.DegenerateVarianceWarning)
        ed = asymptotics.second_order_distill(p, n, eps).estimate
        ec = asymptotics.second_order_cost(p, n, eps).estimate
    root = math.sqrt(n)
    return SweepRow(n, d, c, ed, ec, abs(d - ed) / root, abs(c - ec) / root)


def sweep_csv(rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SWEEP_HEADER)
    for row in rows:
        writer.writerow(row.as_csv())
    return buf.getvalue()


def cmd_sweep(args) -> dict:
    data = _file_data(args)
    state = _state(args, data)
    eps = _eps(args, data, lo_open=True)
    ns = _sweep_ns(args)
    p = state.prob_vec()
    rows = [sweep_row(p, n, eps, args.strategy) for n in ns]
    text = sweep_csv(rows)
    out = getattr(args, "out", None)
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    return {"command": "sweep", "rows": len(rows), "out": out, "csv": None if out else text}


def cmd_verify(args) -> dict:
    if args.cases < 0:
        raise InputError("--cases must be >= 0")
    rep = oracle.run_verification(args.seed, args.cases, fault=args.inject_fault)
    return {"command": "verify", "ok": rep.ok, "cases": rep.cases, "checks": rep.checks,
            "failures": [list(map(str, f)) for f in rep.failures[:20]],
            "seed": args.seed}


COMMANDS = {
    "distill": cmd_distill,
    "cost": cmd_cost,
    "tstar": cmd_tstar,
    "fidelity": cmd_fidelity,
    "regula": cmd_regula,
    "hmax-cq": cmd_hmax_cq,
    "asymptotics": cmd_asymptotics,
    "sweep": cmd_sweep,
    "verify": cmd_verify,
}


# ---------------------------------------------------------------------------
# argument parsing


def _add_common(parser: argparse.ArgumentParser, suppress: bool) -> None:
    # the same flags are accepted before and after the subcommand; the
    # subparser copies use SUPPRESS so they do not clobber earlier values
    def d(value):
        return argparse.SUPPRESS if suppress else value

    parser.add_argument("--schmidt", default=d(None), help="comma-separated Schmidt coefficients")
    parser.add_argument("--copies", type=int, default=d(None), help="number of copies n")
    parser.add_argument("--eps", type=float, default=d(None), help="error tolerance")
    parser.add_argument("--m", type=int, default=d(None), help="target dimension (fidelity)")
    parser.add_argument("--target", default=d(None), help="target coefficients (tstar)")
    parser.add_argument("--input", default=d(None), help="JSON input file")
    parser.add_argument("--json", action="store_true", default=d(False), help="emit JSON")
    parser.add_argument("--out", default=d(None), help="write output to this path")
    parser.add_argument("--strategy", choices=tensorpower.STRATEGIES, default=d("bisect"))
    parser.add_argument("--seed", type=int, default=d(0))
    parser.add_argument("--cases", type=int, default=d(200))
    parser.add_argument("--n-min", type=int, default=d(None))
    parser.add_argument("--n-max", type=int, default=d(None))
    parser.add_argument("--n-step", type=int, default=d(None))
    parser.add_argument("--geom", type=float, default=d(None), help="geometric factor for n")
    parser.add_argument("--inject-fault", choices=oracle.FAULTS, default=d(None),
                        help=argparse.SUPPRESS)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="oneshot-ent",
        description="Single-shot entanglement distillation and dilution of pure states.")
    _add_common(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        _add_common(sub.add_parser(name), suppress=True)
    return parser


def _render_text(report: dict) -> str:
    if report.get("command") == "sweep" and report.get("csv") is not None:
        return report["csv"].rstrip("\n")
    skip = {"command", "csv", "schmidt", "members", "source"}
    lines = []
    for key, val in report.items():
        if key in skip or val is None:
            continue
        lines.append(f"{key}: {val}")
    return "\n".join(lines)


def main(argv=None) -> int:
    if hasattr(sys, "set_int_max_str_digits"):
        sys.set_int_max_str_digits(0)
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        report = COMMANDS[args.command](args)
    except (tensorpower.ResourceGuardError, oracle.OracleSizeError, MemoryError) as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except (InputError, probvec.ProbVecError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO

    text = json.dumps(report) if args.json else _render_text(report)
    out = args.out if args.command != "sweep" else None
    try:
        if out:
            Path(out).write_text(text + "\n", encoding="utf-8")
        else:
            print(text)
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    if args.command == "verify" and not report["ok"]:
        return EXIT_VERIFY
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
