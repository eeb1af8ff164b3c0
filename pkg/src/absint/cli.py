"""Command-line entry point: analyze / check / refine-check.

Exit codes: analyze 0 on success; check 0 proved, 1 refuted, 2
budget-exhausted or unknown; refine-check 0 refines, 1 does not; 3 for
usage or input errors on any subcommand.  JSON reports are key-sorted and
byte-reproducible; every report carries schema_version.
"""

from __future__ import annotations

import argparse
import json
import sys

from .cegar import cegar_loop, harvest_predicates
from .cfg import Cfg, lower_to_cfg
from .fixpoint import WideningPolicy, analyze_cfg, check_post_fixpoint
from .intervals import TOP, IntervalEnv, interval
from .mil import MilError, Program, parse_predicate, parse_program
from .normalize import is_constant, normalize_bexpr
from .predabs import PredicateTable
from .signs import SignEnv
from .simulation import RefinementInstance, check_refinement
from .ts import TsFormatError, parse_ts

SCHEMA_VERSION = 1


class UsageError(Exception):
    pass


def _parse_init_ranges(pairs: list[str], cfg: Cfg,
                       default: tuple[int, int]) -> dict[str, tuple[int, int]]:
    out = {v: default for v in cfg.var_order}
    for item in pairs:
        try:
            var, _, rng = item.partition("=")
            lo_s, _, hi_s = rng.partition(":")
            lo, hi = int(lo_s), int(hi_s)
        except ValueError:
            raise UsageError(f"bad --init-range {item!r}; expected VAR=LO:HI")
        if var not in out:
            raise UsageError(f"--init-range names unknown variable {var!r}")
        if lo > hi:
            raise UsageError(f"--init-range {item!r} is empty")
        out[var] = (lo, hi)
    return out


def _load_program(path: str) -> tuple[Program, Cfg]:
    try:
        with open(path, encoding="utf-8") as f:
            source = f.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}")
    program = parse_program(source)
    return program, lower_to_cfg(program)


def _emit(payload: dict, args: argparse.Namespace) -> None:
    text = json.dumps(payload, sort_keys=True, indent=2) + "\n"
    if args.report:
        try:
            with open(args.report, "w", encoding="utf-8") as f:
                f.write(text)
        except OSError as exc:
            raise UsageError(f"cannot write {args.report}: {exc}")
    else:
        sys.stdout.write(text)


def _cmd_analyze(args: argparse.Namespace) -> int:
    _, cfg = _load_program(args.file)
    policy = WideningPolicy(narrowing_budget=args.narrowing_budget)
    if args.domain == "interval":
        entry = IntervalEnv.top(list(cfg.var_order))
        if args.init_range:
            # variables without an explicit range stay top
            ranges = _parse_init_ranges(args.init_range, cfg, default=(0, 0))
            specified = {i.partition("=")[0] for i in args.init_range}
            entry = IntervalEnv.make(
                {v: interval(*ranges[v]) if v in specified else TOP
                 for v in cfg.var_order})
    else:
        entry = SignEnv.top(list(cfg.var_order))
    trace = sys.stderr if args.trace_fixpoint else None
    result = analyze_cfg(cfg, entry, domain=args.domain, policy=policy, trace=trace)
    nodes = {n: str(result.node_envs[n]) for n in sorted(cfg.nodes)}
    summaries = (result.summaries.summaries_by_function()
                 if result.summaries is not None else {})
    payload = {
        "schema_version": SCHEMA_VERSION,
        "subcommand": "analyze",
        "domain": args.domain,
        "nodes": nodes,
        "summaries": summaries,
        "stats": {
            "ascending_steps": result.stats.ascending_steps,
            "widenings": result.stats.widenings,
            "narrowing_steps": result.stats.narrowing_steps,
        },
        "post_fixpoint_ok": check_post_fixpoint(cfg, result),
    }
    if args.format == "json" or args.report:
        _emit(payload, args)
    if args.format == "text" and not args.report:
        for n, env in nodes.items():
            print(f"{n}: {env}")
        for fname, table in summaries.items():
            for inp, out in table.items():
                print(f"{fname}: {inp} -> {out}")
    return 0


def _load_predicates(path: str, program: Program) -> PredicateTable:
    preds = harvest_predicates(program)  # seed with constant true
    table = PredicateTable(preds.preds[:1])
    try:
        with open(path, encoding="utf-8") as f:
            lines = f.read().splitlines()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}")
    for ln in lines:
        text = ln.split("#", 1)[0].strip()
        if not text:
            continue
        pred = parse_predicate(text, program)
        norm = normalize_bexpr(pred.expr)
        if is_constant(norm):
            continue
        extended = table.with_added(norm, text)
        if extended is not None:
            table = extended
    return table


def _cmd_check(args: argparse.Namespace) -> int:
    program, cfg = _load_program(args.file)
    if args.preds:
        pt = _load_predicates(args.preds, program)
    else:
        pt = harvest_predicates(program)
    ranges = _parse_init_ranges(args.init_range, cfg, default=(0, 0))
    report = cegar_loop(cfg, pt, budget=args.budget, init_ranges=ranges,
                        mode=args.refine, sample_bound=args.samples,
                        box=args.witness_box)
    payload = dict(report.to_json(), schema_version=SCHEMA_VERSION,
                   subcommand="check")
    _emit(payload, args)
    return {"proved": 0, "refuted": 1, "budget-exhausted": 2}[report.outcome]


def _load_gluing(path: str) -> dict[str, str]:
    gluing: dict[str, str] = {}
    try:
        with open(path, encoding="utf-8") as f:
            lines = f.read().splitlines()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}")
    for ln in lines:
        text = ln.split("#", 1)[0].strip()
        if not text:
            continue
        parts = text.split()
        if len(parts) != 2:
            raise UsageError(f"gluing line needs two state ids: {ln!r}")
        gluing[parts[0]] = parts[1]
    return gluing


def _cmd_refine_check(args: argparse.Namespace) -> int:
    try:
        with open(args.ts1, encoding="utf-8") as f:
            ts1 = parse_ts(f.read())
        with open(args.ts2, encoding="utf-8") as f:
            ts2 = parse_ts(f.read())
    except OSError as exc:
        raise UsageError(f"cannot read input: {exc}")
    new_actions = frozenset(a for a in (args.new_actions or "").split(",") if a)
    inst = RefinementInstance(
        abstract_ts=ts1,
        refined_ts=ts2,
        old_actions=frozenset(ts1.alphabet | ts2.alphabet) - new_actions,
        new_actions=new_actions,
        gluing=_load_gluing(args.gluing) if args.gluing else None,
    )
    report = check_refinement(inst)
    payload = dict(report.to_json(), schema_version=SCHEMA_VERSION,
                   subcommand="refine-check")
    _emit(payload, args)
    return 0 if report.ok else 1


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="absint-cegar")
    sub = parser.add_subparsers(dest="subcommand")

    pa = sub.add_parser("analyze", help="abstract interpretation of a MIL program")
    pa.add_argument("file")
    pa.add_argument("--domain", choices=("interval", "sign"), default="interval")
    pa.add_argument("--init-range", action="append", default=[],
                    metavar="VAR=LO:HI")
    pa.add_argument("--narrowing-budget", type=int, default=5)
    pa.add_argument("--trace-fixpoint", action="store_true")
    pa.add_argument("--format", choices=("json", "text"), default="text")
    pa.add_argument("--report", metavar="PATH")
    pa.set_defaults(fn=_cmd_analyze)

    pc = sub.add_parser("check", help="CEGAR reachability check of asserts")
    pc.add_argument("file")
    pc.add_argument("--preds", metavar="FILE")
    pc.add_argument("--budget", type=int, default=10)
    pc.add_argument("--refine", choices=("backward", "forward"), default="backward")
    pc.add_argument("--init-range", action="append", default=[],
                    metavar="VAR=LO:HI")
    pc.add_argument("--samples", type=int, default=1000)
    pc.add_argument("--witness-box", type=int, default=200)
    pc.add_argument("--report", metavar="PATH")
    pc.set_defaults(fn=_cmd_check)

    pr = sub.add_parser("refine-check", help="simulation-based refinement check")
    pr.add_argument("ts1")
    pr.add_argument("ts2")
    pr.add_argument("--new-actions", metavar="A,B,...")
    pr.add_argument("--gluing", metavar="FILE")
    pr.add_argument("--report", metavar="PATH")
    pr.set_defaults(fn=_cmd_refine_check)
    return parser


def run(argv: list[str]) -> int:
    parser = _build_parser()
    if not argv:
        parser.print_usage(sys.stderr)
        return 3
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 3 if exc.code not in (0, None) else 0
    if not getattr(args, "fn", None):
        parser.print_usage(sys.stderr)
        return 3
    for knob in ("budget", "samples", "witness_box", "narrowing_budget"):
        value = getattr(args, knob, None)
        if value is not None and value < 1:
            sys.stderr.write(f"--{knob.replace('_', '-')} must be positive\n")
            return 3
    try:
        return args.fn(args)
    except (UsageError, MilError, TsFormatError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 3


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
