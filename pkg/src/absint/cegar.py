"""Counterexample-guided abstraction refinement on MIL programs.

One iteration: build the boolean abstract system for the current predicate
table, search it breadth-first for a path into the error node, validate that
path against the concrete semantics, and either stop (proved / refuted) or
extend the predicate table from weakest preconditions along the spurious
path and go again.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

from .cfg import ENTRY, ERROR, AssignCmd, Assume, Cfg, Command, Edge, SkipCmd
from .concrete import ConcreteState, InfeasibleReplay, Trace, replay_trace
from .entail import is_unsat
from .fixpoint import SummaryTable
from .intervals import Interval, IntervalEnv, eval_abstract, filter_abstract, interval
from .mil import (
    Assert, BoolConst, BoolExpr, If, Predicate, Program, Stmt, While, Cmp,
    Var, Const, render_bexpr, subst_bexpr,
)
from .normalize import is_constant, normalize_bexpr, pred_key
from .predabs import (
    AbstractTS, Bits, PredicateLimitError, PredicateTable, abstract_post,
    abs_state_id, build_abstract_ts, cube,
)

DEFAULT_SAMPLE_BOUND = 1000
_MAX_INITIAL_SCAN = 100_000


@dataclass
class AbstractCex:
    """Abstract error path: per step the source valuation and the CFG edge
    taken; `final` is the reached bad state."""
    path: list[tuple[Bits, Edge]]
    final: tuple[str, Bits]

    def commands(self) -> list[tuple[Command, str, str]]:
        return [(e.command, e.src, e.dst) for _, e in self.path]

    def __len__(self) -> int:
        return len(self.path)


@dataclass
class CexVerdict:
    kind: str  # "genuine" | "spurious" | "unknown"
    trace: Trace | None = None
    failing_index: int | None = None
    witness_env: IntervalEnv | None = None
    env_trail: list[IntervalEnv] | None = None  # env before each prefix step
    reason: str | None = None


class RefinementStalled(Exception):
    pass


def check_reachability(ats: AbstractTS) -> AbstractCex | None:
    """Shortest abstract path from an initial to a bad state; breadth-first
    with lexicographic tie-breaking on state ids."""
    parent: dict[str, tuple[str, Edge] | None] = {}
    queue: list[str] = sorted(ats.ts.initial)
    for sid in queue:
        parent[sid] = None
    succ: dict[str, list[tuple[str, Edge]]] = {}
    for sid, edge, tid in ats.edge_transitions:
        succ.setdefault(sid, []).append((tid, edge))
    for lst in succ.values():
        lst.sort(key=lambda p: (p[0], p[1].src, p[1].dst))
    qi = 0
    found: str | None = None
    while qi < len(queue):
        sid = queue[qi]
        qi += 1
        if sid in ats.bad:
            found = sid
            break
        for tid, edge in succ.get(sid, []):
            if tid not in parent:
                parent[tid] = (sid, edge)
                queue.append(tid)
    if found is None:
        return None
    path: list[tuple[Bits, Edge]] = []
    cur = found
    while parent[cur] is not None:
        prev, edge = parent[cur]
        path.append((ats.states[prev][1], edge))
        cur = prev
    path.reverse()
    return AbstractCex(path=path, final=ats.states[found])


def _initial_interval_env(cfg: Cfg, init_ranges: dict[str, tuple[int, int]]) -> IntervalEnv:
    return IntervalEnv.make({v: interval(*init_ranges[v]) for v in cfg.var_order})


def propagate_intervals(cex: AbstractCex, cfg: Cfg,
                        init_ranges: dict[str, tuple[int, int]],
                        pt: PredicateTable,
                        summaries: SummaryTable | None = None,
                        ) -> tuple[int, list[IntervalEnv]] | None:
    """Forward interval propagation along the path; returns the first index
    proven infeasible together with the envelope trail (env before each
    step up to and including the failing one), or None."""
    oracle = summaries.query if summaries is not None else None
    env = _initial_interval_env(cfg, init_ranges)
    if cex.path:
        env = filter_abstract(cube(cex.path[0][0], pt), env, oracle)
    trail: list[IntervalEnv] = []
    for i, (_, edge) in enumerate(cex.path):
        trail.append(env)
        match edge.command:
            case Assume(c):
                env = filter_abstract(c, env, oracle)
            case AssignCmd(var, e):
                env = env.set(var, eval_abstract(e, env, oracle))
            case SkipCmd():
                pass
        if env.is_bottom:
            return i, trail
    return None


def validate_cex(cex: AbstractCex, cfg: Cfg,
                 init_ranges: dict[str, tuple[int, int]],
                 pt: PredicateTable,
                 summaries: SummaryTable | None = None,
                 sample_bound: int = DEFAULT_SAMPLE_BOUND) -> CexVerdict:
    """Classify an abstract counterexample.

    Interval propagation proving the path infeasible gives "spurious";
    a successful concrete replay from a sampled initial state gives
    "genuine"; an exhausted sample budget gives "unknown"."""
    infeasible = propagate_intervals(cex, cfg, init_ranges, pt, summaries)
    if infeasible is not None:
        idx, trail = infeasible
        return CexVerdict(kind="spurious", failing_index=idx,
                          witness_env=trail[-1], env_trail=trail)

    first_bits = cex.path[0][0] if cex.path else cex.final[1]
    commands = cex.commands()
    envs: list[dict[str, int]] = [{}]
    for v in cfg.var_order:
        lo, hi = init_ranges[v]
        envs = [dict(e, **{v: x}) for e in envs for x in range(lo, hi + 1)]
        if len(envs) > _MAX_INITIAL_SCAN:
            envs = envs[:_MAX_INITIAL_SCAN]
    tried = 0
    from .predabs import abstract_state_of
    for env in envs:
        if tried >= sample_bound:
            break
        s0 = ConcreteState.make(ENTRY, env)
        if abstract_state_of(s0, pt) != first_bits:
            continue
        tried += 1
        result = replay_trace(cfg, commands, s0)
        if isinstance(result, Trace):
            return CexVerdict(kind="genuine", trace=result)
    return CexVerdict(
        kind="unknown",
        reason=f"no infeasibility proof; {tried} initial samples replayed without "
               f"reaching the error node")


def backward_wp_chain(cex: AbstractCex, failing_index: int) -> list[BoolExpr]:
    """Weakest preconditions of the failing guard across the preceding
    assignments, from the guard itself back to the path start."""
    cmd = cex.path[failing_index][1].command
    if not isinstance(cmd, Assume):
        raise RefinementStalled(
            "infeasibility at a non-assume command; nothing to refine from")
    wp = cmd.cond
    chain = [wp]
    for i in range(failing_index - 1, -1, -1):
        prev = cex.path[i][1].command
        if isinstance(prev, AssignCmd):
            wp = subst_bexpr(wp, prev.var, prev.expr)
            chain.append(wp)
    return chain


def refine(pt: PredicateTable, verdict: CexVerdict, cex: AbstractCex,
           mode: str = "backward") -> PredicateTable:
    """Extend the predicate table so the spurious path dies.

    Backward (default): weakest-precondition predicates along the prefix.
    Forward: interval-derivable bounds at the failing index."""
    if verdict.kind != "spurious" or verdict.failing_index is None:
        raise ValueError("refine needs a spurious verdict")
    candidates: list[BoolExpr] = []
    if mode == "backward":
        candidates = backward_wp_chain(cex, verdict.failing_index)
    elif mode == "forward":
        # finite bounds of the propagated envelope at every prefix point,
        # so the strengthened cubes pin the path down step by step
        for env in verdict.env_trail or []:
            if env.is_bottom:
                continue
            for var, ivl in env.items:
                if isinstance(ivl.lo, int):
                    candidates.append(Cmp(">=", Var(var), Const(ivl.lo)))
                if isinstance(ivl.hi, int):
                    candidates.append(Cmp("<=", Var(var), Const(ivl.hi)))
    else:
        raise ValueError(f"unknown refinement mode {mode!r}")

    out = pt
    added = 0
    for cand in candidates:
        norm = normalize_bexpr(cand)
        if is_constant(norm):
            continue
        extended = out.with_added(norm)
        if extended is not None:
            out = extended
            added += 1
    if added == 0:
        raise RefinementStalled("refinement produced no new predicate")
    return out


def cex_realizable(cex: AbstractCex, pt: PredicateTable,
                   summaries: SummaryTable | None = None) -> bool:
    """Whether the cex's edge sequence still reaches the error node in the
    abstraction induced by `pt`."""
    from itertools import product as iproduct
    frontier: set[Bits] = set()
    for combo in iproduct((True, False), repeat=pt.k):
        if not is_unsat(cube(tuple(combo), pt)):
            frontier.add(tuple(combo))
    for _, edge in cex.path:
        nxt: set[Bits] = set()
        for bits in frontier:
            nxt.update(abstract_post(edge.command, bits, pt, summaries))
        frontier = nxt
        if not frontier:
            return False
    return True


# ---------------------------------------------------------------------------
# The loop
# ---------------------------------------------------------------------------

@dataclass
class IterationRecord:
    predicates: list[str]
    abstract_states: int
    verdict: str
    cex_length: int | None = None
    phase_seconds: dict[str, float] = field(default_factory=dict)


@dataclass
class CegarReport:
    outcome: str  # "proved" | "refuted" | "budget-exhausted"
    iterations: list[IterationRecord]
    trace: Trace | None = None
    reason: str | None = None

    def to_json(self) -> dict:
        # phase timings stay off the JSON report: reports must be
        # byte-identical across runs
        out: dict = {
            "outcome": self.outcome,
            "iterations": [
                {
                    "predicates": it.predicates,
                    "abstract_states": it.abstract_states,
                    "verdict": it.verdict,
                    "cex_length": it.cex_length,
                }
                for it in self.iterations
            ],
        }
        if self.reason is not None:
            out["reason"] = self.reason
        if self.trace is not None:
            out["trace"] = [
                {"from": s.state_id(), "to": t.state_id()}
                for s, _, t in self.trace.steps
            ]
        return out


def harvest_predicates(program: Program) -> PredicateTable:
    """Initial abstraction: constant true plus every branch, loop, and
    assertion condition, normalized and deduplicated."""
    preds: list[Predicate] = [Predicate(text="true", expr=BoolConst(True), id=1)]
    seen = {pred_key(BoolConst(True))}

    def visit(stmts: list[Stmt]) -> None:
        for s in stmts:
            match s:
                case If(c, t, o):
                    add(c)
                    visit(t)
                    visit(o)
                case While(c, b):
                    add(c)
                    visit(b)
                case Assert(c):
                    add(c)
                case _:
                    pass

    def add(c: BoolExpr) -> None:
        norm = normalize_bexpr(c)
        if is_constant(norm):
            return
        key = pred_key(norm)
        if key in seen:
            return
        seen.add(key)
        preds.append(Predicate(text=render_bexpr(norm), expr=norm, id=len(preds) + 1))

    visit(program.body)
    return PredicateTable(preds)


def cegar_loop(cfg: Cfg, initial_pt: PredicateTable, budget: int,
               init_ranges: dict[str, tuple[int, int]],
               mode: str = "backward",
               sample_bound: int = DEFAULT_SAMPLE_BOUND,
               box: int = 200) -> CegarReport:
    if budget < 1:
        raise ValueError("budget must be at least 1")
    summaries = SummaryTable(cfg.functions) if cfg.functions else None
    pt = initial_pt
    iterations: list[IterationRecord] = []
    for _ in range(budget):
        from .predabs import MAX_PREDICATES
        if pt.k > MAX_PREDICATES:
            return CegarReport(outcome="budget-exhausted", iterations=iterations,
                               reason=f"predicate count {pt.k} exceeds the "
                                      f"{MAX_PREDICATES}-predicate guard")
        times: dict[str, float] = {}
        t0 = time.perf_counter()
        ats = build_abstract_ts(cfg, pt, summaries, box)
        times["build"] = time.perf_counter() - t0

        t0 = time.perf_counter()
        cex = check_reachability(ats)
        times["check"] = time.perf_counter() - t0

        record = IterationRecord(predicates=pt.texts(),
                                 abstract_states=len(ats.states),
                                 verdict="", phase_seconds=times)
        iterations.append(record)
        if cex is None:
            record.verdict = "safe"
            return CegarReport(outcome="proved", iterations=iterations)

        record.cex_length = len(cex)
        t0 = time.perf_counter()
        verdict = validate_cex(cex, cfg, init_ranges, pt, summaries, sample_bound)
        times["validate"] = time.perf_counter() - t0
        record.verdict = verdict.kind

        if verdict.kind == "genuine":
            trace = verdict.trace
            assert trace is not None and trace.final().node == ERROR
            return CegarReport(outcome="refuted", iterations=iterations, trace=trace)
        if verdict.kind == "unknown":
            return CegarReport(outcome="budget-exhausted", iterations=iterations,
                               reason=f"counterexample neither replayed nor refuted: "
                                      f"{verdict.reason}")

        t0 = time.perf_counter()
        try:
            pt = refine(pt, verdict, cex, mode)
        except RefinementStalled as exc:
            times["refine"] = time.perf_counter() - t0
            return CegarReport(outcome="budget-exhausted", iterations=iterations,
                               reason=str(exc))
        times["refine"] = time.perf_counter() - t0
        if cex_realizable(cex, pt, summaries):
            return CegarReport(outcome="budget-exhausted", iterations=iterations,
                               reason="refinement did not eliminate the abstract "
                                      "counterexample")
    return CegarReport(outcome="budget-exhausted", iterations=iterations,
                       reason=f"iteration budget {budget} exhausted")
