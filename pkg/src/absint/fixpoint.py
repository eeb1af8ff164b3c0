"""Fixpoint computation of abstract semantics over a CFG.

Worklist iteration in reverse post-order with widening at loop heads, then a
budget-bounded narrowing (descending) pass.  Recursive functions get
input-indexed interval summaries computed by chaotic iteration over a
tabulation of call contexts, with delayed widening on summary outputs.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable, TextIO

from .cfg import ENTRY, AssignCmd, Assume, Cfg, Command, SkipCmd, loop_heads, reverse_postorder
from .mil import FunDef
from .intervals import (
    EMPTY, TOP, Interval, IntervalEnv, eval_abstract, filter_abstract,
    ivl_join, ivl_leq, ivl_narrow, ivl_widen,
)
from .signs import SignEnv, eval_sign, filter_sign


class AnalysisError(Exception):
    """Internal invariant violated during analysis."""


@dataclass(frozen=True)
class WideningPolicy:
    narrowing_budget: int = 5
    widen_delay: int = 3        # summary-output updates before widening kicks in
    context_cap: int = 64       # distinct summary contexts per function
    max_ascending_steps: int = 100_000


# ---------------------------------------------------------------------------
# Function summaries (interval domain)
# ---------------------------------------------------------------------------

class SummaryTable:
    """Input-interval-indexed summaries for recursive functions.

    Querying an unseen context seeds it at bottom and re-solves the whole
    table to a fixpoint; outputs are joined plainly for the first
    `widen_delay` updates of a context and widened afterwards, so ascending
    chains stabilize.  Mutual recursion iterates the table jointly.  Beyond
    `context_cap` contexts per function, new inputs collapse to the top
    context, trading precision for a bounded table.
    """

    def __init__(self, fns: dict[str, FunDef], policy: WideningPolicy = WideningPolicy()):
        self.fns = fns
        self.policy = policy
        self.table: dict[tuple[str, Interval], Interval] = {}
        self.updates: dict[tuple[str, Interval], int] = {}

    def query(self, name: str, inp: Interval) -> Interval:
        if name not in self.fns:
            raise AnalysisError(f"unknown function {name!r}")
        if inp.is_empty:
            return EMPTY
        inp = self._admit(name, inp)
        key = (name, inp)
        if key not in self.table:
            self.table[key] = EMPTY
            self.updates[key] = 0
            self._solve()
        return self.table[key]

    def _admit(self, name: str, inp: Interval) -> Interval:
        if (name, inp) in self.table:
            return inp
        contexts = sum(1 for (f, _) in self.table if f == name)
        if contexts >= self.policy.context_cap:
            return TOP
        return inp

    def _lookup(self, name: str, inp: Interval) -> Interval:
        if inp.is_empty:
            return EMPTY
        inp = self._admit(name, inp)
        key = (name, inp)
        if key not in self.table:
            self.table[key] = EMPTY
            self.updates[key] = 0
        return self.table[key]

    def _solve(self) -> None:
        changed = True
        while changed:
            changed = False
            size_before = len(self.table)
            for key in sorted(self.table, key=lambda k: (k[0], str(k[1]))):
                name, inp = key
                fn = self.fns[name]
                env = IntervalEnv.make({fn.param: inp})
                new = eval_abstract(fn.body, env, self._lookup)
                cur = self.table[key]
                if not ivl_leq(new, cur):
                    joined = ivl_join(cur, new)
                    self.updates[key] += 1
                    if self.updates[key] > self.policy.widen_delay:
                        joined = ivl_widen(cur, joined)
                    self.table[key] = joined
                    changed = True
            # contexts discovered mid-pass start at bottom and need solving
            if len(self.table) != size_before:
                changed = True

    def summaries_by_function(self) -> dict[str, dict[str, str]]:
        out: dict[str, dict[str, str]] = {}
        for (name, inp), res in sorted(self.table.items(),
                                       key=lambda kv: (kv[0][0], str(kv[0][1]))):
            out.setdefault(name, {})[str(inp)] = str(res)
        return out


def analyze_function(fn: FunDef, inp: Interval,
                     fns: dict[str, FunDef] | None = None,
                     policy: WideningPolicy = WideningPolicy(),
                     table: SummaryTable | None = None) -> Interval:
    """Interval summary of a (possibly recursive) function at one input."""
    if table is None:
        table = SummaryTable(fns if fns is not None else {fn.name: fn}, policy)
    return table.query(fn.name, inp)


# ---------------------------------------------------------------------------
# Domain adapters
# ---------------------------------------------------------------------------

@dataclass
class _DomainAdapter:
    name: str
    bottom_env: Callable
    transfer: Callable
    leq: Callable
    join: Callable
    widen: Callable
    narrow: Callable


def _interval_adapter(summaries: SummaryTable | None) -> _DomainAdapter:
    oracle = summaries.query if summaries is not None else None

    def transfer(cmd: Command, env: IntervalEnv) -> IntervalEnv:
        if env.is_bottom:
            return env
        match cmd:
            case Assume(c):
                return filter_abstract(c, env, oracle)
            case AssignCmd(var, e):
                return env.set(var, eval_abstract(e, env, oracle))
            case SkipCmd():
                return env
        raise TypeError(cmd)

    return _DomainAdapter(
        name="interval",
        bottom_env=IntervalEnv.bottom,
        transfer=transfer,
        leq=lambda a, b: a.leq(b),
        join=lambda a, b: a.join(b),
        widen=lambda a, b: a.widen(b),
        narrow=lambda a, b: a.narrow(b),
    )


def _sign_adapter() -> _DomainAdapter:
    def transfer(cmd: Command, env: SignEnv) -> SignEnv:
        if env.is_bottom:
            return env
        match cmd:
            case Assume(c):
                return filter_sign(c, env)
            case AssignCmd(var, e):
                return env.set(var, eval_sign(e, env))
            case SkipCmd():
                return env
        raise TypeError(cmd)

    # finite height: widening is join, narrowing keeps the descending value
    return _DomainAdapter(
        name="sign",
        bottom_env=SignEnv.bottom,
        transfer=transfer,
        leq=lambda a, b: a.leq(b),
        join=lambda a, b: a.join(b),
        widen=lambda a, b: a.join(b),
        narrow=lambda a, b: b,
    )


# ---------------------------------------------------------------------------
# CFG analysis
# ---------------------------------------------------------------------------

@dataclass
class AnalysisStats:
    ascending_steps: int = 0
    widenings: int = 0
    narrowing_steps: int = 0


@dataclass
class AnalysisResult:
    domain: str
    node_envs: dict  # node -> abstract env
    summaries: SummaryTable | None
    stats: AnalysisStats = field(default_factory=AnalysisStats)


def analyze_cfg(cfg: Cfg, entry_env, domain: str = "interval",
                policy: WideningPolicy = WideningPolicy(),
                summaries: SummaryTable | None = None,
                trace: TextIO | None = None) -> AnalysisResult:
    """Abstract reachability over all CFG nodes from an entry environment."""
    if domain == "interval":
        if summaries is None and cfg.functions:
            summaries = SummaryTable(cfg.functions, policy)
        dom = _interval_adapter(summaries)
    elif domain == "sign":
        summaries = None
        dom = _sign_adapter()
    else:
        raise ValueError(f"unknown domain {domain!r}")

    variables = list(cfg.var_order)
    widen_points = loop_heads(cfg)
    rpo = reverse_postorder(cfg)
    rpo_index = {n: i for i, n in enumerate(rpo)}
    envs = {n: dom.bottom_env(variables) for n in cfg.nodes}
    envs[ENTRY] = entry_env
    stats = AnalysisStats()

    out_edges = {n: cfg.out_edges(n) for n in cfg.nodes}
    worklist = {ENTRY}
    while worklist:
        if stats.ascending_steps > policy.max_ascending_steps:
            raise AnalysisError("ascending iteration exceeded step budget")
        node = min(worklist, key=lambda n: (rpo_index[n], n))
        worklist.discard(node)
        stats.ascending_steps += 1
        for edge in out_edges[node]:
            contribution = dom.transfer(edge.command, envs[node])
            old = envs[edge.dst]
            candidate = dom.join(old, contribution)
            if dom.leq(candidate, old):
                continue
            widened = edge.dst in widen_points
            new = dom.widen(old, candidate) if widened else candidate
            if widened:
                stats.widenings += 1
            if trace is not None:
                trace.write(f"node={edge.dst} old={old} new={new} "
                            f"widened={'yes' if widened else 'no'}\n")
            envs[edge.dst] = new
            worklist.add(edge.dst)

    # descending pass: accept a narrowing step only while it stays a
    # post-fixpoint, so the recorded invariant always holds
    in_edges = {n: cfg.in_edges(n) for n in cfg.nodes}

    def apply_once(current: dict) -> dict:
        new = {}
        for n in cfg.nodes:
            if n == ENTRY:
                new[n] = entry_env
                continue
            acc = dom.bottom_env(variables)
            for edge in in_edges[n]:
                acc = dom.join(acc, dom.transfer(edge.command, current[edge.src]))
            new[n] = acc
        return new

    for _ in range(policy.narrowing_budget):
        new = apply_once(envs)
        if all(new[n] == envs[n] for n in cfg.nodes):
            break
        if not all(dom.leq(new[n], envs[n]) for n in cfg.nodes):
            break
        candidate = {n: dom.narrow(envs[n], new[n]) for n in cfg.nodes}
        result = AnalysisResult(domain=domain, node_envs=candidate, summaries=summaries)
        if not check_post_fixpoint(cfg, result):
            break
        envs = candidate
        stats.narrowing_steps += 1

    result = AnalysisResult(domain=domain, node_envs=envs,
                            summaries=summaries, stats=stats)
    if not check_post_fixpoint(cfg, result):
        raise AnalysisError("analysis result is not a post-fixpoint; "
                            "a transfer function is not monotone")
    return result


def check_post_fixpoint(cfg: Cfg, result: AnalysisResult) -> bool:
    """Re-apply every transfer once and verify containment."""
    if result.domain == "interval":
        dom = _interval_adapter(result.summaries)
    else:
        dom = _sign_adapter()
    envs = result.node_envs
    for edge in cfg.edges:
        if not dom.leq(dom.transfer(edge.command, envs[edge.src]), envs[edge.dst]):
            return False
    return True
