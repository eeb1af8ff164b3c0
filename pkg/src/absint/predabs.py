"""Boolean abstraction over a fixed predicate set.

Abstract states are full valuations of the predicates paired with a program
point.  The abstract successor relation is computed per command: target bits
are forced where the entailment checker proves them, enumerated both ways
where it cannot, and candidate targets whose combined constraint is provably
unsatisfiable are pruned.  Unknown always errs toward inclusion, so the
abstract system over-approximates the concrete one by construction.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

from .cfg import ENTRY, ERROR, AssignCmd, Assume, Cfg, Command, Edge, SkipCmd, render_command
from .concrete import ConcreteState, eval_bexpr
from .entail import definitely, entails, is_unsat, refine_by
from .fixpoint import SummaryTable
from .intervals import eval_abstract
from .mil import (
    And, BoolExpr, Predicate, bexpr_vars, expr_calls, expr_vars, negate,
    render_bexpr, subst_bexpr,
)
from .normalize import pred_key
from .ts import TransitionSystem

MAX_PREDICATES = 20


class PredicateLimitError(Exception):
    """Refusal to build an explicit 2^k product for k > MAX_PREDICATES."""


@dataclass
class PredicateTable:
    preds: list[Predicate]

    def __post_init__(self) -> None:
        if not self.preds:
            raise ValueError("predicate table needs at least one predicate")
        keys = [pred_key(p.expr) for p in self.preds]
        if len(set(keys)) != len(keys):
            raise ValueError("predicates must be distinct after normalization")

    @property
    def k(self) -> int:
        return len(self.preds)

    def keys(self) -> set[str]:
        return {pred_key(p.expr) for p in self.preds}

    def texts(self) -> list[str]:
        return [p.text for p in self.preds]

    def with_added(self, expr: BoolExpr, text: str | None = None) -> "PredicateTable | None":
        """Extended table, or None when the predicate is already present."""
        if pred_key(expr) in self.keys():
            return None
        pred = Predicate(text=text if text is not None else render_bexpr(expr),
                         expr=expr, id=self.k + 1)
        return PredicateTable(self.preds + [pred])


Bits = tuple[bool, ...]


def render_bits(bits: Bits) -> str:
    return "".join("T" if b else "F" for b in bits)


def abstract_state_of(s: ConcreteState, pt: PredicateTable) -> Bits:
    env = s.env_dict()
    return tuple(eval_bexpr(p.expr, env) for p in pt.preds)


def cube(bits: Bits, pt: PredicateTable) -> BoolExpr:
    """Conjunction of each predicate or its negation, per the valuation."""
    out: BoolExpr | None = None
    for p, b in zip(pt.preds, bits):
        lit = p.expr if b else negate(p.expr)
        out = lit if out is None else And(out, lit)
    assert out is not None
    return out


def _enumerate_targets(source_formula: BoolExpr, primed: list[BoolExpr],
                       box: int) -> list[Bits]:
    """All valuations of the primed predicates not refuted under the source
    constraint: forced bits via entailment, free bits enumerated, candidate
    cubes pruned jointly when provably unsatisfiable."""
    choices: list[tuple[bool, ...]] = []
    for ph in primed:
        if entails(source_formula, ph, box).is_valid:
            choices.append((True,))
        elif entails(source_formula, negate(ph), box).is_valid:
            choices.append((False,))
        else:
            choices.append((True, False))
    out: list[Bits] = []
    for combo in product(*choices):
        formula = source_formula
        for ph, b in zip(primed, combo):
            formula = And(formula, ph if b else negate(ph))
        if len(primed) > 1 and is_unsat(formula):
            continue
        out.append(tuple(combo))
    return sorted(out)


def _post_via_intervals(cmd: AssignCmd, src: Bits, pt: PredicateTable,
                        summaries: SummaryTable | None) -> list[Bits]:
    """Assignments whose right-hand side calls functions: decide target bits
    from an interval envelope fed by the function summaries."""
    variables = set(expr_vars(cmd.expr)) | {cmd.var}
    for p in pt.preds:
        variables |= bexpr_vars(p.expr)
    env = refine_by(cube(src, pt), sorted(variables))
    oracle = summaries.query if summaries is not None else None
    value = eval_abstract(cmd.expr, env, oracle)
    env_after = env.set(cmd.var, value)
    choices: list[tuple[bool, ...]] = []
    for p in pt.preds:
        verdict = definitely(p.expr, env_after)
        choices.append((verdict,) if verdict is not None else (True, False))
    return sorted(product(*choices))


def abstract_post(cmd: Command, src: Bits, pt: PredicateTable,
                  summaries: SummaryTable | None = None,
                  box: int = 200) -> list[Bits]:
    """Over-approximate successors of one abstract valuation under a command."""
    src_cube = cube(src, pt)
    match cmd:
        case SkipCmd():
            return [src]
        case Assume(g):
            if is_unsat(And(src_cube, g)):
                return []
            return [src]
        case AssignCmd(var, e):
            if expr_calls(e):
                return _post_via_intervals(cmd, src, pt, summaries)
            primed = [subst_bexpr(p.expr, var, e) for p in pt.preds]
            return _enumerate_targets(src_cube, primed, box)
    raise TypeError(cmd)


# ---------------------------------------------------------------------------
# Explicit abstract transition system
# ---------------------------------------------------------------------------

AbsState = tuple[str, Bits]  # (program point, valuation)


def abs_state_id(state: AbsState) -> str:
    node, bits = state
    return f"{node}|{render_bits(bits)}"


@dataclass
class AbstractTS:
    ts: TransitionSystem
    pt: PredicateTable
    states: dict[str, AbsState]                       # id -> (node, bits)
    bad: frozenset[str]
    edge_transitions: list[tuple[str, Edge, str]]      # (src id, CFG edge, dst id)


def build_abstract_ts(cfg: Cfg, pt: PredicateTable,
                      summaries: SummaryTable | None = None,
                      box: int = 200) -> AbstractTS:
    """Explicit product of program points and predicate valuations reachable
    from the abstract initial states."""
    if pt.k > MAX_PREDICATES:
        raise PredicateLimitError(
            f"{pt.k} predicates would mean a 2^{pt.k} valuation space; "
            f"the explicit limit is {MAX_PREDICATES}")
    if summaries is None and cfg.functions:
        summaries = SummaryTable(cfg.functions)

    initial: list[AbsState] = []
    for combo in product((True, False), repeat=pt.k):
        bits = tuple(combo)
        if not is_unsat(cube(bits, pt)):
            initial.append((ENTRY, bits))
    initial.sort(key=abs_state_id)

    seen: dict[str, AbsState] = {abs_state_id(s): s for s in initial}
    queue: list[AbsState] = list(initial)
    edge_transitions: list[tuple[str, Edge, str]] = []
    qi = 0
    post_cache: dict[tuple[Edge, Bits], list[Bits]] = {}
    while qi < len(queue):
        node, bits = queue[qi]
        qi += 1
        sid = abs_state_id((node, bits))
        for edge in cfg.out_edges(node):
            key = (edge, bits)
            if key not in post_cache:
                post_cache[key] = abstract_post(edge.command, bits, pt, summaries, box)
            for tbits in post_cache[key]:
                tstate = (edge.dst, tbits)
                tid = abs_state_id(tstate)
                if tid not in seen:
                    seen[tid] = tstate
                    queue.append(tstate)
                edge_transitions.append((sid, edge, tid))

    labels = {}
    transitions = set()
    for sid, edge, tid in edge_transitions:
        label = f"{edge.src}>{edge.dst}:{render_command(edge.command)}"
        labels[label] = True
        transitions.add((sid, label, tid))
    ts = TransitionSystem(
        states=frozenset(seen),
        initial=frozenset(abs_state_id(s) for s in initial),
        alphabet=frozenset(labels),
        transitions=frozenset(transitions),
    )
    bad = frozenset(sid for sid, (node, _) in seen.items() if node == ERROR)
    return AbstractTS(ts=ts, pt=pt, states=seen, bad=bad,
                      edge_transitions=edge_transitions)
