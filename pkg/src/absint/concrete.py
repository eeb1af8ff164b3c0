"""Concrete execution of MIL programs.

Single-step successor computation, breadth-first reachability enumeration
(the brute-force oracle), and trace replay for counterexample validation.
Integers are unbounded; recursive function calls carry an explicit depth
bound and report divergence instead of hanging.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field

from .cfg import ENTRY, AssignCmd, Assume, Cfg, Command, Edge, SkipCmd, render_command
from .mil import (
    And, BinOp, BoolConst, BoolExpr, Call, Cmp, Const, Expr, FunDef, IfExpr,
    Not, Or, Var,
)
from .ts import TransitionSystem

DEFAULT_RECURSION_BOUND = 10_000


class DivergenceError(Exception):
    """Recursion-depth bound exceeded while evaluating a function call."""


class ReplayError(Exception):
    """Malformed replay input (unknown variable or command)."""


@dataclass(frozen=True)
class ConcreteState:
    node: str
    env: tuple[tuple[str, int], ...]  # sorted (var, value) pairs

    @staticmethod
    def make(node: str, env: dict[str, int]) -> "ConcreteState":
        return ConcreteState(node, tuple(sorted(env.items())))

    def env_dict(self) -> dict[str, int]:
        return dict(self.env)

    def state_id(self) -> str:
        vals = ",".join(f"{k}={v}" for k, v in self.env)
        return f"{self.node}|{vals}"


@dataclass
class Trace:
    steps: list[tuple[ConcreteState, Command, ConcreteState]]

    def final(self) -> ConcreteState:
        return self.steps[-1][2]


@dataclass
class InfeasibleReplay:
    index: int
    state: ConcreteState


def eval_expr(e: Expr, env: dict[str, int], fns: dict[str, FunDef],
              depth_bound: int = DEFAULT_RECURSION_BOUND) -> int:
    # each MIL call burns a handful of Python frames; keep the interpreter
    # stack ahead of the configured bound
    if fns:
        limit = depth_bound * 8 + 1000
        if sys.getrecursionlimit() < limit:
            sys.setrecursionlimit(limit)

    def ev(e: Expr, env: dict[str, int], depth: int) -> int:
        match e:
            case Const(v):
                return v
            case Var(name):
                if name not in env:
                    raise ReplayError(f"unknown variable {name!r}")
                return env[name]
            case BinOp(op, l, r):
                a, b = ev(l, env, depth), ev(r, env, depth)
                if op == "+":
                    return a + b
                if op == "-":
                    return a - b
                return a * b
            case Call(fname, arg):
                if depth >= depth_bound:
                    raise DivergenceError(
                        f"recursion depth {depth_bound} exceeded calling {fname!r}")
                f = fns.get(fname)
                if f is None:
                    raise ReplayError(f"unknown function {fname!r}")
                v = ev(arg, env, depth)
                return ev(f.body, {f.param: v}, depth + 1)
            case IfExpr(c, t, o):
                return ev(t, env, depth) if evb(c, env, depth) else ev(o, env, depth)
        raise TypeError(e)

    def evb(b: BoolExpr, env: dict[str, int], depth: int) -> bool:
        match b:
            case BoolConst(v):
                return v
            case Cmp(op, l, r):
                a, c = ev(l, env, depth), ev(r, env, depth)
                return {"<": a < c, "<=": a <= c, "=": a == c,
                        "!=": a != c, ">=": a >= c, ">": a > c}[op]
            case Not(x):
                return not evb(x, env, depth)
            case And(l, r):
                return evb(l, env, depth) and evb(r, env, depth)
            case Or(l, r):
                return evb(l, env, depth) or evb(r, env, depth)
        raise TypeError(b)

    return ev(e, env, 0)


def eval_bexpr(b: BoolExpr, env: dict[str, int], fns: dict[str, FunDef] | None = None,
               depth_bound: int = DEFAULT_RECURSION_BOUND) -> bool:
    fns = fns or {}
    match b:
        case BoolConst(v):
            return v
        case Cmp(op, l, r):
            a, c = eval_expr(l, env, fns, depth_bound), eval_expr(r, env, fns, depth_bound)
            return {"<": a < c, "<=": a <= c, "=": a == c,
                    "!=": a != c, ">=": a >= c, ">": a > c}[op]
        case Not(x):
            return not eval_bexpr(x, env, fns, depth_bound)
        case And(l, r):
            return eval_bexpr(l, env, fns, depth_bound) and eval_bexpr(r, env, fns, depth_bound)
        case Or(l, r):
            return eval_bexpr(l, env, fns, depth_bound) or eval_bexpr(r, env, fns, depth_bound)
    raise TypeError(b)


def apply_command(cmd: Command, env: dict[str, int], fns: dict[str, FunDef],
                  depth_bound: int = DEFAULT_RECURSION_BOUND) -> dict[str, int] | None:
    """Successor environment, or None when an assume guard fails."""
    match cmd:
        case Assume(c):
            return env if eval_bexpr(c, env, fns, depth_bound) else None
        case AssignCmd(var, e):
            if var not in env:
                raise ReplayError(f"unknown variable {var!r}")
            new = dict(env)
            new[var] = eval_expr(e, env, fns, depth_bound)
            return new
        case SkipCmd():
            return env
    raise TypeError(cmd)


def step(cfg: Cfg, s: ConcreteState,
         depth_bound: int = DEFAULT_RECURSION_BOUND) -> list[tuple[Command, ConcreteState]]:
    """All successors of a concrete state, in deterministic edge order."""
    env = s.env_dict()
    out = []
    for e in cfg.out_edges(s.node):
        new_env = apply_command(e.command, env, cfg.functions, depth_bound)
        if new_env is not None:
            out.append((e.command, ConcreteState.make(e.dst, new_env)))
    return out


@dataclass
class Enumeration:
    states: list[ConcreteState]
    initial: list[ConcreteState]
    transitions: list[tuple[ConcreteState, Command, ConcreteState]]
    truncated: bool = False


def _initial_states(cfg: Cfg, init_ranges: dict[str, tuple[int, int]]) -> list[ConcreteState]:
    for v in cfg.var_order:
        if v not in init_ranges:
            raise ReplayError(f"no initial range for variable {v!r}")
    envs: list[dict[str, int]] = [{}]
    for v in cfg.var_order:
        lo, hi = init_ranges[v]
        envs = [dict(e, **{v: x}) for e in envs for x in range(lo, hi + 1)]
    return [ConcreteState.make(ENTRY, e) for e in envs]


def enumerate_states(cfg: Cfg, init_ranges: dict[str, tuple[int, int]],
                     limit: int = 100_000,
                     depth_bound: int = DEFAULT_RECURSION_BOUND) -> Enumeration:
    """Breadth-first closure of `step` from all initial states."""
    initial = _initial_states(cfg, init_ranges)
    seen: set[ConcreteState] = set()
    queue: list[ConcreteState] = sorted(initial, key=ConcreteState.state_id)
    transitions: list[tuple[ConcreteState, Command, ConcreteState]] = []
    truncated = False
    qi = 0
    for s in queue:
        seen.add(s)
    while qi < len(queue):
        s = queue[qi]
        qi += 1
        for cmd, t in step(cfg, s, depth_bound):
            if t not in seen:
                if len(seen) >= limit:
                    truncated = True
                    continue
                seen.add(t)
                queue.append(t)
            transitions.append((s, cmd, t))
    states = sorted(seen, key=ConcreteState.state_id)
    return Enumeration(states=states, initial=initial,
                       transitions=transitions, truncated=truncated)


def enumerate_reachable(cfg: Cfg, init_ranges: dict[str, tuple[int, int]],
                        limit: int = 100_000,
                        depth_bound: int = DEFAULT_RECURSION_BOUND) -> TransitionSystem:
    enum = enumerate_states(cfg, init_ranges, limit, depth_bound)
    state_ids = frozenset(s.state_id() for s in enum.states)
    transitions = frozenset(
        (s.state_id(), render_command(cmd), t.state_id())
        for s, cmd, t in enum.transitions)
    alphabet = frozenset(label for _, label, _ in transitions)
    return TransitionSystem(
        states=state_ids,
        initial=frozenset(s.state_id() for s in enum.initial),
        alphabet=alphabet,
        transitions=transitions,
        truncated=enum.truncated,
    )


def replay_trace(cfg: Cfg, commands: list[tuple[Command, str, str]],
                 init: ConcreteState,
                 depth_bound: int = DEFAULT_RECURSION_BOUND) -> Trace | InfeasibleReplay:
    """Execute (command, src, dst) triples in order from an initial state.

    Returns the full Trace when every assume passes, otherwise the index of
    the first failing command and the state before it.
    """
    cur = init
    steps: list[tuple[ConcreteState, Command, ConcreteState]] = []
    for i, (cmd, src, dst) in enumerate(commands):
        if cur.node != src:
            raise ReplayError(f"command {i} starts at {src!r} but state is at {cur.node!r}")
        env = apply_command(cmd, cur.env_dict(), cfg.functions, depth_bound)
        if env is None:
            return InfeasibleReplay(index=i, state=cur)
        nxt = ConcreteState.make(dst, env)
        steps.append((cur, cmd, nxt))
        cur = nxt
    return Trace(steps=steps)
