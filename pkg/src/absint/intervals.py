"""The interval abstract domain with infinite bounds.

Elements are [lo..hi] with lo, hi drawn from Z extended by -inf/+inf, plus a
unique empty interval as lattice bottom.  Bounds use Python ints with float
infinities as sentinels; products treat 0 * inf as 0 so that multiplication
stays faithful to set semantics.

Also provides interval environments over program variables and the abstract
transfer functions for MIL expressions and guards.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterator

from .lattice import GaloisConnection, LatticeOps, SetDescriptor
from .mil import (
    And, BinOp, BoolConst, BoolExpr, Call, Cmp, Const, Expr, IfExpr, Not, Or,
    Var, negate,
)

NEG_INF = float("-inf")
POS_INF = float("inf")

Bound = int | float


class NotEnumerableError(Exception):
    """Enumeration requested on an interval with an infinite bound."""


@dataclass(frozen=True)
class Interval:
    lo: Bound
    hi: Bound

    @property
    def is_empty(self) -> bool:
        return self.lo > self.hi

    def contains(self, x: int) -> bool:
        return self.lo <= x <= self.hi

    def __str__(self) -> str:
        if self.is_empty:
            return "[]"
        lo = "-inf" if self.lo == NEG_INF else str(self.lo)
        hi = "+inf" if self.hi == POS_INF else str(self.hi)
        return f"[{lo}..{hi}]"


EMPTY = Interval(POS_INF, NEG_INF)
TOP = Interval(NEG_INF, POS_INF)


def interval(lo: Bound, hi: Bound) -> Interval:
    """Canonicalizing constructor: any inverted pair is the unique bottom."""
    if lo > hi:
        return EMPTY
    return Interval(lo, hi)


def singleton(x: int) -> Interval:
    return Interval(x, x)


def ivl_leq(a: Interval, b: Interval) -> bool:
    if a.is_empty:
        return True
    if b.is_empty:
        return False
    return a.lo >= b.lo and a.hi <= b.hi


def ivl_join(a: Interval, b: Interval) -> Interval:
    if a.is_empty:
        return b
    if b.is_empty:
        return a
    return Interval(min(a.lo, b.lo), max(a.hi, b.hi))


def ivl_meet(a: Interval, b: Interval) -> Interval:
    if a.is_empty or b.is_empty:
        return EMPTY
    return interval(max(a.lo, b.lo), min(a.hi, b.hi))


def ivl_widen(a: Interval, b: Interval) -> Interval:
    if a.is_empty:
        return b
    if b.is_empty:
        return a
    lo = NEG_INF if b.lo < a.lo else a.lo
    hi = POS_INF if b.hi > a.hi else a.hi
    return Interval(lo, hi)


def ivl_narrow(a: Interval, b: Interval) -> Interval:
    if not ivl_leq(b, a):
        raise ValueError(f"narrowing precondition violated: {b} not below {a}")
    if b.is_empty:
        return b if a.is_empty else a
    lo = b.lo if a.lo == NEG_INF else a.lo
    hi = b.hi if a.hi == POS_INF else a.hi
    return Interval(lo, hi)


def ivl_alpha(c: frozenset[int]) -> Interval:
    if not c:
        return EMPTY
    return Interval(min(c), max(c))


def ivl_gamma(a: Interval) -> SetDescriptor:
    if a.is_empty:
        return SetDescriptor(contains=lambda x: False, enumerate=lambda: iter(()))
    if a.lo == NEG_INF or a.hi == POS_INF:
        return SetDescriptor(contains=a.contains)

    def enum() -> Iterator[int]:
        return iter(range(int(a.lo), int(a.hi) + 1))

    return SetDescriptor(contains=a.contains, enumerate=enum)


def ivl_enumerate(a: Interval) -> Iterator[int]:
    desc = ivl_gamma(a)
    if not desc.finite:
        raise NotEnumerableError(f"interval {a} has an infinite bound")
    return desc.enumerate()


INTERVAL_OPS = LatticeOps(
    name="interval",
    bottom=EMPTY,
    top=TOP,
    leq=ivl_leq,
    join=ivl_join,
    meet=ivl_meet,
    widen=ivl_widen,
    narrow=ivl_narrow,
    render=str,
)

INTERVAL_GALOIS = GaloisConnection(name="interval", ops=INTERVAL_OPS,
                                   alpha=ivl_alpha, gamma=ivl_gamma)


# ---------------------------------------------------------------------------
# Interval arithmetic
# ---------------------------------------------------------------------------

def _bmul(a: Bound, b: Bound) -> Bound:
    # 0 times anything is 0: intervals are value sets, not IEEE numbers
    if a == 0 or b == 0:
        return 0
    return a * b


def ivl_add(a: Interval, b: Interval) -> Interval:
    if a.is_empty or b.is_empty:
        return EMPTY
    return Interval(a.lo + b.lo, a.hi + b.hi)


def ivl_sub(a: Interval, b: Interval) -> Interval:
    if a.is_empty or b.is_empty:
        return EMPTY
    return Interval(a.lo - b.hi, a.hi - b.lo)


def ivl_mul(a: Interval, b: Interval) -> Interval:
    if a.is_empty or b.is_empty:
        return EMPTY
    products = [_bmul(a.lo, b.lo), _bmul(a.lo, b.hi),
                _bmul(a.hi, b.lo), _bmul(a.hi, b.hi)]
    return Interval(min(products), max(products))


# ---------------------------------------------------------------------------
# Environments
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class IntervalEnv:
    """Map from program variables to intervals; any empty slot collapses the
    whole environment to the canonical bottom."""

    items: tuple[tuple[str, Interval], ...]  # sorted by variable name

    @staticmethod
    def make(mapping: dict[str, Interval]) -> "IntervalEnv":
        if any(v.is_empty for v in mapping.values()):
            return IntervalEnv(tuple((k, EMPTY) for k in sorted(mapping)))
        return IntervalEnv(tuple(sorted(mapping.items())))

    @staticmethod
    def top(variables: list[str]) -> "IntervalEnv":
        return IntervalEnv.make({v: TOP for v in variables})

    @staticmethod
    def bottom(variables: list[str]) -> "IntervalEnv":
        return IntervalEnv(tuple((v, EMPTY) for v in sorted(variables)))

    @property
    def is_bottom(self) -> bool:
        return any(v.is_empty for _, v in self.items)

    def mapping(self) -> dict[str, Interval]:
        return dict(self.items)

    def get(self, var: str) -> Interval:
        for k, v in self.items:
            if k == var:
                return v
        raise KeyError(var)

    def set(self, var: str, value: Interval) -> "IntervalEnv":
        m = self.mapping()
        if var not in m:
            raise KeyError(var)
        m[var] = value
        return IntervalEnv.make(m)

    def leq(self, other: "IntervalEnv") -> bool:
        if self.is_bottom:
            return True
        if other.is_bottom:
            return False
        om = other.mapping()
        return all(ivl_leq(v, om[k]) for k, v in self.items)

    def join(self, other: "IntervalEnv") -> "IntervalEnv":
        if self.is_bottom:
            return other
        if other.is_bottom:
            return self
        om = other.mapping()
        return IntervalEnv.make({k: ivl_join(v, om[k]) for k, v in self.items})

    def widen(self, other: "IntervalEnv") -> "IntervalEnv":
        if self.is_bottom:
            return other
        if other.is_bottom:
            return self
        om = other.mapping()
        return IntervalEnv.make({k: ivl_widen(v, om[k]) for k, v in self.items})

    def narrow(self, other: "IntervalEnv") -> "IntervalEnv":
        if self.is_bottom or other.is_bottom:
            return other
        om = other.mapping()
        return IntervalEnv.make({k: ivl_narrow(v, om[k]) for k, v in self.items})

    def contains_env(self, env: dict[str, int]) -> bool:
        return all(v.contains(env[k]) for k, v in self.items)

    def __str__(self) -> str:
        if self.is_bottom:
            return "bot"
        return "{" + ",".join(f"{k}={v}" for k, v in self.items) + "}"


# ---------------------------------------------------------------------------
# Abstract evaluation of expressions
# ---------------------------------------------------------------------------

SummaryFn = Callable[[str, Interval], Interval]


def eval_abstract(e: Expr, env: IntervalEnv,
                  summaries: SummaryFn | None = None) -> Interval:
    """Compositional interval evaluation; function calls go through the
    supplied summary oracle (absent one they evaluate to top)."""
    if env.is_bottom:
        return EMPTY
    match e:
        case Const(v):
            return singleton(v)
        case Var(name):
            return env.get(name)
        case BinOp(op, l, r):
            a = eval_abstract(l, env, summaries)
            b = eval_abstract(r, env, summaries)
            if op == "+":
                return ivl_add(a, b)
            if op == "-":
                return ivl_sub(a, b)
            return ivl_mul(a, b)
        case Call(fname, arg):
            a = eval_abstract(arg, env, summaries)
            if a.is_empty:
                return EMPTY
            if summaries is None:
                return TOP
            return summaries(fname, a)
        case IfExpr(c, t, o):
            t_env = filter_abstract(c, env, summaries)
            o_env = filter_abstract(negate(c), env, summaries)
            t_val = eval_abstract(t, t_env, summaries) if not t_env.is_bottom else EMPTY
            o_val = eval_abstract(o, o_env, summaries) if not o_env.is_bottom else EMPTY
            return ivl_join(t_val, o_val)
    raise TypeError(e)


def _as_offset(e: Expr) -> tuple[str, int] | None:
    """Recognize v, v+c, c+v, v-c shapes: returns (var, offset) with the
    reading e = var + offset."""
    match e:
        case Var(name):
            return (name, 0)
        case BinOp("+", Var(name), Const(c)):
            return (name, c)
        case BinOp("+", Const(c), Var(name)):
            return (name, c)
        case BinOp("-", Var(name), Const(c)):
            return (name, -c)
    return None


def _cmp_definitely(op: str, a: Interval, b: Interval) -> bool | None:
    """Three-valued comparison of two non-empty intervals."""
    if a.is_empty or b.is_empty:
        return None
    if op == "<":
        if a.hi < b.lo:
            return True
        if a.lo >= b.hi:
            return False
        return None
    if op == "<=":
        if a.hi <= b.lo:
            return True
        if a.lo > b.hi:
            return False
        return None
    if op == ">":
        return _cmp_definitely("<", b, a)
    if op == ">=":
        return _cmp_definitely("<=", b, a)
    if op == "=":
        if a.lo == a.hi == b.lo == b.hi:
            return True
        if ivl_meet(a, b).is_empty:
            return False
        return None
    if op == "!=":
        r = _cmp_definitely("=", a, b)
        return None if r is None else not r
    raise ValueError(op)


def _clamp(op: str, var: str, offset: int, other: Interval,
           env: IntervalEnv) -> IntervalEnv:
    """Refine env by (var + offset) op other, clamping var's interval."""
    if other.is_empty:
        return IntervalEnv.bottom([k for k, _ in env.items])
    cur = env.get(var)
    if op == "<":
        new = ivl_meet(cur, interval(NEG_INF, other.hi - 1 - offset))
    elif op == "<=":
        new = ivl_meet(cur, interval(NEG_INF, other.hi - offset))
    elif op == ">":
        new = ivl_meet(cur, interval(other.lo + 1 - offset, POS_INF))
    elif op == ">=":
        new = ivl_meet(cur, interval(other.lo - offset, POS_INF))
    elif op == "=":
        new = ivl_meet(cur, interval(other.lo - offset, other.hi - offset))
    elif op == "!=":
        new = cur
        if other.lo == other.hi:
            x = other.lo - offset
            if cur.lo == cur.hi == x:
                new = EMPTY
            elif cur.lo == x:
                new = interval(cur.lo + 1, cur.hi)
            elif cur.hi == x:
                new = interval(cur.lo, cur.hi - 1)
    else:
        raise ValueError(op)
    return env.set(var, new)


_FLIP = {"<": ">", "<=": ">=", ">": "<", ">=": "<=", "=": "=", "!=": "!="}


def filter_abstract(guard: BoolExpr, env: IntervalEnv,
                    summaries: SummaryFn | None = None) -> IntervalEnv:
    """Sound refinement of an environment by a guard.

    Comparisons of a (possibly offset) variable against an evaluated interval
    clamp that variable; conjunction filters sequentially, disjunction joins
    the branch filters, negation is pushed inward; atoms the analysis cannot
    resolve leave the environment unchanged.
    """
    if env.is_bottom:
        return env
    variables = [k for k, _ in env.items]
    match guard:
        case BoolConst(v):
            return env if v else IntervalEnv.bottom(variables)
        case Not(inner):
            return filter_abstract(negate(inner), env, summaries)
        case And(l, r):
            return filter_abstract(r, filter_abstract(l, env, summaries), summaries)
        case Or(l, r):
            return filter_abstract(l, env, summaries).join(
                filter_abstract(r, env, summaries))
        case Cmp(op, l, r):
            lv = eval_abstract(l, env, summaries)
            rv = eval_abstract(r, env, summaries)
            if lv.is_empty or rv.is_empty:
                return IntervalEnv.bottom(variables)
            verdict = _cmp_definitely(op, lv, rv)
            if verdict is False:
                return IntervalEnv.bottom(variables)
            out = env
            lin = _as_offset(l)
            if lin is not None:
                out = _clamp(op, lin[0], lin[1], rv, out)
            rin = _as_offset(r)
            if rin is not None and not out.is_bottom:
                out = _clamp(_FLIP[op], rin[0], rin[1],
                             eval_abstract(l, out, summaries), out)
            return out
    raise TypeError(guard)
