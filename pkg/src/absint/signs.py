"""The rule-of-signs abstract domain.

Five elements: bottom < {-, 0, +} < top.  Multiplication follows the classic
sign table on {+, 0, -}, extended strictly (bottom absorbs) and with the
precise refinement top*0 = 0.  Addition is the best abstraction of integer
addition.  Widening is join: the lattice has finite height.
"""

from __future__ import annotations

from enum import Enum
from typing import Iterator

from .lattice import GaloisConnection, LatticeOps, SetDescriptor


class Sign(Enum):
    BOTTOM = "bot"
    NEG = "-"
    ZERO = "0"
    POS = "+"
    TOP = "top"

    def __str__(self) -> str:
        return self.value


_B, _N, _Z, _P, _T = Sign.BOTTOM, Sign.NEG, Sign.ZERO, Sign.POS, Sign.TOP

ALL_SIGNS = (_B, _N, _Z, _P, _T)


def sign_of(x: int) -> Sign:
    if x < 0:
        return _N
    if x == 0:
        return _Z
    return _P


def sign_leq(a: Sign, b: Sign) -> bool:
    return a is _B or b is _T or a is b


def sign_join(a: Sign, b: Sign) -> Sign:
    if a is _B:
        return b
    if b is _B:
        return a
    return a if a is b else _T


def sign_meet(a: Sign, b: Sign) -> Sign:
    if a is _T:
        return b
    if b is _T:
        return a
    return a if a is b else _B


def sign_mul(a: Sign, b: Sign) -> Sign:
    if a is _B or b is _B:
        return _B
    if a is _Z or b is _Z:
        return _Z
    if a is _T or b is _T:
        return _T
    return _P if a is b else _N


def sign_neg(a: Sign) -> Sign:
    if a is _N:
        return _P
    if a is _P:
        return _N
    return a


def sign_add(a: Sign, b: Sign) -> Sign:
    if a is _B or b is _B:
        return _B
    if a is _Z:
        return b
    if b is _Z:
        return a
    if a is b and a in (_N, _P):
        return a
    return _T


def sign_sub(a: Sign, b: Sign) -> Sign:
    return sign_add(a, sign_neg(b))


def sign_alpha(c: frozenset[int]) -> Sign:
    out = _B
    for x in c:
        out = sign_join(out, sign_of(x))
    return out


def sign_gamma(a: Sign) -> SetDescriptor:
    def empty() -> Iterator[int]:
        return iter(())

    if a is _B:
        return SetDescriptor(contains=lambda x: False, enumerate=empty)
    if a is _Z:
        return SetDescriptor(contains=lambda x: x == 0, enumerate=lambda: iter((0,)))
    if a is _N:
        return SetDescriptor(contains=lambda x: x < 0)
    if a is _P:
        return SetDescriptor(contains=lambda x: x > 0)
    return SetDescriptor(contains=lambda x: True)


SIGN_OPS = LatticeOps(
    name="sign",
    bottom=_B,
    top=_T,
    leq=sign_leq,
    join=sign_join,
    meet=sign_meet,
    widen=sign_join,
    narrow=sign_meet,
    render=str,
)

SIGN_GALOIS = GaloisConnection(name="sign", ops=SIGN_OPS,
                               alpha=sign_alpha, gamma=sign_gamma)


# ---------------------------------------------------------------------------
# Environments and transfer functions
# ---------------------------------------------------------------------------

from dataclasses import dataclass  # noqa: E402

from .mil import (  # noqa: E402
    And, BinOp, BoolConst, BoolExpr, Call, Cmp, Const, Expr, IfExpr, Not, Or,
    Var, negate,
)


@dataclass(frozen=True)
class SignEnv:
    items: tuple[tuple[str, Sign], ...]  # sorted by variable name

    @staticmethod
    def make(mapping: dict[str, Sign]) -> "SignEnv":
        if any(v is _B for v in mapping.values()):
            return SignEnv(tuple((k, _B) for k in sorted(mapping)))
        return SignEnv(tuple(sorted(mapping.items())))

    @staticmethod
    def top(variables: list[str]) -> "SignEnv":
        return SignEnv.make({v: _T for v in variables})

    @staticmethod
    def bottom(variables: list[str]) -> "SignEnv":
        return SignEnv(tuple((v, _B) for v in sorted(variables)))

    @property
    def is_bottom(self) -> bool:
        return any(v is _B for _, v in self.items)

    def mapping(self) -> dict[str, Sign]:
        return dict(self.items)

    def get(self, var: str) -> Sign:
        for k, v in self.items:
            if k == var:
                return v
        raise KeyError(var)

    def set(self, var: str, value: Sign) -> "SignEnv":
        m = self.mapping()
        if var not in m:
            raise KeyError(var)
        m[var] = value
        return SignEnv.make(m)

    def leq(self, other: "SignEnv") -> bool:
        if self.is_bottom:
            return True
        if other.is_bottom:
            return False
        om = other.mapping()
        return all(sign_leq(v, om[k]) for k, v in self.items)

    def join(self, other: "SignEnv") -> "SignEnv":
        if self.is_bottom:
            return other
        if other.is_bottom:
            return self
        om = other.mapping()
        return SignEnv.make({k: sign_join(v, om[k]) for k, v in self.items})

    def contains_env(self, env: dict[str, int]) -> bool:
        return all(sign_gamma(v).contains(env[k]) for k, v in self.items)

    def __str__(self) -> str:
        if self.is_bottom:
            return "bot"
        return "{" + ",".join(f"{k}={v}" for k, v in self.items) + "}"


def eval_sign(e: Expr, env: SignEnv) -> Sign:
    """Sign evaluation; function calls degrade to top (summaries are an
    interval-domain feature)."""
    if env.is_bottom:
        return _B
    match e:
        case Const(v):
            return sign_of(v)
        case Var(name):
            return env.get(name)
        case BinOp(op, l, r):
            a, b = eval_sign(l, env), eval_sign(r, env)
            if op == "+":
                return sign_add(a, b)
            if op == "-":
                return sign_sub(a, b)
            return sign_mul(a, b)
        case Call(_, arg):
            return _B if eval_sign(arg, env) is _B else _T
        case IfExpr(c, t, o):
            t_env = filter_sign(c, env)
            o_env = filter_sign(negate(c), env)
            out = _B
            if not t_env.is_bottom:
                out = sign_join(out, eval_sign(t, t_env))
            if not o_env.is_bottom:
                out = sign_join(out, eval_sign(o, o_env))
            return out
    raise TypeError(e)


def _sign_of_halfline(op: str, c: int) -> Sign:
    """Best sign abstraction of {x : x op c}."""
    if op in ("<", "<="):
        bound = c - 1 if op == "<" else c
        if bound < 0:
            return _N
        if bound == 0:
            return sign_join(_N, _Z)  # top in this lattice
        return _T
    if op in (">", ">="):
        bound = c + 1 if op == ">" else c
        if bound > 0:
            return _P
        if bound == 0:
            return sign_join(_P, _Z)
        return _T
    if op == "=":
        return sign_of(c)
    return _T  # !=


def filter_sign(guard: BoolExpr, env: SignEnv) -> SignEnv:
    """Sound sign refinement; only variable-against-constant comparisons
    refine, everything else falls back to the unchanged environment."""
    if env.is_bottom:
        return env
    variables = [k for k, _ in env.items]
    match guard:
        case BoolConst(v):
            return env if v else SignEnv.bottom(variables)
        case Not(inner):
            return filter_sign(negate(inner), env)
        case And(l, r):
            return filter_sign(r, filter_sign(l, env))
        case Or(l, r):
            return filter_sign(l, env).join(filter_sign(r, env))
        case Cmp(op, Var(name), Const(c)):
            refined = sign_meet(env.get(name), _sign_of_halfline(op, c))
            return env.set(name, refined)
        case Cmp():
            return env
    raise TypeError(guard)
