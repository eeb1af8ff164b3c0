"""Canonicalization of boolean expressions over integers.

Used to compare predicates for syntactic distinctness and to tidy the
weakest preconditions the refiner produces: constants fold, negation is
pushed to the comparisons, and single-variable linear comparisons settle
into "var <= c" / "var >= c" / "var = c" shape (so e.g. x+1 <= 50 becomes
x <= 49).
"""

from __future__ import annotations

from .mil import (
    And, BinOp, BoolConst, BoolExpr, Call, Cmp, Const, Expr, IfExpr, Not, Or,
    Var, negate, render_bexpr,
)


def _fold(e: Expr) -> Expr:
    match e:
        case Const() | Var():
            return e
        case BinOp(op, l, r):
            lf, rf = _fold(l), _fold(r)
            if isinstance(lf, Const) and isinstance(rf, Const):
                if op == "+":
                    return Const(lf.value + rf.value)
                if op == "-":
                    return Const(lf.value - rf.value)
                return Const(lf.value * rf.value)
            return BinOp(op, lf, rf)
        case Call(f, a):
            return Call(f, _fold(a))
        case IfExpr(c, t, o):
            return IfExpr(normalize_bexpr(c), _fold(t), _fold(o))
    raise TypeError(e)


def _linear(e: Expr) -> tuple[str, int] | None:
    """Recognize e = var + offset for a single variable."""
    match e:
        case Var(name):
            return (name, 0)
        case BinOp("+", sub, Const(c)):
            lin = _linear(sub)
            return None if lin is None else (lin[0], lin[1] + c)
        case BinOp("+", Const(c), sub):
            lin = _linear(sub)
            return None if lin is None else (lin[0], lin[1] + c)
        case BinOp("-", sub, Const(c)):
            lin = _linear(sub)
            return None if lin is None else (lin[0], lin[1] - c)
    return None


def _norm_cmp(op: str, left: Expr, right: Expr) -> BoolExpr:
    left, right = _fold(left), _fold(right)
    if isinstance(left, Const) and isinstance(right, Const):
        a, b = left.value, right.value
        return BoolConst({"<": a < b, "<=": a <= b, "=": a == b,
                          "!=": a != b, ">=": a >= b, ">": a > b}[op])
    # put the variable side on the left
    if isinstance(right, (Var, BinOp)) and _linear(right) is not None \
            and isinstance(left, Const):
        flip = {"<": ">", "<=": ">=", ">": "<", ">=": "<=", "=": "=", "!=": "!="}
        op, left, right = flip[op], right, left
    lin = _linear(left)
    if lin is not None and isinstance(right, Const):
        var, offset = lin
        c = right.value - offset
        if op == "<":
            return Cmp("<=", Var(var), Const(c - 1))
        if op == ">":
            return Cmp(">=", Var(var), Const(c + 1))
        return Cmp(op, Var(var), Const(c))
    return Cmp(op, left, right)


def normalize_bexpr(b: BoolExpr) -> BoolExpr:
    match b:
        case BoolConst():
            return b
        case Cmp(op, l, r):
            return _norm_cmp(op, l, r)
        case Not(e):
            return normalize_bexpr(negate(e))
        case And(l, r):
            lf, rf = normalize_bexpr(l), normalize_bexpr(r)
            if lf == BoolConst(False) or rf == BoolConst(False):
                return BoolConst(False)
            if lf == BoolConst(True):
                return rf
            if rf == BoolConst(True):
                return lf
            return And(lf, rf)
        case Or(l, r):
            lf, rf = normalize_bexpr(l), normalize_bexpr(r)
            if lf == BoolConst(True) or rf == BoolConst(True):
                return BoolConst(True)
            if lf == BoolConst(False):
                return rf
            if rf == BoolConst(False):
                return lf
            return Or(lf, rf)
    raise TypeError(b)


def pred_key(b: BoolExpr) -> str:
    """Canonical comparison key for predicate distinctness."""
    return render_bexpr(normalize_bexpr(b))


def is_constant(b: BoolExpr) -> bool:
    return isinstance(normalize_bexpr(b), BoolConst)
