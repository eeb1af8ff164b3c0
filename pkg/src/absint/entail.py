"""A sound, incomplete implication checker over quantifier-free integer
formulas.

Three layers, in order: syntactic normalization, interval constraint
propagation (proves validity), and a deterministic finite witness search
over formula-derived candidate points inside a box [-B..B] (proves
invalidity).  When neither side lands the answer is "unknown", which callers
must treat as possibly-invalid; that keeps every consumer over-approximating.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

from .concrete import eval_bexpr
from .intervals import IntervalEnv, filter_abstract, eval_abstract, _cmp_definitely
from .mil import (
    And, BinOp, BoolConst, BoolExpr, Cmp, Const, Expr, Not, Or, Var,
    bexpr_vars, negate, render_bexpr,
)

DEFAULT_WITNESS_BOX = 200
_MAX_WITNESS_COMBOS = 20_000
_PROPAGATION_ROUNDS = 3


@dataclass(frozen=True)
class Entailment:
    status: str  # "valid" | "invalid" | "unknown"
    witness: dict[str, int] | None = None

    @property
    def is_valid(self) -> bool:
        return self.status == "valid"


VALID = Entailment("valid")
UNKNOWN = Entailment("unknown")


def refine_by(formula: BoolExpr, variables: list[str]) -> IntervalEnv:
    """Interval envelope of the formula's models; repeated filtering lets
    conjuncts sharpen each other."""
    env = IntervalEnv.top(variables)
    for _ in range(_PROPAGATION_ROUNDS):
        new = filter_abstract(formula, env)
        if new == env:
            break
        env = new
    return env


def is_unsat(formula: BoolExpr, variables: list[str] | None = None) -> bool:
    """True only when interval propagation proves the formula has no model."""
    if variables is None:
        variables = sorted(bexpr_vars(formula))
    if not variables:
        variables = ["_x"]
    return refine_by(formula, variables).is_bottom


def definitely(formula: BoolExpr, env: IntervalEnv) -> bool | None:
    """Three-valued truth of a formula over an interval environment."""
    if env.is_bottom:
        return None
    match formula:
        case BoolConst(v):
            return v
        case Cmp(op, l, r):
            return _cmp_definitely(op, eval_abstract(l, env), eval_abstract(r, env))
        case Not(e):
            r = definitely(e, env)
            return None if r is None else not r
        case And(l, r):
            a, b = definitely(l, env), definitely(r, env)
            if a is False or b is False:
                return False
            if a is True and b is True:
                return True
            return None
        case Or(l, r):
            a, b = definitely(l, env), definitely(r, env)
            if a is True or b is True:
                return True
            if a is False and b is False:
                return False
            return None
    raise TypeError(formula)


def _constants(e: Expr, out: set[int]) -> None:
    match e:
        case Const(v):
            out.add(v)
        case Var():
            pass
        case BinOp(_, l, r):
            _constants(l, out)
            _constants(r, out)
        case _:
            pass


def _bool_constants(b: BoolExpr, out: set[int]) -> None:
    match b:
        case BoolConst():
            pass
        case Cmp(_, l, r):
            _constants(l, out)
            _constants(r, out)
        case Not(e):
            _bool_constants(e, out)
        case And(l, r) | Or(l, r):
            _bool_constants(l, out)
            _bool_constants(r, out)


def _candidates(formulas: list[BoolExpr], box: int) -> list[int]:
    consts: set[int] = {0, 1, -1, box, -box}
    for f in formulas:
        _bool_constants(f, consts)
    points: set[int] = set()
    for c in consts:
        for d in (c - 1, c, c + 1):
            if -box <= d <= box:
                points.add(d)
    return sorted(points)


def entails(antecedent: BoolExpr, consequent: BoolExpr,
            box: int = DEFAULT_WITNESS_BOX) -> Entailment:
    """Decide antecedent implies consequent, soundly and incompletely.

    "valid" only when propagation proves it for all integers; "invalid"
    always carries a concrete witness; otherwise "unknown".
    """
    variables = sorted(bexpr_vars(antecedent) | bexpr_vars(consequent))
    goal = And(antecedent, negate(consequent))
    if not variables:
        if eval_bexpr(goal, {}):
            return Entailment("invalid", witness={})
        variables = ["_x"]
    env = refine_by(antecedent, variables)
    if env.is_bottom:
        return VALID
    if definitely(consequent, env) is True:
        return VALID
    points = _candidates([antecedent, consequent], box)
    combos = len(points) ** len(variables)
    budget = min(combos, _MAX_WITNESS_COMBOS)
    count = 0
    for values in product(points, repeat=len(variables)):
        count += 1
        if count > budget:
            break
        assignment = dict(zip(variables, values))
        if eval_bexpr(goal, assignment):
            return Entailment("invalid", witness=assignment)
    return UNKNOWN


def render_entailment(antecedent: BoolExpr, consequent: BoolExpr, e: Entailment) -> str:
    base = f"{render_bexpr(antecedent)} => {render_bexpr(consequent)}: {e.status}"
    if e.witness is not None:
        w = ",".join(f"{k}={v}" for k, v in sorted(e.witness.items()))
        return f"{base} ({w})"
    return base
