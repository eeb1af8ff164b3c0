import random

from hypothesis import given, settings
import hypothesis.strategies as st

from absint.concrete import eval_bexpr
from absint.entail import entails, is_unsat, refine_by
from absint.mil import And, parse_bexpr
from helpers import bexprs


def test_valid_by_intervals():
    assert entails(parse_bexpr("x > 100"), parse_bexpr("x > 0")).is_valid
    assert entails(parse_bexpr("x >= 5 and x <= 7"),
                   parse_bexpr("x >= 0")).is_valid


def test_invalid_with_witness():
    e = entails(parse_bexpr("x > 0"), parse_bexpr("x > 100"))
    assert e.status == "invalid"
    x = e.witness["x"]
    assert x > 0 and not x > 100


def test_nonlinear_is_unknown():
    # documented backend boundary: the interval backend cannot prove x*x >= 0
    e = entails(parse_bexpr("true"), parse_bexpr("x * x >= 0"))
    assert e.status == "unknown"


def test_closed_formulas():
    assert entails(parse_bexpr("true"), parse_bexpr("1 < 2")).is_valid
    e = entails(parse_bexpr("true"), parse_bexpr("2 < 1"))
    assert e.status == "invalid" and e.witness == {}


def test_contradictory_antecedent_is_valid():
    assert entails(parse_bexpr("x > 100 and x <= 50"),
                   parse_bexpr("x = 42")).is_valid


def test_is_unsat():
    assert is_unsat(parse_bexpr("x > 100 and x <= 50"))
    assert not is_unsat(parse_bexpr("x > 100"))
    assert not is_unsat(parse_bexpr("x * x < 0"))  # nonlinear: can't prove


def test_refine_by_propagates_conjuncts():
    env = refine_by(parse_bexpr("x >= 0 and x <= 10 and y = x + 1"), ["x", "y"])
    assert env.get("x").lo == 0 and env.get("x").hi == 10
    assert env.get("y").hi <= 11


def test_multi_variable_witness():
    e = entails(parse_bexpr("x > y"), parse_bexpr("x > y + 5"))
    assert e.status == "invalid"
    assert e.witness["x"] > e.witness["y"]
    assert not e.witness["x"] > e.witness["y"] + 5


@given(bexprs, bexprs, st.integers(0, 10**6))
@settings(max_examples=300, deadline=None)
def test_valid_never_refuted(antecedent, consequent, seed):
    # soundness: a "valid" verdict survives random assignment search
    if not entails(antecedent, consequent).is_valid:
        return
    rng = random.Random(seed)
    for _ in range(50):
        env = {"x": rng.randint(-100, 100), "y": rng.randint(-100, 100)}
        if eval_bexpr(antecedent, env):
            assert eval_bexpr(consequent, env), env


@given(bexprs)
@settings(max_examples=200, deadline=None)
def test_unsat_never_satisfied(b):
    if not is_unsat(b):
        return
    rng = random.Random(0)
    for _ in range(100):
        env = {"x": rng.randint(-50, 50), "y": rng.randint(-50, 50)}
        assert not eval_bexpr(b, env), env
