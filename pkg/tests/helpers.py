"""Shared test utilities: corpus loading and hypothesis generators."""

from __future__ import annotations

import json
from pathlib import Path

import hypothesis.strategies as st

from absint.cfg import Cfg, lower_to_cfg
from absint.mil import (
    And, Assert, Assign, BinOp, BoolConst, Cmp, Const, If, Not, Or, Program,
    Skip, Var, While, parse_program,
)

CORPUS_DIR = Path(__file__).parent / "corpus"


def load_corpus() -> list[tuple[str, Program, Cfg, dict[str, tuple[int, int]]]]:
    """All manifest programs with their initial ranges."""
    manifest = json.loads((CORPUS_DIR / "manifest.json").read_text())
    out = []
    for name in sorted(manifest):
        program = parse_program((CORPUS_DIR / name).read_text(), name=name)
        ranges = {v: tuple(r) for v, r in manifest[name].items()}
        out.append((name, program, lower_to_cfg(program), ranges))
    return out


def load_program(name: str) -> tuple[Program, Cfg]:
    program = parse_program((CORPUS_DIR / name).read_text(), name=name)
    return program, lower_to_cfg(program)


# ---------------------------------------------------------------------------
# Random program generation
# ---------------------------------------------------------------------------

GEN_VARS = ("x", "y")

exprs = st.recursive(
    st.integers(-9, 9).map(Const) | st.sampled_from(GEN_VARS).map(Var),
    lambda ch: st.tuples(st.sampled_from("+-*"), ch, ch).map(
        lambda t: BinOp(t[0], t[1], t[2])),
    max_leaves=5,
)

_cmps = st.tuples(st.sampled_from(("<", "<=", "=", "!=", ">=", ">")),
                  exprs, exprs).map(lambda t: Cmp(t[0], t[1], t[2]))

bexprs = st.recursive(
    st.booleans().map(BoolConst) | _cmps,
    lambda ch: ch.map(Not)
    | st.tuples(ch, ch).map(lambda t: And(t[0], t[1]))
    | st.tuples(ch, ch).map(lambda t: Or(t[0], t[1])),
    max_leaves=4,
)

_assigns = st.tuples(st.sampled_from(GEN_VARS), exprs).map(
    lambda t: Assign(t[0], t[1]))


def _compound(children: st.SearchStrategy) -> st.SearchStrategy:
    bodies = st.lists(children, min_size=0, max_size=3)
    return (
        st.tuples(bexprs, bodies, bodies).map(lambda t: If(t[0], t[1], t[2]))
        | st.tuples(bexprs, bodies).map(lambda t: While(t[0], t[1]))
    )


stmts = st.recursive(
    _assigns | st.just(Skip()) | bexprs.map(Assert),
    _compound,
    max_leaves=6,
)

programs = st.lists(stmts, min_size=0, max_size=5).map(
    lambda body: Program(name="gen", vars=list(GEN_VARS), body=body))
