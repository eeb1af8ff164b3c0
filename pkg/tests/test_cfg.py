import pytest
from hypothesis import given, settings

from absint.cfg import (
    ENTRY, ERROR, EXIT, Assume, Cfg, CfgError, SkipCmd, loop_heads,
    lower_to_cfg, reverse_postorder,
)
from absint.mil import Cmp, Const, Not, Var, parse_program
from helpers import programs


def test_empty_body_is_skip_edge():
    cfg = lower_to_cfg(parse_program("var x; skip;"))
    assert any(isinstance(e.command, SkipCmd) and e.src == ENTRY
               for e in cfg.edges)
    cfg.check_invariants()


def test_while_structure():
    cfg = lower_to_cfg(parse_program("var x; x := 0; while x < 3 do x := x + 1; end"))
    heads = loop_heads(cfg)
    assert len(heads) == 1
    head = next(iter(heads))
    commands = [e.command for e in cfg.out_edges(head)]
    assert Assume(Cmp("<", Var("x"), Const(3))) in commands
    assert len([c for c in commands if isinstance(c, Assume)]) == 2
    cfg.check_invariants()


def test_assert_lowering():
    cfg = lower_to_cfg(parse_program("var x; x := 1; assert x >= 0;"))
    error_edges = [e for e in cfg.edges if e.dst == ERROR]
    assert len(error_edges) == 1
    assert isinstance(error_edges[0].command, Assume)
    cfg.check_invariants()


def test_entry_exit_error_degrees():
    cfg = lower_to_cfg(parse_program(
        "var x; x := 0; if x < 1 then x := 2; else skip; end assert x > 0;"))
    assert not cfg.in_edges(ENTRY)
    assert not cfg.out_edges(EXIT)
    assert not cfg.out_edges(ERROR)


def test_reverse_postorder_starts_at_entry():
    cfg = lower_to_cfg(parse_program("var x; x := 0; while x < 3 do x := x + 1; end"))
    rpo = reverse_postorder(cfg)
    assert rpo[0] == ENTRY
    assert set(rpo) >= set(cfg.nodes) - {ERROR, EXIT} | {ENTRY}


def test_nested_loops_two_heads():
    src = ("var i, j; i := 0; j := 0; while i < 3 do j := 0; "
           "while j < 3 do j := j + 1; end i := i + 1; end")
    cfg = lower_to_cfg(parse_program(src))
    assert len(loop_heads(cfg)) == 2


@given(programs)
@settings(max_examples=150, deadline=None)
def test_lowering_preserves_invariants(p):
    cfg = lower_to_cfg(p)
    cfg.check_invariants()
    assert not cfg.in_edges(ENTRY)
    assert not cfg.out_edges(EXIT)
    assert not cfg.out_edges(ERROR)
