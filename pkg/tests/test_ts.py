import pytest

from absint.ts import TransitionSystem, TsFormatError, parse_ts, serialize_ts


def _ts():
    return TransitionSystem(
        states=frozenset({"a", "b", "c"}),
        initial=frozenset({"a"}),
        alphabet=frozenset({"go", "stop"}),
        transitions=frozenset({("a", "go", "b"), ("b", "stop", "c")}),
    )


def test_round_trip_bit_exact():
    text = serialize_ts(_ts())
    assert serialize_ts(parse_ts(text)) == text


def test_serialization_is_sorted():
    lines = serialize_ts(_ts()).splitlines()
    assert lines[0] == "states: a b c"
    assert lines[1] == "initial: a"
    assert lines[2] == "alphabet: go stop"
    assert lines[3:] == ["a go b", "b stop c"]


def test_initial_must_be_states():
    with pytest.raises(TsFormatError):
        TransitionSystem(frozenset({"a"}), frozenset({"z"}),
                         frozenset(), frozenset())


def test_transition_endpoints_checked():
    with pytest.raises(TsFormatError):
        TransitionSystem(frozenset({"a"}), frozenset({"a"}),
                         frozenset({"go"}), frozenset({("a", "go", "zzz")}))


def test_label_outside_alphabet():
    with pytest.raises(TsFormatError):
        TransitionSystem(frozenset({"a"}), frozenset({"a"}),
                         frozenset(), frozenset({("a", "go", "a")}))


def test_parse_malformed():
    with pytest.raises(TsFormatError):
        parse_ts("states: a\ninitial: a\n")
    with pytest.raises(TsFormatError):
        parse_ts("states: a\ninitial: a\nalphabet: g\na g\n")


def test_reachable():
    ts = TransitionSystem(
        states=frozenset({"a", "b", "island"}),
        initial=frozenset({"a"}),
        alphabet=frozenset({"go"}),
        transitions=frozenset({("a", "go", "b")}),
    )
    assert ts.reachable() == {"a", "b"}
