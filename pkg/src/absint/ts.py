"""Explicit labeled transition systems and their text serialization.

The line-oriented format is bit-exact and shared by the concrete enumerator
and the refinement-checker CLI:

    states: s0 s1 ...
    initial: s0 ...
    alphabet: a b ...
    src label dst        (one triple per line, sorted lexicographically)

State ids and labels are whitespace-free tokens.
"""

from __future__ import annotations

from dataclasses import dataclass, field


class TsFormatError(Exception):
    pass


@dataclass
class TransitionSystem:
    states: frozenset[str]
    initial: frozenset[str]
    alphabet: frozenset[str]
    transitions: frozenset[tuple[str, str, str]]  # (src, label, dst)
    truncated: bool = False

    def __post_init__(self) -> None:
        if not self.initial <= self.states:
            raise TsFormatError("initial states outside state set")
        for src, label, dst in self.transitions:
            if src not in self.states or dst not in self.states:
                raise TsFormatError(f"transition endpoint outside state set: {src} {label} {dst}")
            if label not in self.alphabet:
                raise TsFormatError(f"label outside alphabet: {label}")

    def successors(self, state: str) -> list[tuple[str, str]]:
        return sorted((label, dst) for src, label, dst in self.transitions if src == state)

    def reachable(self) -> set[str]:
        seen = set(self.initial)
        stack = sorted(self.initial)
        while stack:
            n = stack.pop()
            for _, m in self.successors(n):
                if m not in seen:
                    seen.add(m)
                    stack.append(m)
        return seen


def serialize_ts(ts: TransitionSystem) -> str:
    lines = [
        "states: " + " ".join(sorted(ts.states)),
        "initial: " + " ".join(sorted(ts.initial)),
        "alphabet: " + " ".join(sorted(ts.alphabet)),
    ]
    lines.extend(f"{s} {a} {d}" for s, a, d in sorted(ts.transitions))
    return "\n".join(lines) + "\n"


def parse_ts(text: str) -> TransitionSystem:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if len(lines) < 3:
        raise TsFormatError("expected states/initial/alphabet header lines")
    header: dict[str, list[str]] = {}
    for i, key in enumerate(("states", "initial", "alphabet")):
        prefix = key + ":"
        if not lines[i].startswith(prefix):
            raise TsFormatError(f"line {i + 1}: expected {prefix!r}")
        header[key] = lines[i][len(prefix):].split()
    transitions = []
    for ln in lines[3:]:
        parts = ln.split()
        if len(parts) != 3:
            raise TsFormatError(f"malformed transition line: {ln!r}")
        transitions.append(tuple(parts))
    return TransitionSystem(
        states=frozenset(header["states"]),
        initial=frozenset(header["initial"]),
        alphabet=frozenset(header["alphabet"]),
        transitions=frozenset(transitions),
    )
