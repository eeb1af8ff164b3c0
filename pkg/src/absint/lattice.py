"""Lattice and abstraction-map contracts shared by the abstract domains.

Every domain supplies a `LatticeOps` bundle (order, join/meet, widening and
narrowing) and an abstraction/concretization pair.  Concretization returns a
set *descriptor* - a membership test plus an enumerator that is only defined
for finite images - because most abstract elements describe infinite sets.

The harness functions check the connection laws, the widening laws and the
narrowing laws on supplied samples and report the first counterexample per
failing law.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Iterator


@dataclass
class SetDescriptor:
    contains: Callable[[int], bool]
    enumerate: Callable[[], Iterator[int]] | None = None

    @property
    def finite(self) -> bool:
        return self.enumerate is not None


@dataclass
class LatticeOps:
    name: str
    bottom: Any
    top: Any
    leq: Callable[[Any, Any], bool]
    join: Callable[[Any, Any], Any]
    meet: Callable[[Any, Any], Any]
    widen: Callable[[Any, Any], Any]
    narrow: Callable[[Any, Any], Any]
    render: Callable[[Any], str] = str


@dataclass
class GaloisConnection:
    name: str
    ops: LatticeOps
    alpha: Callable[[frozenset[int]], Any]
    gamma: Callable[[Any], SetDescriptor]


@dataclass
class LawCheck:
    law: str
    domain: str
    sample: str
    status: str  # "pass" | "fail" | "skipped"
    witness: str | None = None

    def to_json(self) -> dict:
        out = {"law": self.law, "domain": self.domain,
               "sample": self.sample, "status": self.status}
        if self.witness is not None:
            out["witness"] = self.witness
        return out


def _sample_id(c: frozenset[int]) -> str:
    return "{" + ",".join(str(x) for x in sorted(c)) + "}"


def check_galois(gc: GaloisConnection, samples: Iterable[frozenset[int]]) -> list[LawCheck]:
    """Check extensivity of gamma.alpha and reductivity-as-identity of
    alpha.gamma on finite samples."""
    reports: list[LawCheck] = []
    for c in samples:
        sid = _sample_id(c)
        a = gc.alpha(c)
        desc = gc.gamma(a)
        missing = sorted(x for x in c if not desc.contains(x))
        reports.append(LawCheck(
            law="gamma(alpha(c)) superset of c", domain=gc.name, sample=sid,
            status="fail" if missing else "pass",
            witness=f"missing {missing[0]}" if missing else None))
        if desc.finite:
            back = gc.alpha(frozenset(desc.enumerate()))
            ok = back == a
            reports.append(LawCheck(
                law="alpha(gamma(a)) = a", domain=gc.name, sample=sid,
                status="pass" if ok else "fail",
                witness=None if ok else
                f"alpha(gamma({gc.ops.render(a)})) = {gc.ops.render(back)}"))
        else:
            reports.append(LawCheck(
                law="alpha(gamma(a)) = a", domain=gc.name, sample=sid,
                status="skipped",
                witness="gamma image not enumerable; membership law still checked"))
    return reports


def check_widening_laws(ops: LatticeOps, pairs: Iterable[tuple[Any, Any]]) -> list[LawCheck]:
    """Per pair (x, y): x and y and their join lie below x widen y, and
    bottom is a two-sided identity."""
    reports: list[LawCheck] = []
    for x, y in pairs:
        sid = f"({ops.render(x)},{ops.render(y)})"
        w = ops.widen(x, y)
        checks = [
            ("x below x widen y", ops.leq(x, w)),
            ("y below x widen y", ops.leq(y, w)),
            ("join(x,y) below x widen y", ops.leq(ops.join(x, y), w)),
            ("bottom widen x = x", ops.widen(ops.bottom, x) == x),
            ("x widen bottom = x", ops.widen(x, ops.bottom) == x),
        ]
        for law, ok in checks:
            reports.append(LawCheck(
                law=law, domain=ops.name, sample=sid,
                status="pass" if ok else "fail",
                witness=None if ok else f"widen = {ops.render(w)}"))
    return reports


def check_narrowing_laws(ops: LatticeOps, pairs: Iterable[tuple[Any, Any]]) -> list[LawCheck]:
    """Per pair with y below x: y below (x narrow y) below x; other pairs
    are skipped, narrowing's precondition excludes them."""
    reports: list[LawCheck] = []
    for x, y in pairs:
        sid = f"({ops.render(x)},{ops.render(y)})"
        if not ops.leq(y, x):
            reports.append(LawCheck(
                law="y below (x narrow y) below x", domain=ops.name, sample=sid,
                status="skipped", witness="pair not ordered"))
            continue
        n = ops.narrow(x, y)
        ok = ops.leq(y, n) and ops.leq(n, x)
        reports.append(LawCheck(
            law="y below (x narrow y) below x", domain=ops.name, sample=sid,
            status="pass" if ok else "fail",
            witness=None if ok else f"narrow = {ops.render(n)}"))
    return reports


def all_pass(reports: list[LawCheck]) -> bool:
    return all(r.status != "fail" for r in reports)
