"""Correctness checks for action refinement between transition systems.

A refined system TS2 implements an abstract system TS1 when (a) TS2 is
simulated by TS1 with the refined-only actions treated as internal stutter
steps, (b) those internal actions admit no cycle, and (c) refinement
introduces no new deadlock.  The simulation is the greatest one, computed by
iterated removal of non-simulating pairs.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .ts import TransitionSystem


@dataclass
class RefinementInstance:
    abstract_ts: TransitionSystem      # TS1
    refined_ts: TransitionSystem       # TS2
    old_actions: frozenset[str]        # shared alphabet
    new_actions: frozenset[str]        # refined-only, treated as internal
    gluing: dict[str, str] | None = None  # TS2 state -> required TS1 state

    def validate(self) -> list[str]:
        problems = []
        if self.old_actions & self.new_actions:
            problems.append("old and new action sets overlap: "
                            + ",".join(sorted(self.old_actions & self.new_actions)))
        stray = self.refined_ts.alphabet - self.old_actions - self.new_actions
        if stray:
            problems.append("refined alphabet has unclassified actions: "
                            + ",".join(sorted(stray)))
        if not self.abstract_ts.alphabet <= self.old_actions:
            extra = self.abstract_ts.alphabet - self.old_actions
            problems.append("abstract alphabet uses non-old actions: "
                            + ",".join(sorted(extra)))
        if self.gluing is not None:
            for q2, q1 in sorted(self.gluing.items()):
                if q2 not in self.refined_ts.states:
                    problems.append(f"gluing maps unknown refined state {q2!r}")
                if q1 not in self.abstract_ts.states:
                    problems.append(f"gluing targets unknown abstract state {q1!r}")
        return problems


def compute_simulation(inst: RefinementInstance) -> set[tuple[str, str]]:
    """Greatest stuttering simulation: pairs (q2, q1) such that every old
    move of q2 is matched by q1 and every new (internal) move of q2 keeps
    the same abstract partner."""
    ts1, ts2 = inst.abstract_ts, inst.refined_ts
    pairs = {(q2, q1) for q2 in ts2.states for q1 in ts1.states}
    if inst.gluing is not None:
        pairs = {(q2, q1) for q2, q1 in pairs
                 if inst.gluing.get(q2) in (None, q1)}

    succ1: dict[tuple[str, str], set[str]] = {}
    for s, a, t in ts1.transitions:
        succ1.setdefault((s, a), set()).add(t)
    succ2: dict[str, list[tuple[str, str]]] = {}
    for s, a, t in ts2.transitions:
        succ2.setdefault(s, []).append((a, t))

    changed = True
    while changed:
        changed = False
        for q2, q1 in sorted(pairs):
            ok = True
            for a, t2 in succ2.get(q2, []):
                if a in inst.new_actions:
                    # internal step: the abstract side stutters
                    if (t2, q1) not in pairs:
                        ok = False
                        break
                else:
                    if not any((t2, t1) in pairs
                               for t1 in succ1.get((q1, a), ())):
                        ok = False
                        break
            if not ok:
                pairs.discard((q2, q1))
                changed = True
    return pairs


def check_initial_coverage(inst: RefinementInstance,
                           sim: set[tuple[str, str]]) -> list[str]:
    """Every refined initial state must be simulated by some abstract
    initial state."""
    problems = []
    for q2 in sorted(inst.refined_ts.initial):
        if not any((q2, q1) in sim for q1 in inst.abstract_ts.initial):
            problems.append(q2)
    return problems


def check_no_tau_cycle(inst: RefinementInstance) -> list[str] | None:
    """Cycle of internal (new-action) transitions in TS2, or None."""
    adj: dict[str, list[str]] = {}
    for s, a, t in sorted(inst.refined_ts.transitions):
        if a in inst.new_actions:
            adj.setdefault(s, []).append(t)
    color: dict[str, int] = {}  # 0 in progress, 1 done
    stack_path: list[str] = []

    def dfs(u: str) -> list[str] | None:
        color[u] = 0
        stack_path.append(u)
        for v in adj.get(u, []):
            if color.get(v) == 0:
                return stack_path[stack_path.index(v):] + [v]
            if v not in color:
                cyc = dfs(v)
                if cyc is not None:
                    return cyc
        stack_path.pop()
        color[u] = 1
        return None

    for node in sorted(adj):
        if node not in color:
            cyc = dfs(node)
            if cyc is not None:
                return cyc
    return None


def _deadlocks(ts: TransitionSystem) -> set[str]:
    has_out = {s for s, _, _ in ts.transitions}
    return {s for s in ts.reachable() if s not in has_out}


def check_no_new_deadlock(inst: RefinementInstance,
                          sim: set[tuple[str, str]]) -> list[str]:
    """Reachable TS2 deadlocks not explained by a deadlocked simulating TS1
    state.  A deadlock with no simulating partner at all counts as new."""
    dead1 = _deadlocks(inst.abstract_ts)
    out = []
    for q2 in sorted(_deadlocks(inst.refined_ts)):
        partners = {q1 for (p2, q1) in sim if p2 == q2}
        if not partners or not (partners & dead1):
            out.append(q2)
    return out


@dataclass
class RefinementReport:
    ok: bool
    simulation_ok: bool
    no_tau_cycle: bool
    no_new_deadlock: bool
    problems: list[str] = field(default_factory=list)
    simulation_size: int = 0
    tau_cycle: list[str] | None = None
    new_deadlocks: list[str] = field(default_factory=list)
    uncovered_initial: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "simulation_ok": self.simulation_ok,
            "no_tau_cycle": self.no_tau_cycle,
            "no_new_deadlock": self.no_new_deadlock,
            "simulation_size": self.simulation_size,
            "problems": self.problems,
            "tau_cycle": self.tau_cycle,
            "new_deadlocks": self.new_deadlocks,
            "uncovered_initial": self.uncovered_initial,
        }


def check_refinement(inst: RefinementInstance) -> RefinementReport:
    problems = inst.validate()
    if problems:
        return RefinementReport(ok=False, simulation_ok=False,
                                no_tau_cycle=False, no_new_deadlock=False,
                                problems=problems)
    sim = compute_simulation(inst)
    uncovered = check_initial_coverage(inst, sim)
    cycle = check_no_tau_cycle(inst)
    new_dead = check_no_new_deadlock(inst, sim)
    report = RefinementReport(
        ok=not uncovered and cycle is None and not new_dead,
        simulation_ok=not uncovered,
        no_tau_cycle=cycle is None,
        no_new_deadlock=not new_dead,
        simulation_size=len(sim),
        tau_cycle=cycle,
        new_deadlocks=new_dead,
        uncovered_initial=uncovered,
    )
    return report
