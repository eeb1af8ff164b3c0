"""Control-flow graphs for MIL programs.

Nodes are program-point ids; edges carry guarded assignments.  Lowering turns
structured statements into assume-guarded edge pairs: an `if` becomes two
edges guarded by the condition and its negation, a `while` becomes a loop
head with a guarded back-edge body, and `assert c` becomes an edge
`assume(not c)` into the distinguished error node next to the `assume(c)`
continuation.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .mil import (
    Assert, Assign, BoolConst, BoolExpr, Expr, If, Program, Skip, Stmt, While,
    compact_bexpr, compact_expr, negate,
)

ENTRY = "entry"
EXIT = "exit"
ERROR = "error"


@dataclass(frozen=True)
class Assume:
    cond: BoolExpr


@dataclass(frozen=True)
class AssignCmd:
    var: str
    expr: Expr


@dataclass(frozen=True)
class SkipCmd:
    pass


Command = Assume | AssignCmd | SkipCmd


def render_command(cmd: Command) -> str:
    """Space-free label for a command, stable across runs."""
    match cmd:
        case Assume(c):
            return f"assume({compact_bexpr(c)})"
        case AssignCmd(v, e):
            return f"{v}:={compact_expr(e)}"
        case SkipCmd():
            return "skip"
    raise TypeError(cmd)


@dataclass(frozen=True)
class Edge:
    src: str
    command: Command
    dst: str


class CfgError(Exception):
    pass


@dataclass
class Cfg:
    nodes: list[str]
    edges: list[Edge]
    var_order: list[str]
    functions: dict = field(default_factory=dict)  # name -> FunDef

    def out_edges(self, node: str) -> list[Edge]:
        return [e for e in self.edges if e.src == node]

    def in_edges(self, node: str) -> list[Edge]:
        return [e for e in self.edges if e.dst == node]

    def check_invariants(self) -> None:
        node_set = set(self.nodes)
        for e in self.edges:
            if e.src not in node_set or e.dst not in node_set:
                raise CfgError(f"edge endpoint outside node set: {e}")
        if self.in_edges(ENTRY):
            raise CfgError("entry node has incoming edges")
        for sink in (EXIT, ERROR):
            if self.out_edges(sink):
                raise CfgError(f"{sink} node has outgoing edges")
        # all nodes except entry and the distinguished sinks must be reachable
        succ: dict[str, list[str]] = {}
        for e in self.edges:
            succ.setdefault(e.src, []).append(e.dst)
        seen = {ENTRY}
        stack = [ENTRY]
        while stack:
            n = stack.pop()
            for m in succ.get(n, []):
                if m not in seen:
                    seen.add(m)
                    stack.append(m)
        for n in self.nodes:
            if n not in seen and n not in (ENTRY, EXIT, ERROR):
                raise CfgError(f"unreachable node {n}")


def lower_to_cfg(p: Program) -> Cfg:
    """Lower a checked Program to its control-flow graph."""
    nodes = [ENTRY, EXIT, ERROR]
    edges: list[Edge] = []
    counter = 0

    def fresh() -> str:
        nonlocal counter
        counter += 1
        n = f"n{counter}"
        nodes.append(n)
        return n

    def lower_seq(stmts: list[Stmt], src: str, dst: str) -> None:
        if not stmts:
            edges.append(Edge(src, SkipCmd(), dst))
            return
        cur = src
        for i, s in enumerate(stmts):
            tgt = dst if i == len(stmts) - 1 else fresh()
            lower_stmt(s, cur, tgt)
            cur = tgt

    def lower_branch(stmts: list[Stmt], guard: BoolExpr, src: str, dst: str) -> None:
        if not stmts:
            edges.append(Edge(src, Assume(guard), dst))
        else:
            mid = fresh()
            edges.append(Edge(src, Assume(guard), mid))
            lower_seq(stmts, mid, dst)

    def lower_stmt(s: Stmt, src: str, dst: str) -> None:
        match s:
            case Assign(var, e):
                edges.append(Edge(src, AssignCmd(var, e), dst))
            case Skip():
                edges.append(Edge(src, SkipCmd(), dst))
            case Assert(c):
                edges.append(Edge(src, Assume(negate(c)), ERROR))
                edges.append(Edge(src, Assume(c), dst))
            case If(c, then, orelse):
                lower_branch(then, c, src, dst)
                lower_branch(orelse, negate(c), src, dst)
            case While(c, body):
                # the loop head collects the back edge, so it can never be entry
                head = src
                if src == ENTRY:
                    head = fresh()
                    edges.append(Edge(src, SkipCmd(), head))
                edges.append(Edge(head, Assume(negate(c)), dst))
                if not body:
                    edges.append(Edge(head, Assume(c), head))
                else:
                    mid = fresh()
                    edges.append(Edge(head, Assume(c), mid))
                    lower_seq(body, mid, head)
            case _:
                raise TypeError(s)

    lower_seq(p.body, ENTRY, EXIT)
    cfg = Cfg(nodes=nodes, edges=edges, var_order=list(p.vars),
              functions={f.name: f for f in p.functions})
    cfg.check_invariants()
    return cfg


def loop_heads(cfg: Cfg) -> set[str]:
    """Back-edge targets under a depth-first numbering from entry."""
    succ: dict[str, list[str]] = {}
    for e in cfg.edges:
        succ.setdefault(e.src, []).append(e.dst)
    heads: set[str] = set()
    color: dict[str, int] = {}  # 0 absent, 1 on stack, 2 done

    def dfs(start: str) -> None:
        stack: list[tuple[str, int]] = [(start, 0)]
        color[start] = 1
        while stack:
            node, i = stack.pop()
            succs = sorted(succ.get(node, []))
            if i < len(succs):
                stack.append((node, i + 1))
                m = succs[i]
                c = color.get(m, 0)
                if c == 0:
                    color[m] = 1
                    stack.append((m, 0))
                elif c == 1:
                    heads.add(m)
            else:
                color[node] = 2

    dfs(ENTRY)
    return heads


def reverse_postorder(cfg: Cfg) -> list[str]:
    succ: dict[str, list[str]] = {}
    for e in cfg.edges:
        succ.setdefault(e.src, []).append(e.dst)
    order: list[str] = []
    seen: set[str] = set()

    def dfs(start: str) -> None:
        stack: list[tuple[str, int]] = [(start, 0)]
        seen.add(start)
        while stack:
            node, i = stack.pop()
            succs = sorted(succ.get(node, []))
            if i < len(succs):
                stack.append((node, i + 1))
                m = succs[i]
                if m not in seen:
                    seen.add(m)
                    stack.append((m, 0))
            else:
                order.append(node)

    dfs(ENTRY)
    order.reverse()
    for n in cfg.nodes:
        if n not in seen:
            order.append(n)
    return order
