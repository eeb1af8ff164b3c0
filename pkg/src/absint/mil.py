"""MIL, a minimal imperative integer language.

AST types, lexer, recursive-descent parser, pretty printer, and predicate
parsing.  Grammar:

    program  := "var" ident ("," ident)* ";" (fundef)* stmt*
    fundef   := "fun" ident "(" ident ")" "=" expr ";"
    stmt     := ident ":=" expr ";" | "if" bexpr "then" stmt* ("else" stmt*)? "end"
              | "while" bexpr "do" stmt* "end" | "assert" bexpr ";" | "skip" ";"
    expr     := integer | ident | ident "(" expr ")" | expr ("+"|"-"|"*") expr
              | "(" expr ")" | "-" expr | "if" bexpr "then" expr "else" expr
    bexpr    := expr ("<"|"<="|"="|"!="|">="|">") expr | "not" bexpr
              | bexpr ("and"|"or") bexpr | "true" | "false" | "(" bexpr ")"

Comments run from "#" to end of line.  Unary minus and conditional
expressions go beyond the statement sketch; conditional expressions are what
make single-expression recursive function bodies (the F91 shape) writable.
"""

from __future__ import annotations

from dataclasses import dataclass, field


class MilError(Exception):
    """Base class for frontend errors."""

    def __init__(self, message: str, line: int | None = None, col: int | None = None):
        self.message = message
        self.line = line
        self.col = col
        where = f" at {line}:{col}" if line is not None else ""
        super().__init__(f"{message}{where}")


class ParseError(MilError):
    pass


class DuplicateNameError(MilError):
    pass


class UndeclaredVariableError(MilError):
    pass


# ---------------------------------------------------------------------------
# AST
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Const:
    value: int


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class BinOp:
    op: str  # one of + - *
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Call:
    fn: str
    arg: "Expr"


@dataclass(frozen=True)
class IfExpr:
    cond: "BoolExpr"
    then: "Expr"
    orelse: "Expr"


Expr = Const | Var | BinOp | Call | IfExpr


@dataclass(frozen=True)
class BoolConst:
    value: bool


@dataclass(frozen=True)
class Cmp:
    op: str  # one of < <= = != >= >
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Not:
    expr: "BoolExpr"


@dataclass(frozen=True)
class And:
    left: "BoolExpr"
    right: "BoolExpr"


@dataclass(frozen=True)
class Or:
    left: "BoolExpr"
    right: "BoolExpr"


BoolExpr = BoolConst | Cmp | Not | And | Or


@dataclass
class Assign:
    var: str
    expr: Expr


@dataclass
class If:
    cond: BoolExpr
    then: list["Stmt"]
    orelse: list["Stmt"]


@dataclass
class While:
    cond: BoolExpr
    body: list["Stmt"]


@dataclass
class Assert:
    cond: BoolExpr


@dataclass
class Skip:
    pass


Stmt = Assign | If | While | Assert | Skip


@dataclass
class FunDef:
    name: str
    param: str
    body: Expr


@dataclass
class Program:
    name: str
    vars: list[str]
    init: list[tuple[str, int]] = field(default_factory=list)
    body: list[Stmt] = field(default_factory=list)
    functions: list[FunDef] = field(default_factory=list)

    def function(self, name: str) -> FunDef | None:
        for f in self.functions:
            if f.name == name:
                return f
        return None


@dataclass(frozen=True)
class Predicate:
    text: str
    expr: BoolExpr
    id: int


# ---------------------------------------------------------------------------
# Lexer
# ---------------------------------------------------------------------------

KEYWORDS = {
    "var", "fun", "if", "then", "else", "end", "while", "do",
    "assert", "skip", "not", "and", "or", "true", "false",
}

_SYMBOLS = [":=", "<=", ">=", "!=", "<", ">", "=", "+", "-", "*", "(", ")", ",", ";"]


@dataclass(frozen=True)
class Token:
    kind: str  # INT, IDENT, KW, SYM, EOF
    value: str
    line: int
    col: int


def tokenize(source: str) -> list[Token]:
    tokens: list[Token] = []
    line, col = 1, 1
    i = 0
    n = len(source)
    while i < n:
        c = source[i]
        if c == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if c in " \t\r":
            i += 1
            col += 1
            continue
        if c == "#":
            while i < n and source[i] != "\n":
                i += 1
            continue
        if c.isdigit():
            start = i
            while i < n and source[i].isdigit():
                i += 1
            tokens.append(Token("INT", source[start:i], line, col))
            col += i - start
            continue
        if c.isalpha() or c == "_":
            start = i
            while i < n and (source[i].isalnum() or source[i] == "_"):
                i += 1
            word = source[start:i]
            tokens.append(Token("KW" if word in KEYWORDS else "IDENT", word, line, col))
            col += i - start
            continue
        for sym in _SYMBOLS:
            if source.startswith(sym, i):
                tokens.append(Token("SYM", sym, line, col))
                i += len(sym)
                col += len(sym)
                break
        else:
            raise ParseError(f"unexpected character {c!r}", line, col)
    tokens.append(Token("EOF", "", line, col))
    return tokens


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def next(self) -> Token:
        t = self.tokens[self.pos]
        self.pos += 1
        return t

    def at(self, kind: str, value: str | None = None) -> bool:
        t = self.peek()
        return t.kind == kind and (value is None or t.value == value)

    def expect(self, kind: str, value: str | None = None) -> Token:
        t = self.peek()
        if not self.at(kind, value):
            want = value if value is not None else kind
            raise ParseError(f"expected {want!r}, found {t.value or t.kind!r}", t.line, t.col)
        return self.next()

    # -- expressions --------------------------------------------------------

    def expr(self) -> Expr:
        e = self.term()
        while self.at("SYM", "+") or self.at("SYM", "-"):
            op = self.next().value
            e = BinOp(op, e, self.term())
        return e

    def term(self) -> Expr:
        e = self.factor()
        while self.at("SYM", "*"):
            self.next()
            e = BinOp("*", e, self.factor())
        return e

    def factor(self) -> Expr:
        t = self.peek()
        if t.kind == "INT":
            self.next()
            return Const(int(t.value))
        if t.kind == "SYM" and t.value == "-":
            self.next()
            inner = self.factor()
            if isinstance(inner, Const):
                return Const(-inner.value)
            return BinOp("-", Const(0), inner)
        if t.kind == "SYM" and t.value == "(":
            self.next()
            e = self.expr()
            self.expect("SYM", ")")
            return e
        if t.kind == "KW" and t.value == "if":
            self.next()
            cond = self.bexpr()
            self.expect("KW", "then")
            then = self.expr()
            self.expect("KW", "else")
            orelse = self.expr()
            return IfExpr(cond, then, orelse)
        if t.kind == "IDENT":
            self.next()
            if self.at("SYM", "("):
                self.next()
                arg = self.expr()
                self.expect("SYM", ")")
                return Call(t.value, arg)
            return Var(t.value)
        raise ParseError(f"expected expression, found {t.value or t.kind!r}", t.line, t.col)

    # -- boolean expressions ------------------------------------------------

    def bexpr(self) -> BoolExpr:
        e = self.bterm()
        while self.at("KW", "or"):
            self.next()
            e = Or(e, self.bterm())
        return e

    def bterm(self) -> BoolExpr:
        e = self.bfactor()
        while self.at("KW", "and"):
            self.next()
            e = And(e, self.bfactor())
        return e

    def bfactor(self) -> BoolExpr:
        t = self.peek()
        if t.kind == "KW" and t.value == "not":
            self.next()
            return Not(self.bfactor())
        if t.kind == "KW" and t.value == "true":
            self.next()
            return BoolConst(True)
        if t.kind == "KW" and t.value == "false":
            self.next()
            return BoolConst(False)
        if t.kind == "SYM" and t.value == "(":
            # "(" may open a parenthesized arithmetic operand or a whole
            # boolean expression; try the comparison reading first.
            saved = self.pos
            try:
                return self.comparison()
            except ParseError:
                self.pos = saved
            self.next()
            e = self.bexpr()
            self.expect("SYM", ")")
            return e
        return self.comparison()

    def comparison(self) -> Cmp:
        left = self.expr()
        t = self.peek()
        if t.kind == "SYM" and t.value in ("<", "<=", "=", "!=", ">=", ">"):
            self.next()
            return Cmp(t.value, left, self.expr())
        raise ParseError(f"expected comparison operator, found {t.value or t.kind!r}",
                         t.line, t.col)

    # -- statements ---------------------------------------------------------

    def stmt_list(self, stop: tuple[str, ...]) -> list[Stmt]:
        stmts: list[Stmt] = []
        while not self.at("EOF") and not (self.peek().kind == "KW" and self.peek().value in stop):
            stmts.append(self.stmt())
        return stmts

    def stmt(self) -> Stmt:
        t = self.peek()
        if t.kind == "KW" and t.value == "if":
            self.next()
            cond = self.bexpr()
            self.expect("KW", "then")
            then = self.stmt_list(("else", "end"))
            orelse: list[Stmt] = []
            if self.at("KW", "else"):
                self.next()
                orelse = self.stmt_list(("end",))
            self.expect("KW", "end")
            return If(cond, then, orelse)
        if t.kind == "KW" and t.value == "while":
            self.next()
            cond = self.bexpr()
            self.expect("KW", "do")
            body = self.stmt_list(("end",))
            self.expect("KW", "end")
            return While(cond, body)
        if t.kind == "KW" and t.value == "assert":
            self.next()
            cond = self.bexpr()
            self.expect("SYM", ";")
            return Assert(cond)
        if t.kind == "KW" and t.value == "skip":
            self.next()
            self.expect("SYM", ";")
            return Skip()
        if t.kind == "IDENT":
            self.next()
            self.expect("SYM", ":=")
            e = self.expr()
            self.expect("SYM", ";")
            return Assign(t.value, e)
        raise ParseError(f"expected statement, found {t.value or t.kind!r}", t.line, t.col)

    # -- program ------------------------------------------------------------

    def program(self, name: str) -> Program:
        self.expect("KW", "var")
        names = [self.expect("IDENT").value]
        while self.at("SYM", ","):
            self.next()
            names.append(self.expect("IDENT").value)
        self.expect("SYM", ";")
        functions = []
        while self.at("KW", "fun"):
            self.next()
            fname = self.expect("IDENT").value
            self.expect("SYM", "(")
            param = self.expect("IDENT").value
            self.expect("SYM", ")")
            self.expect("SYM", "=")
            body = self.expr()
            self.expect("SYM", ";")
            functions.append(FunDef(fname, param, body))
        body = self.stmt_list(())
        self.expect("EOF")
        return Program(name=name, vars=names, body=body, functions=functions)


# ---------------------------------------------------------------------------
# Well-formedness
# ---------------------------------------------------------------------------

def expr_vars(e: Expr) -> set[str]:
    match e:
        case Const():
            return set()
        case Var(name):
            return {name}
        case BinOp(_, l, r):
            return expr_vars(l) | expr_vars(r)
        case Call(_, a):
            return expr_vars(a)
        case IfExpr(c, t, o):
            return bexpr_vars(c) | expr_vars(t) | expr_vars(o)
    raise TypeError(e)


def bexpr_vars(b: BoolExpr) -> set[str]:
    match b:
        case BoolConst():
            return set()
        case Cmp(_, l, r):
            return expr_vars(l) | expr_vars(r)
        case Not(e):
            return bexpr_vars(e)
        case And(l, r) | Or(l, r):
            return bexpr_vars(l) | bexpr_vars(r)
    raise TypeError(b)


def expr_calls(e: Expr) -> set[str]:
    match e:
        case Const() | Var():
            return set()
        case BinOp(_, l, r):
            return expr_calls(l) | expr_calls(r)
        case Call(f, a):
            return {f} | expr_calls(a)
        case IfExpr(c, t, o):
            return bexpr_calls(c) | expr_calls(t) | expr_calls(o)
    raise TypeError(e)


def bexpr_calls(b: BoolExpr) -> set[str]:
    match b:
        case BoolConst():
            return set()
        case Cmp(_, l, r):
            return expr_calls(l) | expr_calls(r)
        case Not(e):
            return bexpr_calls(e)
        case And(l, r) | Or(l, r):
            return bexpr_calls(l) | bexpr_calls(r)
    raise TypeError(b)


def _check_program(p: Program) -> None:
    seen: set[str] = set()
    for v in p.vars:
        if v in seen:
            raise DuplicateNameError(f"duplicate variable {v!r}")
        seen.add(v)
    fnames: set[str] = set()
    for f in p.functions:
        if f.name in fnames:
            raise DuplicateNameError(f"duplicate function {f.name!r}")
        if f.name in seen:
            raise DuplicateNameError(f"function {f.name!r} collides with a variable")
        fnames.add(f.name)
    for f in p.functions:
        for v in expr_vars(f.body):
            if v != f.param:
                raise UndeclaredVariableError(
                    f"function {f.name!r} references {v!r}; only its parameter is in scope")
        for g in expr_calls(f.body):
            if g not in fnames:
                raise UndeclaredVariableError(f"call to undeclared function {g!r}")

    def check_stmts(stmts: list[Stmt]) -> None:
        for s in stmts:
            match s:
                case Assign(var, e):
                    if var not in seen:
                        raise UndeclaredVariableError(f"undeclared variable {var!r}")
                    check_expr(e)
                case If(c, t, o):
                    check_bexpr(c)
                    check_stmts(t)
                    check_stmts(o)
                case While(c, b):
                    check_bexpr(c)
                    check_stmts(b)
                case Assert(c):
                    check_bexpr(c)
                case Skip():
                    pass

    def check_expr(e: Expr) -> None:
        for v in expr_vars(e):
            if v not in seen:
                raise UndeclaredVariableError(f"undeclared variable {v!r}")
        for g in expr_calls(e):
            if g not in fnames:
                raise UndeclaredVariableError(f"call to undeclared function {g!r}")

    def check_bexpr(b: BoolExpr) -> None:
        for v in bexpr_vars(b):
            if v not in seen:
                raise UndeclaredVariableError(f"undeclared variable {v!r}")
        for g in bexpr_calls(b):
            if g not in fnames:
                raise UndeclaredVariableError(f"call to undeclared function {g!r}")

    check_stmts(p.body)


def parse_program(source: str, name: str = "main") -> Program:
    """Parse MIL source text into a checked Program."""
    p = _Parser(tokenize(source)).program(name)
    _check_program(p)
    return p


def parse_bexpr(source: str) -> BoolExpr:
    parser = _Parser(tokenize(source))
    b = parser.bexpr()
    parser.expect("EOF")
    return b


def parse_predicate(source: str, program: Program, pred_id: int = 1) -> Predicate:
    """Parse a predicate over the program's variables."""
    b = parse_bexpr(source)
    declared = set(program.vars)
    for v in bexpr_vars(b):
        if v not in declared:
            raise UndeclaredVariableError(f"undeclared variable {v!r} in predicate")
    if bexpr_calls(b):
        raise MilError("function calls are not allowed in predicates")
    return Predicate(text=source.strip(), expr=b, id=pred_id)


# ---------------------------------------------------------------------------
# AST transforms
# ---------------------------------------------------------------------------

_CMP_NEG = {"<": ">=", "<=": ">", "=": "!=", "!=": "=", ">=": "<", ">": "<="}


def negate(b: BoolExpr) -> BoolExpr:
    """Negation with comparisons flipped and De Morgan applied."""
    match b:
        case BoolConst(v):
            return BoolConst(not v)
        case Cmp(op, l, r):
            return Cmp(_CMP_NEG[op], l, r)
        case Not(e):
            return e
        case And(l, r):
            return Or(negate(l), negate(r))
        case Or(l, r):
            return And(negate(l), negate(r))
    raise TypeError(b)


def subst_expr(e: Expr, var: str, replacement: Expr) -> Expr:
    match e:
        case Const():
            return e
        case Var(name):
            return replacement if name == var else e
        case BinOp(op, l, r):
            return BinOp(op, subst_expr(l, var, replacement), subst_expr(r, var, replacement))
        case Call(f, a):
            return Call(f, subst_expr(a, var, replacement))
        case IfExpr(c, t, o):
            return IfExpr(subst_bexpr(c, var, replacement),
                          subst_expr(t, var, replacement),
                          subst_expr(o, var, replacement))
    raise TypeError(e)


def subst_bexpr(b: BoolExpr, var: str, replacement: Expr) -> BoolExpr:
    match b:
        case BoolConst():
            return b
        case Cmp(op, l, r):
            return Cmp(op, subst_expr(l, var, replacement), subst_expr(r, var, replacement))
        case Not(e):
            return Not(subst_bexpr(e, var, replacement))
        case And(l, r):
            return And(subst_bexpr(l, var, replacement), subst_bexpr(r, var, replacement))
        case Or(l, r):
            return Or(subst_bexpr(l, var, replacement), subst_bexpr(r, var, replacement))
    raise TypeError(b)


# ---------------------------------------------------------------------------
# Pretty printing
# ---------------------------------------------------------------------------

_PREC = {"+": 1, "-": 1, "*": 2}


def render_expr(e: Expr, parent_prec: int = 0) -> str:
    match e:
        case Const(v):
            return str(v)
        case Var(name):
            return name
        case Call(f, a):
            return f"{f}({render_expr(a)})"
        case IfExpr(c, t, o):
            s = f"if {render_bexpr(c)} then {render_expr(t)} else {render_expr(o)}"
            return f"({s})" if parent_prec > 0 else s
        case BinOp(op, l, r):
            prec = _PREC[op]
            # right operand needs parens at equal precedence: - and * associate left
            s = f"{render_expr(l, prec)} {op} {render_expr(r, prec + 1)}"
            return f"({s})" if parent_prec > prec else s
    raise TypeError(e)


def render_bexpr(b: BoolExpr, parent_prec: int = 0) -> str:
    # precedence: or=1, and=2, not=3, comparison=4
    match b:
        case BoolConst(v):
            return "true" if v else "false"
        case Cmp(op, l, r):
            return f"{render_expr(l)} {op} {render_expr(r)}"
        case Not(e):
            return f"not {render_bexpr(e, 3)}"
        case And(l, r):
            s = f"{render_bexpr(l, 2)} and {render_bexpr(r, 3)}"
            return f"({s})" if parent_prec > 2 else s
        case Or(l, r):
            s = f"{render_bexpr(l, 1)} or {render_bexpr(r, 2)}"
            return f"({s})" if parent_prec > 1 else s
    raise TypeError(b)


def render_program(p: Program) -> str:
    lines = ["var " + ", ".join(p.vars) + ";"]
    for f in p.functions:
        lines.append(f"fun {f.name}({f.param}) = {render_expr(f.body)};")

    def emit(stmts: list[Stmt], indent: int) -> None:
        pad = "  " * indent
        for s in stmts:
            match s:
                case Assign(var, e):
                    lines.append(f"{pad}{var} := {render_expr(e)};")
                case If(c, t, o):
                    lines.append(f"{pad}if {render_bexpr(c)} then")
                    emit(t, indent + 1)
                    if o:
                        lines.append(f"{pad}else")
                        emit(o, indent + 1)
                    lines.append(f"{pad}end")
                case While(c, body):
                    lines.append(f"{pad}while {render_bexpr(c)} do")
                    emit(body, indent + 1)
                    lines.append(f"{pad}end")
                case Assert(c):
                    lines.append(f"{pad}assert {render_bexpr(c)};")
                case Skip():
                    lines.append(f"{pad}skip;")

    emit(p.body, 0)
    return "\n".join(lines) + "\n"


def compact_expr(e: Expr) -> str:
    """Space-free rendering used in transition labels."""
    match e:
        case Const(v):
            return str(v)
        case Var(name):
            return name
        case Call(f, a):
            return f"{f}({compact_expr(a)})"
        case IfExpr(c, t, o):
            return f"({compact_bexpr(c)}?{compact_expr(t)}:{compact_expr(o)})"
        case BinOp(op, l, r):
            prec = _PREC[op]
            ls = compact_expr(l)
            rs = compact_expr(r)
            if isinstance(l, BinOp) and _PREC[l.op] < prec:
                ls = f"({ls})"
            if isinstance(r, BinOp) and _PREC[r.op] <= prec:
                rs = f"({rs})"
            return f"{ls}{op}{rs}"
    raise TypeError(e)


def compact_bexpr(b: BoolExpr) -> str:
    match b:
        case BoolConst(v):
            return "true" if v else "false"
        case Cmp(op, l, r):
            return f"{compact_expr(l)}{op}{compact_expr(r)}"
        case Not(e):
            return f"!({compact_bexpr(e)})"
        case And(l, r):
            return f"({compact_bexpr(l)})&({compact_bexpr(r)})"
        case Or(l, r):
            return f"({compact_bexpr(l)})|({compact_bexpr(r)})"
    raise TypeError(b)
