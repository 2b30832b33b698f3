"""MicroC front end: lexer, AST, parser, pretty printer, condition decomposition.

MicroC is a small C-like language: functions over ints and opaque pointers,
assignments, if/else, while, for, switch with fall-through, break, return,
calls and an input() primitive that reads the next value from a run's input
vector.  The full grammar lives in docs/grammar.md.

Conditions are kept separate from value expressions.  A condition is a tree
of AND/OR/NOT over simple comparisons (or a bare expression tested against
zero); value expressions never contain comparisons or logical operators.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterator, Union

from .spans import SourceSpan


class ParseError(Exception):
    """Syntax or structural error, carrying a source position."""

    def __init__(self, file: str, line: int, col: int, message: str) -> None:
        super().__init__(f"{file}:{line}:{col}: {message}")
        self.file = file
        self.line = line
        self.col = col
        self.message = message


# ---------------------------------------------------------------------------
# Tokens
# ---------------------------------------------------------------------------

KEYWORDS = {
    "int", "void", "if", "else", "while", "for", "switch", "case",
    "default", "break", "return", "NULL",
}

# Order matters: longest operators first.
TOKEN_SPEC = [
    ("COMMENT", r"//[^\n]*"),
    ("WS", r"[ \t\r]+"),
    ("NL", r"\n"),
    ("NUM", r"\d+"),
    ("ID", r"[A-Za-z_][A-Za-z0-9_]*"),
    ("OP", r"==|!=|<=|>=|&&|\|\||[-+*/%<>=!(){},;:&]"),
]

_TOKEN_RE = re.compile("|".join(f"(?P<{name}>{rx})" for name, rx in TOKEN_SPEC))


@dataclass(frozen=True)
class Token:
    kind: str          # NUM, ID, KW, OP, EOF
    text: str
    line: int
    col: int


def tokenize(source: str, file: str) -> list[Token]:
    tokens: list[Token] = []
    line, col = 1, 1
    pos = 0
    while pos < len(source):
        m = _TOKEN_RE.match(source, pos)
        if m is None:
            raise ParseError(file, line, col, f"unexpected character {source[pos]!r}")
        kind = m.lastgroup or ""
        text = m.group()
        if kind == "NL":
            line += 1
            col = 1
        elif kind in ("WS", "COMMENT"):
            col += len(text)
        else:
            if kind == "ID" and text in KEYWORDS:
                kind = "KW"
            tokens.append(Token(kind, text, line, col))
            col += len(text)
        pos = m.end()
    tokens.append(Token("EOF", "", line, col))
    return tokens


# ---------------------------------------------------------------------------
# AST
# ---------------------------------------------------------------------------

class Node:
    """Base class; every node carries a span and a stable uid.

    Uids number statements, condition atoms and functions in a deterministic
    pre-order walk (see assign_uids) and are what the dependence graph uses
    to tie vertices back to the tree.
    """

    span: SourceSpan
    uid: int


@dataclass(eq=False)
class IntLit(Node):
    value: int
    span: SourceSpan
    uid: int = -1


@dataclass(eq=False)
class NullLit(Node):
    span: SourceSpan
    uid: int = -1


@dataclass(eq=False)
class Var(Node):
    name: str
    span: SourceSpan
    uid: int = -1


@dataclass(eq=False)
class Neg(Node):
    operand: "Expr"
    span: SourceSpan
    uid: int = -1


@dataclass(eq=False)
class BinOp(Node):
    op: str            # + - * / %
    left: "Expr"
    right: "Expr"
    span: SourceSpan
    uid: int = -1


@dataclass(eq=False)
class CallExpr(Node):
    name: str
    args: list["Expr"]
    span: SourceSpan
    uid: int = -1


@dataclass(eq=False)
class InputExpr(Node):
    span: SourceSpan
    uid: int = -1


Expr = Union[IntLit, NullLit, Var, Neg, BinOp, CallExpr, InputExpr]


@dataclass(eq=False)
class Comparison(Node):
    op: str            # == != < <= > >=
    left: Expr
    right: Expr
    span: SourceSpan
    uid: int = -1


@dataclass(eq=False)
class Truthy(Node):
    """A bare expression in condition position; tested as 'expr != 0'."""

    expr: Expr
    span: SourceSpan
    uid: int = -1


@dataclass(eq=False)
class Not(Node):
    operand: "CondExpr"
    span: SourceSpan
    uid: int = -1


@dataclass(eq=False)
class And(Node):
    left: "CondExpr"
    right: "CondExpr"
    span: SourceSpan
    uid: int = -1


@dataclass(eq=False)
class Or(Node):
    left: "CondExpr"
    right: "CondExpr"
    span: SourceSpan
    uid: int = -1


CondExpr = Union[Comparison, Truthy, Not, And, Or]


@dataclass(eq=False)
class Assign(Node):
    target: str
    value: Expr
    span: SourceSpan
    uid: int = -1


@dataclass(eq=False)
class If(Node):
    cond: CondExpr
    then_body: list["Stmt"]
    else_body: list["Stmt"]
    span: SourceSpan
    uid: int = -1


@dataclass(eq=False)
class While(Node):
    cond: CondExpr
    body: list["Stmt"]
    span: SourceSpan
    uid: int = -1


@dataclass(eq=False)
class For(Node):
    init: "Stmt"
    cond: CondExpr
    step: "Stmt"
    body: list["Stmt"]
    span: SourceSpan
    uid: int = -1


@dataclass(eq=False)
class SwitchCase(Node):
    value: int
    body: list["Stmt"]
    span: SourceSpan
    uid: int = -1


@dataclass(eq=False)
class Switch(Node):
    scrutinee: Expr
    cases: list[SwitchCase]
    default: list["Stmt"] | None
    span: SourceSpan
    uid: int = -1


@dataclass(eq=False)
class Break(Node):
    span: SourceSpan
    uid: int = -1


@dataclass(eq=False)
class Return(Node):
    value: Expr | None
    span: SourceSpan
    uid: int = -1


@dataclass(eq=False)
class CallStmt(Node):
    name: str
    args: list[Expr]
    span: SourceSpan
    uid: int = -1


@dataclass(eq=False)
class ExprStmt(Node):
    expr: Expr
    span: SourceSpan
    uid: int = -1


Stmt = Union[Assign, If, While, For, Switch, Break, Return, CallStmt, ExprStmt]


@dataclass(frozen=True)
class Param:
    name: str
    kind: str          # "int" | "ptr"


@dataclass(eq=False)
class FunctionDef(Node):
    name: str
    params: list[Param]
    body: list[Stmt]
    return_kind: str   # "int" | "void"
    span: SourceSpan
    uid: int = -1


@dataclass(eq=False)
class Program(Node):
    functions: list[FunctionDef]
    file: str
    span: SourceSpan
    uid: int = -1
    entry_name: str = "main"

    def function(self, name: str) -> FunctionDef | None:
        for f in self.functions:
            if f.name == name:
                return f
        return None


# ---------------------------------------------------------------------------
# Condition decomposition
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ConditionLeaf:
    """A simple condition after short-circuit decomposition.

    node is the underlying comparison or truthiness test; negated records a
    NOT pushed down onto the leaf.  Evaluating the leaf means evaluating the
    node and flipping the result when negated.
    """

    node: Comparison | Truthy
    negated: bool

    @property
    def span(self) -> SourceSpan:
        return self.node.span

    @property
    def uid(self) -> int:
        return self.node.uid


@dataclass(frozen=True)
class NnfAnd:
    left: "NnfTree"
    right: "NnfTree"


@dataclass(frozen=True)
class NnfOr:
    left: "NnfTree"
    right: "NnfTree"


NnfTree = Union[NnfAnd, NnfOr, ConditionLeaf]


def to_nnf(cond: CondExpr, negated: bool = False) -> NnfTree:
    """Push NOT operators down to the leaves (De Morgan), keeping leaf order."""
    if isinstance(cond, Not):
        return to_nnf(cond.operand, not negated)
    if isinstance(cond, And):
        left = to_nnf(cond.left, negated)
        right = to_nnf(cond.right, negated)
        return NnfOr(left, right) if negated else NnfAnd(left, right)
    if isinstance(cond, Or):
        left = to_nnf(cond.left, negated)
        right = to_nnf(cond.right, negated)
        return NnfAnd(left, right) if negated else NnfOr(left, right)
    return ConditionLeaf(cond, negated)


def nnf_leaves(tree: NnfTree) -> list[ConditionLeaf]:
    if isinstance(tree, ConditionLeaf):
        return [tree]
    return nnf_leaves(tree.left) + nnf_leaves(tree.right)


def decompose_condition(cond: CondExpr) -> list[ConditionLeaf]:
    """Left-to-right simple conditions of a compound condition.

    Each leaf becomes its own control point in the dependence graph; the
    count of leaves is invariant under decomposition.
    """
    return nnf_leaves(to_nnf(cond))


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

_RESERVED_FUNCTIONS = {"input"}

_COMPARISON_OPS = {"==", "!=", "<", "<=", ">", ">="}


class _Parser:
    def __init__(self, tokens: list[Token], file: str) -> None:
        self.tokens = tokens
        self.file = file
        self.pos = 0
        self.loop_depth = 0
        self.switch_depth = 0

    # -- token plumbing ----------------------------------------------------

    def current(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind != "EOF":
            self.pos += 1
        return tok

    def check(self, kind: str, text: str | None = None) -> bool:
        tok = self.current()
        return tok.kind == kind and (text is None or tok.text == text)

    def match(self, kind: str, text: str | None = None) -> Token | None:
        if self.check(kind, text):
            return self.advance()
        return None

    def expect(self, kind: str, text: str | None = None, what: str | None = None) -> Token:
        tok = self.current()
        if not self.check(kind, text):
            wanted = what or (text if text is not None else kind.lower())
            got = tok.text if tok.kind != "EOF" else "end of input"
            self.error(f"expected {wanted}, found {got!r}", tok)
        return self.advance()

    def error(self, message: str, tok: Token | None = None) -> None:
        tok = tok or self.current()
        raise ParseError(self.file, tok.line, tok.col, message)

    def span_from(self, start: Token, end: Token | None = None) -> SourceSpan:
        end = end or self.tokens[self.pos - 1]
        return SourceSpan(self.file, start.line, start.col,
                          end.line, end.col + max(len(end.text) - 1, 0))

    # -- program structure --------------------------------------------------

    def parse_program(self) -> Program:
        first = self.current()
        functions: list[FunctionDef] = []
        seen: set[str] = set()
        while not self.check("EOF"):
            fn = self.parse_function()
            if fn.name in seen:
                self.error(f"duplicate function name {fn.name!r}",
                           self.tokens[self.pos - 1])
            seen.add(fn.name)
            functions.append(fn)
        span = (functions[0].span.merge(functions[-1].span) if functions
                else SourceSpan(self.file, 1, 1, 1, 1))
        program = Program(functions=functions, file=self.file, span=span)
        assign_uids(program)
        return program

    def parse_function(self) -> FunctionDef:
        start = self.current()
        if self.match("KW", "void"):
            return_kind = "void"
        else:
            self.expect("KW", "int", what="'int' or 'void'")
            return_kind = "int"
        name_tok = self.expect("ID", what="function name")
        if name_tok.text in _RESERVED_FUNCTIONS:
            self.error(f"function name {name_tok.text!r} is reserved", name_tok)
        self.expect("OP", "(")
        params: list[Param] = []
        if not self.check("OP", ")"):
            while True:
                self.expect("KW", "int", what="parameter type")
                kind = "ptr" if self.match("OP", "*") else "int"
                p_name = self.expect("ID", what="parameter name")
                params.append(Param(p_name.text, kind))
                if not self.match("OP", ","):
                    break
        self.expect("OP", ")")
        body = self.parse_block()
        return FunctionDef(name=name_tok.text, params=params, body=body,
                           return_kind=return_kind, span=self.span_from(start))

    def parse_block(self) -> list[Stmt]:
        self.expect("OP", "{")
        stmts: list[Stmt] = []
        while not self.check("OP", "}"):
            if self.check("EOF"):
                self.error("unterminated block, expected '}'")
            stmts.append(self.parse_statement())
        self.expect("OP", "}")
        return stmts

    def parse_body(self) -> list[Stmt]:
        """A brace block or a single statement (wrapped into a block)."""
        if self.check("OP", "{"):
            return self.parse_block()
        return [self.parse_statement()]

    # -- statements ----------------------------------------------------------
    # statement ::= if | while | for | switch | 'break' ';' | 'return' expr? ';'
    #             | simple_stmt ';' | block

    def parse_statement(self) -> Stmt:
        tok = self.current()
        if tok.kind == "KW":
            if tok.text == "if":
                return self.parse_if()
            if tok.text == "while":
                return self.parse_while()
            if tok.text == "for":
                return self.parse_for()
            if tok.text == "switch":
                return self.parse_switch()
            if tok.text == "break":
                if self.loop_depth == 0 and self.switch_depth == 0:
                    self.error("break outside loop or switch", tok)
                self.advance()
                self.expect("OP", ";")
                return Break(span=self.span_from(tok))
            if tok.text == "return":
                self.advance()
                value = None
                if not self.check("OP", ";"):
                    value = self.parse_value_expr()
                self.expect("OP", ";")
                return Return(value=value, span=self.span_from(tok))
            if tok.text in ("case", "default"):
                self.error(f"{tok.text!r} label outside switch", tok)
            self.error(f"unexpected keyword {tok.text!r}", tok)
        stmt = self.parse_simple_statement()
        self.expect("OP", ";")
        return stmt

    def parse_simple_statement(self) -> Stmt:
        tok = self.current()
        if tok.kind == "ID" and self.tokens[self.pos + 1].text == "=":
            name = self.advance()
            self.advance()  # '='
            value = self.parse_value_expr()
            return Assign(target=name.text, value=value, span=self.span_from(tok))
        expr = self.parse_value_expr()
        if isinstance(expr, CallExpr):
            return CallStmt(name=expr.name, args=expr.args, span=self.span_from(tok))
        return ExprStmt(expr=expr, span=self.span_from(tok))

    def parse_if(self) -> If:
        start = self.advance()
        self.expect("OP", "(")
        cond = self.parse_condition()
        self.expect("OP", ")")
        then_body = self.parse_body()
        else_body: list[Stmt] = []
        if self.match("KW", "else"):
            if self.check("KW", "if"):
                else_body = [self.parse_if()]
            else:
                else_body = self.parse_body()
        return If(cond=cond, then_body=then_body, else_body=else_body,
                  span=self.span_from(start))

    def parse_while(self) -> While:
        start = self.advance()
        self.expect("OP", "(")
        cond = self.parse_condition()
        self.expect("OP", ")")
        self.loop_depth += 1
        try:
            body = self.parse_body()
        finally:
            self.loop_depth -= 1
        return While(cond=cond, body=body, span=self.span_from(start))

    def parse_for(self) -> For:
        start = self.advance()
        self.expect("OP", "(")
        init = self.parse_simple_statement()
        self.expect("OP", ";")
        cond = self.parse_condition()
        self.expect("OP", ";")
        step = self.parse_simple_statement()
        self.expect("OP", ")")
        self.loop_depth += 1
        try:
            body = self.parse_body()
        finally:
            self.loop_depth -= 1
        return For(init=init, cond=cond, step=step, body=body,
                   span=self.span_from(start))

    def parse_switch(self) -> Switch:
        start = self.advance()
        self.expect("OP", "(")
        scrutinee = self.parse_value_expr()
        self.expect("OP", ")")
        self.expect("OP", "{")
        cases: list[SwitchCase] = []
        default: list[Stmt] | None = None
        seen_values: set[int] = set()
        self.switch_depth += 1
        try:
            while not self.check("OP", "}"):
                if self.check("KW", "case"):
                    case_tok = self.advance()
                    if default is not None:
                        self.error("default label must come after all cases",
                                   case_tok)
                    value = self.parse_case_value()
                    self.expect("OP", ":")
                    if value in seen_values:
                        self.error(f"duplicate case label {value}", case_tok)
                    seen_values.add(value)
                    body = self.parse_case_body()
                    cases.append(SwitchCase(value=value, body=body,
                                            span=self.span_from(case_tok)))
                elif self.check("KW", "default"):
                    default_tok = self.advance()
                    self.expect("OP", ":")
                    if default is not None:
                        self.error("duplicate default label", default_tok)
                    default = self.parse_case_body()
                else:
                    self.error("expected 'case' or 'default' label")
        finally:
            self.switch_depth -= 1
        self.expect("OP", "}")
        if not cases:
            self.error("switch needs at least one case", start)
        return Switch(scrutinee=scrutinee, cases=cases, default=default,
                      span=self.span_from(start))

    def parse_case_value(self) -> int:
        negative = self.match("OP", "-") is not None
        num = self.expect("NUM", what="integer case label")
        return -int(num.text) if negative else int(num.text)

    def parse_case_body(self) -> list[Stmt]:
        stmts: list[Stmt] = []
        while not (self.check("OP", "}") or self.check("KW", "case")
                   or self.check("KW", "default")):
            if self.check("EOF"):
                self.error("unterminated switch body")
            stmts.append(self.parse_statement())
        return stmts

    # -- conditions and expressions -------------------------------------------
    # One precedence ladder; condition-only operators are rejected afterwards
    # in value context.
    #   condition ::= or_expr
    #   or_expr   ::= and_expr ('||' and_expr)*
    #   and_expr  ::= not_expr ('&&' not_expr)*
    #   not_expr  ::= '!' not_expr | comparison
    #   comparison::= add_expr (relop add_expr)?
    #   add_expr  ::= mul_expr (('+'|'-') mul_expr)*
    #   mul_expr  ::= unary (('*'|'/'|'%') unary)*
    #   unary     ::= '-' unary | primary
    #   primary   ::= NUM | NULL | ident | call | input '(' ')' | '(' or_expr ')'

    def parse_condition(self) -> CondExpr:
        node = self.parse_or()
        return self.to_condition(node)

    def parse_value_expr(self) -> Expr:
        tok = self.current()
        node = self.parse_or()
        if not _is_value_expr(node):
            self.error("comparisons and logical operators are only allowed "
                       "in conditions", tok)
        return node  # type: ignore[return-value]

    def to_condition(self, node: Node) -> CondExpr:
        if isinstance(node, (Comparison, Truthy, Not, And, Or)):
            return node
        return Truthy(expr=node, span=node.span)  # type: ignore[arg-type]

    def parse_or(self) -> Node:
        node = self.parse_and()
        while self.check("OP", "||"):
            self.advance()
            right = self.parse_and()
            node = Or(left=self.to_condition(node), right=self.to_condition(right),
                      span=node.span.merge(right.span))
        return node

    def parse_and(self) -> Node:
        node = self.parse_not()
        while self.check("OP", "&&"):
            self.advance()
            right = self.parse_not()
            node = And(left=self.to_condition(node), right=self.to_condition(right),
                       span=node.span.merge(right.span))
        return node

    def parse_not(self) -> Node:
        if self.check("OP", "!"):
            start = self.advance()
            operand = self.parse_not()
            return Not(operand=self.to_condition(operand), span=self.span_from(start))
        return self.parse_comparison()

    def parse_comparison(self) -> Node:
        left = self.parse_add()
        tok = self.current()
        if tok.kind == "OP" and tok.text in _COMPARISON_OPS:
            self.advance()
            right = self.parse_add()
            if not _is_value_expr(left) or not _is_value_expr(right):
                self.error("comparison operands must be plain expressions", tok)
            node = Comparison(op=tok.text, left=left, right=right,  # type: ignore[arg-type]
                              span=left.span.merge(right.span))
            nxt = self.current()
            if nxt.kind == "OP" and nxt.text in _COMPARISON_OPS:
                self.error("chained comparisons are not supported", nxt)
            return node
        return left

    def parse_add(self) -> Node:
        node = self.parse_mul()
        while self.current().kind == "OP" and self.current().text in ("+", "-"):
            op = self.advance()
            right = self.parse_mul()
            self._require_value(node, op)
            self._require_value(right, op)
            node = BinOp(op=op.text, left=node, right=right,  # type: ignore[arg-type]
                         span=node.span.merge(right.span))
        return node

    def parse_mul(self) -> Node:
        node = self.parse_unary()
        while self.current().kind == "OP" and self.current().text in ("*", "/", "%"):
            op = self.advance()
            right = self.parse_unary()
            self._require_value(node, op)
            self._require_value(right, op)
            node = BinOp(op=op.text, left=node, right=right,  # type: ignore[arg-type]
                         span=node.span.merge(right.span))
        return node

    def parse_unary(self) -> Node:
        if self.check("OP", "-"):
            start = self.advance()
            operand = self.parse_unary()
            self._require_value(operand, start)
            return Neg(operand=operand, span=self.span_from(start))  # type: ignore[arg-type]
        return self.parse_primary()

    def parse_primary(self) -> Node:
        tok = self.current()
        if tok.kind == "NUM":
            self.advance()
            return IntLit(value=int(tok.text), span=self.span_from(tok))
        if tok.kind == "KW" and tok.text == "NULL":
            self.advance()
            return NullLit(span=self.span_from(tok))
        if tok.kind == "ID":
            self.advance()
            if self.check("OP", "("):
                self.advance()
                args: list[Expr] = []
                if not self.check("OP", ")"):
                    while True:
                        args.append(self.parse_value_expr())
                        if not self.match("OP", ","):
                            break
                self.expect("OP", ")")
                if tok.text == "input":
                    if args:
                        self.error("input() takes no arguments", tok)
                    return InputExpr(span=self.span_from(tok))
                return CallExpr(name=tok.text, args=args, span=self.span_from(tok))
            return Var(name=tok.text, span=self.span_from(tok))
        if tok.kind == "OP" and tok.text == "(":
            self.advance()
            node = self.parse_or()
            self.expect("OP", ")")
            return node
        got = tok.text if tok.kind != "EOF" else "end of input"
        self.error(f"expected expression, found {got!r}", tok)
        raise AssertionError("unreachable")

    def _require_value(self, node: Node, tok: Token) -> None:
        if not _is_value_expr(node):
            self.error("comparisons and logical operators are only allowed "
                       "in conditions", tok)


def _is_value_expr(node: Node) -> bool:
    return isinstance(node, (IntLit, NullLit, Var, Neg, BinOp, CallExpr, InputExpr))


def parse_program(source: str, file: str = "<string>") -> Program:
    """Parse MicroC source into a Program.

    Raises ParseError (with file, line and column) on syntax errors, duplicate
    function names, break outside loop/switch, and misplaced comparison or
    logical operators.
    """
    return _Parser(tokenize(source, file), file).parse_program()


def assign_uids(program: Program) -> None:
    """Number all nodes in deterministic pre-order."""
    counter = 0

    def visit(node: Node) -> None:
        nonlocal counter
        node.uid = counter
        counter += 1
        for child in _children(node):
            visit(child)

    visit(program)


def _children(node: Node) -> Iterator[Node]:
    if isinstance(node, Program):
        yield from node.functions
    elif isinstance(node, FunctionDef):
        yield from node.body
    elif isinstance(node, Assign):
        yield node.value
    elif isinstance(node, If):
        yield node.cond
        yield from node.then_body
        yield from node.else_body
    elif isinstance(node, While):
        yield node.cond
        yield from node.body
    elif isinstance(node, For):
        yield node.init
        yield node.cond
        yield node.step
        yield from node.body
    elif isinstance(node, Switch):
        yield node.scrutinee
        yield from node.cases
        if node.default is not None:
            yield from node.default
    elif isinstance(node, SwitchCase):
        yield from node.body
    elif isinstance(node, Return):
        if node.value is not None:
            yield node.value
    elif isinstance(node, (CallStmt, CallExpr)):
        yield from node.args
    elif isinstance(node, ExprStmt):
        yield node.expr
    elif isinstance(node, Comparison):
        yield node.left
        yield node.right
    elif isinstance(node, Truthy):
        yield node.expr
    elif isinstance(node, Not):
        yield node.operand
    elif isinstance(node, (And, Or)):
        yield node.left
        yield node.right
    elif isinstance(node, Neg):
        yield node.operand
    elif isinstance(node, BinOp):
        yield node.left
        yield node.right
    # IntLit, NullLit, Var, InputExpr, Break: no children


def walk(node: Node) -> Iterator[Node]:
    yield node
    for child in _children(node):
        yield from walk(child)


def expr_children(expr: Expr) -> Iterator[Expr]:
    """Direct subexpressions, in evaluation order."""
    yield from _children(expr)  # type: ignore[misc]


# ---------------------------------------------------------------------------
# Pretty printer
# ---------------------------------------------------------------------------

_EXPR_PREC = {"or": 1, "and": 2, "not": 3, "cmp": 4, "add": 5, "mul": 6,
              "unary": 7, "atom": 8}


def _prec(node: Node) -> int:
    if isinstance(node, Or):
        return _EXPR_PREC["or"]
    if isinstance(node, And):
        return _EXPR_PREC["and"]
    if isinstance(node, Not):
        return _EXPR_PREC["not"]
    if isinstance(node, (Comparison, Truthy)):
        return _EXPR_PREC["cmp"]
    if isinstance(node, BinOp):
        return _EXPR_PREC["add"] if node.op in ("+", "-") else _EXPR_PREC["mul"]
    if isinstance(node, Neg):
        return _EXPR_PREC["unary"]
    return _EXPR_PREC["atom"]


def format_expr(node: Node) -> str:
    if isinstance(node, IntLit):
        return str(node.value)
    if isinstance(node, NullLit):
        return "NULL"
    if isinstance(node, Var):
        return node.name
    if isinstance(node, InputExpr):
        return "input()"
    if isinstance(node, CallExpr):
        return f"{node.name}({', '.join(format_expr(a) for a in node.args)})"
    if isinstance(node, Neg):
        return "-" + _wrap(node.operand, _EXPR_PREC["unary"], strict=False)
    if isinstance(node, BinOp):
        me = _prec(node)
        left = _wrap(node.left, me, strict=False)
        right = _wrap(node.right, me, strict=True)
        return f"{left} {node.op} {right}"
    if isinstance(node, Comparison):
        return f"{format_expr(node.left)} {node.op} {format_expr(node.right)}"
    if isinstance(node, Truthy):
        return format_expr(node.expr)
    if isinstance(node, Not):
        return "!(" + format_expr(node.operand) + ")"
    if isinstance(node, (And, Or)):
        me = _prec(node)
        op = "&&" if isinstance(node, And) else "||"
        left = _wrap(node.left, me, strict=False)
        right = _wrap(node.right, me, strict=True)
        return f"{left} {op} {right}"
    raise TypeError(f"not an expression node: {node!r}")


def _wrap(node: Node, parent_prec: int, strict: bool) -> str:
    text = format_expr(node)
    child = _prec(node)
    if child < parent_prec or (strict and child == parent_prec):
        return f"({text})"
    return text


def format_program(program: Program) -> str:
    out: list[str] = []
    for i, fn in enumerate(program.functions):
        if i:
            out.append("")
        params = ", ".join(
            ("int *" + p.name) if p.kind == "ptr" else ("int " + p.name)
            for p in fn.params)
        out.append(f"{fn.return_kind} {fn.name}({params}) {{")
        _format_block(fn.body, out, 1)
        out.append("}")
    return "\n".join(out) + "\n"


def _format_block(stmts: list[Stmt], out: list[str], depth: int) -> None:
    pad = "    " * depth
    for stmt in stmts:
        _format_stmt(stmt, out, depth, pad)


def _format_stmt(stmt: Stmt, out: list[str], depth: int, pad: str) -> None:
    if isinstance(stmt, Assign):
        out.append(f"{pad}{stmt.target} = {format_expr(stmt.value)};")
    elif isinstance(stmt, If):
        out.append(f"{pad}if ({format_expr(stmt.cond)}) {{")
        _format_block(stmt.then_body, out, depth + 1)
        if stmt.else_body:
            out.append(f"{pad}}} else {{")
            _format_block(stmt.else_body, out, depth + 1)
        out.append(f"{pad}}}")
    elif isinstance(stmt, While):
        out.append(f"{pad}while ({format_expr(stmt.cond)}) {{")
        _format_block(stmt.body, out, depth + 1)
        out.append(f"{pad}}}")
    elif isinstance(stmt, For):
        init = _format_simple(stmt.init)
        step = _format_simple(stmt.step)
        out.append(f"{pad}for ({init}; {format_expr(stmt.cond)}; {step}) {{")
        _format_block(stmt.body, out, depth + 1)
        out.append(f"{pad}}}")
    elif isinstance(stmt, Switch):
        out.append(f"{pad}switch ({format_expr(stmt.scrutinee)}) {{")
        for case in stmt.cases:
            out.append(f"{pad}case {case.value}:")
            _format_block(case.body, out, depth + 1)
        if stmt.default is not None:
            out.append(f"{pad}default:")
            _format_block(stmt.default, out, depth + 1)
        out.append(f"{pad}}}")
    elif isinstance(stmt, Break):
        out.append(f"{pad}break;")
    elif isinstance(stmt, Return):
        if stmt.value is None:
            out.append(f"{pad}return;")
        else:
            out.append(f"{pad}return {format_expr(stmt.value)};")
    elif isinstance(stmt, CallStmt):
        args = ", ".join(format_expr(a) for a in stmt.args)
        out.append(f"{pad}{stmt.name}({args});")
    elif isinstance(stmt, ExprStmt):
        out.append(f"{pad}{format_expr(stmt.expr)};")
    else:
        raise TypeError(f"not a statement node: {stmt!r}")


def _format_simple(stmt: Stmt) -> str:
    if isinstance(stmt, Assign):
        return f"{stmt.target} = {format_expr(stmt.value)}"
    if isinstance(stmt, CallStmt):
        return f"{stmt.name}({', '.join(format_expr(a) for a in stmt.args)})"
    if isinstance(stmt, ExprStmt):
        return format_expr(stmt.expr)
    raise TypeError(f"not a simple statement: {stmt!r}")


# ---------------------------------------------------------------------------
# Structural equality (spans and uids ignored)
# ---------------------------------------------------------------------------

_ATTR_FIELDS = {
    IntLit: ("value",),
    NullLit: (),
    Var: ("name",),
    Neg: (),
    BinOp: ("op",),
    CallExpr: ("name",),
    InputExpr: (),
    Comparison: ("op",),
    Truthy: (),
    Not: (),
    And: (),
    Or: (),
    Assign: ("target",),
    If: (),
    While: (),
    For: (),
    Switch: (),
    SwitchCase: ("value",),
    Break: (),
    Return: (),
    CallStmt: ("name",),
    ExprStmt: (),
    FunctionDef: ("name", "params", "return_kind"),
    Program: ("entry_name",),
}


def ast_equal(a: Node, b: Node) -> bool:
    """Structural equality ignoring spans, uids and source file names."""
    if type(a) is not type(b):
        return False
    fields = _ATTR_FIELDS.get(type(a), ())
    for name in fields:
        if getattr(a, name) != getattr(b, name):
            return False
    if isinstance(a, Return) and isinstance(b, Return):
        if (a.value is None) != (b.value is None):
            return False
    if isinstance(a, Switch) and isinstance(b, Switch):
        if (a.default is None) != (b.default is None):
            return False
    a_children = list(_children(a))
    b_children = list(_children(b))
    if len(a_children) != len(b_children):
        return False
    return all(ast_equal(x, y) for x, y in zip(a_children, b_children))
