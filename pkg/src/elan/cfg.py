"""Per-function control flow graphs for MicroC.

Each function is lowered to a CFG with one node per executable program point:
statements, short-circuit condition leaves and call sites.  Compound
conditions are decomposed so that every simple condition is its own two-way
branch node; switch heads fan out with one labeled edge per case plus a
default edge (synthesized when the program omits default).  for-loops are
wired as init; while (cond) { body; step; }.

The graph layer on top of this (sdg.py) derives control dependences from
postdominators; the brute-force oracle in the test suite walks these CFGs
directly, so nothing in here may depend on the dependence analysis.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import microc as mc
from .spans import SourceSpan

DEFAULT_ENTRY = "main"


@dataclass(frozen=True)
class EdgeLabel:
    """Label on a control flow or control dependence edge.

    kind is one of "true", "false", "case", "always"; case labels carry the
    case index and the total case arity (explicit cases plus default).
    """

    kind: str
    index: int = 0
    arity: int = 0

    def __post_init__(self) -> None:
        if self.kind not in ("true", "false", "case", "always"):
            raise ValueError(f"bad edge label kind {self.kind!r}")
        if self.kind == "case":
            if self.arity < 1 or not (0 <= self.index < self.arity):
                raise ValueError(f"bad case label {self.index}/{self.arity}")

    def sort_key(self) -> tuple[int, int]:
        order = {"true": 0, "false": 1, "case": 2, "always": 3}
        return (order[self.kind], self.index)

    def group_key(self) -> tuple[str, int]:
        """Edges with equal group keys belong to the same branch outcome."""
        return (self.kind, self.index)

    def __str__(self) -> str:
        if self.kind == "case":
            return f"case{self.index}/{self.arity}"
        return self.kind


TRUE = EdgeLabel("true")
FALSE = EdgeLabel("false")
ALWAYS = EdgeLabel("always")


@dataclass(eq=False)
class CfgNode:
    idx: int
    kind: str                      # "entry" | "exit" | "control" | "statement" | "call"
    uid: int                       # AST uid; -1 for the synthetic exit
    span: SourceSpan
    text: str
    cp_kind: str | None = None     # "if_leaf" | "loop_cond" | "switch_head"
    leaf: mc.ConditionLeaf | None = None
    callee: str | None = None
    call_args: list[mc.Expr] = field(default_factory=list)
    switch_arity: int = 0
    stmt_class: str | None = None  # "break" | "return" | "assign" | "expr"
    breaks_loop: bool = False      # break node: target is a loop (not a switch)
    loop_depth: int = 0
    # Heuristic applicability flags (control nodes only).  The *_true fields
    # orient the corresponding heuristic: they say whether the true branch is
    # the outcome the heuristic assigns its table probability to.
    compares_pointer: bool = False
    pointer_eq_true: bool = False
    compares_int_nonpositive: bool = False
    nonpositive_true: bool = False
    break_on_true: bool = False
    break_on_false: bool = False
    is_loop_exit_guard: bool = False
    guards_return_on_true: bool = False
    guards_return_on_false: bool = False


class FunctionCfg:
    def __init__(self, function: mc.FunctionDef, file: str) -> None:
        self.function = function
        self.file = file
        self.nodes: list[CfgNode] = []
        self.edges: list[tuple[int, int, EdgeLabel]] = []
        self.entry: CfgNode | None = None
        self.exit: CfgNode | None = None

    def successors(self, idx: int) -> list[tuple[int, EdgeLabel]]:
        return [(dst, label) for src, dst, label in self.edges if src == idx]

    def successor_by_label(self, idx: int, key: tuple[str, int]) -> int | None:
        for src, dst, label in self.edges:
            if src == idx and label.group_key() == key:
                return dst
        return None


# A frontier is a list of (source node idx, label) edges waiting for a target.
_Frontier = list[tuple[int, EdgeLabel]]


class _Builder:
    def __init__(self, function: mc.FunctionDef, file: str) -> None:
        self.cfg = FunctionCfg(function, file)
        # Stack of (is_loop, dangling break edges) for enclosing break targets.
        self.break_stack: list[tuple[bool, _Frontier]] = []
        self.loop_depth = 0
        # Return statements jump to the exit node, which only exists once the
        # whole body is wired; collect their edges and patch at the end.
        self.return_edges: _Frontier = []

    def build(self) -> FunctionCfg:
        fn = self.cfg.function
        entry = self._node("entry", fn.uid, fn.span, f"entry {fn.name}")
        self.cfg.entry = entry
        frontier = self._wire_block(fn.body, [(entry.idx, ALWAYS)])
        exit_node = self._node("exit", -1, fn.span, f"exit {fn.name}")
        self.cfg.exit = exit_node
        self._patch(frontier + self.return_edges, exit_node.idx)
        return self.cfg

    # -- plumbing -----------------------------------------------------------

    def _node(self, kind: str, uid: int, span: SourceSpan, text: str,
              **extra: object) -> CfgNode:
        node = CfgNode(idx=len(self.cfg.nodes), kind=kind, uid=uid, span=span,
                       text=text, loop_depth=self.loop_depth)
        for key, value in extra.items():
            setattr(node, key, value)
        self.cfg.nodes.append(node)
        return node

    def _patch(self, frontier: _Frontier, target: int) -> None:
        for src, label in frontier:
            self.cfg.edges.append((src, target, label))

    # -- statements ----------------------------------------------------------

    def _wire_block(self, stmts: list[mc.Stmt], frontier: _Frontier) -> _Frontier:
        for stmt in stmts:
            frontier = self._wire_stmt(stmt, frontier)
        return frontier

    def _wire_stmt(self, stmt: mc.Stmt, frontier: _Frontier) -> _Frontier:
        if isinstance(stmt, mc.Assign):
            frontier = self._wire_calls(stmt.value, frontier)
            node = self._node("statement", stmt.uid, stmt.span,
                              f"{stmt.target} = {mc.format_expr(stmt.value)}",
                              stmt_class="assign")
            self._patch(frontier, node.idx)
            return [(node.idx, ALWAYS)]
        if isinstance(stmt, mc.ExprStmt):
            frontier = self._wire_calls(stmt.expr, frontier)
            node = self._node("statement", stmt.uid, stmt.span,
                              mc.format_expr(stmt.expr), stmt_class="expr")
            self._patch(frontier, node.idx)
            return [(node.idx, ALWAYS)]
        if isinstance(stmt, mc.CallStmt):
            for arg in stmt.args:
                frontier = self._wire_calls(arg, frontier)
            args = ", ".join(mc.format_expr(a) for a in stmt.args)
            node = self._node("call", stmt.uid, stmt.span,
                              f"{stmt.name}({args})", callee=stmt.name,
                              call_args=list(stmt.args))
            self._patch(frontier, node.idx)
            return [(node.idx, ALWAYS)]
        if isinstance(stmt, mc.Return):
            if stmt.value is not None:
                frontier = self._wire_calls(stmt.value, frontier)
            text = ("return" if stmt.value is None
                    else f"return {mc.format_expr(stmt.value)}")
            node = self._node("statement", stmt.uid, stmt.span, text,
                              stmt_class="return")
            self._patch(frontier, node.idx)
            self.return_edges.append((node.idx, ALWAYS))
            return []
        if isinstance(stmt, mc.Break):
            node = self._node("statement", stmt.uid, stmt.span, "break",
                              stmt_class="break")
            self._patch(frontier, node.idx)
            is_loop, pending = self.break_stack[-1]
            node.breaks_loop = is_loop
            pending.append((node.idx, ALWAYS))
            return []
        if isinstance(stmt, mc.If):
            _, true_f, false_f = self._wire_cond(stmt.cond, frontier, "if_leaf")
            true_out = self._wire_block(stmt.then_body, true_f)
            false_out = self._wire_block(stmt.else_body, false_f)
            return true_out + false_out
        if isinstance(stmt, mc.While):
            return self._wire_loop(stmt.cond, stmt.body, None, frontier)
        if isinstance(stmt, mc.For):
            frontier = self._wire_stmt(stmt.init, frontier)
            return self._wire_loop(stmt.cond, stmt.body, stmt.step, frontier)
        if isinstance(stmt, mc.Switch):
            return self._wire_switch(stmt, frontier)
        raise TypeError(f"unhandled statement {stmt!r}")

    def _wire_loop(self, cond: mc.CondExpr, body: list[mc.Stmt],
                   step: mc.Stmt | None, frontier: _Frontier) -> _Frontier:
        self.loop_depth += 1
        head_idx, true_f, false_f = self._wire_cond(cond, frontier, "loop_cond")
        self.break_stack.append((True, []))
        body_out = self._wire_block(body, true_f)
        if step is not None:
            body_out = self._wire_stmt(step, body_out)
        self._patch(body_out, head_idx)  # back edge
        _, breaks = self.break_stack.pop()
        self.loop_depth -= 1
        return false_f + breaks

    def _wire_switch(self, stmt: mc.Switch, frontier: _Frontier) -> _Frontier:
        frontier = self._wire_calls(stmt.scrutinee, frontier)
        arity = len(stmt.cases) + 1
        head = self._node("control", stmt.uid, stmt.scrutinee.span,
                          f"switch {mc.format_expr(stmt.scrutinee)}",
                          cp_kind="switch_head", switch_arity=arity)
        self._patch(frontier, head.idx)
        self.break_stack.append((False, []))
        pending: _Frontier = []
        for i, case in enumerate(stmt.cases):
            entry_f = [(head.idx, EdgeLabel("case", i, arity))] + pending
            pending = self._wire_block(case.body, entry_f)
        default_edge = (head.idx, EdgeLabel("case", len(stmt.cases), arity))
        if stmt.default is not None:
            pending = self._wire_block(stmt.default, [default_edge] + pending)
        else:
            pending = [default_edge] + pending
        _, breaks = self.break_stack.pop()
        return pending + breaks

    # -- conditions ------------------------------------------------------------

    def _wire_cond(self, cond: mc.CondExpr, frontier: _Frontier,
                   cp_kind: str) -> tuple[int, _Frontier, _Frontier]:
        """Wire the short-circuit tree; returns (entry idx, true, false)."""
        tree = mc.to_nnf(cond)
        entry, true_f, false_f = self._wire_nnf(tree, cp_kind)
        self._patch(frontier, entry)
        return entry, true_f, false_f

    def _wire_nnf(self, tree: mc.NnfTree,
                  cp_kind: str) -> tuple[int, _Frontier, _Frontier]:
        if isinstance(tree, mc.ConditionLeaf):
            if isinstance(tree.node, mc.Comparison):
                exprs: list[mc.Expr] = [tree.node.left, tree.node.right]
            else:
                exprs = [tree.node.expr]
            chain: _Frontier = []
            first: int | None = None
            for e in exprs:
                for call in calls_in_expr(e):
                    node = self._make_call_node(call)
                    if first is None:
                        first = node.idx
                    else:
                        self._patch(chain, node.idx)
                    chain = [(node.idx, ALWAYS)]
            text = mc.format_expr(tree.node)
            if tree.negated:
                text = f"!({text})"
            leaf_node = self._node("control", tree.node.uid, tree.node.span,
                                   text, cp_kind=cp_kind, leaf=tree)
            if first is None:
                first = leaf_node.idx
            else:
                self._patch(chain, leaf_node.idx)
            return (first, [(leaf_node.idx, TRUE)], [(leaf_node.idx, FALSE)])
        left_entry, left_t, left_f = self._wire_nnf(tree.left, cp_kind)
        right_entry, right_t, right_f = self._wire_nnf(tree.right, cp_kind)
        if isinstance(tree, mc.NnfAnd):
            self._patch(left_t, right_entry)
            return (left_entry, right_t, left_f + right_f)
        self._patch(left_f, right_entry)
        return (left_entry, left_t + right_t, right_f)

    # -- embedded calls -----------------------------------------------------

    def _make_call_node(self, call: mc.CallExpr) -> CfgNode:
        args = ", ".join(mc.format_expr(a) for a in call.args)
        return self._node("call", call.uid, call.span,
                          f"{call.name}({args})", callee=call.name,
                          call_args=list(call.args))

    def _wire_calls(self, expr: mc.Expr, frontier: _Frontier) -> _Frontier:
        for call in calls_in_expr(expr):
            node = self._make_call_node(call)
            self._patch(frontier, node.idx)
            frontier = [(node.idx, ALWAYS)]
        return frontier


def calls_in_expr(expr: mc.Expr) -> list[mc.CallExpr]:
    """Call expressions in evaluation order (arguments before the call)."""
    out: list[mc.CallExpr] = []

    def visit(e: mc.Expr) -> None:
        if isinstance(e, mc.CallExpr):
            for arg in e.args:
                visit(arg)
            out.append(e)
        elif isinstance(e, mc.Neg):
            visit(e.operand)
        elif isinstance(e, mc.BinOp):
            visit(e.left)
            visit(e.right)

    visit(expr)
    return out


def build_cfg(function: mc.FunctionDef, file: str) -> FunctionCfg:
    cfg = _Builder(function, file).build()
    _compute_flags(cfg)
    return cfg


# ---------------------------------------------------------------------------
# Heuristic flags
# ---------------------------------------------------------------------------

def pointer_variables(function: mc.FunctionDef) -> set[str]:
    """Names with pointer type: pointer parameters plus a small fixpoint over
    assignments from NULL or other pointer variables."""
    ptrs = {p.name for p in function.params if p.kind == "ptr"}
    changed = True
    while changed:
        changed = False
        for node in mc.walk(function):
            if isinstance(node, mc.Assign):
                value = node.value
                is_ptr = isinstance(value, mc.NullLit) or (
                    isinstance(value, mc.Var) and value.name in ptrs)
                if is_ptr and node.target not in ptrs:
                    ptrs.add(node.target)
                    changed = True
    return ptrs


def _expr_is_pointer(expr: mc.Expr, ptrs: set[str]) -> bool:
    return isinstance(expr, mc.NullLit) or (
        isinstance(expr, mc.Var) and expr.name in ptrs)


def _is_zero(expr: mc.Expr) -> bool:
    return isinstance(expr, mc.IntLit) and expr.value == 0


def _compute_flags(cfg: FunctionCfg) -> None:
    ptrs = pointer_variables(cfg.function)
    for node in cfg.nodes:
        if node.kind != "control" or node.leaf is None:
            continue
        leaf = node.leaf
        inner = leaf.node
        if isinstance(inner, mc.Comparison):
            lhs_ptr = _expr_is_pointer(inner.left, ptrs)
            rhs_ptr = _expr_is_pointer(inner.right, ptrs)
            if inner.op in ("==", "!=") and (lhs_ptr or rhs_ptr):
                node.compares_pointer = True
                node.pointer_eq_true = (inner.op == "==") != leaf.negated
            elif inner.op in ("<", "<=", ">", ">="):
                base: bool | None = None
                if _is_zero(inner.right) and not lhs_ptr:
                    base = inner.op in ("<", "<=")
                elif _is_zero(inner.left) and not rhs_ptr:
                    base = inner.op in (">", ">=")
                if base is not None:
                    node.compares_int_nonpositive = True
                    node.nonpositive_true = base != leaf.negated
        elif isinstance(inner, mc.Truthy):
            if _expr_is_pointer(inner.expr, ptrs):
                # if (p) reads as p != NULL.
                node.compares_pointer = True
                node.pointer_eq_true = leaf.negated
        # Break / return guards come from the wired graph.
        succ_true = cfg.successor_by_label(node.idx, ("true", 0))
        succ_false = cfg.successor_by_label(node.idx, ("false", 0))
        node.break_on_true = _is_loop_break(cfg, succ_true)
        node.break_on_false = _is_loop_break(cfg, succ_false)
        node.is_loop_exit_guard = (
            node.loop_depth > 0
            and node.break_on_true != node.break_on_false)
        node.guards_return_on_true = _is_return(cfg, succ_true)
        node.guards_return_on_false = _is_return(cfg, succ_false)


def _is_loop_break(cfg: FunctionCfg, idx: int | None) -> bool:
    if idx is None:
        return False
    node = cfg.nodes[idx]
    return node.stmt_class == "break" and node.breaks_loop


def _is_return(cfg: FunctionCfg, idx: int | None) -> bool:
    if idx is None:
        return False
    return cfg.nodes[idx].stmt_class == "return"
