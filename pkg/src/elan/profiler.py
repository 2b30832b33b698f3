"""Reference interpreter and dynamic profiler for MicroC.

Runs a program on concrete input vectors and records which graph vertices
executed at least once per run.  The per-vertex fraction of runs is the
measured ground truth that predicted likelihoods are evaluated against.

Semantics notes:
  * all values are integers; pointers are opaque integers with NULL == 0;
    `if (x)` tests x != 0
  * input() consumes the next value of the run's vector, or 0 when exhausted
  * reading a never-assigned variable, calling an unknown function, arity
    mismatches, division by zero and call-depth overflow are runtime errors;
    the partial trace is kept and the run still counts toward the profile
  * division and modulo truncate toward zero (C semantics)
  * a condition evaluates its simple leaves left to right with short-circuit,
    visiting exactly the leaves the CFG would traverse
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field

from . import microc as mc
from .sdg import Sdg, build_sdg

DEFAULT_STEP_LIMIT = 1_000_000
CALL_DEPTH_LIMIT = 200

OUTCOME_COMPLETED = "completed"
OUTCOME_STEP_LIMIT = "step-limit"
OUTCOME_RUNTIME_ERROR = "runtime-error"


@dataclass(frozen=True)
class RunInput:
    name: str
    values: tuple[int, ...]

    @staticmethod
    def of(name: str, values) -> "RunInput":
        return RunInput(name, tuple(int(v) for v in values))


@dataclass
class ExecutionTrace:
    visited: set[int]            # vertex ids executed at least once
    steps: int
    outcome: str                 # completed | step-limit | runtime-error
    result: int | None = None    # entry function's return value, if completed
    error: str | None = None


@dataclass
class ProfileData:
    run_count: int
    fractions: dict[int, float]        # vertex id -> fraction of runs visited
    line_fractions: dict[str, float]   # "file:line" -> fraction of runs
    completed_runs: int = 0
    error_runs: int = 0
    step_limit_runs: int = 0
    errors: list[str] = field(default_factory=list)


class MicrocRuntimeError(Exception):
    pass


class _StepLimit(Exception):
    pass


class _BreakSignal(Exception):
    pass


class _ReturnSignal(Exception):
    def __init__(self, value: int) -> None:
        self.value = value


class _Interp:
    def __init__(self, program: mc.Program, sdg: Sdg, values: tuple[int, ...],
                 step_limit: int) -> None:
        self.program = program
        self.functions = {f.name: f for f in program.functions}
        self.vertex_of_uid = {v.uid: v.id for v in sdg.vertices}
        self.values = values
        self.cursor = 0
        self.step_limit = step_limit
        self.steps = 0
        self.visited: set[int] = set()
        self.depth = 0
        self._nnf_cache: dict[int, object] = {}

    # -- bookkeeping --------------------------------------------------------

    def _mark(self, uid: int) -> None:
        vid = self.vertex_of_uid.get(uid)
        if vid is not None:
            self.visited.add(vid)

    def _step(self) -> None:
        if self.steps >= self.step_limit:
            raise _StepLimit()
        self.steps += 1

    # -- driving --------------------------------------------------------------

    def run(self) -> int:
        entry = self.program.function(self.program.entry_name)
        if entry is None:
            raise MicrocRuntimeError(
                f"program has no {self.program.entry_name!r} function")
        return self.call(entry, [0] * len(entry.params))

    def call(self, fn: mc.FunctionDef, args: list[int]) -> int:
        if len(args) != len(fn.params):
            raise MicrocRuntimeError(
                f"{fn.name} expects {len(fn.params)} arguments, got {len(args)}")
        if self.depth >= CALL_DEPTH_LIMIT:
            raise MicrocRuntimeError(f"call depth limit exceeded in {fn.name}")
        self.depth += 1
        self._mark(fn.uid)
        env = {p.name: a for p, a in zip(fn.params, args)}
        try:
            self.exec_block(fn.body, env)
        except _ReturnSignal as sig:
            return sig.value
        finally:
            self.depth -= 1
        return 0

    # -- statements --------------------------------------------------------------

    def exec_block(self, stmts: list[mc.Stmt], env: dict[str, int]) -> None:
        for stmt in stmts:
            self.exec_stmt(stmt, env)

    def exec_stmt(self, stmt: mc.Stmt, env: dict[str, int]) -> None:
        self._step()
        if isinstance(stmt, mc.Assign):
            value = self.eval_expr(stmt.value, env)
            self._mark(stmt.uid)
            env[stmt.target] = value
        elif isinstance(stmt, mc.ExprStmt):
            self.eval_expr(stmt.expr, env)
            self._mark(stmt.uid)
        elif isinstance(stmt, mc.CallStmt):
            args = [self.eval_expr(a, env) for a in stmt.args]
            self._mark(stmt.uid)
            self._invoke(stmt.name, args, stmt)
        elif isinstance(stmt, mc.Return):
            value = 0
            if stmt.value is not None:
                value = self.eval_expr(stmt.value, env)
            self._mark(stmt.uid)
            raise _ReturnSignal(value)
        elif isinstance(stmt, mc.Break):
            self._mark(stmt.uid)
            raise _BreakSignal()
        elif isinstance(stmt, mc.If):
            if self.eval_cond(stmt.cond, env):
                self.exec_block(stmt.then_body, env)
            else:
                self.exec_block(stmt.else_body, env)
        elif isinstance(stmt, mc.While):
            try:
                while self.eval_cond(stmt.cond, env):
                    self.exec_block(stmt.body, env)
            except _BreakSignal:
                pass
        elif isinstance(stmt, mc.For):
            if stmt.init is not None:
                self.exec_stmt(stmt.init, env)
            try:
                while stmt.cond is None or self.eval_cond(stmt.cond, env):
                    self.exec_block(stmt.body, env)
                    if stmt.step is not None:
                        self.exec_stmt(stmt.step, env)
            except _BreakSignal:
                pass
        elif isinstance(stmt, mc.Switch):
            self.exec_switch(stmt, env)
        else:  # pragma: no cover - parser produces no other statements
            raise MicrocRuntimeError(f"cannot execute {type(stmt).__name__}")

    def exec_switch(self, stmt: mc.Switch, env: dict[str, int]) -> None:
        scrutinee = self.eval_expr(stmt.scrutinee, env)
        self._mark(stmt.uid)
        bodies = [case.body for case in stmt.cases]
        start = None
        for i, case in enumerate(stmt.cases):
            if case.value == scrutinee:
                start = i
                break
        if stmt.default is not None:
            bodies.append(stmt.default)
            if start is None:
                start = len(bodies) - 1
        if start is None:
            return
        try:
            for body in bodies[start:]:
                self.exec_block(body, env)
        except _BreakSignal:
            pass

    # -- expressions -----------------------------------------------------------

    def _invoke(self, name: str, args: list[int], site: mc.Node) -> int:
        fn = self.functions.get(name)
        if fn is None:
            raise MicrocRuntimeError(
                f"{site.span.describe()}: call to undefined function {name!r}")
        return self.call(fn, args)

    def eval_expr(self, expr: mc.Expr, env: dict[str, int]) -> int:
        if isinstance(expr, mc.IntLit):
            return expr.value
        if isinstance(expr, mc.NullLit):
            return 0
        if isinstance(expr, mc.Var):
            try:
                return env[expr.name]
            except KeyError:
                raise MicrocRuntimeError(
                    f"{expr.span.describe()}: read of unassigned variable "
                    f"{expr.name!r}") from None
        if isinstance(expr, mc.Neg):
            return -self.eval_expr(expr.operand, env)
        if isinstance(expr, mc.BinOp):
            left = self.eval_expr(expr.left, env)
            right = self.eval_expr(expr.right, env)
            return self._arith(expr, left, right)
        if isinstance(expr, mc.CallExpr):
            args = [self.eval_expr(a, env) for a in expr.args]
            self._mark(expr.uid)
            return self._invoke(expr.name, args, expr)
        if isinstance(expr, mc.InputExpr):
            if self.cursor < len(self.values):
                value = self.values[self.cursor]
                self.cursor += 1
                return value
            return 0
        raise MicrocRuntimeError(  # pragma: no cover
            f"cannot evaluate {type(expr).__name__}")

    def _arith(self, expr: mc.BinOp, left: int, right: int) -> int:
        op = expr.op
        if op == "+":
            return left + right
        if op == "-":
            return left - right
        if op == "*":
            return left * right
        if right == 0 and op in ("/", "%"):
            raise MicrocRuntimeError(f"{expr.span.describe()}: division by zero")
        if op == "/":
            q = abs(left) // abs(right)
            return -q if (left < 0) != (right < 0) else q
        if op == "%":
            q = abs(left) // abs(right)
            q = -q if (left < 0) != (right < 0) else q
            return left - q * right
        raise MicrocRuntimeError(  # pragma: no cover
            f"unknown operator {op!r}")

    # -- conditions ----------------------------------------------------------

    def eval_cond(self, cond: mc.Cond, env: dict[str, int]) -> bool:
        tree = self._nnf_cache.get(id(cond))
        if tree is None:
            tree = mc.to_nnf(cond)
            self._nnf_cache[id(cond)] = tree
        return self._eval_nnf(tree, env)

    def _eval_nnf(self, tree, env: dict[str, int]) -> bool:
        if isinstance(tree, mc.NnfAnd):
            return self._eval_nnf(tree.left, env) and self._eval_nnf(tree.right, env)
        if isinstance(tree, mc.NnfOr):
            return self._eval_nnf(tree.left, env) or self._eval_nnf(tree.right, env)
        return self._eval_leaf(tree, env)

    def _eval_leaf(self, leaf: mc.ConditionLeaf, env: dict[str, int]) -> bool:
        self._step()
        node = leaf.node
        if isinstance(node, mc.Comparison):
            left = self.eval_expr(node.left, env)
            right = self.eval_expr(node.right, env)
            result = self._compare(node.op, left, right)
        else:
            result = self.eval_expr(node.expr, env) != 0
        self._mark(node.uid)
        return not result if leaf.negated else result

    @staticmethod
    def _compare(op: str, left: int, right: int) -> bool:
        if op == "==":
            return left == right
        if op == "!=":
            return left != right
        if op == "<":
            return left < right
        if op == "<=":
            return left <= right
        if op == ">":
            return left > right
        return left >= right


def interpret(program: mc.Program, run_input: RunInput,
              step_limit: int = DEFAULT_STEP_LIMIT,
              sdg: Sdg | None = None) -> ExecutionTrace:
    """Execute one run and return its trace.

    Runtime errors and step-limit aborts keep the partial visited set.
    """
    if sdg is None:
        sdg = build_sdg(program)
    interp = _Interp(program, sdg, run_input.values, step_limit)
    # each MicroC call consumes a handful of Python frames; make sure the
    # MicroC depth guard fires before Python's own recursion limit
    old_limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old_limit, CALL_DEPTH_LIMIT * 40 + 1000))
    try:
        result = interp.run()
    except MicrocRuntimeError as exc:
        return ExecutionTrace(visited=interp.visited, steps=interp.steps,
                              outcome=OUTCOME_RUNTIME_ERROR, error=str(exc))
    except _StepLimit:
        return ExecutionTrace(visited=interp.visited, steps=interp.steps,
                              outcome=OUTCOME_STEP_LIMIT,
                              error=f"step limit {step_limit} exceeded")
    finally:
        sys.setrecursionlimit(old_limit)
    return ExecutionTrace(visited=interp.visited, steps=interp.steps,
                          outcome=OUTCOME_COMPLETED, result=result)


def profile(program: mc.Program, inputs: list[RunInput],
            step_limit: int = DEFAULT_STEP_LIMIT,
            sdg: Sdg | None = None) -> ProfileData:
    """Run every input and aggregate per-vertex visit fractions.

    All runs count toward the denominator, including aborted ones: a vertex's
    fraction is the share of runs in which it executed at least once.
    """
    if not inputs:
        raise ValueError("profile requires at least one run input")
    if sdg is None:
        sdg = build_sdg(program)
    vertex_hits = {v.id: 0 for v in sdg.vertices}
    line_hits: dict[str, int] = {}
    data = ProfileData(run_count=len(inputs), fractions={}, line_fractions={})
    for run_input in inputs:
        trace = interpret(program, run_input, step_limit, sdg)
        if trace.outcome == OUTCOME_COMPLETED:
            data.completed_runs += 1
        elif trace.outcome == OUTCOME_STEP_LIMIT:
            data.step_limit_runs += 1
        else:
            data.error_runs += 1
            data.errors.append(f"{run_input.name}: {trace.error}")
        lines: set[str] = set()
        for vid in trace.visited:
            vertex_hits[vid] += 1
            span = sdg.vertices[vid].span
            for line in range(span.line_start, span.line_end + 1):
                lines.add(f"{span.file}:{line}")
        for key in lines:
            line_hits[key] = line_hits.get(key, 0) + 1
    n = len(inputs)
    data.fractions = {vid: hits / n for vid, hits in vertex_hits.items()}
    data.line_fractions = {key: hits / n for key, hits in sorted(line_hits.items())}
    return data
