"""Control-only system dependence graph.

Vertices are function entries, control points (simple conditions, loop
conditions, switch heads), statements and call sites.  Labeled control
dependence edges are derived per function from postdominators using the
classic dominance-frontier construction; call edges connect call sites to
callee entries (context-insensitive).  Data dependences are out of scope.

Backward reachability over cd and call edges gives the control slice of a
vertex; a chop restricts the slice to what a given start vertex can reach.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field

from . import cfg as cfglib
from . import microc as mc
from .cfg import ALWAYS, FALSE, TRUE, EdgeLabel
from .spans import SourceSpan


class VertexNotFound(Exception):
    pass


@dataclass(frozen=True)
class VertexFlags:
    """Heuristic applicability, derived from the AST and the wired CFG.

    The *_true companions orient a heuristic: pointer_eq_true says the true
    branch asserts pointer equality (the 0.40 side), nonpositive_true that it
    asserts the <=0 / <0 comparison (the 0.16 side), break_on_true that the
    true edge jumps straight to a loop break.  Negations in the source are
    already folded into these orientations.
    """

    is_loop_exit_guard: bool = False
    guards_return_on_true: bool = False
    guards_return_on_false: bool = False
    compares_pointer: bool = False
    compares_int_nonpositive: bool = False
    break_on_true: bool = False
    pointer_eq_true: bool = False
    nonpositive_true: bool = False

    def to_json(self) -> dict[str, bool]:
        return {
            "is_loop_exit_guard": self.is_loop_exit_guard,
            "guards_return_on_true": self.guards_return_on_true,
            "guards_return_on_false": self.guards_return_on_false,
            "compares_pointer": self.compares_pointer,
            "compares_int_nonpositive": self.compares_int_nonpositive,
            "break_on_true": self.break_on_true,
            "pointer_eq_true": self.pointer_eq_true,
            "nonpositive_true": self.nonpositive_true,
        }


NO_FLAGS = VertexFlags()


@dataclass(eq=False)
class Vertex:
    id: int
    kind: str                   # "entry" | "control" | "statement" | "call"
    function: str
    span: SourceSpan
    text: str
    uid: int
    cp_kind: str | None = None  # "if_leaf" | "loop_cond" | "switch_head"
    callee: str | None = None
    switch_arity: int = 0
    flags: VertexFlags = NO_FLAGS

    def __repr__(self) -> str:  # compact, for assertion messages
        return f"<v{self.id} {self.kind} {self.function}: {self.text}>"


@dataclass(frozen=True)
class CdEdge:
    src: int
    dst: int
    label: EdgeLabel


@dataclass(frozen=True)
class Slice:
    """A set of vertices closed under the requested reachability."""

    root: int
    members: frozenset[int]
    cd_edges: tuple[CdEdge, ...]
    call_edges: tuple[tuple[int, int], ...]

    def __contains__(self, vertex: "Vertex | int") -> bool:
        vid = vertex.id if isinstance(vertex, Vertex) else vertex
        return vid in self.members


class Sdg:
    def __init__(self, program: mc.Program) -> None:
        self.program = program
        self.file = program.file
        self.vertices: list[Vertex] = []
        self.cd_edges: list[CdEdge] = []
        self.call_edges: list[tuple[int, int]] = []
        self.functions: dict[str, Vertex] = {}   # name -> entry vertex
        self.entry: Vertex | None = None
        self.diagnostics: list[str] = []
        self._out_cd: dict[int, list[tuple[int, EdgeLabel]]] = {}
        self._in_cd: dict[int, list[tuple[int, EdgeLabel]]] = {}
        self._callers: dict[int, list[int]] = {}  # entry id -> call site ids
        self._call_target: dict[int, int] = {}    # call site id -> entry id

    # -- lookups --------------------------------------------------------------

    def vertex(self, vid: int) -> Vertex:
        return self.vertices[vid]

    def entry_of(self, function: str) -> Vertex:
        try:
            return self.functions[function]
        except KeyError:
            raise VertexNotFound(f"unknown function {function!r}") from None

    def function_entry(self, vertex: Vertex) -> Vertex:
        return self.functions[vertex.function]

    def out_cd(self, vid: int) -> list[tuple[int, EdgeLabel]]:
        return self._out_cd.get(vid, [])

    def in_cd(self, vid: int) -> list[tuple[int, EdgeLabel]]:
        return self._in_cd.get(vid, [])

    def callers_of(self, entry_id: int) -> list[int]:
        return self._callers.get(entry_id, [])

    def call_target(self, call_id: int) -> int | None:
        return self._call_target.get(call_id)

    def control_points(self) -> list[Vertex]:
        return [v for v in self.vertices if v.kind == "control"]

    def vertex_at(self, file: str, line: int) -> Vertex:
        """Innermost vertex whose span covers the line; ties by lowest id."""
        base = os.path.basename(file)
        best: Vertex | None = None
        for v in self.vertices:
            span = v.span
            if span.file != file and os.path.basename(span.file) != base:
                continue
            if not span.covers_line(line):
                continue
            if best is None or span.size_key() < best.span.size_key():
                best = v
        if best is None:
            raise VertexNotFound(f"{file}:{line}: no vertex covers this line")
        return best

    # -- reachability ----------------------------------------------------------

    def _closure(self, start: int, neighbours) -> set[int]:
        seen = {start}
        stack = [start]
        while stack:
            vid = stack.pop()
            for nxt in neighbours(vid):
                if nxt not in seen:
                    seen.add(nxt)
                    stack.append(nxt)
        return seen

    def backward_reachable(self, vid: int) -> set[int]:
        def neighbours(x: int):
            for src, _label in self.in_cd(x):
                yield src
            if self.vertices[x].kind == "entry":
                yield from self.callers_of(x)
        return self._closure(vid, neighbours)

    def forward_reachable(self, vid: int) -> set[int]:
        def neighbours(x: int):
            for dst, _label in self.out_cd(x):
                yield dst
            target = self._call_target.get(x)
            if target is not None:
                yield target
        return self._closure(vid, neighbours)

    def _restrict(self, root: int, members: frozenset[int]) -> Slice:
        cd = tuple(e for e in self.cd_edges
                   if e.src in members and e.dst in members)
        calls = tuple((s, d) for s, d in self.call_edges
                      if s in members and d in members)
        return Slice(root=root, members=members, cd_edges=cd, call_edges=calls)

    def control_slice(self, vertex: Vertex) -> Slice:
        """Backward closure over cd and call edges; always contains the root."""
        members = frozenset(self.backward_reachable(vertex.id))
        return self._restrict(vertex.id, members)

    def chop(self, start: Vertex, target: Vertex) -> Slice:
        """Vertices on some start-to-target path, plus the target itself.

        When the target is unreachable from start the result holds only the
        target; callers detect that by checking start's membership.
        """
        back = self.backward_reachable(target.id)
        fwd = self.forward_reachable(start.id)
        members = frozenset((back & fwd) | {target.id})
        return self._restrict(target.id, members)

    # -- dumps ------------------------------------------------------------------

    def to_json(self) -> dict:
        vertices = []
        for v in self.vertices:
            vertices.append({
                "id": v.id,
                "kind": v.kind,
                "cp_kind": v.cp_kind,
                "function": v.function,
                "file": v.span.file,
                "line_start": v.span.line_start,
                "col_start": v.span.col_start,
                "line_end": v.span.line_end,
                "col_end": v.span.col_end,
                "text": v.text,
                "callee": v.callee,
                "switch_arity": v.switch_arity,
                "uid": v.uid,
                "flags": v.flags.to_json(),
            })
        return {
            "file": self.file,
            "entry": self.entry.id if self.entry else None,
            "vertices": vertices,
            "cd_edges": [{"from": e.src, "to": e.dst, "label": str(e.label)}
                         for e in self.cd_edges],
            "call_edges": [{"from": s, "to": d} for s, d in self.call_edges],
            "diagnostics": list(self.diagnostics),
        }

    def to_dot(self) -> str:
        lines = ["digraph sdg {", "    node [shape=box, fontname=monospace];"]
        shapes = {"entry": "ellipse", "control": "diamond",
                  "statement": "box", "call": "cds"}
        for v in self.vertices:
            text = v.text.replace("\\", "\\\\").replace('"', '\\"')
            lines.append(
                f'    v{v.id} [label="{v.id}: {text}", '
                f'shape={shapes[v.kind]}];')
        for e in self.cd_edges:
            lines.append(f'    v{e.src} -> v{e.dst} [label="{e.label}"];')
        for s, d in self.call_edges:
            lines.append(f'    v{s} -> v{d} [style=dashed];')
        lines.append("}")
        return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Construction
# ---------------------------------------------------------------------------

def build_sdg(program: mc.Program) -> Sdg:
    """Build the control-only dependence graph for a whole program.

    Vertex ids are dense and deterministic: functions in source order, and
    within a function the CFG creation order (entry first, then program
    points as they appear).
    """
    sdg = Sdg(program)
    cfgs: list[cfglib.FunctionCfg] = []
    vertex_of_node: list[dict[int, int]] = []  # per function: node idx -> vertex id

    for fn in program.functions:
        fcfg = cfglib.build_cfg(fn, program.file)
        cfgs.append(fcfg)
        mapping: dict[int, int] = {}
        for node in fcfg.nodes:
            if node.kind == "exit":
                continue
            vid = len(sdg.vertices)
            mapping[node.idx] = vid
            sdg.vertices.append(_make_vertex(vid, fn.name, node))
        vertex_of_node.append(mapping)
        entry_vertex = sdg.vertices[mapping[fcfg.entry.idx]]
        sdg.functions[fn.name] = entry_vertex

    if program.entry_name in sdg.functions:
        sdg.entry = sdg.functions[program.entry_name]

    seen_edges: set[tuple[int, int, tuple[str, int]]] = set()
    for fn_index, fcfg in enumerate(cfgs):
        mapping = vertex_of_node[fn_index]
        for src_idx, label, dst_idx in _control_dependences(fcfg):
            src, dst = mapping[src_idx], mapping[dst_idx]
            key = (src, dst, label.group_key())
            if key in seen_edges:
                continue
            seen_edges.add(key)
            sdg.cd_edges.append(CdEdge(src, dst, label))
        for node in fcfg.nodes:
            if node.kind != "call":
                continue
            cs_id = mapping[node.idx]
            callee = node.callee or ""
            if callee in sdg.functions:
                sdg.call_edges.append((cs_id, sdg.functions[callee].id))
            else:
                sdg.diagnostics.append(
                    f"warning: {node.span.describe()}: call to undefined "
                    f"function {callee!r}; no call edge")

    sdg.cd_edges.sort(key=lambda e: (e.src, e.label.sort_key(), e.dst))
    sdg.call_edges.sort()
    for e in sdg.cd_edges:
        sdg._out_cd.setdefault(e.src, []).append((e.dst, e.label))
        sdg._in_cd.setdefault(e.dst, []).append((e.src, e.label))
    for s, d in sdg.call_edges:
        sdg._callers.setdefault(d, []).append(s)
        sdg._call_target[s] = d
    return sdg


def _make_vertex(vid: int, function: str, node: cfglib.CfgNode) -> Vertex:
    flags = NO_FLAGS
    if node.kind == "control" and node.cp_kind != "switch_head":
        flags = VertexFlags(
            is_loop_exit_guard=node.is_loop_exit_guard,
            guards_return_on_true=node.guards_return_on_true,
            guards_return_on_false=node.guards_return_on_false,
            compares_pointer=node.compares_pointer,
            compares_int_nonpositive=node.compares_int_nonpositive,
            break_on_true=node.break_on_true,
            pointer_eq_true=node.pointer_eq_true,
            nonpositive_true=node.nonpositive_true,
        )
    return Vertex(id=vid, kind=node.kind, function=function, span=node.span,
                  text=node.text, uid=node.uid, cp_kind=node.cp_kind,
                  callee=node.callee, switch_arity=node.switch_arity,
                  flags=flags)


# ---------------------------------------------------------------------------
# Postdominators and control dependence
# ---------------------------------------------------------------------------

def _control_dependences(
        fcfg: cfglib.FunctionCfg) -> list[tuple[int, EdgeLabel, int]]:
    """Classic construction: for each CFG edge (u, w), every node on the
    postdominator tree path from w up to (excluding) ipdom(u) is control
    dependent on u with that edge's label.

    An augmented entry->exit edge makes unconditionally executed nodes
    dependent on the function entry.
    """
    assert fcfg.entry is not None and fcfg.exit is not None
    exit_idx = fcfg.exit.idx
    edges = list(fcfg.edges) + [(fcfg.entry.idx, exit_idx, ALWAYS)]
    ipdom = _immediate_postdominators(len(fcfg.nodes), edges, exit_idx)
    result: list[tuple[int, EdgeLabel, int]] = []
    for src, dst, label in edges:
        stop = ipdom.get(src)
        runner: int | None = dst
        while runner is not None and runner != stop and runner != exit_idx:
            result.append((src, label, runner))
            runner = ipdom.get(runner)
    return result


def _immediate_postdominators(
        n: int, edges: list[tuple[int, int, EdgeLabel]],
        exit_idx: int) -> dict[int, int]:
    succs: dict[int, list[int]] = {i: [] for i in range(n)}
    for src, dst, _label in edges:
        succs[src].append(dst)

    full = set(range(n))
    pdom: dict[int, set[int]] = {i: set(full) for i in range(n)}
    pdom[exit_idx] = {exit_idx}
    changed = True
    while changed:
        changed = False
        for v in range(n - 1, -1, -1):
            if v == exit_idx:
                continue
            out = succs[v]
            if not out:
                continue
            new = set(pdom[out[0]])
            for s in out[1:]:
                new &= pdom[s]
            new.add(v)
            if new != pdom[v]:
                pdom[v] = new
                changed = True

    ipdom: dict[int, int] = {}
    for v in range(n):
        if v == exit_idx:
            continue
        strict = pdom[v] - {v}
        want = len(strict)
        for cand in strict:
            if len(pdom[cand]) == want:
                ipdom[v] = cand
                break
    return ipdom
