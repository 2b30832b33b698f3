"""Execution likelihood of program points.

The likelihood of a vertex is the probability that it executes at least once
per run, estimated by a demand-driven walk of the control dependence graph
restricted to a chop between the start vertex and the target.

The interprocedural value factors through function entries:

    e(v) = e(Entry(f)) * p(Entry(f) -> v)        for v in function f

where p is the intraprocedural path probability and e(Entry(f)) combines the
likelihoods of reaching any call site of f.  Call sites within one caller are
resolved in a single multi-target walk so that shared guards are counted
once; contributions from distinct caller functions combine with noisy-or.

Branch probabilities come from one of two models: "simple" splits every
condition evenly, "heuristic" applies static branch prediction heuristics
combined with Dempster-Shafer evidence combination.
"""

from __future__ import annotations

from dataclasses import dataclass
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence

from .cfg import TRUE, EdgeLabel
from .sdg import Sdg, Vertex

# Branch prediction hit rates for the heuristic model.  Each entry is the
# probability that the branch jumps the way the heuristic predicts.
HEURISTIC_TABLE: Mapping[str, float] = MappingProxyType({
    "loop_branch": 0.88,
    "pointer": 0.40,
    "value_check": 0.16,
    "loop_exit": 0.20,
    "return": 0.28,
})

_EPS = 1e-12


@dataclass(frozen=True)
class BranchModel:
    variant: str  # "simple" | "heuristic"
    table: Mapping[str, float] = HEURISTIC_TABLE

    def __post_init__(self) -> None:
        if self.variant not in ("simple", "heuristic"):
            raise ValueError(f"unknown branch model {self.variant!r}")
        missing = set(HEURISTIC_TABLE) - set(self.table)
        if missing:
            raise ValueError(f"branch model table missing {sorted(missing)}")

    def _key(self) -> tuple:
        return (self.variant, tuple(sorted(self.table.items())))


SIMPLE = BranchModel("simple")
HEURISTIC = BranchModel("heuristic")


def model_by_name(name: str) -> BranchModel:
    if name == "simple":
        return SIMPLE
    if name == "heuristic":
        return HEURISTIC
    raise ValueError(f"unknown branch model {name!r}")


@dataclass(frozen=True)
class LikelihoodQuery:
    target: Vertex
    start: Vertex | None = None
    model: BranchModel = SIMPLE


@dataclass(frozen=True)
class LikelihoodResult:
    vertex: Vertex
    likelihood: float
    model: str
    start: Vertex
    unreachable: bool = False


def noisy_or(values: Iterable[float]) -> float:
    """Probability that at least one independent event occurs."""
    miss = 1.0
    for p in values:
        miss *= 1.0 - p
    return 1.0 - miss


def dempster_shafer_combine(p: float, q: float) -> float:
    """Combine two independent probability estimates for the same branch."""
    agree = p * q
    norm = agree + (1.0 - p) * (1.0 - q)
    if norm == 0.0:
        raise ValueError(
            f"total conflict: cannot combine branch estimates {p} and {q}")
    return agree / norm


def _heuristic_true_probability(vertex: Vertex,
                                table: Mapping[str, float]) -> float | None:
    """Fold every applicable heuristic into P(true edge), or None."""
    f = vertex.flags
    estimates: list[float] = []
    if vertex.cp_kind == "loop_cond":
        estimates.append(table["loop_branch"])
    if f.compares_pointer:
        p = table["pointer"]
        estimates.append(p if f.pointer_eq_true else 1.0 - p)
    if f.compares_int_nonpositive:
        p = table["value_check"]
        estimates.append(p if f.nonpositive_true else 1.0 - p)
    if f.is_loop_exit_guard:
        p = table["loop_exit"]
        estimates.append(p if f.break_on_true else 1.0 - p)
    if f.guards_return_on_true != f.guards_return_on_false:
        p = table["return"]
        estimates.append(p if f.guards_return_on_true else 1.0 - p)
    if not estimates:
        return None
    combined = estimates[0]
    for p in estimates[1:]:
        combined = dempster_shafer_combine(combined, p)
    return combined


def branch_probability(vertex: Vertex, label: EdgeLabel,
                       model: BranchModel = SIMPLE) -> float:
    """Probability of leaving a control vertex along edges with this label."""
    if vertex.kind != "control":
        raise ValueError(
            f"branch probability requires a control vertex, got {vertex!r}")
    if vertex.cp_kind == "switch_head":
        if label.kind != "case":
            raise ValueError(f"switch head takes case labels, not {label}")
        return 1.0 / vertex.switch_arity
    if label.kind not in ("true", "false"):
        raise ValueError(f"condition vertex takes true/false labels, not {label}")
    if vertex.cp_kind == "loop_cond" and label.kind == "false":
        # Loops are assumed to terminate: the exit edge is eventually taken.
        return 1.0
    if model.variant == "simple":
        p_true = 1.0 if vertex.cp_kind == "loop_cond" else 0.5
    else:
        combined = _heuristic_true_probability(vertex, model.table)
        p_true = 0.5 if combined is None else combined
    return p_true if label.kind == "true" else 1.0 - p_true


class LikelihoodEngine:
    """Demand-driven evaluator with a persistent entry-likelihood cache.

    Entry likelihoods are memoized per (start, entry, model) so repeated and
    batched queries reuse them; values computed under a recursion cut are
    context dependent and bypass the cache.  Batched results are therefore
    identical to fresh single queries.
    """

    def __init__(self, sdg: Sdg) -> None:
        self.sdg = sdg
        self._entry_cache: dict[tuple, float] = {}
        self._chop_cache: dict[tuple[int, int], frozenset[int]] = {}
        self._forward_cache: dict[int, frozenset[int]] = {}

    # -- public API -------------------------------------------------------

    def query(self, target: Vertex, start: Vertex | None = None,
              model: BranchModel = SIMPLE) -> LikelihoodResult:
        start = self._resolve_start(start)
        self._check_vertex(target)
        self._check_vertex(start)
        members = self._chop(start.id, target.id)
        if start.id not in members:
            return LikelihoodResult(vertex=target, likelihood=0.0,
                                    model=model.variant, start=start,
                                    unreachable=True)
        value, _clean = self._vertex_prob(target.id, start.id, members, model, ())
        assert -_EPS <= value <= 1.0 + _EPS, f"likelihood {value} out of range"
        return LikelihoodResult(vertex=target,
                                likelihood=min(1.0, max(0.0, value)),
                                model=model.variant, start=start)

    def batch(self, targets: Sequence[Vertex], start: Vertex | None = None,
              model: BranchModel = SIMPLE) -> list[LikelihoodResult]:
        return [self.query(t, start, model) for t in targets]

    # -- internals ---------------------------------------------------------

    def _resolve_start(self, start: Vertex | None) -> Vertex:
        if start is not None:
            return start
        if self.sdg.entry is None:
            raise ValueError(
                f"program has no {self.sdg.program.entry_name!r} function; "
                "pass an explicit start vertex")
        return self.sdg.entry

    def _check_vertex(self, vertex: Vertex) -> None:
        vs = self.sdg.vertices
        if not (0 <= vertex.id < len(vs)) or vs[vertex.id] is not vertex:
            raise ValueError(f"vertex {vertex!r} does not belong to this graph")

    def _chop(self, start_id: int, target_id: int) -> frozenset[int]:
        key = (start_id, target_id)
        cached = self._chop_cache.get(key)
        if cached is None:
            forward = self._forward_cache.get(start_id)
            if forward is None:
                forward = frozenset(self.sdg.forward_reachable(start_id))
                self._forward_cache[start_id] = forward
            cached = frozenset(
                (self.sdg.backward_reachable(target_id) & forward)
                | {target_id})
            self._chop_cache[key] = cached
        return cached

    def _vertex_prob(self, vid: int, start_id: int,
                     members: frozenset[int], model: BranchModel,
                     stack: tuple[int, ...]) -> tuple[float, bool]:
        """Likelihood of vid relative to start, within the chop members."""
        if vid == start_id:
            return 1.0, True
        vertex = self.sdg.vertices[vid]
        entry = self.sdg.functions[vertex.function]
        if vid == entry.id:
            return self._entry_prob(vid, start_id, model, stack)
        start_vertex = self.sdg.vertices[start_id]
        if start_vertex.function == vertex.function and start_id != entry.id:
            base, clean, root = 1.0, True, start_id
        else:
            base, clean = self._entry_prob(entry.id, start_id, model, stack)
            root = entry.id
        if base == 0.0:
            return 0.0, clean
        local = self._local_prob(root, frozenset((vid,)), members, model)
        return base * local, clean

    def _entry_prob(self, entry_id: int, start_id: int, model: BranchModel,
                    stack: tuple[int, ...]) -> tuple[float, bool]:
        """Likelihood that the function behind entry_id is entered at all.

        Noisy-or over caller functions; within one caller all call sites are
        resolved by a single multi-target walk so a shared guard contributes
        once.  Recursion is cut by returning 0 for entries already being
        computed; such values are context dependent and are not cached.
        """
        if entry_id == start_id:
            return 1.0, True
        key = (start_id, entry_id) + model._key()
        cached = self._entry_cache.get(key)
        if cached is not None:
            return cached, True
        if entry_id in stack:
            return 0.0, False
        members = self._chop(start_id, entry_id)
        if start_id not in members:
            self._entry_cache[key] = 0.0
            return 0.0, True
        call_sites = [cs for cs in self.sdg.callers_of(entry_id)
                      if cs in members]
        by_caller: dict[str, list[int]] = {}
        for cs in call_sites:
            by_caller.setdefault(self.sdg.vertices[cs].function, []).append(cs)
        contributions: list[float] = []
        clean = True
        inner = stack + (entry_id,)
        start_vertex = self.sdg.vertices[start_id]
        for caller, sites in by_caller.items():
            caller_entry = self.sdg.functions[caller]
            if (start_vertex.function == caller
                    and start_id != caller_entry.id):
                base, base_clean, root = 1.0, True, start_id
            else:
                base, base_clean = self._entry_prob(
                    caller_entry.id, start_id, model, inner)
                root = caller_entry.id
            clean = clean and base_clean
            if base == 0.0:
                continue
            local = self._local_prob(root, frozenset(sites), members, model)
            contributions.append(base * local)
        value = noisy_or(contributions)
        if clean:
            self._entry_cache[key] = value
        return value, clean

    def _local_prob(self, root_id: int, targets: frozenset[int],
                    members: frozenset[int], model: BranchModel) -> float:
        """Probability of reaching any target from root over cd edges.

        Walks forward within one function: children are grouped by edge
        label, alternatives under one label combine with noisy-or, and the
        vertex's branch semantics mix the label groups.  Vertices already on
        the current path are skipped (loop-carried dependence cycles); values
        observed under such a cut are path dependent and stay out of the memo.
        """
        sdg = self.sdg
        memo: dict[int, float] = {}
        on_path: set[int] = set()

        def visit(vid: int) -> tuple[float, bool]:
            if vid in targets:
                return 1.0, True
            cached = memo.get(vid)
            if cached is not None:
                return cached, True
            on_path.add(vid)
            groups: dict[tuple[str, int], list[float]] = {}
            clean = True
            try:
                for dst, label in sdg.out_cd(vid):
                    if dst not in members:
                        continue
                    if dst in on_path:
                        clean = False
                        continue
                    value, sub_clean = visit(dst)
                    clean = clean and sub_clean
                    groups.setdefault(label.group_key(), []).append(value)
            finally:
                on_path.discard(vid)
            value = self._mix(vid, groups, model)
            if clean:
                memo[vid] = value
            return value, clean

        return visit(root_id)[0]

    def _mix(self, vid: int, groups: dict[tuple[str, int], list[float]],
             model: BranchModel) -> float:
        """Mix per-label reach probabilities according to vertex semantics."""
        if not groups:
            return 0.0
        vertex = self.sdg.vertices[vid]
        if vertex.kind != "control":
            # Entry, statement and call vertices pass through their single
            # unconditional group.
            return noisy_or(groups.get(("always", 0), ()))
        if vertex.cp_kind == "switch_head":
            total = sum(noisy_or(vals) for vals in groups.values())
            return total / vertex.switch_arity
        reach_true = noisy_or(groups.get(("true", 0), ()))
        reach_false = noisy_or(groups.get(("false", 0), ()))
        if vertex.cp_kind == "loop_cond":
            # Some iteration may reach a target in the body, or the exit path
            # reaches one after termination; the two routes are combined as
            # independent alternatives.
            factor = branch_probability(vertex, TRUE, model)
            return noisy_or((factor * reach_true, reach_false))
        p_true = branch_probability(vertex, TRUE, model)
        return p_true * reach_true + (1.0 - p_true) * reach_false


def execution_likelihood(sdg: Sdg, query: LikelihoodQuery) -> LikelihoodResult:
    return LikelihoodEngine(sdg).query(query.target, query.start, query.model)


def batch_likelihood(sdg: Sdg, targets: Sequence[Vertex],
                     start: Vertex | None = None,
                     model: BranchModel = SIMPLE) -> list[LikelihoodResult]:
    return LikelihoodEngine(sdg).batch(targets, start, model)
