"""Warning normalization and likelihood-based ranking.

Inspection tool output is normalized into (file, line, message) records,
each mapped to the innermost graph vertex covering its line, annotated with
that vertex's execution likelihood, and sorted so the most likely to execute
come first.  Warnings that map to no vertex sink to the bottom in input
order rather than failing the batch.
"""

from __future__ import annotations

import json
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .likelihood import BranchModel, LikelihoodEngine, SIMPLE
from .sdg import Sdg, Vertex, VertexNotFound

# gcc style: file:line[:col]: message  (the column, when present, is folded
# into nothing; messages keep their own inner colons)
_GCC_LINE = re.compile(
    r"^(?P<file>[^:\s][^:]*):(?P<line>\d+):(?:(?P<col>\d+):)?\s*(?P<message>.+)$")


@dataclass(frozen=True)
class WarningRecord:
    file: str
    line: int
    message: str
    severity: str | None = None

    def __post_init__(self) -> None:
        if self.line < 1:
            raise ValueError(f"warning line must be >= 1, got {self.line}")
        if not self.message:
            raise ValueError("warning message must be non-empty")


@dataclass
class RankedWarning:
    warning: WarningRecord
    rank: int
    vertex_id: int | None = None
    likelihood: float | None = None   # None iff unmapped

    @property
    def mapped(self) -> bool:
        return self.vertex_id is not None


@dataclass
class NormalizeReport:
    records: list[WarningRecord]
    malformed: int = 0
    duplicates: int = 0
    diagnostics: list[str] = field(default_factory=list)


def normalize_warnings(text: str, fmt: str = "gcc") -> NormalizeReport:
    """Parse warning text into records, preserving order.

    Duplicate (file, line, message) triples collapse to the first record;
    malformed lines/objects are skipped and counted, never fatal.
    """
    if fmt == "gcc":
        raw = _parse_gcc(text)
    elif fmt == "json":
        raw = _parse_json(text)
    else:
        raise ValueError(f"unknown warning format {fmt!r}")
    report = NormalizeReport(records=[])
    seen: set[tuple[str, int, str]] = set()
    for item in raw:
        if isinstance(item, str):
            report.malformed += 1
            report.diagnostics.append(item)
            continue
        key = (item.file, item.line, item.message)
        if key in seen:
            report.duplicates += 1
            continue
        seen.add(key)
        report.records.append(item)
    return report


def _parse_gcc(text: str) -> list[WarningRecord | str]:
    out: list[WarningRecord | str] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        m = _GCC_LINE.match(line)
        if m is None or not m.group("message").strip():
            out.append(f"line {lineno}: not in file:line: message form")
            continue
        out.append(WarningRecord(file=m.group("file"),
                                 line=int(m.group("line")),
                                 message=m.group("message").strip()))
    return out


def _parse_json(text: str) -> list[WarningRecord | str]:
    try:
        data = json.loads(text) if text.strip() else []
    except json.JSONDecodeError as exc:
        raise ValueError(f"warning input is not valid JSON: {exc}") from exc
    if not isinstance(data, list):
        raise ValueError("JSON warning input must be an array of objects")
    out: list[WarningRecord | str] = []
    for i, obj in enumerate(data):
        try:
            severity = obj.get("severity")
            out.append(WarningRecord(
                file=str(obj["file"]), line=int(obj["line"]),
                message=str(obj["message"]),
                severity=None if severity is None else str(severity)))
        except (TypeError, KeyError, ValueError, AttributeError):
            out.append(f"object {i}: missing or invalid file/line/message")
    return out


def rank(sdg: Sdg, warnings: list[WarningRecord],
         model: BranchModel = SIMPLE, start: Vertex | None = None,
         tiebreak: str = "location", jobs: int = 1) -> list[RankedWarning]:
    """Annotate warnings with execution likelihood and sort.

    Mapped warnings sort by likelihood descending, ties by (file, line,
    message); with tiebreak="severity" the severity string sorts before the
    location.  Unmapped warnings follow all mapped ones in input order.
    Annotation may fan out over threads; the result never depends on jobs.
    """
    if tiebreak not in ("location", "severity"):
        raise ValueError(f"unknown tiebreak {tiebreak!r}")
    engine = LikelihoodEngine(sdg)

    def annotate(warning: WarningRecord) -> tuple[int | None, float | None]:
        try:
            vertex = sdg.vertex_at(warning.file, warning.line)
        except VertexNotFound:
            return None, None
        return vertex.id, engine.query(vertex, start, model).likelihood

    if jobs > 1 and len(warnings) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            annotated = list(pool.map(annotate, warnings))
    else:
        annotated = [annotate(w) for w in warnings]

    mapped: list[RankedWarning] = []
    unmapped: list[RankedWarning] = []
    for warning, (vid, likelihood) in zip(warnings, annotated):
        item = RankedWarning(warning=warning, rank=0, vertex_id=vid,
                             likelihood=likelihood)
        (mapped if item.mapped else unmapped).append(item)

    def sort_key(item: RankedWarning):
        w = item.warning
        location = (w.file, w.line, w.message)
        if tiebreak == "severity":
            return (-item.likelihood, w.severity or "", location)
        return (-item.likelihood, location)

    mapped.sort(key=sort_key)
    ordered = mapped + unmapped
    for position, item in enumerate(ordered, start=1):
        item.rank = position
    return ordered


def render_tsv(items: list[RankedWarning]) -> str:
    lines = ["rank\tlikelihood\tfile\tline\tmessage"]
    for item in items:
        shown = "unmapped" if item.likelihood is None else f"{item.likelihood:.6f}"
        w = item.warning
        lines.append(f"{item.rank}\t{shown}\t{w.file}\t{w.line}\t{w.message}")
    return "\n".join(lines) + "\n"


def render_json(items: list[RankedWarning]) -> str:
    payload = []
    for item in items:
        w = item.warning
        payload.append({
            "rank": item.rank,
            "likelihood": item.likelihood,
            "vertex_id": item.vertex_id,
            "file": w.file,
            "line": w.line,
            "message": w.message,
            "severity": w.severity,
        })
    return json.dumps(payload, indent=2) + "\n"
