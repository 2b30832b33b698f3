"""Source location spans shared by the frontend, the graph layer and the CLI."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class SourceSpan:
    """Half-open is tempting, but tools downstream want inclusive columns.

    Lines and columns are 1-based.  A span covers every character from
    (line_start, col_start) to (line_end, col_end) inclusive.
    """

    file: str
    line_start: int
    col_start: int
    line_end: int
    col_end: int

    def __post_init__(self) -> None:
        if self.line_start > self.line_end:
            raise ValueError(f"span lines out of order: {self}")
        if self.line_start == self.line_end and self.col_start > self.col_end:
            raise ValueError(f"span columns out of order: {self}")

    def covers_line(self, line: int) -> bool:
        return self.line_start <= line <= self.line_end

    def size_key(self) -> tuple[int, int]:
        """Sort key such that smaller (inner) spans order first."""
        return (self.line_end - self.line_start, self.col_end - self.col_start)

    def merge(self, other: "SourceSpan") -> "SourceSpan":
        """Smallest span covering both operands (same file only)."""
        if self.file != other.file:
            raise ValueError("cannot merge spans from different files")
        start = min((self.line_start, self.col_start), (other.line_start, other.col_start))
        end = max((self.line_end, self.col_end), (other.line_end, other.col_end))
        return SourceSpan(self.file, start[0], start[1], end[0], end[1])

    def describe(self) -> str:
        return f"{self.file}:{self.line_start}:{self.col_start}"
