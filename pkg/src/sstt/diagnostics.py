"""Source spans, diagnostics and the errors that produce them."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

CODES = (
    "E-MISMATCH",
    "E-BOUNDARY",
    "E-TOPE",
    "E-UNBOUND",
    "E-UNIVERSE",
    "E-CLAUSE-CONFLICT",
    "E-FUEL",
    "E-PARSE",
)


@dataclass(frozen=True)
class SourceSpan:
    file: str
    start_line: int
    start_col: int
    end_line: int
    end_col: int

    def __post_init__(self):
        if (self.start_line, self.start_col) > (self.end_line, self.end_col):
            raise ValueError(f"span ends before it starts: {self}")

    def encloses(self, other: "SourceSpan") -> bool:
        return (self.start_line, self.start_col) <= (other.start_line, other.start_col) and (
            other.end_line,
            other.end_col,
        ) <= (self.end_line, self.end_col)

    def to_json(self):
        return {
            "startLine": self.start_line,
            "startCol": self.start_col,
            "endLine": self.end_line,
            "endCol": self.end_col,
        }

    def __str__(self):
        return f"{self.file}:{self.start_line}:{self.start_col}"


@dataclass(frozen=True)
class Diagnostic:
    file: str
    span: SourceSpan
    code: str
    message: str
    trace: tuple = ()

    def to_json(self):
        return {
            "file": self.file,
            "span": self.span.to_json(),
            "code": self.code,
            "message": self.message,
            "trace": list(self.trace),
        }

    def render(self, frames: int | None = 3, color: bool = False) -> str:
        code = f"\x1b[31m{self.code}\x1b[0m" if color else self.code
        lines = [f"{self.span}: {code}: {self.message}"]
        shown = self.trace if frames is None else self.trace[-frames:]
        hidden = len(self.trace) - len(shown)
        if hidden:
            lines.append(f"  ... {hidden} outer frame(s) hidden, use --full-trace")
        lines += [f"  in {frame}" for frame in shown]
        return "\n".join(lines)


def diagnostics_json(diagnostics) -> str:
    return json.dumps([d.to_json() for d in diagnostics], ensure_ascii=False, sort_keys=True, indent=2)


class ParseError(Exception):
    def __init__(self, message, line, col, end_line=None, end_col=None):
        super().__init__(message)
        self.message = message
        self.line, self.col = line, col
        self.end_line = end_line if end_line is not None else line
        self.end_col = end_col if end_col is not None else col


@dataclass
class CheckError(Exception):
    """A type error; `trace` lists the enclosing judgments, outermost first."""

    code: str
    message: str
    trace: list = field(default_factory=list)

    def __str__(self):
        return f"{self.code}: {self.message}"


class FuelExhausted(Exception):
    """The evaluation budget ran out."""
