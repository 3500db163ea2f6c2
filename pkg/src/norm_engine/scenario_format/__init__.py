"""Scenario file format: parsing, validation, compilation, export."""

from __future__ import annotations

from pathlib import Path

from ..errors import CompileError, TraceError
from ..scenario import ScenarioDef
from .compiler import compile_scenario
from .export import export_dot, export_text
from .parser import parse
from .source import Diagnostic, ERROR, ScenarioSource, WARNING, has_errors
from .traces import TraceSource, format_trace, parse_action, parse_trace, resolve_trace
from .validator import validate

__all__ = [
    "Diagnostic", "ScenarioSource", "TraceSource",
    "parse", "validate", "compile_scenario", "load_scenario",
    "export_text", "export_dot", "parse_action", "parse_trace",
    "format_trace", "resolve_trace", "load_trace", "check_file",
    "ERROR", "WARNING", "has_errors",
]


def check_file(path: str | Path) -> list[Diagnostic]:
    """Parse and, when syntax is clean, validate a scenario file."""
    text = Path(path).read_text(encoding="utf-8")
    src, diags = parse(text, file=str(path))
    if src is None:
        return diags
    return validate(src)


def load_scenario(path: str | Path, variant: str | None = None) -> ScenarioDef:
    """Read, parse, validate, and compile one variant of a scenario file."""
    text = Path(path).read_text(encoding="utf-8")
    src, diags = parse(text, file=str(path))
    if src is None:
        raise CompileError(
            f"{path} has {sum(d.severity == ERROR for d in diags)} syntax error(s)",
            tuple(diags))
    return compile_scenario(src, variant=variant)


def _read_trace(path: Path) -> TraceSource:
    src, diags = parse_trace(path.read_text(encoding="utf-8"), file=str(path))
    if src is None:
        raise TraceError("; ".join(str(d) for d in diags if d.severity == ERROR))
    return src


def load_trace(path: str | Path, search: tuple[str | Path, ...] = ()) -> TraceSource:
    """Read and materialise a trace file.

    Base references resolve to `<id>.trace` files next to the trace itself,
    then in the extra search directories, in order.
    """
    path = Path(path)
    dirs = (path.parent, *map(Path, search))

    def lookup(trace_id: str) -> TraceSource | None:
        for d in dirs:
            candidate = d / f"{trace_id}.trace"
            if candidate.is_file():
                return _read_trace(candidate)
        return None

    return resolve_trace(_read_trace(path), lookup)
