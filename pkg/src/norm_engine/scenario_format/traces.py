"""Trace files: recorded or authored action lists for one scenario.

Format, one action per line after a header:

    trace sell_success scenario=spanish_steps variant=with_spouse
    alpha1 Seller
    alpha13 Seller t=15

A trace may instead continue another one: `base=<trace> branch_at=<n>` in the
header makes the loader prepend the first n actions of the base trace, which
is how counterfactual traces share their parent's prefix by construction.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable

from ..errors import TraceError
from ..model import ActionInstance
from .parser import Parser, _Abort, tokenize_line
from .source import Diagnostic, ERROR, sort_diagnostics


@dataclass(frozen=True)
class TraceSource:
    """A parsed trace file, before base-trace resolution."""

    id: str
    scenario: str
    variant: str | None
    base: str | None
    branch_at: int | None
    actions: tuple[ActionInstance, ...]
    file: str = "<trace>"


def parse_trace(text: str, file: str = "<trace>") -> tuple[TraceSource | None, list[Diagnostic]]:
    """Parse a trace file; returns (trace, diagnostics), trace None on error."""
    diags: list[Diagnostic] = []
    header = None
    actions: list[ActionInstance] = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        tokens = tokenize_line(raw, line_no, file, diags)
        if not tokens:
            continue
        p = Parser(tokens, file, diags)
        try:
            if header is None:
                head = p.expect_name("the trace header")
                if head.value != "trace":
                    p.error("SYNTAX", "a trace file starts with: trace <id> ...", head)
                name = p.expect_name("a trace id")
                out = p.attrs({"scenario": "name", "variant": "name",
                               "base": "name", "branch_at": "int"}, set())
                if "scenario" not in out:
                    p.error("SYNTAX", "trace header needs scenario=<id>", head)
                if ("base" in out) != ("branch_at" in out):
                    p.error("SYNTAX", "base= and branch_at= go together", head)
                header = (name.value, out["scenario"], out.get("variant"),
                          out.get("base"), out.get("branch_at"))
            else:
                actions.append(_action_line(p))
        except _Abort:
            continue
    if header is None:
        diags.append(Diagnostic(ERROR, "MISSING_SECTION", "no trace header", 1, 1, file))
    diags = sort_diagnostics(diags)
    if any(d.severity == ERROR for d in diags):
        return None, diags
    trace_id, scenario, variant, base, branch_at = header
    return TraceSource(id=trace_id, scenario=scenario, variant=variant, base=base,
                       branch_at=branch_at, actions=tuple(actions), file=file), diags


def _action_line(p: Parser) -> ActionInstance:
    type_tok = p.expect_name("an action id")
    actor_tok = p.expect_name("the acting actor")
    args: dict[str, float] = {}
    while not p.at_end:
        key = p.expect_name("an argument name")
        p.expect("=")
        if key.value in args:
            p.error("SYNTAX", f"duplicate argument {key.value}", key)
        args[key.value] = p.expect_number()
    return ActionInstance(type_id=type_tok.value, actor=actor_tok.value, args=args)


def parse_action(text: str, file: str = "<action>") -> ActionInstance:
    """Parse a single '<action> <actor> [name=value ...]' line.

    Raises TraceError when the line is malformed.
    """
    diags: list[Diagnostic] = []
    tokens = tokenize_line(text, 1, file, diags)
    action = None
    if tokens and not any(d.severity == ERROR for d in diags):
        p = Parser(tokens, file, diags)
        try:
            action = _action_line(p)
        except _Abort:
            pass
    errors = [d for d in diags if d.severity == ERROR]
    if errors or action is None:
        detail = "; ".join(d.message for d in errors) or "empty action line"
        raise TraceError(f"bad action line {text!r}: {detail}")
    return action


def resolve_trace(trace: TraceSource,
                  lookup: Callable[[str], TraceSource | None],
                  _seen: frozenset[str] = frozenset()) -> TraceSource:
    """Splice in the base-trace prefix, returning a materialised trace.

    lookup maps a trace id to its parsed TraceSource, or None when no such
    trace exists. Bases may chain; cycles, missing bases, cross-scenario
    bases and out-of-range branch points all raise TraceError.
    """
    if trace.base is None:
        return trace
    seen = _seen | {trace.id}
    if trace.base in seen:
        raise TraceError(f"trace {trace.id} has a circular base chain")
    base_src = lookup(trace.base)
    if base_src is None:
        raise TraceError(f"trace {trace.id} branches off unknown trace {trace.base!r}")
    if base_src.scenario != trace.scenario:
        raise TraceError(
            f"trace {trace.id} branches off {base_src.id}, which belongs to "
            f"scenario {base_src.scenario!r}, not {trace.scenario!r}")
    base = resolve_trace(base_src, lookup, seen)
    at = trace.branch_at
    if not 0 <= at <= len(base.actions):
        raise TraceError(
            f"trace {trace.id} branches at step {at}, but {base.id} has "
            f"{len(base.actions)} steps")
    return replace(trace, base=None, branch_at=None,
                   actions=base.actions[:at] + trace.actions)


def format_trace(trace: TraceSource) -> str:
    """Regenerate trace file text (always materialised, without base refs)."""
    header = f"trace {trace.id} scenario={trace.scenario}"
    if trace.variant:
        header += f" variant={trace.variant}"
    lines = [header]
    for action in trace.actions:
        parts = [action.type_id, action.actor]
        parts.extend(f"{k}={v:g}" for k, v in action.args.items())
        lines.append(" ".join(parts))
    return "\n".join(lines) + "\n"
