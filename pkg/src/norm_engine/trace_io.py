"""Trace export: per-step value series as CSV, JSON, or aligned tables.

All exports share the same row model: one row per step, carrying the step
number (1-based), the action with its arguments, the progress state after
the step, and one column per requested key. Keys are passed as (label, key)
pairs so callers control the column headers; values are emitted with
repr's shortest round-trip float formatting so identical runs produce
byte-identical output.
"""

from __future__ import annotations

import csv
import io
from typing import Sequence

from .engine import Trace
from .metrics import format_number
from .model import ActionInstance

LabeledKeys = Sequence[tuple[str, object]]


def _args_text(action: ActionInstance) -> str:
    return " ".join(f"{k}={format_number(v)}" for k, v in action.args.items())


def _cell(value: float) -> str:
    return repr(value)


def series_csv(trace: Trace, keys: LabeledKeys) -> str:
    """One CSV data row per step: step, action, actor, args, progress, keys."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["step", "action", "actor", "args", "progress",
                     *(label for label, _ in keys)])
    for i, step in enumerate(trace.steps, start=1):
        writer.writerow([
            i, step.action.type_id, step.action.actor, _args_text(step.action),
            step.report.progress_after,
            *(_cell(step.after.value(key)) for _, key in keys),
        ])
    return out.getvalue()


def series_json(trace: Trace, keys: LabeledKeys) -> dict:
    """The same series as series_csv, as a JSON-ready dict."""
    return {
        "scenario": trace.scenario.id,
        "variant": trace.scenario.variant,
        "keys": [{"label": label, "key": str(key)} for label, key in keys],
        "initial": {
            "progress": trace.initial.progress,
            "values": [trace.initial.value(key) for _, key in keys],
        },
        "steps": [
            {
                "step": i,
                "action": step.action.type_id,
                "actor": step.action.actor,
                "args": dict(step.action.args),
                "progress": step.report.progress_after,
                "terminated": step.report.terminated,
                "values": [step.after.value(key) for _, key in keys],
            }
            for i, step in enumerate(trace.steps, start=1)
        ],
    }


def _row_labels(trace_a: Trace, trace_b: Trace) -> list[tuple[str, str, str]]:
    length = max(len(trace_a), len(trace_b))
    rows = []
    for i in range(length):
        def describe(trace: Trace) -> str:
            if i >= len(trace.steps):
                return ""
            action = trace.steps[i].action
            args = _args_text(action)
            return f"{action.type_id}({args})" if args else action.type_id
        rows.append((str(i + 1), describe(trace_a), describe(trace_b)))
    return rows


def comparison_csv(base: Trace, branch: Trace, keys: LabeledKeys) -> str:
    """Aligned base/branch series; short rows pad with empty cells."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    header = ["step", "action base", "action branch"]
    for label, _ in keys:
        header += [f"{label} base", f"{label} branch"]
    writer.writerow(header)
    for i, (step, act_a, act_b) in enumerate(_row_labels(base, branch)):
        row = [step, act_a, act_b]
        for _, key in keys:
            for trace in (base, branch):
                in_range = i < len(trace.steps)
                row.append(_cell(trace.steps[i].after.value(key)) if in_range else "")
        writer.writerow(row)
    return out.getvalue()


def comparison_table(base: Trace, branch: Trace, keys: LabeledKeys,
                     precision: int = 6) -> str:
    """Fixed-width text table of the same comparison, for terminals."""
    header = ["step", "action base", "action branch"]
    for label, _ in keys:
        header += [f"{label} [base]", f"{label} [branch]"]
    rows = [header]
    for i, (step, act_a, act_b) in enumerate(_row_labels(base, branch)):
        row = [step, act_a, act_b]
        for _, key in keys:
            for trace in (base, branch):
                in_range = i < len(trace.steps)
                value = trace.steps[i].after.value(key) if in_range else None
                row.append("-" if value is None else f"{value:.{precision}g}")
        rows.append(row)
    widths = [max(len(row[c]) for row in rows) for c in range(len(header))]
    lines = []
    for row in rows:
        lines.append("  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip())
    return "\n".join(lines) + "\n"
