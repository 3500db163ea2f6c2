"""Command line front end: validate, replay, branch, export, serve.

Scenario and trace arguments accept either a file path or a bare id; ids
are looked up on the scenario search path (the NORM_ENGINE_SCENARIO_PATH
environment variable, or the bundled scenario directory when unset).

Exit codes: 0 success, 1 domain error (bad scenario, key, or action),
2 environment error (unreadable or unwritable files).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path
from typing import Sequence

from . import __version__
from .addressing import parse_key, split_key_list
from .engine import Trace, branch, run_trace
from .errors import CompileError, DomainError, EngineError
from .scenario import ScenarioDef
from .scenario_format import (ERROR, WARNING, check_file, export_dot,
                              load_scenario, load_trace, parse_action)
from .spanish_steps import bundled_dir
from .trace_io import (LabeledKeys, comparison_csv, comparison_table,
                       series_csv, series_json)

ENV_SCENARIO_PATH = "NORM_ENGINE_SCENARIO_PATH"


def _search_dirs() -> list[Path]:
    raw = os.environ.get(ENV_SCENARIO_PATH, "")
    dirs = [Path(part) for part in raw.split(os.pathsep) if part]
    return dirs or [bundled_dir()]


def _resolve_scenario(ref: str) -> Path:
    as_path = Path(ref)
    if as_path.suffix == ".cssm" or as_path.exists():
        return as_path
    for d in _search_dirs():
        hit = d / f"{ref}.cssm"
        if hit.exists():
            return hit
    searched = os.pathsep.join(str(d) for d in _search_dirs())
    raise FileNotFoundError(f"no scenario file for {ref!r} (searched {searched})")


def _trace_dirs(scenario_path: Path) -> list[Path]:
    dirs = []
    for base in (scenario_path.parent, *_search_dirs()):
        for d in (base / "traces", base):
            if d not in dirs:
                dirs.append(d)
    return dirs


def _resolve_trace(ref: str, scenario_path: Path) -> Path:
    as_path = Path(ref)
    if as_path.suffix == ".trace" or as_path.exists():
        return as_path
    for d in _trace_dirs(scenario_path):
        hit = d / f"{ref}.trace"
        if hit.exists():
            return hit
    searched = os.pathsep.join(str(d) for d in _trace_dirs(scenario_path))
    raise FileNotFoundError(f"no trace file for {ref!r} (searched {searched})")


def _load_pair(scenario_ref: str, trace_ref: str,
               variant: str | None) -> tuple[ScenarioDef, tuple]:
    """Load a scenario plus a trace, checking they belong together."""
    scenario_path = _resolve_scenario(scenario_ref)
    trace_path = _resolve_trace(trace_ref, scenario_path)
    src = load_trace(trace_path, search=tuple(_trace_dirs(scenario_path)))
    scenario = load_scenario(scenario_path, variant=variant or src.variant)
    if src.scenario != scenario.id:
        raise DomainError(f"trace {src.id} belongs to scenario "
                          f"{src.scenario!r}, not {scenario.id!r}")
    return scenario, src.actions


def _collect_keys(scenario: ScenarioDef, specs: Sequence[str]) -> list:
    labeled = []
    for spec in specs:
        for text in split_key_list(spec):
            labeled.append((text, parse_key(text, scenario)))
    return labeled


def _emit(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def _final_line(trace: Trace) -> str:
    last = trace.snapshot_at(len(trace))
    steps = f"{len(trace)} step{'s' if len(trace) != 1 else ''}"
    if trace.steps and trace.steps[-1].report.terminated:
        return f"terminal {last.progress} after {steps}"
    return f"ended at {last.progress} after {steps} (not terminal)"


def _step_listing(trace: Trace, keys: LabeledKeys) -> str:
    rows = [["step", "action", "progress", *(label for label, _ in keys)]]
    for i, step in enumerate(trace.steps, start=1):
        rows.append([
            str(i), step.action.describe(),
            f"{step.report.progress_before} -> {step.report.progress_after}",
            *(f"{step.after.value(key):.6g}" for _, key in keys),
        ])
    widths = [max(len(row[c]) for row in rows) for c in range(len(rows[0]))]
    lines = ["  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip()
             for row in rows]
    lines.append(_final_line(trace))
    return "\n".join(lines) + "\n"


def cmd_validate(args: argparse.Namespace) -> int:
    diagnostics = check_file(args.path)
    for d in diagnostics:
        print(d)
    errors = sum(d.severity == ERROR for d in diagnostics)
    warnings = sum(d.severity == WARNING for d in diagnostics)
    print(f"{errors} error(s), {warnings} warning(s)")
    return 1 if errors else 0


def cmd_run(args: argparse.Namespace) -> int:
    scenario, actions = _load_pair(args.scenario, args.trace, args.variant)
    keys = _collect_keys(scenario, args.keys)
    trace = run_trace(scenario, actions)
    if args.export == "csv":
        _emit(series_csv(trace, keys), args.out)
    elif args.export == "json":
        _emit(json.dumps(series_json(trace, keys), indent=2) + "\n", args.out)
    else:
        _emit(_step_listing(trace, keys), args.out)
    return 0


def cmd_branch(args: argparse.Namespace) -> int:
    scenario, actions = _load_pair(args.scenario, args.base, args.variant)
    keys = _collect_keys(scenario, args.compare)
    base = run_trace(scenario, actions)
    session = branch(base, args.at)
    for line in args.then:
        session.step(parse_action(line))
    if args.export == "csv":
        _emit(comparison_csv(base, session.trace, keys), args.out)
    else:
        _emit(comparison_table(base, session.trace, keys), args.out)
    return 0


def cmd_graph(args: argparse.Namespace) -> int:
    scenario = load_scenario(_resolve_scenario(args.scenario),
                             variant=args.variant)
    _emit(export_dot(scenario), args.out)
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    return _serve(args.host, args.port, args.scenario_dir, args.persist)


def _serve(host: str, port: int, scenario_dir: str | None = None,
           persist: str | None = None) -> int:
    import uvicorn

    from .service import create_app

    dirs = [Path(scenario_dir)] if scenario_dir else _search_dirs()
    app = create_app(scenario_dirs=dirs, persist=persist)
    uvicorn.run(app, host=host, port=port)
    return 0


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="norm-engine",
        description="Replay, branch, and inspect social-norm scenarios.")
    parser.add_argument("--version", action="version",
                        version=f"%(prog)s {__version__}")
    parser.add_argument("--serve", action="store_true",
                        help="start the HTTP service (same as the serve command)")
    parser.add_argument("--host", default="127.0.0.1",
                        help="bind address for --serve (default 127.0.0.1)")
    parser.add_argument("--port", type=int, default=8000,
                        help="port for --serve (default 8000)")
    sub = parser.add_subparsers(dest="command", metavar="command")

    p = sub.add_parser("validate",
                       help="check a scenario file and print diagnostics")
    p.add_argument("path", help="scenario file to check")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("run", help="replay a trace and report per-step series")
    p.add_argument("scenario", help="scenario file or id")
    p.add_argument("trace", help="trace file or id")
    p.add_argument("--variant", help="scenario variant (default: the trace's)")
    p.add_argument("--keys", action="append", default=[],
                   metavar="KEY[,KEY...]",
                   help="metric or belief keys to report (repeatable)")
    p.add_argument("--export", choices=("csv", "json"),
                   help="emit machine-readable series instead of a listing")
    p.add_argument("--out", help="write output to a file instead of stdout")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("branch",
                       help="fork a trace and compare it with the original")
    p.add_argument("scenario", help="scenario file or id")
    p.add_argument("base", help="trace to fork")
    p.add_argument("--at", type=int, required=True, metavar="STEP",
                   help="number of base steps to keep before the fork")
    p.add_argument("--then", action="append", default=[],
                   metavar="'ACTION ACTOR [k=v ...]'",
                   help="action to play on the fork (repeatable, in order)")
    p.add_argument("--compare", action="append", default=[],
                   metavar="KEY[,KEY...]", help="keys to put side by side")
    p.add_argument("--variant", help="scenario variant (default: the trace's)")
    p.add_argument("--export", choices=("csv",),
                   help="emit CSV instead of an aligned table")
    p.add_argument("--out", help="write output to a file instead of stdout")
    p.set_defaults(func=cmd_branch)

    p = sub.add_parser("graph", help="export the progress graph as DOT")
    p.add_argument("scenario", help="scenario file or id")
    p.add_argument("--variant", help="scenario variant (default: the file's)")
    p.add_argument("--out", help="output path (default stdout)")
    p.set_defaults(func=cmd_graph)

    p = sub.add_parser("serve", help="start the HTTP service")
    p.add_argument("--host", default="127.0.0.1",
                   help="bind address (default 127.0.0.1)")
    p.add_argument("--port", type=int, default=8000,
                   help="port (default 8000)")
    p.add_argument("--scenario-dir",
                   help="directory of scenario files to expose")
    p.add_argument("--persist",
                   help="JSON file for saving sessions on shutdown")
    p.set_defaults(func=cmd_serve)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = _parser()
    args = parser.parse_args(argv)
    if args.command is None:
        if args.serve:
            return _serve(args.host, args.port)
        parser.print_help()
        return 0
    try:
        return args.func(args)
    except CompileError as exc:
        for d in exc.diagnostics:
            print(d, file=sys.stderr)
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except EngineError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
