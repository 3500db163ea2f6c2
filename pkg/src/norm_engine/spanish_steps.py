"""Access to the bundled street-scam scenario and its recorded traces.

The scenario itself lives in scenarios/spanish_steps.cssm; the four traces
(two recorded incidents, two counterfactual branches) live next to it. This
module compiles them on demand and caches the results.
"""

from __future__ import annotations

from functools import lru_cache
from pathlib import Path

from .engine import Trace, run_trace
from .errors import TraceError
from .scenario import ScenarioDef
from .scenario_format import load_scenario, load_trace
from .scenario_format.traces import TraceSource

SCENARIO_ID = "spanish_steps"

CANONICAL_TRACES = (
    "sell_success",
    "sell_fail",
    "whatif_client_escalates",
    "whatif_seller_refuses",
)


def bundled_dir() -> Path:
    """Directory holding the shipped scenario and trace files."""
    return Path(__file__).resolve().parent / "scenarios"


@lru_cache(maxsize=None)
def bundled_scenario(variant: str | None = None) -> ScenarioDef:
    """Compile the shipped scenario; None selects the default variant.

    The result is cached and shared, which is safe because compiled
    scenarios are read-only.
    """
    return load_scenario(bundled_dir() / "spanish_steps.cssm", variant=variant)


@lru_cache(maxsize=None)
def canonical_trace(trace_id: str) -> TraceSource:
    """Load one of the shipped traces, with any base prefix spliced in."""
    if trace_id not in CANONICAL_TRACES:
        raise TraceError(f"unknown trace {trace_id!r}; shipped traces are "
                         + ", ".join(CANONICAL_TRACES))
    return load_trace(bundled_dir() / "traces" / f"{trace_id}.trace")


def run_canonical(trace_id: str) -> Trace:
    """Replay a shipped trace on its declared scenario variant."""
    trace = canonical_trace(trace_id)
    return run_trace(bundled_scenario(trace.variant), trace.actions)
