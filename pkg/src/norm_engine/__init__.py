"""Social-norm scenario engine.

Scenarios define actors, a progress graph of action types, culture-scoped
metrics (wealth, time, dignity, politeness, ...) and yes/no beliefs held as
Dempster-Shafer masses. Stepping a session through actions updates beliefs
from declared evidence and metrics from logistic update functions, keeping
every estimator's view private. Traces record runs, branch into
counterfactuals, and compare per-key series.
"""

from .addressing import known_keys, parse_key, split_key_list
from .beliefs import (CbKey, EvidenceSpec, MassFunction,
                      apply_duration_evidence, combine, group_mass)
from .engine import (Session, SeriesComparison, Snapshot, StepReport, Trace,
                     TraceStep, branch, compare, new_session, run_trace)
from .errors import (AggregationError, CompileError, DomainError, EngineError,
                     IllegalActionError, SessionTerminatedError,
                     TotalConflictError, TraceError, UnknownKeyError,
                     VisibilityError)
from .metrics import (Aif, AifExpr, CssmKey, LogisticComponent, NumAtom,
                      NumExpr, clamp_unit, eval_aif, logistic, richards)
from .model import (ActionInstance, ActionParam, ActionType, Actor, Edge,
                    ProgressGraph)
from .scenario import CbDecl, CssmDecl, Ladder, Question, ScenarioDef
from .scenario_format import (check_file, compile_scenario, export_dot,
                              export_text, load_scenario, load_trace, parse,
                              parse_action, parse_trace, validate)
from .spanish_steps import (CANONICAL_TRACES, bundled_dir, bundled_scenario,
                            canonical_trace, run_canonical)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # errors
    "EngineError", "DomainError", "UnknownKeyError", "VisibilityError",
    "IllegalActionError", "SessionTerminatedError", "TotalConflictError",
    "AggregationError", "TraceError", "CompileError",
    # beliefs
    "CbKey", "MassFunction", "EvidenceSpec", "combine",
    "apply_duration_evidence", "group_mass",
    # metrics
    "CssmKey", "LogisticComponent", "AifExpr", "Aif", "NumExpr", "NumAtom",
    "logistic", "richards", "clamp_unit", "eval_aif",
    # model
    "Actor", "ActionParam", "ActionType", "ActionInstance", "Edge",
    "ProgressGraph",
    # scenario
    "ScenarioDef", "CssmDecl", "CbDecl", "Question", "Ladder",
    # engine
    "Session", "Snapshot", "StepReport", "Trace", "TraceStep",
    "SeriesComparison", "new_session", "run_trace", "branch", "compare",
    # addressing
    "parse_key", "known_keys", "split_key_list",
    # scenario files
    "parse", "validate", "compile_scenario", "load_scenario", "load_trace",
    "parse_action", "parse_trace", "check_file", "export_text", "export_dot",
    # bundled scenario
    "bundled_scenario", "bundled_dir", "canonical_trace", "run_canonical",
    "CANONICAL_TRACES",
]
