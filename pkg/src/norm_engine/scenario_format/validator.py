"""Semantic validation of parsed scenario sources.

Checks fall into two groups: file-wide structure (sections, the progress
graph, calibration ladders) and per-variant reference checks (key
declarations, update functions, evidence). Reference checks run once per
declared variant because variant tags change which actors and keys exist;
identical findings from different variants are reported once.
"""

from __future__ import annotations

from ..metrics import METRIC_SCALES
from ..model import PARAM_DOMAINS
from ..scenario import LADDER_GRID
from .source import (ActionStmt, AifStmt, CbStmt, CssmStmt, Diagnostic, ERROR,
                     EvidenceStmt, ScenarioSource, SrcVar, WARNING,
                     sort_diagnostics)

_MASS_EPS = 1e-9


class _Sink:
    """Collects diagnostics, dropping exact duplicates from variant reruns."""

    def __init__(self, file: str):
        self.file = file
        self.diags: list[Diagnostic] = []
        self._seen: set[tuple] = set()

    def add(self, severity: str, code: str, message: str, line: int, col: int):
        key = (severity, code, message, line, col)
        if key not in self._seen:
            self._seen.add(key)
            self.diags.append(Diagnostic(severity, code, message, line, col, self.file))

    def error(self, code: str, message: str, stmt):
        self.add(ERROR, code, message, stmt.line, stmt.col)

    def warning(self, code: str, message: str, stmt):
        self.add(WARNING, code, message, stmt.line, stmt.col)


def _valid_mass(m_true: float, m_false: float) -> bool:
    return (m_true >= -_MASS_EPS and m_false >= -_MASS_EPS
            and m_true + m_false <= 1.0 + _MASS_EPS)


def validate(src: ScenarioSource) -> list[Diagnostic]:
    """Run every semantic check; returns located errors and warnings."""
    sink = _Sink(src.file)
    _check_sections(src, sink)
    _check_actors(src, sink)
    _check_actions(src, sink)
    _check_graph(src, sink)
    _check_ladders(src, sink)
    variants = src.variant_ids() or (None,)
    for variant in variants:
        _check_variant_refs(src, variant, sink)
    return sort_diagnostics(sink.diags)


def _check_sections(src: ScenarioSource, sink: _Sink):
    if src.scenario is None:
        sink.add(ERROR, "MISSING_SECTION", "no scenario statement", 1, 1)
    if not src.actors:
        sink.add(ERROR, "MISSING_SECTION", "no actors declared", 1, 1)
    if not src.actions:
        sink.add(ERROR, "MISSING_SECTION", "no actions declared", 1, 1)
    if not src.states:
        sink.add(ERROR, "MISSING_SECTION", "no progress states declared", 1, 1)


def _check_actors(src: ScenarioSource, sink: _Sink):
    cultures = {c.id for c in src.cultures}
    declared_variants = set(src.variant_ids())
    for actor in src.actors:
        if actor.kind == "group" and actor.size < 2:
            sink.error("BAD_ACTOR", f"group actor {actor.id} needs size >= 2", actor)
        if actor.kind == "individual" and actor.size != 1:
            sink.error("BAD_ACTOR", f"individual actor {actor.id} cannot have size", actor)
        for culture in actor.cultures:
            if culture not in cultures:
                sink.error("UNKNOWN_CULTURE",
                           f"actor {actor.id} lists undeclared culture {culture!r}", actor)
        for tag in actor.only:
            if tag not in declared_variants:
                sink.error("UNKNOWN_VARIANT",
                           f"actor {actor.id} tagged with undeclared variant {tag!r}", actor)


def _check_actions(src: ScenarioSource, sink: _Sink):
    ladders = {c.ladder for c in src.calibrations}
    for action in src.actions:
        seen: set[str] = set()
        for param in action.params:
            if param.name in seen:
                sink.error("DUP_PARAM",
                           f"action {action.id} declares param {param.name!r} twice", action)
            seen.add(param.name)
            if param.domain not in PARAM_DOMAINS:
                sink.error("BAD_DOMAIN",
                           f"param {param.name} of {action.id} has unknown domain "
                           f"{param.domain!r}", action)
            if param.ladder is not None and param.ladder not in ladders:
                sink.error("UNKNOWN_LADDER",
                           f"param {param.name} of {action.id} references undeclared "
                           f"ladder {param.ladder!r}", action)


def _check_graph(src: ScenarioSource, sink: _Sink):
    states = {s.id: s for s in src.states}
    actions = {a.id: a for a in src.actions}
    actors = {a.id for a in src.actors}

    starts = [s for s in src.states if s.start]
    if src.states and not starts:
        sink.add(ERROR, "NO_START", "no state is marked start", 1, 1)
    for extra in starts[1:]:
        sink.error("MULTI_START", f"second start state {extra.id}", extra)
    for s in starts:
        if s.terminal:
            sink.error("BAD_STATE", f"start state {s.id} cannot be terminal", s)

    seen_edges: dict[tuple[str, str, str], object] = {}
    outgoing: dict[str, int] = {s.id: 0 for s in src.states}
    for edge in src.edges:
        if edge.state not in states:
            sink.error("UNKNOWN_STATE", f"edge from undeclared state {edge.state!r}", edge)
        if edge.successor not in states:
            sink.error("UNKNOWN_STATE", f"edge to undeclared state {edge.successor!r}", edge)
        if edge.actor not in actors:
            sink.error("UNKNOWN_ACTOR", f"edge actor {edge.actor!r} is not declared", edge)
        if edge.action not in actions:
            sink.error("UNKNOWN_ACTION", f"edge action {edge.action!r} is not declared", edge)
        triple = (edge.state, edge.actor, edge.action)
        if triple in seen_edges:
            sink.error("DUP_EDGE",
                       f"second edge for ({edge.state}, {edge.actor}, {edge.action})", edge)
        else:
            seen_edges[triple] = edge
        if edge.state in states:
            outgoing[edge.state] = outgoing.get(edge.state, 0) + 1
            if states[edge.state].terminal:
                sink.error("TERMINAL_EDGE",
                           f"terminal state {edge.state} has an outgoing edge", edge)
        action = actions.get(edge.action)
        if action is not None and edge.successor in states:
            if action.terminal and not states[edge.successor].terminal:
                sink.error("TERMINAL_ACTION_TARGET",
                           f"terminal action {edge.action} leads to non-terminal "
                           f"state {edge.successor}", edge)
        if action is not None and edge.actor in actors and action.performer != edge.actor:
            sink.error("PERFORMER",
                       f"{edge.action} is performed by {action.performer}, but the edge "
                       f"names {edge.actor}", edge)
        if not edge.verified:
            sink.warning("UNVERIFIED_EDGE",
                         f"edge ({edge.state}, {edge.actor}, {edge.action}) is a "
                         f"placeholder without observational backing", edge)

    for state in src.states:
        if not state.terminal and outgoing.get(state.id, 0) == 0:
            sink.error("DEAD_STATE",
                       f"non-terminal state {state.id} has no outgoing edges", state)
        if not state.verified:
            sink.warning("UNVERIFIED_STATE",
                         f"state {state.id} is a placeholder without observational "
                         f"backing", state)

    # reachability from the start state (warning only)
    if starts and not any(d.severity == ERROR and d.code.startswith("UNKNOWN_STATE")
                          for d in sink.diags):
        reachable = {starts[0].id}
        frontier = [starts[0].id]
        by_state: dict[str, list[str]] = {}
        for edge in src.edges:
            by_state.setdefault(edge.state, []).append(edge.successor)
        while frontier:
            here = frontier.pop()
            for succ in by_state.get(here, ()):  # successors may repeat; set dedupes
                if succ not in reachable:
                    reachable.add(succ)
                    frontier.append(succ)
        for state in src.states:
            if state.id not in reachable:
                sink.warning("UNREACHABLE",
                             f"state {state.id} is unreachable from {starts[0].id}", state)


def _check_ladders(src: ScenarioSource, sink: _Sink):
    grid = set(LADDER_GRID)
    by_name: dict[str, set[float]] = {}
    for cal in src.calibrations:
        by_name.setdefault(cal.ladder, set()).add(cal.value)
        if cal.value not in grid:
            sink.error("BAD_LADDER_VALUE",
                       f"calibration value {cal.value:g} is not on the 0.0..1.0 grid "
                       f"(step 0.1)", cal)
    for name, values in by_name.items():
        missing = sorted(grid - values)
        if missing:
            first = next(c for c in src.calibrations if c.ladder == name)
            sink.error("LADDER_GRID",
                       f"ladder {name} is missing grid points "
                       f"{', '.join(f'{v:g}' for v in missing)}", first)


def _check_variant_refs(src: ScenarioSource, variant: str | None, sink: _Sink):
    label = f" in variant {variant}" if variant is not None else ""
    declared_variants = set(src.variant_ids())
    actors = {a.id: a for a in src.actors if src.in_variant(a.only, variant)}
    all_action_ids = {a.id: a for a in src.actions}
    cultures = {c.id for c in src.cultures}
    questions = {q.id for q in src.questions}

    def check_only(stmt, only: tuple[str, ...]):
        for tag in only:
            if tag not in declared_variants:
                sink.error("UNKNOWN_VARIANT", f"undeclared variant {tag!r}", stmt)

    # edges and performers must resolve in every variant
    for edge in src.edges:
        if edge.actor not in actors and edge.actor in {a.id for a in src.actors}:
            sink.error("UNKNOWN_ACTOR",
                       f"edge actor {edge.actor} does not exist{label}", edge)
    for action in src.actions:
        if action.performer not in actors:
            sink.error("UNKNOWN_ACTOR",
                       f"performer {action.performer!r} of {action.id} is not a "
                       f"declared actor{label}", action)

    # metric declarations
    cssm_keys: dict[tuple[str, ...], CssmStmt] = {}
    for decl in (d for d in src.cssms if src.in_variant(d.only, variant)):
        check_only(decl, decl.only)
        if decl.culture not in cultures:
            sink.error("UNKNOWN_CULTURE", f"undeclared culture {decl.culture!r}", decl)
        for role, actor_id in (("subject", decl.subject), ("perspective", decl.perspective),
                               ("estimator", decl.estimator)):
            if actor_id not in actors:
                sink.error("UNKNOWN_ACTOR",
                           f"{role} {actor_id!r} is not a declared actor{label}", decl)
        if decl.scale not in METRIC_SCALES:
            sink.error("BAD_SCALE", f"unknown scale {decl.scale!r}", decl)
        if decl.scale == "unit" and not 0.0 <= decl.init <= 1.0:
            sink.error("BAD_INIT",
                       f"unit-scale metric initialised to {decl.init:g}, outside [0,1]", decl)
        key = (decl.culture, decl.metric, decl.subject, decl.perspective, decl.estimator)
        if key in cssm_keys:
            sink.error("DUP_CSSM", f"metric key declared twice{label}", decl)
        else:
            cssm_keys[key] = decl
        if decl.estimator in actors and decl.culture in cultures:
            if decl.culture not in actors[decl.estimator].cultures:
                sink.warning("CULTURE_UNEVALUATABLE",
                             f"estimator {decl.estimator} is not cognizant of culture "
                             f"{decl.culture} and cannot evaluate this metric", decl)

    # belief declarations
    cb_keys: dict[tuple[str, str, str], CbStmt] = {}
    for decl in (d for d in src.cbs if src.in_variant(d.only, variant)):
        check_only(decl, decl.only)
        if decl.belief not in questions:
            sink.error("UNKNOWN_QUESTION", f"undeclared question {decl.belief!r}", decl)
        for role, actor_id in (("perspective", decl.perspective),
                               ("estimator", decl.estimator)):
            if actor_id not in actors:
                sink.error("UNKNOWN_ACTOR",
                           f"{role} {actor_id!r} is not a declared actor{label}", decl)
        if not _valid_mass(decl.m_true, decl.m_false):
            sink.error("BAD_MASS",
                       f"initial mass ({decl.m_true:g}, {decl.m_false:g}) is not a valid "
                       f"assignment", decl)
        key = (decl.belief, decl.perspective, decl.estimator)
        if key in cb_keys:
            sink.error("DUP_CB", f"belief key declared twice{label}", decl)
        else:
            cb_keys[key] = decl

    # update functions
    aif_targets: set[tuple[str, tuple[str, ...]]] = set()
    for aif in (a for a in src.aifs if src.in_variant(a.only, variant)):
        check_only(aif, aif.only)
        _check_aif(aif, src, variant, label, sink, all_action_ids, cssm_keys, cb_keys,
                   aif_targets)

    # evidence table
    for ev in (e for e in src.evidence if src.in_variant(e.only, variant)):
        check_only(ev, ev.only)
        _check_evidence(ev, label, sink, all_action_ids, cb_keys)


def _check_aif(aif: AifStmt, src: ScenarioSource, variant: str | None, label: str,
               sink: _Sink, actions: dict[str, ActionStmt],
               cssm_keys: dict[tuple[str, ...], CssmStmt],
               cb_keys: dict[tuple[str, str, str], CbStmt],
               seen_targets: set[tuple[str, tuple[str, ...]]]):
    if aif.action not in actions:
        sink.error("UNKNOWN_ACTION", f"undeclared action {aif.action!r}", aif)
        return
    if aif.target not in cssm_keys:
        sink.add(ERROR, "UNKNOWN_REF",
                 f"update target cssm({','.join(aif.target)}) is not declared{label}",
                 aif.target_line or aif.line, aif.target_col or aif.col)
        return
    pair = (aif.action, aif.target)
    if pair in seen_targets:
        sink.error("DUP_AIF",
                   f"{aif.action} already has an update function for this target{label}",
                   aif)
    else:
        seen_targets.add(pair)
    estimator = aif.target[4]
    params = {p.name for p in actions[aif.action].params}
    for term in aif.expr:
        for factor in term:
            _check_var(factor.var, estimator, label, sink, params, cssm_keys, cb_keys)
            for num in (factor.K, factor.M, factor.B):
                for atom in num.atoms:
                    if atom.param is not None and atom.param not in params:
                        sink.add(ERROR, "UNKNOWN_PARAM",
                                 f"{aif.action} has no param {atom.param!r}",
                                 atom.line, atom.col)


def _check_var(var: SrcVar, estimator: str, label: str, sink: _Sink, params: set[str],
               cssm_keys: dict[tuple[str, ...], CssmStmt],
               cb_keys: dict[tuple[str, str, str], CbStmt]):
    if var.kind == "param" and var.parts[0] not in params:
        sink.add(ERROR, "UNKNOWN_PARAM",
                 f"the triggering action has no param {var.parts[0]!r}", var.line, var.col)
    elif var.kind == "cssm":
        if var.parts not in cssm_keys:
            sink.add(ERROR, "UNKNOWN_REF",
                     f"variable cssm({','.join(var.parts)}) is not declared{label}",
                     var.line, var.col)
        elif var.parts[4] != estimator:
            sink.add(ERROR, "VISIBILITY",
                     f"variable belongs to estimator {var.parts[4]}, but the target is "
                     f"estimated by {estimator}; estimators only read their own state",
                     var.line, var.col)
    elif var.kind == "cb":
        if var.parts not in cb_keys:
            sink.add(ERROR, "UNKNOWN_REF",
                     f"variable cb({','.join(var.parts)}) is not declared{label}",
                     var.line, var.col)
        elif var.parts[2] != estimator:
            sink.add(ERROR, "VISIBILITY",
                     f"variable belongs to estimator {var.parts[2]}, but the target is "
                     f"estimated by {estimator}; estimators only read their own state",
                     var.line, var.col)


def _check_evidence(ev: EvidenceStmt, label: str, sink: _Sink,
                    actions: dict[str, ActionStmt],
                    cb_keys: dict[tuple[str, str, str], CbStmt]):
    if ev.action not in actions:
        sink.error("UNKNOWN_ACTION", f"undeclared action {ev.action!r}", ev)
        return
    if not _valid_mass(ev.m_true, ev.m_false):
        sink.error("BAD_MASS",
                   f"evidence mass ({ev.m_true:g}, {ev.m_false:g}) is not a valid "
                   f"assignment", ev)
    if ev.per_second:
        seconds = [p for p in actions[ev.action].params if p.domain == "seconds"]
        if len(seconds) != 1:
            sink.error("EVIDENCE_DURATION",
                       f"per_second evidence needs {ev.action} to declare exactly one "
                       f"seconds param, found {len(seconds)}", ev)
    if ev.estimator == "*":
        matches = [d for (belief, pa, _), d in cb_keys.items()
                   if belief == ev.belief and pa == ev.perspective]
    else:
        d = cb_keys.get((ev.belief, ev.perspective, ev.estimator))
        matches = [d] if d is not None else []
    if not matches:
        sink.add(ERROR, "UNKNOWN_CB",
                 f"evidence target cb({ev.belief},{ev.perspective},{ev.estimator}) matches "
                 f"no declared belief{label}",
                 ev.target_line or ev.line, ev.target_col or ev.col)
        return
    frozen = [d for d in matches if d.frozen]
    if frozen:
        sink.warning("EVIDENCE_FROZEN",
                     f"evidence matches {len(frozen)} frozen belief(s); those updates are "
                     f"dropped", ev)
