"""Compilation of validated sources into runnable scenario definitions."""

from __future__ import annotations

from ..beliefs import CbKey, EvidenceSpec, MassFunction
from ..errors import CompileError
from ..metrics import (Aif, AifExpr, AifVar, CbRef, ConstOne, CssmKey, CssmRef,
                       LogisticComponent, NumAtom, NumExpr, ParamRef)
from ..model import ActionParam, ActionType, Actor, Edge, ProgressGraph
from ..scenario import CbDecl, CssmDecl, Ladder, Question, ScenarioDef
from .source import ScenarioSource, SrcExpr, SrcNum, SrcVar, has_errors
from .validator import validate


def compile_scenario(src: ScenarioSource, variant: str | None = None) -> ScenarioDef:
    """Project the source onto one variant and build its definition.

    The source must validate without errors; otherwise CompileError carries
    the diagnostics. variant defaults to the file's default variant.
    """
    diags = validate(src)
    if has_errors(diags):
        errors = [d for d in diags if d.severity == "error"]
        raise CompileError(
            f"scenario source has {len(errors)} validation error(s)", tuple(diags))

    declared = src.variant_ids()
    if variant is None:
        variant = src.default_variant() or "default"
    elif declared and variant not in declared:
        raise CompileError(
            f"unknown variant {variant!r}; declared: {', '.join(declared)}")

    scenario_id = src.scenario.id

    actors: dict[str, Actor] = {}
    for stmt in src.actors:
        if not src.in_variant(stmt.only, variant):
            continue
        actors[stmt.id] = Actor(id=stmt.id, kind=stmt.kind, group_size=stmt.size,
                                cultures=tuple(stmt.cultures), display=stmt.display)

    action_types: dict[str, ActionType] = {}
    for stmt in src.actions:
        params = tuple(ActionParam(p.name, p.domain, p.ladder) for p in stmt.params)
        action_types[stmt.id] = ActionType(id=stmt.id, performer=stmt.performer,
                                           params=params, terminal=stmt.terminal,
                                           description=stmt.description)

    states = tuple(s.id for s in src.states)
    start = next(s.id for s in src.states if s.start)
    terminals = frozenset(s.id for s in src.states if s.terminal)
    edges = tuple(Edge(e.state, e.actor, e.action, e.successor, e.verified)
                  for e in src.edges)
    graph = ProgressGraph(states=states, start=start, terminals=terminals, edges=edges)

    questions = {q.id: Question(q.id, q.text) for q in src.questions}

    cssm_decls: list[CssmDecl] = []
    for stmt in src.cssms:
        if not src.in_variant(stmt.only, variant):
            continue
        key = CssmKey(stmt.culture, stmt.metric, stmt.subject, stmt.perspective,
                      stmt.estimator)
        cssm_decls.append(CssmDecl(key=key, scale=stmt.scale, init=stmt.init))
    decl_by_key = {d.key: d for d in cssm_decls}

    cb_decls: list[CbDecl] = []
    for stmt in src.cbs:
        if not src.in_variant(stmt.only, variant):
            continue
        key = CbKey(scenario_id, stmt.belief, stmt.perspective, stmt.estimator)
        cb_decls.append(CbDecl(key=key, init=MassFunction(stmt.m_true, stmt.m_false),
                               frozen=stmt.frozen))

    aifs: list[Aif] = []
    for stmt in src.aifs:
        if not src.in_variant(stmt.only, variant):
            continue
        target = CssmKey(*stmt.target)
        aifs.append(Aif(trigger=stmt.action, target=target, mode=stmt.mode,
                        expr=_build_expr(stmt.expr, scenario_id),
                        clamp=decl_by_key[target].clamp))

    evidence: list[EvidenceSpec] = []
    for stmt in src.evidence:
        if not src.in_variant(stmt.only, variant):
            continue
        mass = MassFunction(stmt.m_true, stmt.m_false)
        if stmt.estimator == "*":
            targets = [d for d in cb_decls
                       if d.key.belief == stmt.belief
                       and d.key.perspective == stmt.perspective]
        else:
            key = CbKey(scenario_id, stmt.belief, stmt.perspective, stmt.estimator)
            targets = [d for d in cb_decls if d.key == key]
        for decl in targets:
            if decl.frozen:
                continue  # certainties of the setup never move
            evidence.append(EvidenceSpec(trigger=stmt.action, target=decl.key,
                                         mass=mass, per_second=stmt.per_second))

    ladders: dict[str, Ladder] = {}
    for cal in src.calibrations:
        entries = ladders.setdefault(cal.ladder, Ladder(cal.ladder, ())).entries
        ladders[cal.ladder] = Ladder(cal.ladder, entries + ((cal.value, cal.keyword),))
    ladders = {name: Ladder(name, tuple(sorted(ladder.entries)))
               for name, ladder in ladders.items()}

    return ScenarioDef(
        id=scenario_id,
        variant=variant,
        variants=declared or (variant,),
        cultures=tuple(c.id for c in src.cultures),
        actors=actors,
        action_types=action_types,
        graph=graph,
        questions=questions,
        cssm_decls=tuple(cssm_decls),
        cb_decls=tuple(cb_decls),
        aifs=tuple(aifs),
        evidence=tuple(evidence),
        ladders=ladders,
    )


def _build_expr(expr: SrcExpr, scenario_id: str) -> AifExpr:
    terms = []
    for term in expr:
        factors = []
        for f in term:
            factors.append(LogisticComponent(
                var=_build_var(f.var, scenario_id),
                K=_build_num(f.K), M=_build_num(f.M), B=_build_num(f.B)))
        terms.append(tuple(factors))
    return AifExpr(tuple(terms))


def _build_var(var: SrcVar, scenario_id: str) -> AifVar:
    if var.kind == "one":
        return ConstOne()
    if var.kind == "param":
        return ParamRef(var.parts[0])
    if var.kind == "cssm":
        return CssmRef(CssmKey(*var.parts))
    return CbRef(CbKey(scenario_id, *var.parts))


def _build_num(num: SrcNum) -> NumExpr:
    return NumExpr(tuple(NumAtom(a.sign, a.const, a.param) for a in num.atoms))
