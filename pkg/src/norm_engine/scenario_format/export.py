"""Text and Graphviz exports of compiled scenario definitions.

export_text regenerates a loadable scenario file for exactly the compiled
variant (variant tags are already resolved, so the output declares a single
variant). export_dot renders the progress graph with display action ids;
output ordering is fully sorted so repeated exports are byte-identical.
"""

from __future__ import annotations

from ..metrics import format_number as fmt
from ..model import display_action_id
from ..scenario import ScenarioDef


def _quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def export_text(scenario: ScenarioDef) -> str:
    lines: list[str] = []
    out = lines.append
    out(f"scenario {scenario.id}")
    out(f"variant {scenario.variant} default")
    out("")
    for culture in scenario.cultures:
        out(f"culture {culture}")
    out("")
    for actor in scenario.actors.values():
        parts = [f"actor {actor.id} kind={actor.kind}"]
        if actor.kind == "group":
            parts.append(f"size={actor.group_size}")
        if actor.cultures:
            parts.append("cultures=" + "|".join(actor.cultures))
        if actor.display:
            parts.append(_quote(actor.display))
        out(" ".join(parts))
    out("")
    for question in scenario.questions.values():
        out(f"question {question.id} {_quote(question.text)}")
    out("")
    for ladder in scenario.ladders.values():
        for value, keyword in ladder.entries:
            out(f"calibrate {ladder.name} {fmt(value)} {_quote(keyword)}")
    out("")
    for atype in scenario.action_types.values():
        parts = [f"action {atype.id} performer={atype.performer}"]
        if atype.params:
            decls = ",".join(
                p.name + ":" + p.domain + (f"@{p.ladder}" if p.ladder else "")
                for p in atype.params)
            parts.append(f"params=({decls})")
        if atype.terminal:
            parts.append("terminal")
        if atype.description:
            parts.append(_quote(atype.description))
        out(" ".join(parts))
    out("")
    graph = scenario.graph
    for state in graph.states:
        flags = ""
        if state == graph.start:
            flags += " start"
        if state in graph.terminals:
            flags += " terminal"
        out(f"state {state}{flags}")
    out("")
    for edge in graph.edges:
        suffix = "" if edge.verified else " unverified"
        out(f"edge {edge.state} {edge.actor} {edge.action} -> {edge.successor}{suffix}")
    out("")
    for decl in scenario.cssm_decls:
        k = decl.key
        out(f"cssm {k.culture} {k.metric} {k.subject} {k.perspective} {k.estimator} "
            f"scale={decl.scale} init={fmt(decl.init)}")
    out("")
    for decl in scenario.cb_decls:
        k = decl.key
        frozen = " frozen" if decl.frozen else ""
        out(f"cb {k.belief} {k.perspective} {k.estimator} "
            f"init=({fmt(decl.init.m_true)}, {fmt(decl.init.m_false)}){frozen}")
    out("")
    for aif in scenario.aifs:
        out(f"aif on {aif.trigger} target={aif.target} mode={aif.mode}:")
        for i, term in enumerate(aif.expr.format_terms()):
            prefix = "    " if i == 0 else "    + "
            out(prefix + term)
    out("")
    for spec in scenario.evidence:
        k = spec.target
        per = " per_second" if spec.per_second else ""
        out(f"evidence on {spec.trigger} target=cb({k.belief},{k.perspective},{k.estimator}) "
            f"mass=({fmt(spec.mass.m_true)}, {fmt(spec.mass.m_false)}){per}")
    return "\n".join(lines).strip() + "\n"


def export_dot(scenario: ScenarioDef) -> str:
    """Graphviz source for the progress graph.

    Nodes and edges are emitted in sorted order; terminal states get a double
    circle, the start state a bold outline, and placeholder edges a dashed
    style. Edge labels read Actor:action with the display action id.
    """
    graph = scenario.graph
    lines = [f"digraph {scenario.id} {{", "    rankdir=LR;", '    node [shape=circle];']
    for state in sorted(graph.states):
        attrs = []
        if state in graph.terminals:
            attrs.append("shape=doublecircle")
        if state == graph.start:
            attrs.append("style=bold")
        suffix = f" [{', '.join(attrs)}]" if attrs else ""
        lines.append(f'    "{state}"{suffix};')
    for edge in sorted(graph.edges, key=lambda e: (e.state, e.successor, e.actor, e.action)):
        label = f"{edge.actor}:{display_action_id(edge.action)}"
        attrs = [f'label="{label}"']
        if not edge.verified:
            attrs.append("style=dashed")
        lines.append(f'    "{edge.state}" -> "{edge.successor}" [{", ".join(attrs)}];')
    lines.append("}")
    return "\n".join(lines) + "\n"
