// Action panel model: which controls exist and which are enabled. Enablement
// comes solely from the server's available map; the panel never reasons about
// the progress graph itself.

import type { ActionDoc, AvailableMap, ParamDoc, ScenarioDoc } from "./api";

export interface ParamControl {
  name: string;
  domain: string;
  min: number;
  max: number;
  step: number;
  initial: number;
  ticks: Array<{ value: number; keyword: string }>;
}

export interface ActionControl {
  id: string;
  display: string;
  description: string;
  terminal: boolean;
  enabled: boolean;
  params: ParamControl[];
}

export interface ActorPanel {
  actor: string;
  display: string;
  kind: string;
  size: number;
  controls: ActionControl[];
}

function paramControl(p: ParamDoc): ParamControl {
  if (p.domain === "seconds") {
    return { name: p.name, domain: p.domain, min: 0, max: 60, step: 1,
             initial: 0, ticks: [] };
  }
  return {
    name: p.name, domain: p.domain, min: 0, max: 1, step: 0.1, initial: 0,
    ticks: p.keywords.filter((k) => k.keyword !== ""),
  };
}

function actionControl(action: ActionDoc, available: string[]): ActionControl {
  return {
    id: action.id,
    display: action.display,
    description: action.description,
    terminal: action.terminal,
    enabled: available.includes(action.id),
    params: action.params.map(paramControl),
  };
}

/** Build one panel per session actor; an action is enabled iff the server
 * lists it. The available map names the session's actors, which can be a
 * subset of the catalog's (variants drop actors), so it drives the roster. */
export function panelModel(scenario: ScenarioDoc, available: AvailableMap): ActorPanel[] {
  return scenario.actors
    .filter((actor) => actor.id in available)
    .map((actor) => ({
      actor: actor.id,
      display: actor.display,
      kind: actor.kind,
      size: actor.size,
      controls: scenario.actions
        .filter((a) => a.performer === actor.id)
        .map((a) => actionControl(a, available[actor.id] ?? [])),
    }));
}

/** Slider metadata for one declared action parameter. */
export function findParamControl(scenario: ScenarioDoc, actionId: string,
                                 name: string): ParamControl | null {
  const param = scenario.actions.find((a) => a.id === actionId)
    ?.params.find((p) => p.name === name);
  return param ? paramControl(param) : null;
}

/** The enabled action ids per actor, for parity checks against the server. */
export function enabledSets(panels: ActorPanel[]): Record<string, string[]> {
  const out: Record<string, string[]> = {};
  for (const panel of panels) {
    out[panel.actor] = panel.controls.filter((c) => c.enabled).map((c) => c.id);
  }
  return out;
}

/** Tick keyword for a slider position, if the ladder anchors one there. */
export function tickKeyword(control: ParamControl, value: number): string | null {
  for (const tick of control.ticks) {
    if (Math.abs(tick.value - value) < 1e-9) return tick.keyword;
  }
  return null;
}
