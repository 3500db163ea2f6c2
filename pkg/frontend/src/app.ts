// DOM wiring for the explorer. One session drives the action panel at a time;
// branches keep their own server sessions and are overlaid on the chart. All
// mutations funnel through a single work queue, so steps round-trip strictly
// in order and the UI never shows a value the server has not confirmed.

import { Api, ApiError } from "./api";
import type { AvailableMap, ScenarioDoc, StateDoc, StepDoc, TraceDoc } from "./api";
import { renderChart, renderLegend } from "./chart";
import { findParamControl, panelModel, tickKeyword } from "./panel";
import type { ActionControl, ParamControl } from "./panel";
import { buildSeries, layoutChart, xAxisLabels } from "./series";
import type { ChartSeries } from "./series";

export interface SessionView {
  id: string;
  name: string;
  dashed: boolean;
  progress: string;
  terminated: boolean;
  stepCount: number;
  values: Record<string, number>;
  available: AvailableMap;
  keys: string[];
  trace: TraceDoc | null;
}

export interface ViewState {
  scenarios: ScenarioDoc[];
  scenario: ScenarioDoc | null;
  variant: string;
  sessions: SessionView[];
  active: number;
  selectedKeys: string[];
  params: Record<string, Record<string, number>>;
  error: string | null;
}

export interface AppHandle {
  state: ViewState;
  idle(): Promise<void>;
}

function esc(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function errText(err: unknown): string {
  if (err instanceof ApiError) {
    const ill = err.illegal;
    if (ill) {
      const legal = ill.legal.length
        ? `legal now: ${ill.legal.join(", ")}`
        : "no actions are legal";
      return `${ill.message} (${legal})`;
    }
    if (typeof err.detail === "string") return err.detail;
    return JSON.stringify(err.detail);
  }
  return String(err);
}

function sessionFromDoc(doc: StateDoc, name: string, dashed: boolean): SessionView {
  return {
    id: doc.session.id,
    name,
    dashed,
    progress: doc.progress,
    terminated: doc.terminated,
    stepCount: doc.step_count,
    values: doc.values,
    available: doc.available,
    keys: doc.keys,
    trace: null,
  };
}

export function initApp(root: HTMLElement, api: Api): AppHandle {
  const state: ViewState = {
    scenarios: [],
    scenario: null,
    variant: "",
    sessions: [],
    active: 0,
    selectedKeys: [],
    params: {},
    error: null,
  };

  root.innerHTML = `
    <header class="topbar">
      <label>Scenario <select id="scenario-select"></select></label>
      <label>Variant <select id="variant-select"></select></label>
      <button id="start-session">Start session</button>
      <span id="session-info"></span>
    </header>
    <p id="error-bar" class="error hidden" aria-live="polite"></p>
    <div class="columns">
      <section class="left">
        <div id="panels"><p class="placeholder">No session yet.</p></div>
        <div id="branch-box"></div>
      </section>
      <section class="right">
        <div id="key-picker"></div>
        <div id="chart-box"><p class="placeholder">No keys selected.</p></div>
        <div id="legend-box"></div>
        <div id="values-box"></div>
      </section>
    </div>`;

  const el = (id: string) => root.querySelector(`#${id}`) as HTMLElement;

  function active(): SessionView | null {
    return state.sessions[state.active] ?? null;
  }

  function displayOf(actionId: string): string {
    const action = state.scenario?.actions.find((a) => a.id === actionId);
    return action ? action.display : actionId;
  }

  function paramValue(actionId: string, control: ParamControl): number {
    return state.params[actionId]?.[control.name] ?? control.initial;
  }

  function argsFor(actionId: string): Record<string, number> {
    const action = state.scenario?.actions.find((a) => a.id === actionId);
    if (!action) return {};
    const args: Record<string, number> = {};
    for (const p of action.params) {
      args[p.name] = state.params[actionId]?.[p.name] ?? 0;
    }
    return args;
  }

  function branchName(step: number): string {
    const base = `branch @${step}`;
    let name = base;
    let n = 2;
    while (state.sessions.some((s) => s.name === name)) {
      name = `${base} #${n}`;
      n += 1;
    }
    return name;
  }

  // rendering

  function renderTop(): void {
    const scenarioSel = el("scenario-select") as unknown as HTMLSelectElement;
    scenarioSel.innerHTML = state.scenarios
      .map((s) => `<option value="${esc(s.id)}">${esc(s.id)}</option>`)
      .join("");
    if (state.scenario) scenarioSel.value = state.scenario.id;
    const variantSel = el("variant-select") as unknown as HTMLSelectElement;
    variantSel.innerHTML = (state.scenario?.variants ?? [])
      .map((v) => `<option value="${esc(v)}">${esc(v)}</option>`)
      .join("");
    if (state.variant) variantSel.value = state.variant;

    const session = active();
    el("session-info").textContent = session
      ? `${session.name}: ${session.progress}` +
        `${session.terminated ? " (terminal)" : ""} after ${session.stepCount} step(s)`
      : "";
  }

  function paramHtml(actionId: string, control: ParamControl): string {
    const value = paramValue(actionId, control);
    const keyword = tickKeyword(control, value);
    const listId = `ticks-${actionId}-${control.name}`;
    const options = control.ticks
      .map((t) => `<option value="${String(t.value)}" label="${esc(t.keyword)}"></option>`)
      .join("");
    const datalist = control.ticks.length
      ? `<datalist id="${listId}">${options}</datalist>`
      : "";
    const suffix = control.domain === "seconds" ? " s" : "";
    const caption = keyword ? ` “${keyword}”` : "";
    return `
      <label class="param-row">
        <span class="param-name">${esc(control.name)}</span>
        <input type="range" class="param" data-action="${esc(actionId)}"
               data-param="${esc(control.name)}" min="${control.min}"
               max="${control.max}" step="${control.step}" value="${value}"
               ${control.ticks.length ? `list="${listId}"` : ""}>
        ${datalist}
        <span class="param-label" data-for="${esc(actionId)}:${esc(control.name)}">` +
      `${value}${suffix}${esc(caption)}</span>
      </label>`;
  }

  function actionHtml(actor: string, control: ActionControl): string {
    const params = control.params.map((p) => paramHtml(control.id, p)).join("");
    return `
      <div class="action ${control.enabled ? "" : "off"}">
        <button class="act" data-actor="${esc(actor)}"
                data-action="${esc(control.id)}"
                ${control.enabled ? "" : "disabled"}>${esc(control.display)}</button>
        <span class="action-desc">${esc(control.description)}` +
      `${control.terminal ? " (ends the scenario)" : ""}</span>
        ${params}
      </div>`;
  }

  function renderPanels(): void {
    const session = active();
    if (!state.scenario || !session) {
      el("panels").innerHTML = `<p class="placeholder">No session yet.</p>`;
      return;
    }
    const panels = panelModel(state.scenario, session.available);
    el("panels").innerHTML = panels
      .map((panel) => `
        <fieldset class="actor-panel" data-actor="${esc(panel.actor)}">
          <legend>${esc(panel.display)}${panel.size > 1 ? ` (${panel.size})` : ""}</legend>
          ${panel.controls.map((c) => actionHtml(panel.actor, c)).join("")}
        </fieldset>`)
      .join("");
  }

  function renderBranches(): void {
    const session = active();
    if (!session) {
      el("branch-box").innerHTML = "";
      return;
    }
    const buttons = [];
    for (let step = 0; step <= session.stepCount; step++) {
      buttons.push(`<button class="branch-at" data-step="${step}">at ${step}</button>`);
    }
    const items = state.sessions.map((s, i) => `
      <li class="${i === state.active ? "current" : ""}">
        <button class="select-session" data-index="${i}">${esc(s.name)}</button>
        <span class="branch-pos">${esc(s.progress)}, step ${s.stepCount}</span>
        ${i > 0 ? `<button class="delete-session" data-index="${i}">delete</button>` : ""}
      </li>`);
    el("branch-box").innerHTML = `
      <h3>Branches</h3>
      <div class="branch-buttons">Branch ${esc(session.name)}: ${buttons.join("")}</div>
      <ul class="branch-list">${items.join("")}</ul>`;
  }

  function renderKeyPicker(): void {
    const session = state.sessions[0];
    if (!session) {
      el("key-picker").innerHTML = "";
      return;
    }
    const rows = session.keys.map((key) => {
      const checked = state.selectedKeys.includes(key) ? "checked" : "";
      return `<label class="key-row"><input type="checkbox" class="key-toggle"
                data-key="${esc(key)}" ${checked}> <code>${esc(key)}</code></label>`;
    });
    el("key-picker").innerHTML =
      `<details><summary>Chart keys (${state.selectedKeys.length} selected)</summary>` +
      `${rows.join("")}</details>`;
  }

  function chartedSeries(): { series: ChartSeries[]; labels: string[] } {
    const traced = state.sessions.filter((s) => s.trace !== null);
    if (!traced.length || !state.selectedKeys.length) {
      return { series: [], labels: [] };
    }
    const series: ChartSeries[] = [];
    for (const s of traced) {
      series.push(...buildSeries(s.name, s.dashed, s.trace as TraceDoc,
                                 state.selectedKeys, state.selectedKeys));
    }
    const labels = xAxisLabels(traced.map((s) => s.trace as TraceDoc), displayOf);
    return { series, labels };
  }

  function renderChartArea(): void {
    const { series, labels } = chartedSeries();
    if (!series.length) {
      el("chart-box").innerHTML = `<p class="placeholder">No keys selected.</p>`;
      el("legend-box").innerHTML = "";
      return;
    }
    const layout = layoutChart(series, labels);
    el("chart-box").innerHTML = renderChart(layout);
    el("legend-box").innerHTML = renderLegend(layout);
  }

  function renderValues(): void {
    if (!state.selectedKeys.length || !state.sessions.length) {
      el("values-box").innerHTML = "";
      return;
    }
    const heads = state.sessions.map((s) => `<th>${esc(s.name)}</th>`).join("");
    const rows = state.selectedKeys.map((key) => {
      const cells = state.sessions.map((s) => {
        const v = s.values[key];
        return v === undefined
          ? "<td></td>"
          : `<td data-value="${String(v)}">${Number(v.toPrecision(6))}</td>`;
      });
      return `<tr><td><code>${esc(key)}</code></td>${cells.join("")}</tr>`;
    });
    el("values-box").innerHTML =
      `<table class="values"><thead><tr><th>key</th>${heads}</tr></thead>` +
      `<tbody>${rows.join("")}</tbody></table>`;
  }

  function renderError(): void {
    const bar = el("error-bar");
    bar.textContent = state.error ?? "";
    bar.classList.toggle("hidden", state.error === null);
  }

  function render(): void {
    renderTop();
    renderPanels();
    renderBranches();
    renderKeyPicker();
    renderChartArea();
    renderValues();
    renderError();
  }

  // server round-trips, serialized

  let work: Promise<void> = Promise.resolve();

  function enqueue(task: () => Promise<void> | void): void {
    work = work
      .then(() => task())
      .catch((err) => {
        state.error = errText(err);
        render();
      });
  }

  async function refreshTrace(session: SessionView): Promise<void> {
    session.trace = state.selectedKeys.length
      ? await api.trace(session.id, state.selectedKeys)
      : null;
  }

  async function loadCatalog(): Promise<void> {
    state.scenarios = await api.listScenarios();
    state.scenario = state.scenarios[0] ?? null;
    state.variant = state.scenario?.default_variant ?? "";
    render();
  }

  async function startSession(): Promise<void> {
    if (!state.scenario) return;
    const doc = await api.createSession(state.scenario.id, state.variant);
    const session = sessionFromDoc(doc, "base", false);
    state.sessions = [session];
    state.active = 0;
    state.error = null;
    await refreshTrace(session);
    render();
  }

  async function act(actor: string, actionId: string): Promise<void> {
    const session = active();
    if (!session) return;
    const report: StepDoc = await api.act(session.id, actor, actionId,
                                          argsFor(actionId));
    session.progress = report.progress_after;
    session.terminated = report.terminated;
    session.stepCount = report.step;
    session.values = report.values;
    session.available = report.available;
    state.error = null;
    await refreshTrace(session);
    render();
  }

  async function branchAt(step: number): Promise<void> {
    const session = active();
    if (!session) return;
    const doc = await api.branch(session.id, step);
    const fork = sessionFromDoc(doc, branchName(step), true);
    state.sessions.push(fork);
    state.active = state.sessions.length - 1;
    state.error = null;
    await refreshTrace(fork);
    render();
  }

  async function toggleKey(key: string): Promise<void> {
    const i = state.selectedKeys.indexOf(key);
    if (i >= 0) state.selectedKeys.splice(i, 1);
    else state.selectedKeys.push(key);
    for (const session of state.sessions) {
      await refreshTrace(session);
    }
    render();
  }

  function selectSession(index: number): void {
    if (index >= 0 && index < state.sessions.length) {
      state.active = index;
      render();
    }
  }

  function deleteSession(index: number): void {
    if (index <= 0 || index >= state.sessions.length) return;
    state.sessions.splice(index, 1);
    if (state.active >= state.sessions.length) {
      state.active = state.sessions.length - 1;
    }
    render();
  }

  // event delegation; handlers survive region re-renders

  root.addEventListener("click", (ev) => {
    const target = ev.target as HTMLElement;
    if (target.id === "start-session") {
      enqueue(startSession);
    } else if (target.classList.contains("act")) {
      const actor = target.dataset.actor as string;
      const action = target.dataset.action as string;
      enqueue(() => act(actor, action));
    } else if (target.classList.contains("branch-at")) {
      const step = Number(target.dataset.step);
      enqueue(() => branchAt(step));
    } else if (target.classList.contains("select-session")) {
      selectSession(Number(target.dataset.index));
    } else if (target.classList.contains("delete-session")) {
      deleteSession(Number(target.dataset.index));
    }
  });

  root.addEventListener("input", (ev) => {
    const target = ev.target as HTMLInputElement;
    if (!target.classList.contains("param")) return;
    const actionId = target.dataset.action as string;
    const name = target.dataset.param as string;
    const value = Number(target.value);
    state.params[actionId] = state.params[actionId] ?? {};
    state.params[actionId][name] = value;

    const control = state.scenario
      ? findParamControl(state.scenario, actionId, name)
      : null;
    const label = root.querySelector(
      `.param-label[data-for="${actionId}:${name}"]`);
    if (label && control) {
      const keyword = tickKeyword(control, value);
      const suffix = control.domain === "seconds" ? " s" : "";
      label.textContent =
        `${value}${suffix}${keyword ? ` “${keyword}”` : ""}`;
    }
  });

  root.addEventListener("change", (ev) => {
    const target = ev.target as HTMLInputElement;
    if (target.classList.contains("key-toggle")) {
      enqueue(() => toggleKey(target.dataset.key as string));
    } else if (target.id === "variant-select") {
      state.variant = target.value;
    } else if (target.id === "scenario-select") {
      const scenario = state.scenarios.find((s) => s.id === target.value);
      if (scenario) {
        state.scenario = scenario;
        state.variant = scenario.default_variant;
        render();
      }
    }
  });

  enqueue(loadCatalog);
  return { state, idle: () => work };
}
