import { describe, expect, it } from "vitest";

import type { ScenarioDoc, StateDoc, TraceDoc } from "../src/api";
import { renderChart, renderLegend } from "../src/chart";
import { buildSeries, layoutChart, seriesValues, xAxisLabels } from "../src/series";
import { chartPoints, fixture } from "./helpers";

const scenario = fixture<ScenarioDoc[]>("scenario.json")[0];
const gating = fixture<Array<{ state: StateDoc; trace: TraceDoc }>>(
  "gating_states.json");

const displayOf = (id: string) =>
  scenario.actions.find((a) => a.id === id)?.display ?? id;

// Entry 2 is a full ten-step replay ending at TP2 (see tools/record_fixtures.py).
const sellSuccess = gating[2].trace;

function render(trace: TraceDoc, keys: string[], dashed = false): HTMLElement {
  const series = buildSeries(dashed ? "branch" : "base", dashed, trace, keys, keys);
  const layout = layoutChart(series, xAxisLabels([trace], displayOf));
  const host = document.createElement("div");
  host.innerHTML = renderChart(layout) + renderLegend(layout);
  return host;
}

describe("svg rendering", () => {
  it("draws one polyline and one dot per point for each series", () => {
    const keys = sellSuccess.keys.slice(0, 3).map((k) => k.key);
    const host = render(sellSuccess, keys);
    expect(host.querySelectorAll("polyline.line").length).toBe(3);
    expect(host.querySelectorAll("circle.pt").length)
      .toBe(3 * (sellSuccess.steps.length + 1));
  });

  it("stamps every dot with its exact trace value", () => {
    const keys = sellSuccess.keys.map((k) => k.key);
    const host = render(sellSuccess, keys);
    const points = chartPoints(host);
    for (const key of keys) {
      const values = seriesValues(sellSuccess, key);
      values.forEach((value, step) => {
        const dot = points.find((p) => p.key === key && p.step === step);
        expect(dot, `${key}@${step}`).toBeDefined();
        expect(dot?.value).toBe(value);
      });
    }
  });

  it("labels the x axis with the actions and their parametrization", () => {
    const host = render(sellSuccess, [sellSuccess.keys[0].key]);
    const ticks = Array.from(host.querySelectorAll("text.xtick"))
      .map((el) => el.textContent);
    expect(ticks[0]).toBe("start");
    expect(ticks).toContain("α13(t=15)");
    expect(ticks).toContain("α14");
  });

  it("dashes branch series and keeps base solid", () => {
    const key = sellSuccess.keys[0].key;
    const solid = render(sellSuccess, [key]);
    const dashed = render(sellSuccess, [key], true);
    expect(solid.querySelector("polyline.line")?.getAttribute("stroke-dasharray"))
      .toBeNull();
    expect(dashed.querySelector("polyline.line")?.getAttribute("stroke-dasharray"))
      .toBe("7 5");
    expect(dashed.querySelector(".legend .swatch.dashed")).not.toBeNull();
    expect(solid.querySelector(".legend .swatch.solid")).not.toBeNull();
  });

  it("escapes markup-significant characters in labels", () => {
    const trace = JSON.parse(JSON.stringify(sellSuccess)) as TraceDoc;
    trace.keys[0] = { label: `<b>&"x"`, key: trace.keys[0].key };
    const host = render(trace, [trace.keys[0].key]);
    expect(host.querySelector("b")).toBeNull();
  });
});

describe("belief trajectory shape", () => {
  it("shows the gift belief rising, then plummeting to zero at the payment ask",
     () => {
    const values = seriesValues(sellSuccess, "cb(Q-Gift,Client,Client)");
    expect(values[0]).toBe(0);
    expect(values[3]).toBeGreaterThan(0);
    expect(values[5]).toBeGreaterThan(values[3]);
    expect(values[6]).toBe(0);
    expect(sellSuccess.steps[5].action).toBe("alpha14");
    const labels = xAxisLabels([sellSuccess], displayOf);
    expect(labels[6]).toBe("α14");
  });
});
