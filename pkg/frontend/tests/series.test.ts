import { describe, expect, it } from "vitest";

import type { ScenarioDoc, TraceDoc } from "../src/api";
import { actionLabel, buildSeries, layoutChart, prettyKey, seriesValues,
         xAxisLabels } from "../src/series";
import { fixture, type RecordedCall } from "./helpers";

const scenario = fixture<ScenarioDoc[]>("scenario.json")[0];
const flow = fixture<RecordedCall[]>("branch_flow.json");

const displayOf = (id: string) =>
  scenario.actions.find((a) => a.id === id)?.display ?? id;

function lastTraceFor(sessionId: string | null = null): TraceDoc {
  const traces = flow.filter((c) => c.path.endsWith("/trace"));
  const hits = sessionId
    ? traces.filter((c) => c.path.includes(sessionId))
    : traces;
  return hits[hits.length - 1].response as TraceDoc;
}

function sessionIds(): { base: string; fork: string } {
  const creates = flow.filter((c) => c.path === "/api/v1/sessions"
    || c.path.endsWith("/branch"));
  const [base, fork] = creates.map(
    (c) => (c.response as { session: { id: string } }).session.id);
  return { base, fork };
}

describe("series extraction", () => {
  it("pulls the column matching the requested key, initial value first", () => {
    const trace = lastTraceFor();
    const key = trace.keys[2].key;
    const values = seriesValues(trace, key);
    expect(values.length).toBe(trace.steps.length + 1);
    expect(values[0]).toBe(trace.initial.values[2]);
    trace.steps.forEach((step, i) => {
      expect(values[i + 1]).toBe(step.values[2]);
    });
  });

  it("also resolves keys by their request label", () => {
    const trace = lastTraceFor();
    expect(seriesValues(trace, trace.keys[0].label))
      .toEqual(seriesValues(trace, trace.keys[0].key));
  });

  it("rejects a key the trace does not carry", () => {
    expect(() => seriesValues(lastTraceFor(), "nope")).toThrow(/not in trace/);
  });
});

describe("axis labels", () => {
  it("formats actions with their parametrization", () => {
    const { fork } = sessionIds();
    const trace = lastTraceFor(fork);
    const labels = xAxisLabels([trace], displayOf);
    expect(labels[0]).toBe("start");
    expect(labels[5]).toBe("α13(t=15)");
    expect(labels[9]).toBe("α10(x=0.5 y=0.6)");
    expect(labels[8]).toBe("α11");
  });

  it("merges overlaid traces, joining only where they diverge", () => {
    const { base, fork } = sessionIds();
    const baseTrace = lastTraceFor(base);
    const forkTrace = lastTraceFor(fork);
    const labels = xAxisLabels([baseTrace, forkTrace], displayOf);
    expect(labels.length).toBe(forkTrace.steps.length + 1);
    for (let i = 1; i <= baseTrace.steps.length; i++) {
      expect(labels[i]).not.toContain(" / ");
    }
    expect(labels[13]).toBe("α10(x=0.9 y=1)");
  });

  it("keeps divergent actions visible side by side", () => {
    const { fork } = sessionIds();
    const forkTrace = lastTraceFor(fork);
    const other = JSON.parse(JSON.stringify(forkTrace)) as TraceDoc;
    other.steps[8] = { ...other.steps[8], action: "alpha2", args: {} };
    const labels = xAxisLabels([forkTrace, other], displayOf);
    expect(labels[9]).toBe("α10(x=0.5 y=0.6) / α2");
  });
});

describe("pretty keys", () => {
  it("shortens metric and belief keys", () => {
    expect(prettyKey("cssm(Western,Politeness,Client,Crowd,Client)"))
      .toBe("Politeness Client/Crowd");
    expect(prettyKey("cssm(Western,Wealth,Client,Client,Spouse)"))
      .toBe("Wealth Client/Client (Spouse)");
    expect(prettyKey("cb(Q-Gift,Client,Client)")).toBe("Q-Gift Client");
    expect(prettyKey("cb(Q-Agreed,Crowd,Seller)"))
      .toBe("Q-Agreed Crowd (Seller)");
    expect(prettyKey("odd text")).toBe("odd text");
  });
});

describe("chart layout", () => {
  it("passes series values through untouched", () => {
    const trace = lastTraceFor();
    const keys = trace.keys.map((k) => k.key);
    const series = buildSeries("base", false, trace, keys, keys);
    const layout = layoutChart(series, xAxisLabels([trace], displayOf));
    layout.series.forEach((s, i) => {
      expect(s.path.map((p) => p.value)).toEqual(
        series[i].points.map((p) => p.value));
    });
  });

  it("aligns points on the step grid inside the margins", () => {
    const trace = lastTraceFor();
    const keys = trace.keys.map((k) => k.key);
    const series = buildSeries("base", false, trace, keys, keys);
    const labels = xAxisLabels([trace], displayOf);
    const layout = layoutChart(series, labels, 860, 330);
    expect(layout.xTicks.length).toBe(labels.length);
    for (const s of layout.series) {
      s.path.forEach((p, i) => {
        expect(p.step).toBe(i);
        expect(p.x).toBeCloseTo(layout.xTicks[i].x, 10);
        expect(p.y).toBeGreaterThanOrEqual(0);
        expect(p.y).toBeLessThanOrEqual(330);
      });
    }
    const xs = layout.xTicks.map((t) => t.x);
    for (let i = 1; i < xs.length; i++) expect(xs[i]).toBeGreaterThan(xs[i - 1]);
  });

  it("survives a flat series and an empty selection", () => {
    const flat = layoutChart(
      [{ session: "base", key: "k", label: "k", color: "#000", dashed: false,
         points: [{ step: 0, value: 0.75 }, { step: 1, value: 0.75 }] }],
      ["start", "α1"]);
    expect(flat.series[0].path.every((p) => Number.isFinite(p.y))).toBe(true);
    const empty = layoutChart([], ["start"]);
    expect(empty.series).toEqual([]);
    expect(empty.yTicks.every((t) => Number.isFinite(t.y))).toBe(true);
  });

  it("marks branch series dashed and keeps one color per key", () => {
    const { base, fork } = sessionIds();
    const baseTrace = lastTraceFor(base);
    const forkTrace = lastTraceFor(fork);
    const keys = baseTrace.keys.map((k) => k.key);
    const series = [
      ...buildSeries("base", false, baseTrace, keys, keys),
      ...buildSeries("branch @8", true, forkTrace, keys, keys),
    ];
    const byKey = new Map<string, Set<string>>();
    for (const s of series) {
      const colors = byKey.get(s.key) ?? new Set();
      colors.add(s.color);
      byKey.set(s.key, colors);
      expect(s.dashed).toBe(s.session !== "base");
    }
    for (const colors of byKey.values()) expect(colors.size).toBe(1);
  });
});

describe("action labels", () => {
  it("renders args compactly and omits empty parens", () => {
    expect(actionLabel({ step: 1, action: "alpha13", actor: "Seller",
                         args: { t: 15 }, progress: "S7", terminated: false,
                         values: [] }, displayOf)).toBe("α13(t=15)");
    expect(actionLabel({ step: 1, action: "alpha1", actor: "Seller", args: {},
                         progress: "S1", terminated: false, values: [] },
                       displayOf)).toBe("α1");
    expect(actionLabel({ step: 1, action: "alpha10", actor: "Client",
                         args: { x: 0.9, y: 1.0 }, progress: "S9",
                         terminated: false, values: [] }, displayOf))
      .toBe("α10(x=0.9 y=1)");
  });
});
