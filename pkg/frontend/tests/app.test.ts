import { beforeEach, describe, expect, it } from "vitest";

import { Api } from "../src/api";
import type { ScenarioDoc } from "../src/api";
import { initApp, type AppHandle } from "../src/app";
import { MockServer, catalogCall, clickButton, fixture, q, setSlider,
         type RecordedCall } from "./helpers";

const scenarios = fixture<ScenarioDoc[]>("scenario.json");
const errorLog = fixture<RecordedCall[]>("error_surface.json");

let app: AppHandle;

async function freshApp(): Promise<void> {
  const mock = new MockServer([catalogCall(scenarios), ...errorLog]);
  document.body.innerHTML = `<div id="app"></div>`;
  app = initApp(q("#app"), new Api("", mock.fetch));
  await app.idle();
}

describe("page shell", () => {
  beforeEach(freshApp);

  it("loads the catalog and waits for a session", () => {
    const select = q<HTMLSelectElement>("#scenario-select");
    expect(select.value).toBe("spanish_steps");
    const variants = Array.from(q("#variant-select").children)
      .map((o) => (o as HTMLOptionElement).value);
    expect(variants).toEqual(["with_spouse", "no_spouse", "paper-verbatim"]);
    expect(q("#panels").textContent).toContain("No session yet.");
    expect(q("#chart-box").textContent).toContain("No keys selected.");
    expect(q("#error-bar").classList.contains("hidden")).toBe(true);
  });

  it("starts a session and gates the panel on the server's word", async () => {
    clickButton("#start-session");
    await app.idle();
    expect(q("#session-info").textContent).toContain("base: TS after 0 step(s)");
    expect(q<HTMLButtonElement>(`button.act[data-action="alpha1"]`).disabled)
      .toBe(false);
    expect(q<HTMLButtonElement>(`button.act[data-action="alpha3"]`).disabled)
      .toBe(true);
    expect(q<HTMLButtonElement>(`button.act[data-action="alpha14"]`).disabled)
      .toBe(true);
    expect(q("#chart-box").textContent).toContain("No keys selected.");
  });
});

describe("calibration labels", () => {
  beforeEach(async () => {
    await freshApp();
    clickButton("#start-session");
    await app.idle();
  });

  it("captions the rudeness slider with the ladder keyword", () => {
    setSlider("alpha10", "y", "1");
    const label = Array.from(document.querySelectorAll(".param-label"))
      .find((el) => el.getAttribute("data-for") === "alpha10:y");
    expect(label?.textContent).toContain("threat of physical violence");
    setSlider("alpha10", "y", "0.7");
    expect(label?.textContent).toContain("generic foul words");
    setSlider("alpha10", "y", "0.9");
    expect(label?.textContent?.trim()).toBe("0.9");
  });

  it("marks slider ticks with their keywords", () => {
    const option = Array.from(
      document.querySelectorAll(`#ticks-alpha10-y option`))
      .find((o) => o.getAttribute("value") === "1");
    expect(option?.getAttribute("label")).toBe("threat of physical violence");
    const loud = Array.from(
      document.querySelectorAll(`#ticks-alpha10-x option`))
      .find((o) => o.getAttribute("value") === "0.7");
    expect(loud?.getAttribute("label")).toBe("yell");
  });

  it("captions durations in seconds", () => {
    setSlider("alpha13", "t", "15");
    const label = Array.from(document.querySelectorAll(".param-label"))
      .find((el) => el.getAttribute("data-for") === "alpha13:t");
    expect(label?.textContent).toBe("15 s");
  });
});

describe("inline errors", () => {
  beforeEach(async () => {
    await freshApp();
    clickButton("#start-session");
    await app.idle();
  });

  it("surfaces a 409 with the legal actions when gating is bypassed", async () => {
    const btn = q<HTMLButtonElement>(`button.act[data-action="alpha3"]`);
    btn.removeAttribute("disabled");
    clickButton(`button.act[data-action="alpha3"]`);
    await app.idle();
    const bar = q("#error-bar");
    expect(bar.classList.contains("hidden")).toBe(false);
    expect(bar.textContent).toContain("α3 by Client is not available at TS");
    expect(bar.textContent).toContain("no actions are legal");
    expect(app.state.sessions[0].stepCount).toBe(0);
  });

  it("surfaces a 422 from a bad branch index", async () => {
    const btn = q<HTMLButtonElement>(`.branch-at[data-step="0"]`);
    btn.dataset.step = "99";
    clickButton(`.branch-at[data-step="99"]`);
    await app.idle();
    expect(q("#error-bar").textContent).toBe("step index 99 outside 0..0");
    expect(app.state.sessions.length).toBe(1);
  });
});
