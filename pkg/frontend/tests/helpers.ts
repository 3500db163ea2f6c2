// Fixture loading and a replaying mock fetch. The mock serves only responses
// the recorder captured from the real service, keyed by request shape, so a
// test can trace every displayed number back to a genuine server payload.

import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import type { FetchFn, ScenarioDoc } from "../src/api";

const here = dirname(fileURLToPath(import.meta.url));

export function fixture<T>(name: string): T {
  return JSON.parse(readFileSync(join(here, "fixtures", name), "utf8")) as T;
}

export interface RecordedCall {
  method: string;
  path: string;
  keys: string | null;
  body: unknown;
  status: number;
  response: unknown;
}

export function catalogCall(scenarios: ScenarioDoc[]): RecordedCall {
  return { method: "GET", path: "/api/v1/scenarios", keys: null, body: null,
           status: 200, response: scenarios };
}

function stable(value: unknown): string {
  if (value === null || typeof value !== "object") return JSON.stringify(value);
  if (Array.isArray(value)) return `[${value.map(stable).join(",")}]`;
  const entries = Object.keys(value as Record<string, unknown>).sort()
    .map((k) => `${JSON.stringify(k)}:${stable((value as Record<string, unknown>)[k])}`);
  return `{${entries.join(",")}}`;
}

function signature(method: string, path: string, keys: string | null,
                   body: unknown): string {
  return `${method} ${path} keys=${keys ?? ""} body=${stable(body ?? null)}`;
}

/** Serves recorded calls in order per request shape; throws on anything else. */
export class MockServer {
  private queues = new Map<string, RecordedCall[]>();
  served: unknown[] = [];
  fetch: FetchFn;

  constructor(log: RecordedCall[]) {
    for (const call of log) {
      const sig = signature(call.method, call.path, call.keys, call.body);
      const queue = this.queues.get(sig) ?? [];
      queue.push(call);
      this.queues.set(sig, queue);
    }
    this.fetch = async (url, init) => {
      const u = new URL(url, "http://mock");
      const body = init?.body ? JSON.parse(init.body as string) : null;
      const sig = signature(init?.method ?? "GET", u.pathname,
                            u.searchParams.get("keys"), body);
      const queue = this.queues.get(sig);
      const call = queue?.shift();
      if (!call) throw new Error(`no recorded response for: ${sig}`);
      this.served.push(call.response);
      return new Response(JSON.stringify(call.response), {
        status: call.status,
        headers: { "content-type": "application/json" },
      });
    };
  }

  /** Every number present in any response body served so far. */
  servedNumbers(): Set<number> {
    const out = new Set<number>();
    const walk = (value: unknown): void => {
      if (typeof value === "number") out.add(value);
      else if (Array.isArray(value)) value.forEach(walk);
      else if (value && typeof value === "object") {
        Object.values(value).forEach(walk);
      }
    };
    walk(this.served);
    return out;
  }
}

// DOM drivers for the app under test.

export function q<T extends Element>(selector: string): T {
  const el = document.querySelector(selector);
  if (!el) throw new Error(`missing element: ${selector}`);
  return el as T;
}

export function clickButton(selector: string): void {
  const btn = q<HTMLButtonElement>(selector);
  if (btn.disabled) throw new Error(`button is disabled: ${selector}`);
  btn.dispatchEvent(new Event("click", { bubbles: true }));
}

export function clickAction(actionId: string): void {
  clickButton(`button.act[data-action="${actionId}"]`);
}

export function setSlider(actionId: string, param: string, value: string): void {
  const input = q<HTMLInputElement>(
    `input.param[data-action="${actionId}"][data-param="${param}"]`);
  input.value = value;
  input.dispatchEvent(new Event("input", { bubbles: true }));
}

export function toggleKeyBox(key: string): void {
  const input = Array.from(
    document.querySelectorAll<HTMLInputElement>("input.key-toggle"))
    .find((el) => el.dataset.key === key);
  if (!input) throw new Error(`no key checkbox for ${key}`);
  input.checked = !input.checked;
  input.dispatchEvent(new Event("change", { bubbles: true }));
}

export interface ChartPoint {
  session: string;
  key: string;
  step: number;
  value: number;
}

export function chartPoints(scope: ParentNode = document): ChartPoint[] {
  return Array.from(scope.querySelectorAll("circle.pt")).map((el) => ({
    session: el.getAttribute("data-session") ?? "",
    key: el.getAttribute("data-key") ?? "",
    step: Number(el.getAttribute("data-step")),
    value: Number(el.getAttribute("data-value")),
  }));
}

export function pointValue(points: ChartPoint[], session: string, key: string,
                           step: number): number {
  const hit = points.find((p) =>
    p.session === session && p.key === key && p.step === step);
  if (!hit) throw new Error(`no chart point ${session}/${key}@${step}`);
  return hit.value;
}
