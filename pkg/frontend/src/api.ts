// Typed client for the /api/v1 session service. All model numbers come from
// these responses; nothing in the UI recomputes them.

export interface KeywordTick {
  value: number;
  keyword: string;
}

export interface ParamDoc {
  name: string;
  domain: string;
  ladder: string | null;
  keywords: KeywordTick[];
}

export interface ActionDoc {
  id: string;
  display: string;
  performer: string;
  terminal: boolean;
  description: string;
  params: ParamDoc[];
}

export interface ActorDoc {
  id: string;
  kind: string;
  size: number;
  cultures: string[];
  display: string;
}

export interface GraphEdgeDoc {
  from: string;
  actor: string;
  action: string;
  to: string;
  verified: boolean;
}

export interface GraphDoc {
  start: string;
  states: Array<{ id: string; terminal: boolean }>;
  edges: GraphEdgeDoc[];
}

export interface ScenarioDoc {
  id: string;
  default_variant: string;
  variants: string[];
  cultures: string[];
  actors: ActorDoc[];
  actions: ActionDoc[];
  questions: Array<{ id: string; text: string }>;
  graph: GraphDoc;
}

export type AvailableMap = Record<string, string[]>;

export interface StateDoc {
  session: {
    id: string;
    scenario: string;
    variant: string;
    created: number;
    ttl_seconds: number;
  };
  progress: string;
  terminated: boolean;
  step_count: number;
  keys: string[];
  values: Record<string, number>;
  available: AvailableMap;
}

export interface MassDoc {
  m_true: number;
  m_false: number;
  support: number;
  plausibility: number;
}

export interface StepDoc {
  step: number;
  action: string;
  actor: string;
  args: Record<string, number>;
  progress_before: string;
  progress_after: string;
  terminated: boolean;
  cssm_deltas: Record<string, { old: number; new: number }>;
  cb_deltas: Record<string, { old: MassDoc; new: MassDoc }>;
  values: Record<string, number>;
  available: AvailableMap;
}

export interface TraceStepDoc {
  step: number;
  action: string;
  actor: string;
  args: Record<string, number>;
  progress: string;
  terminated: boolean;
  values: number[];
}

export interface TraceDoc {
  scenario: string;
  variant: string;
  keys: Array<{ label: string; key: string }>;
  initial: { progress: string; values: number[] };
  steps: TraceStepDoc[];
}

export interface IllegalActionDetail {
  message: string;
  legal: string[];
  terminated: boolean;
}

export class ApiError extends Error {
  status: number;
  detail: unknown;

  constructor(status: number, detail: unknown) {
    super(typeof detail === "string" ? detail : JSON.stringify(detail));
    this.status = status;
    this.detail = detail;
  }

  get illegal(): IllegalActionDetail | null {
    if (this.status === 409 && this.detail && typeof this.detail === "object") {
      return this.detail as IllegalActionDetail;
    }
    return null;
  }
}

export type FetchFn = (url: string, init?: RequestInit) => Promise<Response>;

export class Api {
  private base: string;
  private fetchFn: FetchFn;

  constructor(base = "", fetchFn?: FetchFn) {
    this.base = base.replace(/\/$/, "");
    this.fetchFn = fetchFn ?? ((url, init) => fetch(url, init));
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: RequestInit = { method, headers: { "content-type": "application/json" } };
    if (body !== undefined) init.body = JSON.stringify(body);
    const resp = await this.fetchFn(this.base + path, init);
    const payload = await resp.json().catch(() => null);
    if (!resp.ok) {
      const detail = payload && typeof payload === "object" && "detail" in payload
        ? (payload as { detail: unknown }).detail
        : payload;
      throw new ApiError(resp.status, detail ?? `HTTP ${resp.status}`);
    }
    return payload as T;
  }

  listScenarios(): Promise<ScenarioDoc[]> {
    return this.request("GET", "/api/v1/scenarios");
  }

  createSession(scenario: string, variant: string): Promise<StateDoc> {
    return this.request("POST", "/api/v1/sessions", { scenario, variant });
  }

  getState(sessionId: string): Promise<StateDoc> {
    return this.request("GET", `/api/v1/sessions/${sessionId}`);
  }

  act(sessionId: string, actor: string, actionType: string,
      args: Record<string, number>): Promise<StepDoc> {
    return this.request("POST", `/api/v1/sessions/${sessionId}/actions`,
                        { actor, action_type: actionType, args });
  }

  branch(sessionId: string, atStep: number): Promise<StateDoc> {
    return this.request("POST", `/api/v1/sessions/${sessionId}/branch`,
                        { at_step: atStep });
  }

  trace(sessionId: string, keys: string[]): Promise<TraceDoc> {
    const query = keys.length ? `?keys=${encodeURIComponent(keys.join(","))}` : "";
    return this.request("GET", `/api/v1/sessions/${sessionId}/trace${query}`);
  }
}
