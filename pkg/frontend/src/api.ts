import type {
  Marked,
  MarkResponse,
  RuleInfo,
  SessionState,
  StepResponse,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    message: string,
    public code: string,
    public status: number,
  ) {
    super(message);
  }
}

export interface CreateOptions {
  formula?: string;
  generate?: { seed: number; vars?: string; negations?: [number, number] };
  mode: "RULE" | "INPUT";
  feedback: boolean;
  task_id?: string;
  student?: string;
}

type Fetch = typeof fetch;

/** Minimal typed client for the session endpoints. */
export class ApiClient {
  constructor(
    private baseUrl: string,
    private fetchImpl: Fetch = fetch,
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const res = await this.fetchImpl(`${this.baseUrl}${path}`, {
      method,
      headers: body === undefined ? {} : { "Content-Type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    if (!res.ok) {
      const payload = await res.json().catch(() => ({ error: res.statusText, code: "Http" }));
      throw new ApiError(payload.error ?? res.statusText, payload.code ?? "Http", res.status);
    }
    return (await res.json()) as T;
  }

  rules(): Promise<{ rules: RuleInfo[] }> {
    return this.request("GET", "/rules");
  }

  createSession(opts: CreateOptions): Promise<SessionState> {
    return this.request("POST", "/sessions", opts);
  }

  getSession(id: string): Promise<SessionState> {
    return this.request("GET", `/sessions/${id}`);
  }

  mark(id: string, marked: Marked): Promise<MarkResponse> {
    return this.request("POST", `/sessions/${id}/mark`, marked);
  }

  applyRule(
    id: string,
    rule: number,
    params?: { member?: number; vars?: string[] },
  ): Promise<StepResponse> {
    return this.request("POST", `/sessions/${id}/apply`, { rule, params });
  }

  inputFormula(id: string, formula: string): Promise<StepResponse> {
    return this.request("POST", `/sessions/${id}/input`, { formula });
  }

  undo(id: string): Promise<StepResponse> {
    return this.request("POST", `/sessions/${id}/undo`);
  }

  /** Raw solution-file bytes, exactly what the CLI analyzer consumes. */
  async exportAttempt(id: string): Promise<string> {
    const res = await this.fetchImpl(`${this.baseUrl}/sessions/${id}/export`);
    if (!res.ok) throw new ApiError(res.statusText, "Http", res.status);
    return await res.text();
  }
}
