// Typed client for the /v1 session API. The server owns all physics;
// this module only moves JSON.

export interface HistoryRow {
  observable: string;
  value: number;
  value_squared: number;
  running_sum: number;
}

export type SessionStatus = "undetermined" | "entangled" | "exhausted";

export interface SessionState {
  id: string;
  n_qubits: number;
  strategy: string;
  seed: number;
  b_star: string | null;
  history: HistoryRow[];
  criterion_sum: number;
  status: SessionStatus;
  recommendation: string | null;
}

export interface CreateSessionRequest {
  n_qubits: number;
  strategy: string;
  seed?: number;
  b_star?: string;
}

export class ApiError extends Error {
  constructor(public status: number, message: string) {
    super(message);
    this.name = "ApiError";
  }
}

async function parseError(res: Response): Promise<ApiError> {
  let detail = res.statusText;
  try {
    const body = await res.json();
    if (typeof body.detail === "string") detail = body.detail;
    else if (body.detail) detail = JSON.stringify(body.detail);
  } catch {
    // keep the status text
  }
  return new ApiError(res.status, detail);
}

export class ApiClient {
  constructor(private baseUrl: string = "") {}

  private url(path: string): string {
    return `${this.baseUrl}${path}`;
  }

  async health(): Promise<boolean> {
    try {
      const res = await fetch(this.url("/healthz"));
      return res.ok;
    } catch {
      return false;
    }
  }

  async createSession(req: CreateSessionRequest): Promise<SessionState> {
    const res = await fetch(this.url("/v1/sessions"), {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(req),
    });
    if (!res.ok) throw await parseError(res);
    return (await res.json()) as SessionState;
  }

  async getSession(id: string): Promise<SessionState> {
    const res = await fetch(this.url(`/v1/sessions/${id}`));
    if (!res.ok) throw await parseError(res);
    return (await res.json()) as SessionState;
  }

  async postResult(
    id: string,
    observable: string,
    value: number,
  ): Promise<SessionState> {
    const res = await fetch(this.url(`/v1/sessions/${id}/results`), {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ observable, value }),
    });
    if (!res.ok) throw await parseError(res);
    return (await res.json()) as SessionState;
  }

  async deleteSession(id: string): Promise<void> {
    const res = await fetch(this.url(`/v1/sessions/${id}`), {
      method: "DELETE",
    });
    if (!res.ok && res.status !== 404) throw await parseError(res);
  }
}
