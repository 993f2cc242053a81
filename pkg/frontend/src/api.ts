import {
  ActionRecord,
  ActionResponse,
  CandidateEntry,
  Path,
  StatePayload,
} from "./model.js";

export class ApiError extends Error {
  constructor(
    public status: number,
    public reason: string,
    public detail: string | null,
  ) {
    super(detail ? `${reason}: ${detail}` : reason);
  }
}

async function parseError(response: Response): Promise<ApiError> {
  let reason = `http_${response.status}`;
  let detail: string | null = null;
  try {
    const body = await response.json();
    if (body && typeof body.detail === "object" && body.detail !== null) {
      reason = body.detail.reason ?? reason;
      detail = body.detail.detail ?? null;
    } else if (body && typeof body.detail === "string") {
      detail = body.detail;
    }
  } catch {
    /* non-JSON error body */
  }
  return new ApiError(response.status, reason, detail);
}

export class SessionApi {
  constructor(
    private baseUrl: string,
    public sessionId: string,
  ) {}

  static async create(baseUrl: string, problem: string): Promise<[SessionApi, StatePayload]> {
    const response = await fetch(`${baseUrl}/sessions`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ problem }),
    });
    if (!response.ok) throw await parseError(response);
    const body = await response.json();
    return [new SessionApi(baseUrl, body.session_id), body.state as StatePayload];
  }

  async state(): Promise<StatePayload> {
    const response = await fetch(`${this.baseUrl}/sessions/${this.sessionId}/state`);
    if (!response.ok) throw await parseError(response);
    return (await response.json()) as StatePayload;
  }

  async act(action: ActionRecord): Promise<ActionResponse> {
    const response = await fetch(`${this.baseUrl}/sessions/${this.sessionId}/actions`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(action),
    });
    if (!response.ok) throw await parseError(response);
    return (await response.json()) as ActionResponse;
  }

  async candidates(
    goal: number,
    srcItem: number,
    srcPath: Path,
    dstItem: number,
  ): Promise<CandidateEntry[]> {
    const params = new URLSearchParams({
      goal: String(goal),
      src_item: String(srcItem),
      src_path: srcPath.join(","),
      dst_item: String(dstItem),
    });
    const response = await fetch(
      `${this.baseUrl}/sessions/${this.sessionId}/candidates?${params}`,
    );
    if (!response.ok) throw await parseError(response);
    const body = await response.json();
    return body.candidates as CandidateEntry[];
  }

  async trace(): Promise<unknown> {
    const response = await fetch(`${this.baseUrl}/sessions/${this.sessionId}/trace`);
    if (!response.ok) throw await parseError(response);
    return response.json();
  }
}
