import type {
  ApplyResult,
  Candidate,
  CandidateStatus,
  CoverageMapping,
  CoverageReport,
  GraphDocument,
  GraphSummary,
  MonitorState,
  SessionRecord,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public status: number,
    public body: Record<string, unknown>,
  ) {
    super(`${status}: ${body["message"] ?? body["error"] ?? "request failed"}`);
  }

  get code(): string {
    return String(this.body["error"] ?? "");
  }
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

/** Thin typed client over the workbench HTTP API. */
export class ApiClient {
  constructor(
    private baseUrl: string,
    private fetchImpl: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: RequestInit = { method, headers: { "Content-Type": "application/json" } };
    if (body !== undefined) {
      init.body = JSON.stringify(body);
    }
    const response = await this.fetchImpl(this.baseUrl + path, init);
    const text = await response.text();
    const parsed = text ? JSON.parse(text) : null;
    if (!response.ok) {
      throw new ApiError(response.status, parsed ?? {});
    }
    return parsed as T;
  }

  listGraphs(): Promise<GraphSummary[]> {
    return this.request("GET", "/api/graphs");
  }

  getGraph(id: string, view?: { depth?: number; terminals?: boolean }): Promise<GraphDocument> {
    const params = new URLSearchParams();
    if (view?.depth !== undefined) params.set("depth", String(view.depth));
    if (view?.terminals !== undefined) params.set("terminals", String(view.terminals));
    const query = params.toString();
    return this.request("GET", `/api/graphs/${encodeURIComponent(id)}${query ? "?" + query : ""}`);
  }

  createSession(body: {
    base: string;
    others: string[];
    threshold?: number;
    session_id?: string;
  }): Promise<SessionRecord> {
    return this.request("POST", "/api/merge/sessions", body);
  }

  getSession(sessionId: string): Promise<SessionRecord> {
    return this.request("GET", `/api/merge/sessions/${encodeURIComponent(sessionId)}`);
  }

  listCandidates(sessionId: string, status?: CandidateStatus): Promise<Candidate[]> {
    const query = status ? `?status=${status}` : "";
    return this.request(
      "GET",
      `/api/merge/sessions/${encodeURIComponent(sessionId)}/candidates${query}`,
    );
  }

  decide(
    sessionId: string,
    candidateId: string,
    verdict: "approve" | "reject",
    canonicalLabel?: string,
  ): Promise<Candidate> {
    return this.request("POST", `/api/merge/sessions/${encodeURIComponent(sessionId)}/decisions`, {
      candidate_id: candidateId,
      verdict,
      ...(canonicalLabel ? { canonical_label: canonicalLabel } : {}),
    });
  }

  applySession(sessionId: string): Promise<ApplyResult> {
    return this.request("POST", `/api/merge/sessions/${encodeURIComponent(sessionId)}/apply`);
  }

  coverage(graphId: string, mappingId: string): Promise<CoverageReport> {
    return this.request(
      "GET",
      `/api/coverage/${encodeURIComponent(graphId)}?mapping=${encodeURIComponent(mappingId)}`,
    );
  }

  listMappings(): Promise<string[]> {
    return this.request("GET", "/api/mappings");
  }

  getMapping(mappingId: string): Promise<CoverageMapping> {
    return this.request("GET", `/api/mappings/${encodeURIComponent(mappingId)}`);
  }

  monitor(graphId: string, mappingId?: string): Promise<MonitorState> {
    const query = mappingId ? `?mapping=${encodeURIComponent(mappingId)}` : "";
    return this.request("GET", `/api/monitor/${encodeURIComponent(graphId)}${query}`);
  }

  setModule(
    graphId: string,
    moduleName: string,
    state: { status: "up" | "down" } | { score: number },
  ): Promise<MonitorState> {
    return this.request(
      "PUT",
      `/api/monitor/${encodeURIComponent(graphId)}/modules/${encodeURIComponent(moduleName)}`,
      state,
    );
  }
}
