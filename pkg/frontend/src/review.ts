// Merge-review session controller: steps through pending identity
// candidates, posts every verdict immediately, and keeps a projected
// node/edge count for the merged result via the merge-algebra identities
// (counts come from server-reported graph sizes; the projection is plain
// arithmetic, never graph computation).

import { ApiClient, ApiError } from "./api.js";
import type { ApplyResult, Candidate, GraphSummary, SessionRecord } from "./types.js";

export interface VerdictOutcome {
  ok: boolean;
  candidate?: Candidate;
  /** set when an approval was refused because it would close a cycle */
  cycle?: string[];
  message?: string;
}

export interface ProjectedCounts {
  nodes: number;
  edges: number;
}

export class ReviewSession {
  session: SessionRecord;
  private graphSizes: Map<string, { nodes: number; edges: number }>;
  /** candidates with an in-flight verdict; their controls stay disabled */
  busy = new Set<string>();
  /** inline error text per candidate (e.g. the cycle explanation) */
  errors = new Map<string, string>();
  applyResult: ApplyResult | null = null;

  private constructor(
    private api: ApiClient,
    session: SessionRecord,
    summaries: GraphSummary[],
  ) {
    this.session = session;
    this.graphSizes = new Map(
      summaries.map((g) => [g.id, { nodes: g.node_count, edges: g.edge_count }]),
    );
  }

  static async open(
    api: ApiClient,
    options: { base: string; others: string[]; threshold?: number; sessionId?: string },
  ): Promise<ReviewSession> {
    const session = await api.createSession({
      base: options.base,
      others: options.others,
      threshold: options.threshold,
      session_id: options.sessionId,
    });
    return new ReviewSession(api, session, await api.listGraphs());
  }

  static async resume(api: ApiClient, sessionId: string): Promise<ReviewSession> {
    return new ReviewSession(api, await api.getSession(sessionId), await api.listGraphs());
  }

  get sessionId(): string {
    return this.session.session_id;
  }

  memberGraphs(): string[] {
    return [this.session.base_graph, ...this.session.others];
  }

  /** pending candidates, highest similarity first */
  pending(): Candidate[] {
    return this.session.candidates
      .filter((c) => c.status === "pending")
      .sort((a, b) => b.similarity - a.similarity || (a.candidate_id < b.candidate_id ? -1 : 1));
  }

  current(): Candidate | null {
    return this.pending()[0] ?? null;
  }

  candidate(candidateId: string): Candidate | undefined {
    return this.session.candidates.find((c) => c.candidate_id === candidateId);
  }

  defaultCanonicalLabel(candidate: Candidate): string {
    const longest = Math.max(...candidate.members.map((m) => m.label.length));
    return candidate.members
      .map((m) => m.label)
      .filter((label) => label.length === longest)
      .sort()[0];
  }

  /**
   * Projected merged size under the current approvals: node total minus
   * (group size - 1) per approved group; the edge total never changes.
   */
  projectedCounts(): ProjectedCounts {
    let nodes = 0;
    let edges = 0;
    for (const graphId of this.memberGraphs()) {
      const size = this.graphSizes.get(graphId);
      if (size) {
        nodes += size.nodes;
        edges += size.edges;
      }
    }
    for (const candidate of this.session.candidates) {
      if (candidate.status === "approved") {
        nodes -= candidate.members.length - 1;
      }
    }
    return { nodes, edges };
  }

  canApply(): boolean {
    return this.session.status === "open" && this.pending().length === 0;
  }

  async approve(candidateId: string, canonicalLabel?: string): Promise<VerdictOutcome> {
    // always send a label so the record holds exactly what the reviewer saw
    const candidate = this.candidate(candidateId);
    const label =
      canonicalLabel ?? (candidate ? this.defaultCanonicalLabel(candidate) : undefined);
    return this.submit(candidateId, "approve", label);
  }

  async reject(candidateId: string): Promise<VerdictOutcome> {
    return this.submit(candidateId, "reject");
  }

  private async submit(
    candidateId: string,
    verdict: "approve" | "reject",
    canonicalLabel?: string,
  ): Promise<VerdictOutcome> {
    if (this.busy.has(candidateId)) {
      return { ok: false, message: "a verdict for this candidate is already in flight" };
    }
    this.busy.add(candidateId);
    this.errors.delete(candidateId);
    try {
      const decided = await this.api.decide(this.sessionId, candidateId, verdict, canonicalLabel);
      this.replaceCandidate(decided);
      return { ok: true, candidate: decided };
    } catch (error) {
      if (error instanceof ApiError && error.status === 409) {
        if (error.code === "CycleIntroduced") {
          // the server put the candidate back to pending; surface the cycle
          const cycle = (error.body["cycle"] as string[] | undefined) ?? [];
          const message = String(error.body["message"] ?? "identification closes a cycle");
          this.errors.set(candidateId, message);
          return { ok: false, cycle, message };
        }
        // decided elsewhere: refetch and treat a matching verdict as success
        const fresh = await this.api.listCandidates(this.sessionId);
        this.session = { ...this.session, candidates: fresh };
        const candidate = this.candidate(candidateId);
        const wanted = verdict === "approve" ? "approved" : "rejected";
        if (candidate && candidate.status === wanted) {
          return { ok: true, candidate };
        }
        const message = `candidate was already ${candidate?.status ?? "decided"}`;
        this.errors.set(candidateId, message);
        return { ok: false, message };
      }
      throw error;
    } finally {
      this.busy.delete(candidateId);
    }
  }

  private replaceCandidate(candidate: Candidate): void {
    this.session = {
      ...this.session,
      candidates: this.session.candidates.map((c) =>
        c.candidate_id === candidate.candidate_id ? candidate : c,
      ),
    };
  }

  async apply(): Promise<ApplyResult> {
    const result = await this.api.applySession(this.sessionId);
    this.applyResult = result;
    this.session = { ...this.session, status: "applied", merged_graph_id: result.merged_graph_id };
    return result;
  }
}
