import { describe, expect, it } from "vitest";

import { ApiClient, ApiError } from "../src/api.js";

function fakeFetch(expected: { url: string; method?: string }, status: number, body: unknown) {
  const calls: { url: string; init?: RequestInit }[] = [];
  const impl = async (url: string, init?: RequestInit) => {
    calls.push({ url, init });
    expect(url).toBe(expected.url);
    if (expected.method) expect(init?.method).toBe(expected.method);
    return new Response(JSON.stringify(body), { status });
  };
  return { impl, calls };
}

describe("ApiClient", () => {
  it("builds view query parameters", async () => {
    const { impl } = fakeFetch(
      { url: "/api/graphs/holistic-sample?depth=4&terminals=false", method: "GET" },
      200,
      { id: "holistic-sample", nodes: [], edges: [] },
    );
    const api = new ApiClient("", impl);
    const doc = await api.getGraph("holistic-sample", { depth: 4, terminals: false });
    expect(doc.id).toBe("holistic-sample");
  });

  it("posts decisions with optional canonical labels", async () => {
    const { impl, calls } = fakeFetch(
      { url: "/api/merge/sessions/s1/decisions", method: "POST" },
      200,
      { candidate_id: "c001", status: "approved" },
    );
    const api = new ApiClient("", impl);
    await api.decide("s1", "c001", "approve", "perception");
    expect(JSON.parse(String(calls[0].init?.body))).toEqual({
      candidate_id: "c001",
      verdict: "approve",
      canonical_label: "perception",
    });
  });

  it("wraps error bodies in ApiError", async () => {
    const { impl } = fakeFetch({ url: "/api/graphs/ghost" }, 404, {
      error: "NotFound",
      message: "graph 'ghost' not found",
    });
    const api = new ApiClient("", impl);
    try {
      await api.getGraph("ghost");
      expect.unreachable("should have thrown");
    } catch (error) {
      expect(error).toBeInstanceOf(ApiError);
      expect((error as ApiError).status).toBe(404);
      expect((error as ApiError).code).toBe("NotFound");
    }
  });

  it("encodes identifiers in paths", async () => {
    const { impl } = fakeFetch(
      { url: "/api/monitor/g%201/modules/mod%2Fx", method: "PUT" },
      200,
      { modules: {}, abilities: {} },
    );
    const api = new ApiClient("", impl);
    await api.setModule("g 1", "mod/x", { status: "down" });
  });
});
