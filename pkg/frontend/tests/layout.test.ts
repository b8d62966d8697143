import { describe, expect, it } from "vitest";

import { computeLayout, NODE_HEIGHT, V_GAP } from "../src/layout.js";

const chain = {
  ids: ["root", "a", "b", "c"],
  edges: [
    { from: "root", to: "a" },
    { from: "a", to: "b" },
    { from: "b", to: "c" },
  ],
};

describe("computeLayout", () => {
  it("ranks nodes by longest path from the roots", () => {
    const layout = computeLayout(chain.ids, chain.edges);
    expect(layout.positions.get("root")!.layer).toBe(0);
    expect(layout.positions.get("a")!.layer).toBe(1);
    expect(layout.positions.get("c")!.layer).toBe(3);
  });

  it("uses the longest path when several paths exist", () => {
    const layout = computeLayout(
      ["r", "x", "y", "z"],
      [
        { from: "r", to: "x" },
        { from: "r", to: "z" },
        { from: "x", to: "y" },
        { from: "y", to: "z" },
      ],
    );
    expect(layout.positions.get("z")!.layer).toBe(3);
  });

  it("keeps rows on distinct vertical bands without overlaps", () => {
    const layout = computeLayout(chain.ids, chain.edges);
    for (const id of chain.ids) {
      const pos = layout.positions.get(id)!;
      expect(pos.y).toBe(pos.layer * (NODE_HEIGHT + V_GAP) + V_GAP / 2);
    }
  });

  it("gives every node a distinct slot in its layer", () => {
    const ids = ["r", "a", "b", "c", "d"];
    const edges = ["a", "b", "c", "d"].map((to) => ({ from: "r", to }));
    const layout = computeLayout(ids, edges);
    const xs = ["a", "b", "c", "d"].map((id) => layout.positions.get(id)!.x);
    expect(new Set(xs).size).toBe(4);
  });

  it("is deterministic regardless of input order", () => {
    const forward = computeLayout(chain.ids, chain.edges);
    const reversed = computeLayout([...chain.ids].reverse(), [...chain.edges].reverse());
    for (const id of chain.ids) {
      expect(reversed.positions.get(id)).toEqual(forward.positions.get(id));
    }
  });

  it("orders children under their parents by barycenter", () => {
    // two separate parents with one child each: children should not cross
    const layout = computeLayout(
      ["p1", "p2", "c1", "c2"],
      [
        { from: "p1", to: "c1" },
        { from: "p2", to: "c2" },
      ],
    );
    const p1 = layout.positions.get("p1")!.x;
    const p2 = layout.positions.get("p2")!.x;
    const c1 = layout.positions.get("c1")!.x;
    const c2 = layout.positions.get("c2")!.x;
    expect(p1 < p2).toBe(c1 < c2);
  });

  it("tolerates nodes missing from the edge list", () => {
    const layout = computeLayout(["alone"], []);
    expect(layout.positions.get("alone")!.layer).toBe(0);
    expect(layout.layers).toEqual([["alone"]]);
  });
});
