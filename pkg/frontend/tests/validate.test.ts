import { describe, expect, it } from "vitest";

import type { FlowGraph } from "../src/types.js";
import { graphsEqual, validateGraph } from "../src/validate.js";

function tiny(): FlowGraph {
  return {
    nodes: [
      { id: "n001", type: "process", bbox: [0, 0, 10, 10], text: "" },
      { id: "n002", type: "process", bbox: [0, 30, 10, 10], text: "" },
    ],
    edges: [{ source: "n001", target: "n002", type: "flow" }],
    diagnostics: [],
  };
}

describe("validateGraph", () => {
  it("accepts a well-formed graph", () => {
    expect(validateGraph(tiny())).toEqual([]);
  });

  it("flags dangling edge endpoints", () => {
    const g = tiny();
    g.edges.push({ source: "n001", target: "n999", type: "flow" });
    const errors = validateGraph(g);
    expect(errors.some((e) => e.includes("n999"))).toBe(true);
  });

  it("flags duplicate node ids", () => {
    const g = tiny();
    g.nodes.push({ ...g.nodes[0] });
    expect(validateGraph(g).some((e) => e.includes("duplicate"))).toBe(true);
  });

  it("flags unknown node types and bad labels", () => {
    const g = tiny();
    // @ts-expect-error deliberately invalid
    g.nodes[0].type = "database";
    // @ts-expect-error deliberately invalid
    g.edges[0].label = "maybe";
    const errors = validateGraph(g);
    expect(errors.length).toBe(2);
  });

  it("flags invalid bboxes", () => {
    const g = tiny();
    g.nodes[0].bbox = [0, 0, 0, 10];
    expect(validateGraph(g).some((e) => e.includes("bbox"))).toBe(true);
  });
});

describe("graphsEqual", () => {
  it("ignores list order and @context", () => {
    const a = tiny();
    const b = tiny();
    b.nodes.reverse();
    b["@context"] = { nodes: "https://example.org/nodes" };
    expect(graphsEqual(a, b)).toBe(true);
  });

  it("detects edge differences", () => {
    const a = tiny();
    const b = tiny();
    b.edges[0].label = "ja";
    expect(graphsEqual(a, b)).toBe(false);
  });
});
