/**
 * Graph validation predicate shared by every mutation path.
 *
 * The server enforces the same contract on PUT; running it locally means an
 * invalid edit is rejected at entry instead of surfacing as a 422 later.
 */

import type { FlowGraph } from "./types.js";

const NODE_TYPES = new Set(["process", "decision", "document", "terminator", "connector"]);

export function validateGraph(graph: FlowGraph): string[] {
  const errors: string[] = [];
  if (!Array.isArray(graph.nodes) || !Array.isArray(graph.edges)) {
    return ["graph must contain 'nodes' and 'edges' lists"];
  }
  const ids = new Set<string>();
  graph.nodes.forEach((n, i) => {
    if (!n.id) {
      errors.push(`nodes[${i}]: missing id`);
      return;
    }
    if (ids.has(n.id)) {
      errors.push(`nodes[${i}]: duplicate id '${n.id}'`);
    }
    ids.add(n.id);
    if (!NODE_TYPES.has(n.type)) {
      errors.push(`nodes[${i}]: unknown type '${n.type}'`);
    }
    if (
      !Array.isArray(n.bbox) ||
      n.bbox.length !== 4 ||
      n.bbox[2] <= 0 ||
      n.bbox[3] <= 0 ||
      n.bbox[0] < 0 ||
      n.bbox[1] < 0
    ) {
      errors.push(`nodes[${i}]: invalid bbox`);
    }
  });
  graph.edges.forEach((e, i) => {
    if (!ids.has(e.source)) {
      errors.push(`edges[${i}]: source '${e.source}' is not a node id`);
    }
    if (!ids.has(e.target)) {
      errors.push(`edges[${i}]: target '${e.target}' is not a node id`);
    }
    if (e.label !== undefined && e.label !== "ja" && e.label !== "nee") {
      errors.push(`edges[${i}]: label must be 'ja' or 'nee'`);
    }
  });
  return errors;
}

/** Deep-copy a graph document (plain JSON data). */
export function cloneGraph(graph: FlowGraph): FlowGraph {
  return JSON.parse(JSON.stringify(graph)) as FlowGraph;
}

/**
 * Semantic equality: same nodes (by id, type, bbox, text) and the same edge
 * multiset, ignoring list order and the optional JSON-LD context.
 */
export function graphsEqual(a: FlowGraph, b: FlowGraph): boolean {
  const nodeKey = (g: FlowGraph) =>
    g.nodes
      .map((n) => `${n.id}|${n.type}|${n.bbox.join(",")}|${n.text}`)
      .sort()
      .join(";");
  const edgeKey = (g: FlowGraph) =>
    g.edges
      .map((e) => `${e.source}>${e.target}|${e.type}|${e.label ?? ""}`)
      .sort()
      .join(";");
  return nodeKey(a) === nodeKey(b) && edgeKey(a) === edgeKey(b);
}
