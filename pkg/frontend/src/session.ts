/**
 * Review session state: base graph, working graph, and the edit log.
 *
 * Every mutation goes through applyEdit, which validates the edit against
 * the working graph before committing; the log therefore always replays
 * cleanly over the base graph, and undo is "pop the log and replay".
 */

import type { EditAction, EditLogEntry, FlowGraph, GraphEdge } from "./types.js";
import { cloneGraph, validateGraph } from "./validate.js";

export interface ReviewSession {
  docId: string;
  base: FlowGraph;
  working: FlowGraph;
  log: EditLogEntry[];
}

export interface EditResult {
  ok: boolean;
  error?: string;
}

export function createSession(docId: string, base: FlowGraph): ReviewSession {
  return { docId, base: cloneGraph(base), working: cloneGraph(base), log: [] };
}

function edgeMatches(e: GraphEdge, source: string, target: string, label?: string | null): boolean {
  if (e.source !== source || e.target !== target) {
    return false;
  }
  if (label === undefined) {
    return true; // match the first edge between the pair
  }
  return (e.label ?? null) === (label ?? null);
}

/** Apply one action to a graph in place; returns an error string on failure. */
function applyAction(graph: FlowGraph, action: EditAction): string | null {
  const ids = new Set(graph.nodes.map((n) => n.id));
  switch (action.action) {
    case "add-edge": {
      if (!ids.has(action.source)) {
        return `unknown source node '${action.source}'`;
      }
      if (!ids.has(action.target)) {
        return `unknown target node '${action.target}'`;
      }
      const edge: GraphEdge = { source: action.source, target: action.target, type: "flow" };
      if (action.label) {
        edge.label = action.label;
      }
      graph.edges.push(edge);
      return null;
    }
    case "delete-edge": {
      const idx = graph.edges.findIndex((e) =>
        edgeMatches(e, action.source, action.target, action.label),
      );
      if (idx < 0) {
        return `no edge ${action.source} -> ${action.target}`;
      }
      graph.edges.splice(idx, 1);
      return null;
    }
    case "set-label": {
      const edge = graph.edges.find((e) => edgeMatches(e, action.source, action.target));
      if (!edge) {
        return `no edge ${action.source} -> ${action.target}`;
      }
      if (action.label === null) {
        delete edge.label;
      } else {
        edge.label = action.label;
      }
      return null;
    }
    case "set-node-text": {
      const node = graph.nodes.find((n) => n.id === action.node);
      if (!node) {
        return `unknown node '${action.node}'`;
      }
      node.text = action.text;
      return null;
    }
  }
}

export function applyEdit(
  session: ReviewSession,
  action: EditAction,
  timestamp: number = Date.now(),
): EditResult {
  if (action.action === "add-edge" && action.source === action.target) {
    return { ok: false, error: "self-loops need explicit confirmation" };
  }
  return applyEditConfirmed(session, action, timestamp);
}

/** Same as applyEdit but allows confirmed self-loops. */
export function applyEditConfirmed(
  session: ReviewSession,
  action: EditAction,
  timestamp: number = Date.now(),
): EditResult {
  const candidate = cloneGraph(session.working);
  const err = applyAction(candidate, action);
  if (err) {
    return { ok: false, error: err };
  }
  const violations = validateGraph(candidate);
  if (violations.length > 0) {
    return { ok: false, error: violations[0] };
  }
  session.working = candidate;
  session.log.push({ action, timestamp });
  return { ok: true };
}

/** Replay an edit log over a base graph; throws when a step cannot apply. */
export function replay(base: FlowGraph, log: EditLogEntry[]): FlowGraph {
  const graph = cloneGraph(base);
  for (const entry of log) {
    const err = applyAction(graph, entry.action);
    if (err) {
      throw new Error(`replay failed at ${entry.action.action}: ${err}`);
    }
  }
  return graph;
}

/** Undo the latest edit by popping the log and replaying from base. */
export function undo(session: ReviewSession): boolean {
  if (session.log.length === 0) {
    return false;
  }
  session.log.pop();
  session.working = replay(session.base, session.log);
  return true;
}

/** The document submitted to the server: working graph, context stripped. */
export function exportGraph(session: ReviewSession): FlowGraph {
  const out = cloneGraph(session.working);
  delete out["@context"];
  return out;
}
