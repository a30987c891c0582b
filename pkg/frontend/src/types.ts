/** Shared graph document types, mirroring the extraction JSON schema. */

export type NodeClass = "process" | "decision" | "document" | "terminator" | "connector";

export type EdgeLabel = "ja" | "nee";

export interface GraphNode {
  id: string;
  type: NodeClass;
  bbox: [number, number, number, number]; // x, y, w, h in image pixels
  text: string;
}

export interface GraphEdge {
  source: string;
  target: string;
  type: string;
  label?: EdgeLabel;
}

export interface Diagnostic {
  reason: string;
  arrowhead?: string;
  label?: string;
  position?: [number, number];
  [key: string]: unknown;
}

export interface FlowGraph {
  "@context"?: Record<string, string>;
  nodes: GraphNode[];
  edges: GraphEdge[];
  diagnostics: Diagnostic[];
}

export type EditAction =
  | { action: "add-edge"; source: string; target: string; label?: EdgeLabel }
  | { action: "delete-edge"; source: string; target: string; label?: EdgeLabel }
  | { action: "set-label"; source: string; target: string; label: EdgeLabel | null }
  | { action: "set-node-text"; node: string; text: string };

export interface EditLogEntry {
  action: EditAction;
  timestamp: number;
}

export const NODE_COLORS: Record<NodeClass, string> = {
  process: "#2f6fdd",
  decision: "#d9822b",
  document: "#3d9970",
  terminator: "#7b5ea7",
  connector: "#cc3355",
};
