/**
 * Review workbench wiring: document list, image + overlay canvas, add-first
 * edit flow (click a source node, then a target near a diagnostic), label
 * and text fixes, undo, and export of the corrected graph.
 */

import { fetchGraph, imageUrl, listDocuments, putCorrected } from "./api.js";
import { hitNode, renderOverlay } from "./overlay.js";
import {
  ReviewSession,
  applyEdit,
  applyEditConfirmed,
  createSession,
  exportGraph,
  replay,
  undo,
} from "./session.js";
import type { EditAction, EdgeLabel, FlowGraph, GraphNode } from "./types.js";
import { graphsEqual } from "./validate.js";

interface AppState {
  session: ReviewSession | null;
  image: HTMLImageElement | null;
  pendingSource: GraphNode | null;
  status: string;
}

const state: AppState = { session: null, image: null, pendingSource: null, status: "" };

function $(id: string): HTMLElement {
  const el = document.getElementById(id);
  if (!el) {
    throw new Error(`missing element #${id}`);
  }
  return el;
}

function setStatus(text: string, isError = false): void {
  state.status = text;
  const el = $("status");
  el.textContent = text;
  el.className = isError ? "status error" : "status";
}

function redraw(): void {
  if (!state.session) {
    return;
  }
  const canvas = $("overlay") as HTMLCanvasElement;
  const ctx = canvas.getContext("2d");
  if (!ctx) {
    return;
  }
  renderOverlay(ctx, state.image, state.session.working, {
    selectedNode: state.pendingSource?.id ?? null,
  });
  renderSidebar();
}

function renderSidebar(): void {
  const session = state.session;
  if (!session) {
    return;
  }
  const list = $("edges");
  list.innerHTML = "";
  session.working.edges.forEach((e, i) => {
    const li = document.createElement("li");
    li.textContent = `${e.source} → ${e.target}${e.label ? ` [${e.label}]` : ""}`;
    const del = document.createElement("button");
    del.textContent = "delete";
    del.onclick = () => {
      runEdit({ action: "delete-edge", source: e.source, target: e.target, label: e.label });
    };
    for (const label of ["ja", "nee", "none"] as const) {
      const btn = document.createElement("button");
      btn.textContent = label;
      btn.onclick = () => {
        runEdit({
          action: "set-label",
          source: e.source,
          target: e.target,
          label: label === "none" ? null : (label as EdgeLabel),
        });
      };
      li.appendChild(btn);
    }
    li.appendChild(del);
    list.appendChild(li);
  });

  const diags = $("diagnostics");
  diags.innerHTML = "";
  for (const d of session.working.diagnostics) {
    const li = document.createElement("li");
    const where = d.arrowhead ?? (d.position ? `(${d.position.join(", ")})` : "");
    li.textContent = `${d.reason} ${where}`;
    diags.appendChild(li);
  }
  $("editlog").textContent = `${session.log.length} edit(s)`;
}

function runEdit(action: EditAction): void {
  const session = state.session;
  if (!session) {
    return;
  }
  const result = applyEdit(session, action);
  if (!result.ok && action.action === "add-edge" && result.error?.includes("self-loop")) {
    if (window.confirm("Add a self-loop edge?")) {
      applyEditConfirmed(session, action);
    }
  } else if (!result.ok) {
    setStatus(`edit rejected: ${result.error}`, true);
    return;
  }
  // replay determinism check after every action
  if (!graphsEqual(replay(session.base, session.log), session.working)) {
    setStatus("internal error: edit log out of sync", true);
    return;
  }
  setStatus(`${action.action} applied`);
  redraw();
}

function onCanvasClick(ev: MouseEvent): void {
  const session = state.session;
  if (!session) {
    return;
  }
  const canvas = $("overlay") as HTMLCanvasElement;
  const rect = canvas.getBoundingClientRect();
  const x = ((ev.clientX - rect.left) / rect.width) * canvas.width;
  const y = ((ev.clientY - rect.top) / rect.height) * canvas.height;
  const node = hitNode(session.working, x, y);
  if (!node) {
    state.pendingSource = null;
    redraw();
    return;
  }
  if (ev.shiftKey) {
    const text = window.prompt(`Text for ${node.id}:`, node.text);
    if (text !== null) {
      runEdit({ action: "set-node-text", node: node.id, text });
    }
    return;
  }
  if (state.pendingSource === null) {
    state.pendingSource = node;
    setStatus(`add-edge: source ${node.id}; click the target node`);
  } else {
    const source = state.pendingSource.id;
    state.pendingSource = null;
    runEdit({ action: "add-edge", source, target: node.id });
  }
  redraw();
}

async function exportCorrected(): Promise<void> {
  const session = state.session;
  if (!session) {
    return;
  }
  const result = await putCorrected(session.docId, exportGraph(session));
  if (result.ok) {
    setStatus("corrected graph stored");
  } else if (result.status === 422) {
    setStatus(`server rejected the graph: ${result.error}`, true);
  } else {
    // session stays local; the validator can retry
    setStatus(`export failed (${result.error}); session retained, retry available`, true);
  }
}

async function openDocument(docId: string): Promise<void> {
  try {
    const graph: FlowGraph = await fetchGraph(docId);
    state.session = createSession(docId, graph);
    state.pendingSource = null;
    const img = new Image();
    img.onload = () => {
      const canvas = $("overlay") as HTMLCanvasElement;
      canvas.width = img.naturalWidth;
      canvas.height = img.naturalHeight;
      state.image = img;
      redraw();
    };
    img.onerror = () => {
      state.image = null;
      setStatus("image failed to load; retry by reopening the document", true);
      redraw();
    };
    img.src = imageUrl(docId);
    setStatus(`opened ${docId}`);
    redraw();
  } catch (e) {
    setStatus(`load failed: ${e}; retry available`, true);
  }
}

async function refreshDocuments(): Promise<void> {
  try {
    const docs = await listDocuments();
    const list = $("documents");
    list.innerHTML = "";
    for (const d of docs) {
      const li = document.createElement("li");
      const btn = document.createElement("button");
      btn.textContent = d.id + (d.has_corrected ? " ✓" : "");
      btn.onclick = () => void openDocument(d.id);
      li.appendChild(btn);
      list.appendChild(li);
    }
  } catch (e) {
    setStatus(`document listing failed: ${e}`, true);
  }
}

export function initApp(): void {
  $("overlay").addEventListener("click", (ev) => onCanvasClick(ev as MouseEvent));
  $("export").addEventListener("click", () => void exportCorrected());
  $("undo").addEventListener("click", () => {
    if (state.session && undo(state.session)) {
      setStatus("undone");
      redraw();
    }
  });
  $("refresh").addEventListener("click", () => void refreshDocuments());
  void refreshDocuments();
}

if (typeof document !== "undefined" && document.getElementById("overlay")) {
  initApp();
}
