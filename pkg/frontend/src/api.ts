/**
 * Client for the review server. The UI talks to exactly the documented
 * endpoints: document listing, image, graph, and the corrected-graph PUT.
 */

import type { FlowGraph } from "./types.js";

export interface DocumentEntry {
  id: string;
  has_corrected: boolean;
}

export interface PutResult {
  ok: boolean;
  status: number;
  error?: string;
}

export function documentsUrl(): string {
  return "/api/documents";
}

export function imageUrl(docId: string): string {
  return `/api/documents/${encodeURIComponent(docId)}/image`;
}

export function graphUrl(docId: string): string {
  return `/api/documents/${encodeURIComponent(docId)}/graph`;
}

export function correctedUrl(docId: string): string {
  return `/api/documents/${encodeURIComponent(docId)}/corrected`;
}

export async function listDocuments(fetchFn: typeof fetch = fetch): Promise<DocumentEntry[]> {
  const resp = await fetchFn(documentsUrl());
  if (!resp.ok) {
    throw new Error(`document listing failed: HTTP ${resp.status}`);
  }
  const payload = (await resp.json()) as { documents: DocumentEntry[] };
  return payload.documents;
}

export async function fetchGraph(docId: string, fetchFn: typeof fetch = fetch): Promise<FlowGraph> {
  const resp = await fetchFn(graphUrl(docId));
  if (!resp.ok) {
    throw new Error(`graph fetch failed: HTTP ${resp.status}`);
  }
  return (await resp.json()) as FlowGraph;
}

export async function putCorrected(
  docId: string,
  graph: FlowGraph,
  fetchFn: typeof fetch = fetch,
): Promise<PutResult> {
  let resp: Response;
  try {
    resp = await fetchFn(correctedUrl(docId), {
      method: "PUT",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(graph, null, 2) + "\n",
    });
  } catch (e) {
    // network failure: the caller keeps the session for retry
    return { ok: false, status: 0, error: String(e) };
  }
  if (resp.ok) {
    return { ok: true, status: resp.status };
  }
  let message = `HTTP ${resp.status}`;
  try {
    const payload = (await resp.json()) as { error?: string };
    if (payload.error) {
      message = payload.error;
    }
  } catch {
    // non-JSON error body; keep the status text
  }
  return { ok: false, status: resp.status, error: message };
}
