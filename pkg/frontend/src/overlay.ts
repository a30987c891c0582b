/**
 * Canvas overlay: node boxes color-coded by class, directed edges, label
 * chips, and diagnostic highlights showing where the skeleton is incomplete.
 *
 * Extracted edges carry no geometry in the wire format, so edges render as
 * straight arrows between node border points; human-added edges look the
 * same by design.
 */

import type { Diagnostic, FlowGraph, GraphNode } from "./types.js";
import { NODE_COLORS } from "./types.js";

export interface OverlayOptions {
  selectedNode?: string | null;
  highlightDiagnostics?: boolean;
}

export function nodeCenter(n: GraphNode): [number, number] {
  return [n.bbox[0] + n.bbox[2] / 2, n.bbox[1] + n.bbox[3] / 2];
}

/** Point where the segment from `from` toward `to` leaves the node's box. */
export function borderPoint(n: GraphNode, toward: [number, number]): [number, number] {
  const [cx, cy] = nodeCenter(n);
  const dx = toward[0] - cx;
  const dy = toward[1] - cy;
  const hw = n.bbox[2] / 2;
  const hh = n.bbox[3] / 2;
  if (dx === 0 && dy === 0) {
    return [cx, cy];
  }
  const scale = 1 / Math.max(Math.abs(dx) / hw, Math.abs(dy) / hh);
  return [cx + dx * scale, cy + dy * scale];
}

export function hitNode(graph: FlowGraph, x: number, y: number): GraphNode | null {
  for (const n of graph.nodes) {
    const [bx, by, bw, bh] = n.bbox;
    if (x >= bx && x < bx + bw && y >= by && y < by + bh) {
      return n;
    }
  }
  return null;
}

function drawArrowhead(
  ctx: CanvasRenderingContext2D,
  tip: [number, number],
  dir: [number, number],
): void {
  const len = Math.hypot(dir[0], dir[1]) || 1;
  const ux = dir[0] / len;
  const uy = dir[1] / len;
  const size = 10;
  ctx.beginPath();
  ctx.moveTo(tip[0], tip[1]);
  ctx.lineTo(tip[0] - size * ux - 4 * uy, tip[1] - size * uy + 4 * ux);
  ctx.lineTo(tip[0] - size * ux + 4 * uy, tip[1] - size * uy - 4 * ux);
  ctx.closePath();
  ctx.fill();
}

export function renderOverlay(
  ctx: CanvasRenderingContext2D,
  image: CanvasImageSource | null,
  graph: FlowGraph,
  opts: OverlayOptions = {},
): void {
  const canvas = ctx.canvas;
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  if (image) {
    ctx.drawImage(image, 0, 0);
  }

  const byId = new Map(graph.nodes.map((n) => [n.id, n]));

  // edges first so boxes draw over their endpoints
  ctx.lineWidth = 2;
  for (const e of graph.edges) {
    const src = byId.get(e.source);
    const dst = byId.get(e.target);
    if (!src || !dst) {
      continue;
    }
    const from = borderPoint(src, nodeCenter(dst));
    const to = borderPoint(dst, nodeCenter(src));
    ctx.strokeStyle = "#d025a8";
    ctx.fillStyle = "#d025a8";
    ctx.beginPath();
    ctx.moveTo(from[0], from[1]);
    ctx.lineTo(to[0], to[1]);
    ctx.stroke();
    drawArrowhead(ctx, to, [to[0] - from[0], to[1] - from[1]]);
    if (e.label) {
      const mx = (from[0] + to[0]) / 2;
      const my = (from[1] + to[1]) / 2;
      ctx.font = "12px sans-serif";
      const w = ctx.measureText(e.label).width + 8;
      ctx.fillStyle = "#ffffff";
      ctx.fillRect(mx - w / 2, my - 16, w, 16);
      ctx.strokeStyle = "#d025a8";
      ctx.strokeRect(mx - w / 2, my - 16, w, 16);
      ctx.fillStyle = "#d025a8";
      ctx.fillText(e.label, mx - w / 2 + 4, my - 4);
    }
  }

  for (const n of graph.nodes) {
    const [x, y, w, h] = n.bbox;
    ctx.strokeStyle = NODE_COLORS[n.type] ?? "#444444";
    ctx.lineWidth = n.id === opts.selectedNode ? 4 : 2;
    ctx.strokeRect(x, y, w, h);
    ctx.font = "11px sans-serif";
    ctx.fillStyle = NODE_COLORS[n.type] ?? "#444444";
    ctx.fillText(n.id, x + 2, y - 3);
  }

  if (opts.highlightDiagnostics !== false) {
    for (const d of graph.diagnostics) {
      drawDiagnostic(ctx, d);
    }
  }
}

function drawDiagnostic(ctx: CanvasRenderingContext2D, d: Diagnostic): void {
  ctx.strokeStyle = "#e0b400";
  ctx.lineWidth = 2;
  if (Array.isArray(d.position)) {
    const [x, y] = d.position;
    ctx.beginPath();
    ctx.arc(x, y, 14, 0, Math.PI * 2);
    ctx.stroke();
  }
  // arrowhead diagnostics carry no geometry; the sidebar lists them instead
}
