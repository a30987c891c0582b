"""Deterministic synthetic flowchart generator with exact ground truth.

Diagrams are laid out on a jittered grid governed entirely by the seeded LCG
(see rng.py for the documented constants): a control-flow tree grows from a
start terminator, decisions branch into two labeled arms sharing a trunk
(the multi-branch case), chains continue down or sideways (straight and
L-shaped cases). Connectors keep clear of unrelated nodes by construction so
ground truth stays unambiguous for the tracer. Each bundle pairs the image
with its graph, node boxes, arrowhead geometry, and an OCR sidecar.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from PIL import Image

from . import draw
from .errors import LayoutOverflowError
from .geometry import BoundingBox, Point, polyline_length, polyline_point_at
from .graph import FlowGraph, GraphEdge, GraphNode, canonical, to_payload
from .labels import OcrSidecar, OcrToken
from .nodedetect import NodeClass
from .raster import GrayImage
from .rng import Lcg64

MARGIN = 60
CELL_W = 230
CELL_H = 200
SHAPE_STROKE = 3
ARROW_LEN = 13.0
ARROW_HALFW = 6.0
STANDOFF = 2  # clear pixels between line ends, arrowheads, and node borders
LABEL_OFFSET = 18  # perpendicular distance from arm to its ja/nee token
CENTER_JITTER = 10
OCCLUSION_GAP = 12  # px erased from a connector in the "gap" variant

WORDS = ["stap", "check", "meet", "test", "unit", "sensor", "klep", "reset", "kabel", "motor", "pomp", "lamp"]

# interior width budget for text bars, keyed by class (keeps bars clear of outlines)
_TEXT_MARGIN = {
    NodeClass.PROCESS: 28,
    NodeClass.DOCUMENT: 28,
    NodeClass.TERMINATOR: 28,
    NodeClass.DECISION: 44,
    NodeClass.CONNECTOR: 36,
}


@dataclass
class GenParams:
    seed: int
    node_count: int = 10
    branch_prob: float = 0.6
    canvas: tuple[int, int] = (1100, 1700)
    line_thickness: int = 2
    noise: float = 0.0
    occlusion_prob: float = 0.0
    diagonals: bool = False  # 45-degree stress connectors (Hough stress only)

    def validate(self) -> None:
        if self.node_count < 2:
            raise ValueError("node_count must be at least 2")
        if self.canvas[0] < 400 or self.canvas[1] < 400:
            raise ValueError("canvas must be at least 400x400")
        for name in ("branch_prob", "noise", "occlusion_prob"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must be in [0, 1], got {v}")
        if self.line_thickness < 1 or self.line_thickness > 4:
            raise ValueError("line_thickness must be in [1, 4]")


@dataclass
class ArrowTruth:
    id: str
    source: str
    target: str
    bbox: BoundingBox
    tip: Point
    blunt: Point
    occluded: bool
    path: list[Point] = field(default_factory=list)  # drawn centerline, in-memory only


@dataclass
class GroundTruthBundle:
    image: GrayImage
    graph: FlowGraph
    node_boxes: dict[str, BoundingBox]
    arrowheads: list[ArrowTruth]
    sidecar: OcrSidecar


@dataclass
class _Node:
    idx: int
    row: int
    col: int
    cx: int
    cy: int
    cls: NodeClass | None = None
    bbox: BoundingBox | None = None
    words: list[str] = field(default_factory=list)


@dataclass
class _Edge:
    src: int
    dst: int
    kind: str  # v, v2, h+, h-, h2+, h2-, L+, L-, arm
    label: str | None = None
    y_ch: int | None = None
    path: list[Point] = field(default_factory=list)
    tip: Point | None = None
    blunt: Point | None = None
    arrow_bbox: BoundingBox | None = None
    occluded: bool = False
    variant: str | None = None


class _Builder:
    def __init__(self, params: GenParams, attempt: int = 0):
        self.p = params
        # layout dead-ends retry with a fresh deterministic sub-seed
        self.rng = Lcg64(params.seed * 1021 + attempt)
        W, H = params.canvas
        self.W, self.H = W, H
        self.cols = (W - 2 * MARGIN) // CELL_W
        self.rows = (H - 2 * MARGIN) // CELL_H
        capacity = self.cols * self.rows
        if self.cols < 1 or self.rows < 1 or params.node_count > capacity:
            raise LayoutOverflowError(
                f"node_count {params.node_count} exceeds grid capacity {max(0, capacity)} "
                f"({self.rows}x{self.cols} cells on a {W}x{H} canvas)"
            )
        self.cells: dict[tuple[int, int], str] = {}
        self.node_at: dict[tuple[int, int], _Node] = {}
        self.nodes: list[_Node] = []
        self.edges: list[_Edge] = []
        self.decision_counter = 0

    # ---------------- structure -----------------

    def _free(self, r: int, c: int) -> bool:
        return 0 <= r < self.rows and 0 <= c < self.cols and (r, c) not in self.cells

    def _place(self, r: int, c: int) -> _Node:
        cx = MARGIN + c * CELL_W + CELL_W // 2 + self.rng.randint(-CENTER_JITTER, CENTER_JITTER)
        cy = MARGIN + r * CELL_H + CELL_H // 2 + self.rng.randint(-CENTER_JITTER, CENTER_JITTER)
        node = _Node(idx=len(self.nodes), row=r, col=c, cx=cx, cy=cy)
        self.nodes.append(node)
        self.cells[(r, c)] = "node"
        self.node_at[(r, c)] = node
        return node

    def _chain_candidates(self, u: _Node) -> list[tuple[str, int, int, list[tuple[int, int]]]]:
        """Placement options for a single child: (kind, row, col, lane cells)."""
        r, c = u.row, u.col
        cands = [
            ("v", r + 1, c, []),
            ("h+", r, c + 1, []),
            ("h-", r, c - 1, []),
            ("L+", r + 1, c + 1, [(r + 1, c)]),
            ("L-", r + 1, c - 1, [(r + 1, c)]),
            ("v2", r + 2, c, [(r + 1, c)]),
            ("h2+", r, c + 2, [(r, c + 1)]),
            ("h2-", r, c - 2, [(r, c - 1)]),
        ]
        # weighted preference: straight down leads, L and sideways mix in,
        # long hops only as a fallback; open cells (more free neighbors)
        # score better so the tree does not box itself in
        base = [0.6, 1.2, 1.2, 1.0, 1.0, 6.0, 7.0, 7.0]
        scored = []
        for i, (kind, rr, cc, lanes) in enumerate(cands):
            if not self._free(rr, cc):
                continue
            if any(not self._free(lr, lc) for lr, lc in lanes):
                continue
            freedom = sum(
                1 for nb in ((rr + 1, cc), (rr, cc + 1), (rr, cc - 1)) if self._free(*nb)
            )
            scored.append((base[i] + self.rng.random() - 0.5 * freedom, (kind, rr, cc, lanes)))
        scored.sort(key=lambda t: t[0])
        return [cand for _, cand in scored]

    def _arm_cell_ok(self, r: int, c: int) -> bool:
        """Arm children may not sit directly below a decision (or a node that
        could still become one): their drop would share the trunk's column."""
        if not self._free(r, c):
            return False
        above = self.node_at.get((r - 1, c))
        if above is not None and (above.cls is None or above.cls == NodeClass.DECISION):
            return False
        return True

    def _branch_cells(self, u: _Node) -> tuple[tuple[int, int], tuple[int, int]] | None:
        left = (u.row + 1, u.col - 1)
        right = (u.row + 1, u.col + 1)
        if self._arm_cell_ok(*left) and self._arm_cell_ok(*right):
            return left, right
        return None

    def _leaf_class(self) -> NodeClass:
        return NodeClass.TERMINATOR if self.rng.random() < 0.62 else NodeClass.CONNECTOR

    def _chain_class(self) -> NodeClass:
        return NodeClass.PROCESS if self.rng.random() < 0.55 else NodeClass.DOCUMENT

    def _add_chain_child(self, u: _Node, cand: tuple[str, int, int, list[tuple[int, int]]]) -> _Node:
        kind, rr, cc, lanes = cand
        for lane in lanes:
            self.cells[lane] = "lane"
        child = self._place(rr, cc)
        self.edges.append(_Edge(src=u.idx, dst=child.idx, kind=kind))
        self.out_degree[u.idx] = self.out_degree.get(u.idx, 0) + 1
        return child

    def build_structure(self) -> None:
        rng = self.rng
        start_lo = (self.cols - 1) // 3
        start_hi = self.cols - 1 - start_lo
        start = self._place(0, rng.randint(start_lo, start_hi))
        start.cls = NodeClass.TERMINATOR
        self.out_degree: dict[int, int] = {}
        queue: deque[_Node] = deque([start])
        remaining = self.p.node_count - 1

        while True:
            while queue:
                u = queue.popleft()
                must_child = remaining > 0 and len(queue) == 0
                if u.idx == 0:
                    kind = "chain" if remaining > 0 else "leaf"
                elif remaining == 0:
                    kind = "leaf"
                else:
                    roll = rng.random()
                    p_dec = 0.45 * self.p.branch_prob
                    if roll < p_dec and remaining >= 2 and self._branch_cells(u) is not None:
                        kind = "branch"
                    elif not must_child and roll < p_dec + 0.08:
                        kind = "leaf"
                    else:
                        kind = "chain"

                if kind == "leaf":
                    if u.cls is None:
                        u.cls = self._leaf_class()
                    continue

                if kind == "branch":
                    u.cls = NodeClass.DECISION
                    cells = self._branch_cells(u)
                    assert cells is not None
                    boundary = MARGIN + (u.row + 1) * CELL_H
                    y_ch = boundary - 2 - (11 if self.decision_counter % 2 else 0)
                    self.decision_counter += 1
                    sides = ["ja", "nee"]
                    rng.shuffle(sides)
                    for (rr, cc), lab in zip(cells, sides):
                        child = self._place(rr, cc)
                        self.edges.append(_Edge(src=u.idx, dst=child.idx, kind="arm", label=lab, y_ch=y_ch))
                        queue.append(child)
                    self.out_degree[u.idx] = 2
                    remaining -= 2
                    continue

                # chain
                if u.cls is None:
                    u.cls = self._chain_class()
                cands = self._chain_candidates(u)
                if not cands:
                    # boxed in: park as a leaf, the salvage pass grows elsewhere
                    if u.idx != 0:
                        u.cls = self._leaf_class()
                    continue
                child = self._add_chain_child(u, cands[0])
                queue.append(child)
                remaining -= 1

            if remaining == 0:
                break
            # salvage: extend the tree from any childless node with room left
            grown = False
            for v in self.nodes:
                if self.out_degree.get(v.idx, 0) > 0 or v.cls == NodeClass.DECISION:
                    continue
                cands = self._chain_candidates(v)
                if not cands:
                    continue
                if v.idx != 0:
                    v.cls = self._chain_class()
                child = self._add_chain_child(v, cands[0])
                queue.append(child)
                remaining -= 1
                grown = True
                break
            if not grown:
                raise LayoutOverflowError(
                    f"cannot place {remaining} more node(s): layout saturated "
                    f"(node_count {self.p.node_count} on a {self.rows}x{self.cols} grid)"
                )

    # ---------------- rendering -----------------

    def _render_shape(self, canvas: np.ndarray, n: _Node) -> None:
        rng = self.rng
        if n.cls == NodeClass.PROCESS:
            w, h = rng.randint(110, 140), rng.randint(52, 68)
            n.bbox = draw.draw_rect_outline(canvas, n.cx - w // 2, n.cy - h // 2, w, h, SHAPE_STROKE)
        elif n.cls == NodeClass.DOCUMENT:
            w, h = rng.randint(110, 140), rng.randint(50, 60)
            n.bbox = draw.draw_document_outline(canvas, n.cx - w // 2, n.cy - h // 2, w, h, SHAPE_STROKE)
        elif n.cls == NodeClass.TERMINATOR:
            w, h = rng.randint(110, 130), 2 * rng.randint(23, 28)
            n.bbox = draw.draw_stadium_outline(canvas, n.cx - w // 2, n.cy - h // 2, w, h, SHAPE_STROKE)
        elif n.cls == NodeClass.DECISION:
            hw, hh = rng.randint(50, 62), rng.randint(32, 40)
            n.bbox = draw.draw_diamond_outline(canvas, n.cx, n.cy, hw, hh, SHAPE_STROKE)
        elif n.cls == NodeClass.CONNECTOR:
            r = rng.randint(34, 38)
            n.bbox = draw.draw_circle_outline(canvas, n.cx, n.cy, r, SHAPE_STROKE)
        else:
            raise AssertionError(f"node {n.idx} has no class")

    def _render_text_bars(self, canvas: np.ndarray, n: _Node) -> list[OcrToken]:
        rng = self.rng
        budget = n.bbox.w - _TEXT_MARGIN[n.cls]
        words = [rng.choice(WORDS)]
        if rng.random() < 0.6:
            words.append(rng.choice(WORDS))
        widths = [5 * len(w) + 3 for w in words]
        while len(words) > 1 and sum(widths) + 6 * (len(words) - 1) > budget:
            words.pop()
            widths.pop()
        if widths[0] > budget:
            words = [words[0][:4]]
            widths = [5 * len(words[0]) + 3]
        total = sum(widths) + 6 * (len(words) - 1)
        x = n.cx - total // 2
        y = n.cy - 2
        tokens = []
        for word, bw in zip(words, widths):
            box = draw.draw_solid_box(canvas, x, y, bw, 5)
            tokens.append(OcrToken(text=word, center=(x + bw / 2.0, y + 2.5), bbox=box))
            x += bw + 6
        n.words = words
        return tokens

    def _arrow(self, canvas: np.ndarray, e: _Edge, tip: Point, direction: Point) -> None:
        """Draw the head (honoring occlusion variants) and record geometry."""
        length, halfw = ARROW_LEN, ARROW_HALFW
        if e.occluded and e.variant == "shrink":
            length, halfw = 6.0, 2.0
        bbox, blunt = draw.draw_triangle_filled(canvas, tip, direction, length, halfw)
        e.tip = tip
        e.blunt = blunt
        e.arrow_bbox = bbox
        if e.occluded and e.variant == "cross":
            cx = tip[0] - direction[0] * ARROW_LEN * 0.6
            cy = tip[1] - direction[1] * ARROW_LEN * 0.6
            px, py = -direction[1], direction[0]
            draw.draw_segment(
                canvas,
                (cx - 14 * px, cy - 14 * py),
                (cx + 14 * px, cy + 14 * py),
                self.p.line_thickness,
            )

    def _gap_erase(self, canvas: np.ndarray, a: Point, b: Point) -> None:
        """Erase a short window at the middle of the run a-b."""
        mx, my = (a[0] + b[0]) / 2.0, (a[1] + b[1]) / 2.0
        if abs(b[0] - a[0]) >= abs(b[1] - a[1]):
            draw.erase_rect(canvas, int(mx - OCCLUSION_GAP / 2), int(my - 4), OCCLUSION_GAP, 9)
        else:
            draw.erase_rect(canvas, int(mx - 4), int(my - OCCLUSION_GAP / 2), 9, OCCLUSION_GAP)

    def _render_edge(self, canvas: np.ndarray, e: _Edge) -> None:
        u, v = self.nodes[e.src], self.nodes[e.dst]
        t = self.p.line_thickness
        ub, vb = u.bbox, v.bbox
        if e.kind in ("L+", "L-") and self.p.diagonals:
            self._render_diagonal(canvas, e, u, v)
            return
        if e.kind in ("v", "v2"):
            x = int(round((u.cx + v.cx) / 2))
            y0 = ub.bottom + STANDOFF
            tip = (x + t / 2.0, vb.y - STANDOFF)
            base_y = int(tip[1] - ARROW_LEN)
            draw.draw_vline(canvas, x, y0, base_y - STANDOFF, t)
            self._arrow(canvas, e, tip, (0.0, 1.0))
            e.path = [(x + t / 2.0, float(y0)), tip]
            if e.occluded and e.variant == "gap":
                self._gap_erase(canvas, (x, y0), (x, base_y - STANDOFF))
        elif e.kind in ("h+", "h2+"):
            y = int(round((u.cy + v.cy) / 2))
            x0 = ub.right + STANDOFF
            tip = (vb.x - STANDOFF, y + t / 2.0)
            base_x = int(tip[0] - ARROW_LEN)
            draw.draw_hline(canvas, y, x0, base_x - STANDOFF, t)
            self._arrow(canvas, e, tip, (1.0, 0.0))
            e.path = [(float(x0), y + t / 2.0), tip]
            if e.occluded and e.variant == "gap":
                self._gap_erase(canvas, (x0, y), (base_x - STANDOFF, y))
        elif e.kind in ("h-", "h2-"):
            y = int(round((u.cy + v.cy) / 2))
            x0 = ub.x - STANDOFF
            tip = (vb.right + STANDOFF, y + t / 2.0)
            base_x = int(tip[0] + ARROW_LEN)
            draw.draw_hline(canvas, y, base_x + STANDOFF, x0, t)
            self._arrow(canvas, e, tip, (-1.0, 0.0))
            e.path = [(float(x0), y + t / 2.0), tip]
            if e.occluded and e.variant == "gap":
                self._gap_erase(canvas, (base_x + STANDOFF, y), (x0, y))
        elif e.kind in ("L+", "L-"):
            xv = int(round(u.cx))
            yl = int(round(v.cy))
            y0 = ub.bottom + STANDOFF
            draw.draw_vline(canvas, xv, y0, yl + t - 1, t)
            if e.kind == "L+":
                tip = (vb.x - STANDOFF, yl + t / 2.0)
                base_x = int(tip[0] - ARROW_LEN)
                draw.draw_hline(canvas, yl, xv, base_x - STANDOFF, t)
                self._arrow(canvas, e, tip, (1.0, 0.0))
            else:
                tip = (vb.right + STANDOFF, yl + t / 2.0)
                base_x = int(tip[0] + ARROW_LEN)
                draw.draw_hline(canvas, yl, base_x + STANDOFF, xv, t)
                self._arrow(canvas, e, tip, (-1.0, 0.0))
            e.path = [(xv + t / 2.0, float(y0)), (xv + t / 2.0, yl + t / 2.0), tip]
            if e.occluded and e.variant == "gap":
                self._gap_erase(canvas, (xv, y0), (xv, yl))
        elif e.kind == "arm":
            xt = int(round(u.cx))
            xd = int(round(v.cx))
            y_ch = e.y_ch
            assert y_ch is not None
            y0 = ub.bottom + STANDOFF
            draw.draw_vline(canvas, xt, y0, y_ch + t - 1, t)  # trunk (shared, idempotent)
            draw.draw_hline(canvas, y_ch, min(xt, xd), max(xt, xd) + t - 1, t)
            tip = (xd + t / 2.0, vb.y - STANDOFF)
            base_y = int(tip[1] - ARROW_LEN)
            draw.draw_vline(canvas, xd, y_ch, base_y - STANDOFF, t)
            self._arrow(canvas, e, tip, (0.0, 1.0))
            e.path = [
                (xt + t / 2.0, float(y0)),
                (xt + t / 2.0, y_ch + t / 2.0),
                (xd + t / 2.0, y_ch + t / 2.0),
                tip,
            ]
            if e.occluded and e.variant == "gap":
                self._gap_erase(canvas, (xd, y_ch), (xd, base_y - STANDOFF))
        else:
            raise AssertionError(f"unknown edge kind {e.kind}")

    def _render_diagonal(self, canvas: np.ndarray, e: _Edge, u: _Node, v: _Node) -> None:
        """Hough stress variant: one slanted run instead of the L dogleg."""
        t = self.p.line_thickness
        start = (u.cx + 0.0, u.bbox.bottom + STANDOFF + 0.0)
        tip = (v.cx + 0.0, v.bbox.y - STANDOFF + 0.0)
        dx, dy = tip[0] - start[0], tip[1] - start[1]
        n = (dx * dx + dy * dy) ** 0.5
        d = (dx / n, dy / n)
        shaft_end = (tip[0] - d[0] * (ARROW_LEN + STANDOFF), tip[1] - d[1] * (ARROW_LEN + STANDOFF))
        draw.draw_segment(canvas, start, shaft_end, t)
        self._arrow(canvas, e, tip, d)
        e.path = [start, tip]
        if e.occluded and e.variant == "gap":
            self._gap_erase(canvas, start, shaft_end)

    def _render_label(self, canvas: np.ndarray, e: _Edge) -> OcrToken:
        mid = polyline_point_at(e.path, polyline_length(e.path) / 2.0)
        w = 5 * len(e.label) + 3
        cx, cy = int(round(mid[0])), int(round(mid[1])) - LABEL_OFFSET
        box = draw.draw_solid_box(canvas, cx - w // 2, cy - 5, w, 10)
        return OcrToken(text=e.label, center=(box.x + box.w / 2.0, box.y + box.h / 2.0), bbox=box)

    def render(self) -> GroundTruthBundle:
        canvas = np.full((self.H, self.W), 255, dtype=np.uint8)
        for n in self.nodes:
            self._render_shape(canvas, n)
        node_tokens: dict[int, list[OcrToken]] = {}
        for n in self.nodes:
            node_tokens[n.idx] = self._render_text_bars(canvas, n)
        for e in self.edges:
            e.occluded = self.rng.random() < self.p.occlusion_prob
            if e.occluded:
                e.variant = self.rng.choice(["shrink", "cross", "gap"])
            self._render_edge(canvas, e)
        label_tokens: dict[int, OcrToken] = {}
        for i, e in enumerate(self.edges):
            if e.label is not None:
                label_tokens[i] = self._render_label(canvas, e)

        if self.p.noise > 0:
            flips = int(round(self.p.noise * self.W * self.H))
            coords = [(self.rng.randrange(self.W), self.rng.randrange(self.H)) for _ in range(flips)]
            draw.flip_pixels(canvas, coords)

        # ground truth ids in raster-scan order of the rendered boxes
        order = sorted(self.nodes, key=lambda n: (n.bbox.y, n.bbox.x))
        ids = {n.idx: f"n{i + 1:03d}" for i, n in enumerate(order)}
        gnodes = [
            GraphNode(id=ids[n.idx], type=n.cls, bbox=n.bbox, text=" ".join(n.words)) for n in self.nodes
        ]
        gedges = [
            GraphEdge(source=ids[e.src], target=ids[e.dst], label=e.label) for e in self.edges
        ]
        g = canonical(gnodes, gedges)

        edge_order = sorted(
            range(len(self.edges)),
            key=lambda i: (ids[self.edges[i].src], ids[self.edges[i].dst], self.edges[i].label or ""),
        )
        arrows = []
        for k, i in enumerate(edge_order):
            e = self.edges[i]
            arrows.append(
                ArrowTruth(
                    id=f"a{k + 1:03d}",
                    source=ids[e.src],
                    target=ids[e.dst],
                    bbox=e.arrow_bbox,
                    tip=e.tip,
                    blunt=e.blunt,
                    occluded=e.occluded,
                    path=list(e.path),
                )
            )
        tokens: list[OcrToken] = []
        for n in sorted(self.nodes, key=lambda n: ids[n.idx]):
            tokens.extend(node_tokens[n.idx])
        for i in edge_order:
            if i in label_tokens:
                tokens.append(label_tokens[i])

        return GroundTruthBundle(
            image=GrayImage(canvas),
            graph=g,
            node_boxes={ids[n.idx]: n.bbox for n in self.nodes},
            arrowheads=arrows,
            sidecar=OcrSidecar(tokens=tokens),
        )


_LAYOUT_ATTEMPTS = 25


def generate(params: GenParams) -> GroundTruthBundle:
    """Render one synthetic diagram; byte-identical for identical params."""
    params.validate()
    last_err: LayoutOverflowError | None = None
    for attempt in range(_LAYOUT_ATTEMPTS):
        b = _Builder(params, attempt)
        try:
            b.build_structure()
        except LayoutOverflowError as e:
            last_err = e
            continue
        return b.render()
    assert last_err is not None
    raise last_err


# ---------------- corpus serialization -----------------


def truth_payload(bundle: GroundTruthBundle) -> dict:
    payload: dict = {"ground_truth": True}
    payload.update(to_payload(bundle.graph))
    payload["arrowheads"] = [
        {
            "id": a.id,
            "source": a.source,
            "target": a.target,
            "bbox": a.bbox.as_list(),
            "tip": [round(a.tip[0], 1), round(a.tip[1], 1)],
            "blunt": [round(a.blunt[0], 1), round(a.blunt[1], 1)],
            "occluded": a.occluded,
        }
        for a in bundle.arrowheads
    ]
    return payload


def sidecar_payload(sidecar: OcrSidecar) -> dict:
    return {
        "tokens": [
            {
                "text": t.text,
                "center": [round(t.center[0], 1), round(t.center[1], 1)],
                "bbox": t.bbox.as_list(),
            }
            for t in sidecar.tokens
        ]
    }


def _write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")


def save_png(img: GrayImage, path: Path) -> None:
    Image.fromarray(img.data, mode="L").save(path, format="PNG")


def generate_corpus(
    base_seed: int,
    count: int,
    out_dir: str | Path,
    tiers: list[dict] | None = None,
) -> dict:
    """Write `count` diagrams per tier; instance i uses seed base_seed + i.

    Tier overrides accept GenParams fields plus "node_count_range": [lo, hi],
    resolved per instance from a seed-derived draw. Returns the manifest.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    tiers = tiers if tiers is not None else [{}]
    instances = []
    idx = 0
    for ti, tier in enumerate(tiers):
        for _ in range(count):
            seed = base_seed + idx
            overrides = dict(tier)
            nc_range = overrides.pop("node_count_range", None)
            if nc_range is not None:
                lo, hi = int(nc_range[0]), int(nc_range[1])
                overrides["node_count"] = Lcg64(seed + 1000003).randint(lo, hi)
            if "canvas" in overrides:
                overrides["canvas"] = tuple(overrides["canvas"])
            params = GenParams(seed=seed, **overrides)
            bundle = generate(params)
            stem = f"diagram_{idx}"
            save_png(bundle.image, out / f"{stem}.png")
            _write_json(out / f"{stem}.truth.json", truth_payload(bundle))
            _write_json(out / f"{stem}.ocr.json", sidecar_payload(bundle.sidecar))
            instances.append(
                {
                    "index": idx,
                    "tier": ti,
                    "seed": seed,
                    "node_count": params.node_count,
                    "image": f"{stem}.png",
                    "truth": f"{stem}.truth.json",
                    "ocr": f"{stem}.ocr.json",
                }
            )
            idx += 1
    manifest = {
        "base_seed": base_seed,
        "count": count,
        "tiers": tiers,
        "instances": instances,
    }
    _write_json(out / "manifest.json", manifest)
    return manifest
