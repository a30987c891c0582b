"""Directed-edge reconstruction by traversal of the segment graph.

Each detected arrowhead proposes at most one edge: starting from a segment
aligned with the arrowhead's blunt end, the traversal walks connected
segments (sharing them freely between arrowheads, so branch trunks serve
every arm) until it reaches proximity to a node other than the target. The
nearest such node by cumulative path length becomes the source. Failures are
reported as diagnostics instead of guessed edges.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field

from .arrowhead import Arrowhead, assign_target
from .geometry import (
    Point,
    angle_between_axes,
    dist,
    point_segment_distance,
    project_onto_segment,
    segment_box_approach,
)
from .lines import Segment
from .nodedetect import DetectedNode

NO_TARGET = "no-target"
NO_START_SEGMENT = "no-start-segment"
NO_SOURCE_REACHED = "no-source-reached"
MAX_DEPTH_EXCEEDED = "max-depth-exceeded"


@dataclass
class SegmentGraph:
    segments: list[Segment]
    adjacency: list[tuple[int, int]]  # symmetric pairs stored once with i < j
    eps_join: float

    def neighbors(self, i: int) -> list[int]:
        out = []
        for a, b in self.adjacency:
            if a == i:
                out.append(b)
            elif b == i:
                out.append(a)
        return out


@dataclass
class TracedEdge:
    source: str
    target: str
    arrowhead: str
    path: list[Point]
    label: str | None = None

    def __post_init__(self):
        if not self.source or not self.target:
            raise ValueError("traced edge requires non-empty source and target")
        if len(self.path) < 2:
            raise ValueError("traced edge path needs at least two points")


@dataclass
class NotTraced:
    arrowhead: str
    reason: str


@dataclass
class TraceParams:
    eps_join: float = 8.0
    start_tol: float = 10.0
    align_tol_deg: float = 30.0
    node_prox: float = 12.0
    max_depth: int = 50  # segments per path
    target_tol: float = 15.0
    # an edge may not claim a source through another arrow's head: vertices
    # this close to a detected blunt/tip are target ends, not attachments
    blunt_exclusion: float = 25.0
    tip_exclusion: float = 12.0


def build_segment_graph(segs: list[Segment], eps_join: float = 8.0) -> SegmentGraph:
    """Adjacency between segments whose endpoints land within eps_join of the
    other segment (covers corner joins and T-junctions)."""
    pairs = []
    for i in range(len(segs)):
        for j in range(i + 1, len(segs)):
            si, sj = segs[i], segs[j]
            d = min(
                point_segment_distance(si.p1, sj.p1, sj.p2),
                point_segment_distance(si.p2, sj.p1, sj.p2),
                point_segment_distance(sj.p1, si.p1, si.p2),
                point_segment_distance(sj.p2, si.p1, si.p2),
            )
            if d <= eps_join:
                pairs.append((i, j))
    return SegmentGraph(segments=list(segs), adjacency=pairs, eps_join=eps_join)


@dataclass
class _Vertex:
    seg: int
    t: float  # arc-length parameter along the segment
    point: Point
    links: list[tuple[int, float]] = field(default_factory=list)  # (vertex, weight)


class _VertexGraph:
    """Connection points of the segment graph: segment endpoints plus
    junction attachment points, linked along segments and across joins."""

    def __init__(self, g: SegmentGraph):
        self.g = g
        self.verts: list[_Vertex] = []
        self.per_seg: dict[int, list[int]] = {i: [] for i in range(len(g.segments))}
        for i, s in enumerate(g.segments):
            self._vertex_at(i, 0.0, s.p1)
            self._vertex_at(i, s.length, s.p2)
        for i, j in g.adjacency:
            self._attach(i, j)
            self._attach(j, i)
        for i in self.per_seg:
            self._link_along(i)

    def _vertex_at(self, seg: int, t: float, point: Point) -> int:
        for vid in self.per_seg[seg]:
            if abs(self.verts[vid].t - t) <= 0.75:
                return vid
        vid = len(self.verts)
        self.verts.append(_Vertex(seg=seg, t=t, point=point))
        self.per_seg[seg].append(vid)
        return vid

    def _attach(self, i: int, j: int) -> None:
        """Project segment j's endpoints onto segment i where they join."""
        si = self.g.segments[i]
        sj = self.g.segments[j]
        for endpoint, t_j in ((sj.p1, 0.0), (sj.p2, sj.length)):
            proj, t01 = project_onto_segment(endpoint, si.p1, si.p2)
            d = dist(endpoint, proj)
            if d <= self.g.eps_join:
                vi = self._vertex_at(i, t01 * si.length, proj)
                vj = self._vertex_at(j, t_j, endpoint)
                self._link(vi, vj, d)

    def _link(self, a: int, b: int, wgt: float) -> None:
        if a == b:
            return
        if all(nb != b for nb, _ in self.verts[a].links):
            self.verts[a].links.append((b, wgt))
            self.verts[b].links.append((a, wgt))

    def _link_along(self, seg: int) -> None:
        order = sorted(self.per_seg[seg], key=lambda vid: self.verts[vid].t)
        self.per_seg[seg] = order
        for a, b in zip(order, order[1:]):
            self._link(a, b, abs(self.verts[a].t - self.verts[b].t))


def _find_start(a: Arrowhead, g: SegmentGraph, params: TraceParams) -> tuple[int, Point, float] | None:
    """Segment aligned with the shaft direction and closest to the blunt end."""
    best = None
    for i, s in enumerate(g.segments):
        d = point_segment_distance(a.blunt, s.p1, s.p2)
        if d > params.start_tol:
            continue
        back = (-a.direction[0], -a.direction[1])
        if angle_between_axes(s.direction, back) > params.align_tol_deg:
            continue
        proj, t01 = project_onto_segment(a.blunt, s.p1, s.p2)
        if best is None or d < best[3]:
            best = (i, proj, t01 * s.length, d)
    if best is None:
        return None
    return best[0], best[1], best[2]


def _simplify_path(path: list[Point]) -> list[Point]:
    """Drop junction twins (same corner seen from both segments) and
    collinear intermediate points."""
    out: list[Point] = []
    for p in path:
        if out and dist(p, out[-1]) < 4.0:
            continue
        out.append(p)
    if out[-1] != path[-1]:
        # never drop the tip itself
        if dist(out[-1], path[-1]) < 4.0 and len(out) > 1:
            out[-1] = path[-1]
        else:
            out.append(path[-1])
    if len(out) < 3:
        return out
    cleaned = [out[0]]
    for i in range(1, len(out) - 1):
        if point_segment_distance(out[i], cleaned[-1], out[i + 1]) >= 2.0:
            cleaned.append(out[i])
    cleaned.append(out[-1])
    return cleaned


def trace_edge(
    a: Arrowhead,
    g: SegmentGraph,
    nodes: list[DetectedNode],
    target: str,
    params: TraceParams | None = None,
    vgraph: _VertexGraph | None = None,
    all_arrowheads: list[Arrowhead] | None = None,
) -> TracedEdge | NotTraced:
    """Trace backward from one arrowhead to its source node.

    `target` is the node already assigned to the arrowhead tip; it never
    terminates the traversal, so the shaft can run alongside it freely.
    `all_arrowheads` exclude head-end vertices from acting as sources.
    """
    params = params or TraceParams()
    heads = [h for h in (all_arrowheads or []) if h.id != a.id]
    start = _find_start(a, g, params)
    if start is None:
        return NotTraced(arrowhead=a.id, reason=NO_START_SEGMENT)
    seg_idx, start_pt, start_t = start

    if vgraph is None:
        vgraph = _VertexGraph(g)
    verts = vgraph.verts
    order = vgraph.per_seg[seg_idx]

    # start vertex: neighbors are the nearest stored vertices around start_t
    prev_v = next_v = None
    for vid in order:
        if verts[vid].t <= start_t:
            prev_v = vid
        elif next_v is None:
            next_v = vid
    start_links: list[tuple[int, float]] = []
    if prev_v is not None:
        start_links.append((prev_v, abs(start_t - verts[prev_v].t)))
    if next_v is not None:
        start_links.append((next_v, abs(verts[next_v].t - start_t)))

    node_by_id = {n.id: n for n in nodes}

    def at_head_end(p: Point) -> bool:
        for h in heads:
            if dist(p, h.blunt) <= params.blunt_exclusion or dist(p, h.tip) <= params.tip_exclusion:
                return True
        return False

    sorted_nodes = sorted((n for n in nodes if n.id != target), key=lambda n: n.id)

    def terminal_node(p: Point) -> str | None:
        best_id, best_d = None, math.inf
        for n in sorted_nodes:
            d = n.bbox.distance_to_point(p)
            if d <= params.node_prox and d < best_d:
                best_d, best_id = d, n.id
        if best_id is not None and at_head_end(p):
            return None
        return best_id

    def hop_event(p_from: Point, p_to: Point) -> tuple[float, str, Point] | None:
        """First node-proximity event along a hop, if any survives the
        head-end guard (a trace stops at the first such event)."""
        hits = []
        for n in sorted_nodes:
            d, at = segment_box_approach(p_from, p_to, n.bbox)
            if d <= params.node_prox:
                hits.append((dist(p_from, at), n.id, at))
        for along, node_id, at in sorted(hits, key=lambda h: (h[0], h[1])):
            if not at_head_end(at):
                return along, node_id, at
        return None

    START = -1
    dist_to: dict[int, float] = {START: 0.0}
    prev: dict[int, int] = {}
    seg_count: dict[int, int] = {START: 1}
    heap: list[tuple[float, int]] = [(0.0, START)]
    settled: set[int] = set()
    # terminal: (cumulative length, node id, last vertex, attachment point)
    terminals: list[tuple[float, str, int, Point]] = []
    depth_pruned = False

    while heap:
        d, v = heapq.heappop(heap)
        if v in settled or d > dist_to.get(v, math.inf):
            continue
        settled.add(v)
        point = start_pt if v == START else verts[v].point
        if v != START:
            node_id = terminal_node(point)
            if node_id is not None:
                terminals.append((d, node_id, v, point))
                continue  # stop this branch at its first proximity event
        links = start_links if v == START else verts[v].links
        cur_seg = seg_idx if v == START else verts[v].seg
        for nb, wgt in links:
            nseg = verts[nb].seg
            if nseg == cur_seg:
                # walking along a segment may pass a node mid-span
                event = hop_event(point, verts[nb].point)
                if event is not None:
                    along, node_id, at = event
                    terminals.append((d + along, node_id, v, at))
                    continue
            nd = d + wgt
            ndepth = seg_count.get(v, 1) + (1 if nseg != cur_seg else 0)
            if ndepth > params.max_depth:
                depth_pruned = True
                continue
            if nd < dist_to.get(nb, math.inf):
                dist_to[nb] = nd
                prev[nb] = v
                seg_count[nb] = ndepth
                heapq.heappush(heap, (nd, nb))

    if not terminals:
        reason = MAX_DEPTH_EXCEEDED if depth_pruned else NO_SOURCE_REACHED
        return NotTraced(arrowhead=a.id, reason=reason)

    terminals.sort(key=lambda t: (t[0], t[1]))
    total, source_id, term_v, attach = terminals[0]
    if source_id not in node_by_id:
        return NotTraced(arrowhead=a.id, reason=NO_SOURCE_REACHED)

    chain: list[Point] = [attach]
    v = term_v
    while v != START:
        if dist(verts[v].point, chain[-1]) > 1e-9:
            chain.append(verts[v].point)
        v = prev[v]
    chain.append(start_pt)
    chain.append(a.tip)
    path = _simplify_path(chain)
    if len(path) < 2:
        path = [chain[0], a.tip]
    return TracedEdge(source=source_id, target=target, arrowhead=a.id, path=path)


def trace_all(
    arrows: list[Arrowhead],
    g: SegmentGraph,
    nodes: list[DetectedNode],
    params: TraceParams | None = None,
) -> tuple[list[TracedEdge], list[NotTraced]]:
    """Trace every arrowhead independently; segments are shared, never
    consumed, so a common trunk may appear in several paths."""
    params = params or TraceParams()
    vgraph = _VertexGraph(g) if g.segments else None
    edges: list[TracedEdge] = []
    failures: list[NotTraced] = []
    for a in sorted(arrows, key=lambda a: a.id):
        target = assign_target(a, nodes, params.target_tol)
        if target is None:
            failures.append(NotTraced(arrowhead=a.id, reason=NO_TARGET))
            continue
        if vgraph is None:
            failures.append(NotTraced(arrowhead=a.id, reason=NO_START_SEGMENT))
            continue
        result = trace_edge(a, g, nodes, target, params, vgraph, all_arrowheads=arrows)
        if isinstance(result, TracedEdge):
            edges.append(result)
        else:
            failures.append(result)
    return edges, failures
