from __future__ import annotations

import math

import pytest

from flowextract.arrowhead import Arrowhead
from flowextract.edgetrace import (
    MAX_DEPTH_EXCEEDED,
    NO_SOURCE_REACHED,
    NO_START_SEGMENT,
    NotTraced,
    TraceParams,
    TracedEdge,
    build_segment_graph,
    trace_all,
    trace_edge,
)
from flowextract.geometry import BoundingBox, dist, point_segment_distance
from flowextract.lines import Segment
from flowextract.nodedetect import DetectedNode, NodeClass


def _node(nid, x, y, w=100, h=50, cls=NodeClass.PROCESS):
    return DetectedNode(id=nid, node_class=cls, bbox=BoundingBox(x, y, w, h))


def _arrow(aid, tip, direction, length=13.0):
    blunt = (tip[0] - direction[0] * length, tip[1] - direction[1] * length)
    return Arrowhead(
        id=aid,
        bbox=BoundingBox(int(min(tip[0], blunt[0])) - 7, int(min(tip[1], blunt[1])) - 7, 15, 15),
        tip=tip,
        blunt=blunt,
        direction=direction,
    )


def test_empty_graph():
    g = build_segment_graph([], 8.0)
    assert g.segments == [] and g.adjacency == []


def test_corner_adjacency():
    g = build_segment_graph(
        [Segment((0.0, 0.0), (50.0, 0.0)), Segment((52.0, 3.0), (52.0, 60.0))], 8.0
    )
    assert g.adjacency == [(0, 1)]


def test_t_junction_adjacency():
    # vertical's top endpoint touches the middle of the horizontal
    horiz = Segment((0.0, 0.0), (100.0, 0.0))
    vert = Segment((50.0, 4.0), (50.0, 80.0))
    assert point_segment_distance(vert.p1, horiz.p1, horiz.p2) <= 8.0
    g = build_segment_graph([horiz, vert], 8.0)
    assert g.adjacency == [(0, 1)]


def test_distant_segments_not_adjacent():
    g = build_segment_graph(
        [Segment((0.0, 0.0), (50.0, 0.0)), Segment((70.0, 20.0), (70.0, 90.0))], 8.0
    )
    assert g.adjacency == []


def _straight_scene():
    # node A above, node B below, one vertical segment from A's bottom to B
    a = _node("n001", 60, 20)  # bbox 60..160 x 20..70
    b = _node("n002", 60, 220)
    shaft = Segment((110.0, 73.0), (110.0, 203.0))
    arrow = _arrow("a001", (110.0, 218.0), (0.0, 1.0))
    return [a, b], [shaft], arrow


def test_trace_straight_two_point_path():
    nodes, segs, arrow = _straight_scene()
    g = build_segment_graph(segs, 8.0)
    result = trace_edge(arrow, g, nodes, target="n002")
    assert isinstance(result, TracedEdge)
    assert result.source == "n001" and result.target == "n002"
    assert len(result.path) == 2
    assert result.path[-1] == arrow.tip
    src = next(n for n in nodes if n.id == "n001")
    assert src.bbox.distance_to_point(result.path[0]) <= 12.0


def test_trace_l_shaped_three_point_path():
    a = _node("n001", 20, 20)  # 20..120 x 20..70
    b = _node("n002", 220, 120)  # 220..320 x 120..170
    segs = [
        Segment((70.0, 73.0), (70.0, 145.0)),  # down from A
        Segment((70.0, 145.0), (200.0, 145.0)),  # right to B
    ]
    arrow = _arrow("a001", (218.0, 145.0), (1.0, 0.0))
    g = build_segment_graph(segs, 8.0)
    result = trace_edge(arrow, g, [a, b], target="n002")
    assert isinstance(result, TracedEdge)
    assert result.source == "n001"
    assert len(result.path) == 3
    assert dist(result.path[1], (70.0, 145.0)) <= 8.0


def _branch_scene():
    # decision D with a trunk splitting into two arms ending in B and C
    d = _node("n001", 200, 20, cls=NodeClass.DECISION)  # 200..300 x 20..70
    b = _node("n002", 40, 200)
    c = _node("n003", 360, 200)
    trunk = Segment((250.0, 73.0), (250.0, 140.0))
    arm_l = Segment((250.0, 140.0), (90.0, 140.0))
    arm_r = Segment((250.0, 140.0), (410.0, 140.0))
    drop_l = Segment((90.0, 140.0), (90.0, 183.0))
    drop_r = Segment((410.0, 140.0), (410.0, 183.0))
    arrows = [
        _arrow("a001", (90.0, 198.0), (0.0, 1.0)),
        _arrow("a002", (410.0, 198.0), (0.0, 1.0)),
    ]
    return [d, b, c], [trunk, arm_l, arm_r, drop_l, drop_r], arrows


def test_trace_multi_branch_shared_trunk():
    nodes, segs, arrows = _branch_scene()
    g = build_segment_graph(segs, 8.0)
    edges, failures = trace_all(arrows, g, nodes)
    assert failures == []
    assert [(e.source, e.target) for e in edges] == [("n001", "n002"), ("n001", "n003")]
    # the shared trunk appears in both paths: both start at its top vertex
    assert dist(edges[0].path[0], (250.0, 73.0)) <= 8.0
    assert dist(edges[1].path[0], (250.0, 73.0)) <= 8.0


def test_trace_all_empty():
    g = build_segment_graph([], 8.0)
    assert trace_all([], g, []) == ([], [])


def test_no_start_segment():
    nodes, segs, arrow = _straight_scene()
    g = build_segment_graph(segs, 8.0)
    far = _arrow("a009", (400.0, 300.0), (0.0, 1.0))
    result = trace_edge(far, g, nodes, target="n002")
    assert isinstance(result, NotTraced)
    assert result.reason == NO_START_SEGMENT


def test_misaligned_start_segment_rejected():
    nodes, segs, arrow = _straight_scene()
    # arrowhead pointing right while the only segment is vertical
    side = _arrow("a005", (110.0, 218.0), (1.0, 0.0))
    g = build_segment_graph(segs, 8.0)
    result = trace_edge(side, g, nodes, target="n002")
    assert isinstance(result, NotTraced)
    assert result.reason == NO_START_SEGMENT


def test_broken_connector_no_source():
    a = _node("n001", 60, 20)
    b = _node("n002", 60, 300)
    segs = [Segment((110.0, 200.0), (110.0, 283.0))]  # detached from A
    arrow = _arrow("a001", (110.0, 298.0), (0.0, 1.0))
    g = build_segment_graph(segs, 8.0)
    result = trace_edge(arrow, g, [a, b], target="n002")
    assert isinstance(result, NotTraced)
    assert result.reason == NO_SOURCE_REACHED


def test_max_depth_exceeded():
    a = _node("n001", 0, 0, w=30, h=30)
    b = _node("n002", 0, 500, w=30, h=500)
    # ladder of short segments joined end to end
    segs = []
    y = 480.0
    for i in range(6):
        segs.append(Segment((50.0, y), (50.0, y - 70.0)))
        y -= 70.0
    arrow = _arrow("a001", (50.0, 496.0), (0.0, 1.0))
    g = build_segment_graph(segs, 8.0)
    params = TraceParams(max_depth=2)
    result = trace_edge(arrow, g, [a, b], target="n002", params=params)
    assert isinstance(result, NotTraced)
    assert result.reason == MAX_DEPTH_EXCEEDED


def test_independence_under_arrowhead_removal():
    nodes, segs, arrows = _branch_scene()
    g = build_segment_graph(segs, 8.0)
    full, _ = trace_all(arrows, g, nodes)
    reduced, _ = trace_all(arrows[:1], g, nodes)
    full_keys = {(e.arrowhead, e.source, e.target) for e in full}
    reduced_keys = {(e.arrowhead, e.source, e.target) for e in reduced}
    assert reduced_keys <= full_keys
    assert len(full_keys - reduced_keys) == 1


def test_edge_count_bounded_by_arrowheads():
    nodes, segs, arrows = _branch_scene()
    g = build_segment_graph(segs, 8.0)
    edges, failures = trace_all(arrows, g, nodes)
    assert len(edges) <= len(arrows)
    assert len(edges) + len(failures) == len(arrows)


def test_path_vertices_near_segments():
    nodes, segs, arrows = _branch_scene()
    g = build_segment_graph(segs, 8.0)
    edges, _ = trace_all(arrows, g, nodes)
    for e in edges:
        for p in e.path[:-1]:  # tip sits beyond the segments
            assert min(point_segment_distance(p, s.p1, s.p2) for s in segs) <= 8.0


def test_shortest_source_wins():
    # two candidate sources; the nearer one by path length is chosen
    near = _node("n001", 60, 100)  # bottom edge at y=150
    far = _node("n002", 60, 20)  # bottom edge at y=70
    target = _node("n003", 60, 320)
    segs = [Segment((110.0, 73.0), (110.0, 303.0))]  # passes both sources
    arrow = _arrow("a001", (110.0, 318.0), (0.0, 1.0))
    g = build_segment_graph(segs, 8.0)
    result = trace_edge(arrow, g, [near, far, target], target="n003")
    assert isinstance(result, TracedEdge)
    assert result.source == "n001"
