from __future__ import annotations

import math

import numpy as np

from flowextract import draw
from flowextract.arrowhead import Arrowhead, arrowheads_from_boxes, assign_target, detect_arrowheads
from flowextract.geometry import BoundingBox, dist
from flowextract.nodedetect import DetectedNode, NodeClass
from flowextract.raster import GrayImage, binarize

from conftest import blank_canvas, to_binary


def _node(nid, bbox):
    return DetectedNode(id=nid, node_class=NodeClass.PROCESS, bbox=bbox)


def test_blank_image_no_arrowheads():
    assert detect_arrowheads(to_binary(blank_canvas()), []) == []


def test_upward_triangle_orientation():
    # apex at (50, 10), base from (44, 22) to (56, 22): points up (y down)
    canvas = blank_canvas(100, 100)
    draw.draw_triangle_filled(canvas, (50.0, 10.0), (0.0, -1.0), 12.0, 6.0)
    heads = detect_arrowheads(to_binary(canvas), [])
    assert len(heads) == 1
    a = heads[0]
    assert dist(a.tip, (50, 10)) <= 2.0
    assert dist(a.blunt, (50, 22)) <= 2.0
    assert abs(a.direction[0] - 0.0) <= 0.05
    assert abs(a.direction[1] - (-1.0)) <= 0.05


def test_direction_is_normalized_tip_minus_blunt():
    canvas = blank_canvas(100, 100)
    draw.draw_triangle_filled(canvas, (60.0, 50.0), (1.0, 0.0), 13.0, 6.0)
    (a,) = detect_arrowheads(to_binary(canvas), [])
    n = math.hypot(a.tip[0] - a.blunt[0], a.tip[1] - a.blunt[1])
    assert abs(a.direction[0] - (a.tip[0] - a.blunt[0]) / n) < 1e-9
    assert abs(a.direction[1] - (a.tip[1] - a.blunt[1]) / n) < 1e-9
    assert abs(math.hypot(*a.direction) - 1.0) < 1e-6


def test_tip_and_blunt_inside_grown_bbox():
    canvas = blank_canvas(120, 120)
    draw.draw_triangle_filled(canvas, (70.0, 60.0), (0.6, 0.8), 13.0, 6.0)
    (a,) = detect_arrowheads(to_binary(canvas), [])
    g = a.bbox.grow(2)
    assert g.contains(a.tip) and g.contains(a.blunt)


def test_synthgen_arrowheads_recovered(sample_bundle):
    binary = binarize(GrayImage(sample_bundle.image.data))
    nodes = [
        DetectedNode(id=n.id, node_class=n.type, bbox=n.bbox) for n in sample_bundle.graph.nodes
    ]
    heads = detect_arrowheads(binary, nodes)
    assert len(heads) == len(sample_bundle.arrowheads)
    for gt in sample_bundle.arrowheads:
        best = min(heads, key=lambda h: dist(h.tip, gt.tip))
        assert dist(best.tip, gt.tip) <= 3.0


def test_no_arrowhead_inside_node_boxes(sample_bundle):
    binary = binarize(GrayImage(sample_bundle.image.data))
    nodes = [
        DetectedNode(id=n.id, node_class=n.type, bbox=n.bbox) for n in sample_bundle.graph.nodes
    ]
    for h in detect_arrowheads(binary, nodes):
        assert not any(h.bbox.intersects_interior(n.bbox) for n in nodes)


def test_locality_under_disjoint_blob():
    canvas = blank_canvas(300, 300)
    draw.draw_triangle_filled(canvas, (60.0, 50.0), (0.0, 1.0), 13.0, 6.0)
    before = detect_arrowheads(to_binary(canvas), [])
    draw.draw_solid_box(canvas, 220, 220, 14, 13)  # unclassifiable blob, far away
    after = detect_arrowheads(to_binary(canvas), [])
    assert [(a.tip, a.blunt) for a in before] == [(a.tip, a.blunt) for a in after]


def test_solid_box_rejected_by_triangularity():
    canvas = blank_canvas(100, 100)
    draw.draw_solid_box(canvas, 40, 40, 18, 10)  # label-like blob, area in range
    assert detect_arrowheads(to_binary(canvas), []) == []


def test_thin_stroke_rejected():
    canvas = blank_canvas(100, 100)
    draw.draw_hline(canvas, 50, 20, 80, 2)  # 122 px, in area range, but a line
    assert detect_arrowheads(to_binary(canvas), []) == []


def test_area_gates():
    canvas = blank_canvas(200, 100)
    draw.draw_triangle_filled(canvas, (30.0, 30.0), (0.0, 1.0), 5.0, 2.0)  # ~10 px
    draw.draw_triangle_filled(canvas, (130.0, 60.0), (0.0, 1.0), 40.0, 20.0)  # ~800 px
    assert detect_arrowheads(to_binary(canvas), []) == []


def test_crossing_stroke_spoils_solidity():
    canvas = blank_canvas(120, 120)
    tip = (60.0, 60.0)
    draw.draw_triangle_filled(canvas, tip, (0.0, 1.0), 13.0, 6.0)
    cx, cy = tip[0], tip[1] - 8
    draw.draw_segment(canvas, (cx - 14, cy), (cx + 14, cy), 2)
    assert detect_arrowheads(to_binary(canvas), []) == []


def test_arrowheads_from_boxes_recovers_orientation():
    canvas = blank_canvas(200, 200)
    box, _ = draw.draw_triangle_filled(canvas, (100.0, 50.0), (0.0, -1.0), 13.0, 6.0)
    heads = arrowheads_from_boxes(to_binary(canvas), [box], [])
    assert len(heads) == 1
    assert dist(heads[0].tip, (100, 50)) <= 2.5
    # empty boxes are skipped, not errors
    assert arrowheads_from_boxes(to_binary(blank_canvas()), [BoundingBox(10, 10, 8, 8)], []) == []


def _head(tip):
    return Arrowhead(
        id="a001", bbox=BoundingBox(int(tip[0]) - 5, int(tip[1]) - 5, 10, 10),
        tip=tip, blunt=(tip[0], tip[1] + 10), direction=(0.0, -1.0),
    )


def test_assign_target_nearest():
    nodes = [_node("n001", BoundingBox(105, 30, 80, 40))]
    assert assign_target(_head((100.0, 50.0)), nodes, tol=15) == "n001"


def test_assign_target_tie_break():
    nodes = [
        _node("n002", BoundingBox(104, 20, 50, 60)),
        _node("n001", BoundingBox(46, 20, 50, 60)),
    ]
    # tip at (100, 50): distance 4 to both boxes
    assert assign_target(_head((100.0, 50.0)), nodes, tol=15) == "n001"


def test_assign_target_out_of_tolerance():
    nodes = [_node("n001", BoundingBox(200, 30, 80, 40))]
    assert assign_target(_head((100.0, 50.0)), nodes, tol=15) is None
