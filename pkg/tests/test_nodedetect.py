from __future__ import annotations

import json

import numpy as np
import pytest

from flowextract import draw
from flowextract.errors import SchemaViolationError
from flowextract.evaluation import iou
from flowextract.geometry import BoundingBox
from flowextract.labels import OcrSidecar, OcrToken
from flowextract.nodedetect import (
    DetectedNode,
    NodeClass,
    attach_text,
    detect_nodes_geometric,
    ingest_detections,
    load_detection_file,
)
from flowextract.synthgen import GenParams, generate

from conftest import blank_canvas, to_binary


def test_blank_image_no_nodes():
    assert detect_nodes_geometric(to_binary(blank_canvas())) == []


def test_single_rectangle_is_process():
    canvas = blank_canvas()
    drawn = draw.draw_rect_outline(canvas, 50, 60, 120, 60)
    nodes = detect_nodes_geometric(to_binary(canvas))
    assert len(nodes) == 1
    n = nodes[0]
    assert n.node_class == NodeClass.PROCESS
    assert n.confidence == 1.0
    assert abs(n.bbox.x - drawn.x) <= 2 and abs(n.bbox.y - drawn.y) <= 2
    assert abs(n.bbox.w - drawn.w) <= 2 and abs(n.bbox.h - drawn.h) <= 2


def test_mixed_shape_classes():
    canvas = blank_canvas(760, 300)
    d = draw.draw_diamond_outline(canvas, 110, 120, 55, 36)
    c = draw.draw_circle_outline(canvas, 320, 120, 36)
    t = draw.draw_stadium_outline(canvas, 470, 90, 120, 52)
    nodes = detect_nodes_geometric(to_binary(canvas))
    got = {n.node_class: n.bbox for n in nodes}
    assert set(got) == {NodeClass.DECISION, NodeClass.CONNECTOR, NodeClass.TERMINATOR}
    assert iou(got[NodeClass.DECISION], d) > 0.9
    assert iou(got[NodeClass.CONNECTOR], c) > 0.9
    assert iou(got[NodeClass.TERMINATOR], t) > 0.9


def test_document_wavy_bottom():
    canvas = blank_canvas()
    draw.draw_document_outline(canvas, 60, 60, 130, 56)
    nodes = detect_nodes_geometric(to_binary(canvas))
    assert [n.node_class for n in nodes] == [NodeClass.DOCUMENT]


@pytest.mark.parametrize("w,h", [(110, 52), (124, 60), (140, 68)])
def test_process_size_sweep(w, h):
    canvas = blank_canvas(500, 400)
    draw.draw_rect_outline(canvas, 60, 60, w, h)
    nodes = detect_nodes_geometric(to_binary(canvas))
    assert [n.node_class for n in nodes] == [NodeClass.PROCESS]


@pytest.mark.parametrize("w,h", [(110, 46), (120, 50), (130, 56)])
def test_terminator_size_sweep(w, h):
    canvas = blank_canvas(500, 400)
    draw.draw_stadium_outline(canvas, 60, 60, w, h)
    nodes = detect_nodes_geometric(to_binary(canvas))
    assert [n.node_class for n in nodes] == [NodeClass.TERMINATOR]


@pytest.mark.parametrize("hw,hh", [(50, 32), (56, 36), (62, 40)])
def test_decision_size_sweep(hw, hh):
    canvas = blank_canvas(500, 400)
    draw.draw_diamond_outline(canvas, 200, 150, hw, hh)
    nodes = detect_nodes_geometric(to_binary(canvas))
    assert [n.node_class for n in nodes] == [NodeClass.DECISION]


@pytest.mark.parametrize("r", [34, 36, 38])
def test_connector_size_sweep(r):
    canvas = blank_canvas(400, 400)
    draw.draw_circle_outline(canvas, 150, 150, r)
    nodes = detect_nodes_geometric(to_binary(canvas))
    assert [n.node_class for n in nodes] == [NodeClass.CONNECTOR]


@pytest.mark.parametrize("w,h", [(110, 50), (126, 56), (140, 60)])
def test_document_size_sweep(w, h):
    canvas = blank_canvas(500, 400)
    draw.draw_document_outline(canvas, 60, 60, w, h)
    nodes = detect_nodes_geometric(to_binary(canvas))
    assert [n.node_class for n in nodes] == [NodeClass.DOCUMENT]


def test_connector_lines_are_not_nodes():
    canvas = blank_canvas()
    draw.draw_vline(canvas, 100, 50, 300)  # long straight stroke
    draw.draw_vline(canvas, 200, 50, 200)
    draw.draw_hline(canvas, 200, 200, 330)  # L with the one above
    nodes = detect_nodes_geometric(to_binary(canvas))
    assert nodes == []


def test_arrowhead_sized_blobs_are_not_nodes():
    canvas = blank_canvas()
    draw.draw_triangle_filled(canvas, (100.5, 100.0), (0.0, 1.0), 13, 6)
    nodes = detect_nodes_geometric(to_binary(canvas))
    assert nodes == []


def test_synthgen_noise_free_recall_and_accuracy(sample_bundle):
    from flowextract.raster import GrayImage, binarize

    binary = binarize(GrayImage(sample_bundle.image.data))
    nodes = detect_nodes_geometric(binary)
    gt = sample_bundle.graph.nodes
    assert len(nodes) == len(gt)
    matched = 0
    for g in gt:
        best = max(nodes, key=lambda n: iou(n.bbox, g.bbox))
        if iou(best.bbox, g.bbox) > 0.5:
            matched += 1
            assert best.node_class == g.type
    assert matched == len(gt)


def test_detection_is_deterministic_with_raster_ids(sample_bundle):
    from flowextract.raster import GrayImage, binarize

    binary = binarize(GrayImage(sample_bundle.image.data))
    a = detect_nodes_geometric(binary)
    b = detect_nodes_geometric(binary)
    assert [(n.id, n.node_class, n.bbox) for n in a] == [(n.id, n.node_class, n.bbox) for n in b]
    assert [n.id for n in a] == [f"n{i + 1:03d}" for i in range(len(a))]
    tops = [(n.bbox.y, n.bbox.x) for n in a]
    assert tops == sorted(tops)


def test_bboxes_within_image(sample_bundle):
    from flowextract.raster import GrayImage, binarize

    binary = binarize(GrayImage(sample_bundle.image.data))
    for n in detect_nodes_geometric(binary):
        assert n.bbox.x >= 0 and n.bbox.y >= 0
        assert n.bbox.right <= binary.width and n.bbox.bottom <= binary.height


# ---------------- ingestion -----------------


def _write_detections(tmp_path, entries):
    p = tmp_path / "det.json"
    p.write_text(json.dumps({"detections": entries}))
    return p


def test_ingest_passthrough(tmp_path):
    p = _write_detections(
        tmp_path,
        [{"id": "n1", "class": "process", "bbox": [10, 10, 100, 50], "confidence": 0.97}],
    )
    nodes = ingest_detections(p)
    assert len(nodes) == 1
    assert nodes[0].id == "n1"
    assert nodes[0].node_class == NodeClass.PROCESS
    assert nodes[0].bbox == BoundingBox(10, 10, 100, 50)
    assert nodes[0].confidence == 0.97


def test_ingest_duplicate_id(tmp_path):
    p = _write_detections(
        tmp_path,
        [
            {"id": "n1", "class": "process", "bbox": [10, 10, 100, 50], "confidence": 0.9},
            {"id": "n1", "class": "decision", "bbox": [10, 80, 100, 50], "confidence": 0.9},
        ],
    )
    with pytest.raises(SchemaViolationError, match="duplicate id"):
        ingest_detections(p)


def test_ingest_unknown_class(tmp_path):
    p = _write_detections(
        tmp_path, [{"id": "n1", "class": "database", "bbox": [0, 0, 10, 10], "confidence": 1}]
    )
    with pytest.raises(SchemaViolationError, match="unknown class"):
        ingest_detections(p)


def test_ingest_missing_field(tmp_path):
    p = _write_detections(tmp_path, [{"id": "n1", "class": "process", "confidence": 1.0}])
    with pytest.raises(SchemaViolationError, match="missing field 'bbox'"):
        ingest_detections(p)


def test_ingest_negative_dimensions(tmp_path):
    p = _write_detections(
        tmp_path, [{"id": "n1", "class": "process", "bbox": [0, 0, -5, 10], "confidence": 1.0}]
    )
    with pytest.raises(SchemaViolationError):
        ingest_detections(p)


def test_ingest_routes_arrowheads_separately(tmp_path):
    p = _write_detections(
        tmp_path,
        [
            {"id": "n1", "class": "process", "bbox": [0, 0, 10, 10], "confidence": 1.0},
            {"id": "a1", "class": "arrowhead", "bbox": [20, 20, 8, 8], "confidence": 0.8},
        ],
    )
    nodes = ingest_detections(p)
    assert [n.id for n in nodes] == ["n1"]
    nodes2, arrow_boxes = load_detection_file(p)
    assert [n.id for n in nodes2] == ["n1"]
    assert arrow_boxes == [BoundingBox(20, 20, 8, 8)]


# ---------------- text attachment -----------------


def _node(bbox):
    return DetectedNode(id="n001", node_class=NodeClass.PROCESS, bbox=bbox)


def _token(text, cx, cy):
    return OcrToken(text=text, center=(cx, cy), bbox=BoundingBox(int(cx) - 10, int(cy) - 5, 20, 10))


def test_attach_text_single_token():
    nodes = attach_text([_node(BoundingBox(0, 0, 100, 50))], OcrSidecar([_token("Check", 50, 25)]))
    assert nodes[0].text == "Check"


def test_attach_text_sidecar_order():
    sidecar = OcrSidecar([_token("Vervang", 30, 25), _token("sensor", 70, 25)])
    nodes = attach_text([_node(BoundingBox(0, 0, 100, 50))], sidecar)
    assert nodes[0].text == "Vervang sensor"


def test_attach_text_outside_token():
    nodes = attach_text([_node(BoundingBox(0, 0, 100, 50))], OcrSidecar([_token("far", 150, 25)]))
    assert nodes[0].text == ""


def test_attach_text_returns_new_records():
    original = [_node(BoundingBox(0, 0, 100, 50))]
    attach_text(original, OcrSidecar([_token("x", 50, 25)]))
    assert original[0].text == ""
