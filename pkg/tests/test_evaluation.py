from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from flowextract.evaluation import (
    ArrowCounts,
    EdgeCounts,
    MetricsReport,
    NodeCounts,
    iou,
    match_boxes,
    score_arrowheads_by_tip,
    score_edges,
    score_graphs,
    score_nodes,
)
from flowextract.geometry import BoundingBox
from flowextract.graph import FlowGraph, GraphEdge, GraphNode, canonical
from flowextract.nodedetect import NodeClass
from flowextract.rng import Lcg64


def _pixel_iou(a: BoundingBox, b: BoundingBox) -> float:
    """Brute-force pixel counting over the union region."""
    x0 = min(a.x, b.x)
    y0 = min(a.y, b.y)
    x1 = max(a.right, b.right)
    y1 = max(a.bottom, b.bottom)
    inter = union = 0
    for y in range(y0, y1):
        for x in range(x0, x1):
            in_a = a.x <= x < a.right and a.y <= y < a.bottom
            in_b = b.x <= x < b.right and b.y <= y < b.bottom
            inter += in_a and in_b
            union += in_a or in_b
    return inter / union if union else 0.0


def test_iou_identity():
    b = BoundingBox(3, 4, 10, 20)
    assert iou(b, b) == 1.0


def test_iou_disjoint():
    assert iou(BoundingBox(0, 0, 10, 10), BoundingBox(20, 20, 5, 5)) == 0.0


def test_iou_half_overlap():
    # (0,0,10,10) vs (5,0,10,10): inter 50, union 150
    v = iou(BoundingBox(0, 0, 10, 10), BoundingBox(5, 0, 10, 10))
    assert abs(v - 50.0 / 150.0) < 1e-12
    assert abs(v - _pixel_iou(BoundingBox(0, 0, 10, 10), BoundingBox(5, 0, 10, 10))) < 1e-9


def test_iou_pixel_oracle_seeded_pairs():
    rng = Lcg64(12345)
    for _ in range(200):
        a = BoundingBox(rng.randint(0, 30), rng.randint(0, 30), rng.randint(1, 25), rng.randint(1, 25))
        b = BoundingBox(rng.randint(0, 30), rng.randint(0, 30), rng.randint(1, 25), rng.randint(1, 25))
        assert abs(iou(a, b) - _pixel_iou(a, b)) < 1e-9
        assert abs(iou(a, b) - iou(b, a)) < 1e-15
        assert 0.0 <= iou(a, b) <= 1.0
        assert (iou(a, b) == 1.0) == (a == b)


def test_match_identical_lists():
    boxes = [BoundingBox(0, 0, 10, 10), BoundingBox(50, 50, 10, 10)]
    m = match_boxes(boxes, list(boxes), 0.5)
    assert {(p, g) for p, g, _ in m.pairs} == {(0, 0), (1, 1)}
    assert m.unmatched_pred == [] and m.unmatched_gt == []


def test_match_greedy_prefers_higher_iou():
    pred = [BoundingBox(0, 0, 10, 10)]
    gt = [BoundingBox(0, 0, 10, 11), BoundingBox(0, 3, 10, 10)]
    m = match_boxes(pred, gt, 0.5)
    assert m.pairs[0][:2] == (0, 0)
    assert m.unmatched_gt == [1]


def test_match_strict_threshold_boundary():
    # IoU exactly 0.5: (0,0,10,10) vs (0,0,10,5) -> 50/100 = 0.5, not matched
    pred = [BoundingBox(0, 0, 10, 10)]
    gt = [BoundingBox(0, 0, 10, 5)]
    assert iou(pred[0], gt[0]) == 0.5
    m = match_boxes(pred, gt, 0.5)
    assert m.pairs == []
    assert m.unmatched_pred == [0] and m.unmatched_gt == [0]


def test_match_invalid_threshold():
    with pytest.raises(ValueError):
        match_boxes([], [], 0.0)


@settings(deadline=None, max_examples=40)
@given(st.permutations(range(5)))
def test_match_invariant_under_pred_permutation(perm):
    rng = Lcg64(7)
    base = [
        BoundingBox(rng.randint(0, 40), rng.randint(0, 40), rng.randint(5, 20), rng.randint(5, 20))
        for _ in range(5)
    ]
    gt = [BoundingBox(b.x + 1, b.y, b.w, b.h) for b in base]
    m1 = match_boxes(base, gt, 0.5)
    permuted = [base[i] for i in perm]
    m2 = match_boxes(permuted, gt, 0.5)
    mapped = {(perm[p], g) for p, g, _ in m2.pairs}

    def unmap(pairs):
        return {(p, g) for p, g, _ in pairs}

    assert unmap(m1.pairs) == {(p, g) for p, g in mapped}


def _graph(nodes, edges):
    return canonical(
        [GraphNode(id=i, type=c, bbox=b, text="") for i, c, b in nodes],
        [GraphEdge(source=s, target=t, label=l) for s, t, l in edges],
    )


def _grid_nodes(n, cls=NodeClass.PROCESS):
    return [(f"n{i:03d}", cls, BoundingBox(10, 10 + 100 * i, 80, 40)) for i in range(n)]


def test_score_nodes_perfect():
    g = _graph(_grid_nodes(3), [])
    counts, m = score_nodes(g, g)
    assert counts.precision == counts.recall == counts.f1 == 1.0
    assert counts.classification_accuracy == 1.0


def test_score_nodes_empty_prediction():
    gt = _graph(_grid_nodes(3), [])
    counts, _ = score_nodes(FlowGraph(), gt)
    assert counts.precision == 0.0 and counts.recall == 0.0 and counts.f1 == 0.0


def test_score_nodes_handcounted():
    # 5 gt nodes; 4 predicted at matching positions, one with the wrong class
    gt = _graph(_grid_nodes(5), [])
    pred_nodes = _grid_nodes(5)[:4]
    pred_nodes[0] = (pred_nodes[0][0], NodeClass.DECISION, pred_nodes[0][2])
    pred = _graph(pred_nodes, [])
    counts, _ = score_nodes(pred, gt)
    assert counts.recall == pytest.approx(0.8)
    assert counts.classification_accuracy == pytest.approx(0.75)


def test_score_edges_identical():
    nodes = _grid_nodes(3)
    g = _graph(nodes, [("n000", "n001", "ja"), ("n001", "n002", None)])
    counts = score_edges(g, g, score_nodes(g, g)[1])
    assert counts.precision == 1.0 and counts.recall == 1.0
    assert counts.label_accuracy == 1.0


def test_score_edges_reversed_direction_incorrect():
    nodes = _grid_nodes(2)
    gt = _graph(nodes, [("n000", "n001", None)])
    pred = _graph(nodes, [("n001", "n000", None)])
    counts = score_edges(pred, gt, score_nodes(pred, gt)[1])
    assert counts.correct == 0
    assert counts.precision == 0.0


def test_score_edges_handcounted():
    # 3 gt edges, 2 predicted, both direction-correct, one with a wrong label
    nodes = _grid_nodes(4)
    gt = _graph(nodes, [("n000", "n001", "ja"), ("n001", "n002", None), ("n002", "n003", "nee")])
    pred = _graph(nodes, [("n000", "n001", "nee"), ("n001", "n002", None)])
    counts = score_edges(pred, gt, score_nodes(pred, gt)[1])
    assert counts.precision == 1.0
    assert counts.recall == pytest.approx(2.0 / 3.0)
    assert counts.label_accuracy == pytest.approx(0.5)


def test_swapping_pred_and_gt_swaps_precision_recall():
    nodes = _grid_nodes(4)
    gt = _graph(nodes, [("n000", "n001", None), ("n001", "n002", None), ("n002", "n003", None)])
    pred = _graph(nodes[:3], [("n000", "n001", None), ("n001", "n002", None)])
    nc_fwd, m_fwd = score_nodes(pred, gt)
    nc_rev, m_rev = score_nodes(gt, pred)
    assert nc_fwd.precision == nc_rev.recall
    assert nc_fwd.recall == nc_rev.precision
    ec_fwd = score_edges(pred, gt, m_fwd)
    ec_rev = score_edges(gt, pred, m_rev)
    assert ec_fwd.precision == ec_rev.recall
    assert ec_fwd.recall == ec_rev.precision


def test_f1_identity_on_counts():
    for counts in (NodeCounts(10, 8, 6, 6), NodeCounts(0, 5, 0, 0), EdgeCounts(4, 8, 3, 2)):
        p, r = counts.precision, counts.recall
        expected = 2 * p * r / (p + r) if p + r > 0 else 0.0
        assert counts.f1 == pytest.approx(expected)


def test_score_arrowheads_by_tip():
    pred = [(10.0, 10.0), (50.0, 50.0)]
    gt = [(11.0, 11.0), (80.0, 80.0)]
    counts = score_arrowheads_by_tip(pred, gt, max_dist=6.0)
    assert counts.matched == 1
    assert counts.recall == 0.5


def test_metrics_report_aggregation_and_table():
    a = MetricsReport(NodeCounts(2, 2, 2, 2), EdgeCounts(1, 1, 1, 1), ArrowCounts(1, 1, 1))
    b = MetricsReport(NodeCounts(2, 2, 1, 1), EdgeCounts(1, 1, 0, 0), ArrowCounts(1, 2, 1))
    total = a + b
    assert total.node.pred == 4 and total.edge.gt == 2 and total.arrowhead.gt == 3
    table = total.to_table()
    assert "edge precision" in table and "arrowhead recall" in table
    d = total.to_dict()
    assert set(d) == {"node", "edge", "arrowhead", "counts"}
    assert d["node"]["f1"] == total.node.f1


def test_score_graphs_counts_diagnostic_arrowheads():
    nodes = _grid_nodes(2)
    gt = _graph(nodes, [("n000", "n001", None)])
    pred = _graph(nodes, [])
    pred.diagnostics.append({"arrowhead": "a001", "reason": "no-source-reached"})
    report = score_graphs(pred, gt)
    assert report.arrowhead.pred == 1
    assert report.arrowhead.recall == 1.0
