"""Evaluation protocol: IoU box matching and per-task precision/recall/F1.

Detections match ground truth one-to-one by greedy descending IoU with a
strict threshold (IoU must exceed it, equality does not count). Edge scoring
maps predicted nodes onto ground-truth nodes through the box matching, then
compares directed (source, target) pairs; label accuracy is conditional on
correct edges. Counts are kept alongside the ratios so corpus-level numbers
micro-average cleanly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .geometry import BoundingBox, Point, dist
from .graph import FlowGraph


def iou(a: BoundingBox, b: BoundingBox) -> float:
    """Intersection over union of two boxes; 0 when disjoint, 1 iff equal."""
    ix = min(a.x + a.w, b.x + b.w) - max(a.x, b.x)
    iy = min(a.y + a.h, b.y + b.h) - max(a.y, b.y)
    if ix <= 0 or iy <= 0:
        return 0.0
    inter = float(ix) * float(iy)
    union = float(a.w) * a.h + float(b.w) * b.h - inter
    return inter / union


@dataclass
class MatchResult:
    pairs: list[tuple[int, int, float]]  # (pred index, gt index, iou)
    unmatched_pred: list[int]
    unmatched_gt: list[int]


def match_boxes(pred: list[BoundingBox], gt: list[BoundingBox], threshold: float = 0.5) -> MatchResult:
    """One-to-one greedy matching in descending IoU order.

    Only pairs with iou strictly above `threshold` are eligible; ties break
    by (pred index, gt index), which also makes the result independent of
    input permutation.
    """
    if not 0.0 < threshold < 1.0:
        raise ValueError(f"threshold must be in (0, 1), got {threshold}")
    candidates = []
    for pi, pb in enumerate(pred):
        for gi, gb in enumerate(gt):
            v = iou(pb, gb)
            if v > threshold:
                candidates.append((-v, pi, gi))
    candidates.sort()
    used_p: set[int] = set()
    used_g: set[int] = set()
    pairs = []
    for neg_v, pi, gi in candidates:
        if pi in used_p or gi in used_g:
            continue
        used_p.add(pi)
        used_g.add(gi)
        pairs.append((pi, gi, -neg_v))
    return MatchResult(
        pairs=pairs,
        unmatched_pred=[i for i in range(len(pred)) if i not in used_p],
        unmatched_gt=[i for i in range(len(gt)) if i not in used_g],
    )


def _prf(matched: int, n_pred: int, n_gt: int) -> tuple[float, float, float]:
    precision = matched / n_pred if n_pred > 0 else 0.0
    recall = matched / n_gt if n_gt > 0 else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0
    return precision, recall, f1


@dataclass
class NodeCounts:
    pred: int = 0
    gt: int = 0
    matched: int = 0
    class_correct: int = 0

    def __add__(self, other: "NodeCounts") -> "NodeCounts":
        return NodeCounts(
            self.pred + other.pred,
            self.gt + other.gt,
            self.matched + other.matched,
            self.class_correct + other.class_correct,
        )

    @property
    def precision(self) -> float:
        return _prf(self.matched, self.pred, self.gt)[0]

    @property
    def recall(self) -> float:
        return _prf(self.matched, self.pred, self.gt)[1]

    @property
    def f1(self) -> float:
        return _prf(self.matched, self.pred, self.gt)[2]

    @property
    def classification_accuracy(self) -> float:
        return self.class_correct / self.matched if self.matched > 0 else 0.0


@dataclass
class EdgeCounts:
    pred: int = 0
    gt: int = 0
    correct: int = 0
    label_correct: int = 0

    def __add__(self, other: "EdgeCounts") -> "EdgeCounts":
        return EdgeCounts(
            self.pred + other.pred,
            self.gt + other.gt,
            self.correct + other.correct,
            self.label_correct + other.label_correct,
        )

    @property
    def precision(self) -> float:
        return _prf(self.correct, self.pred, self.gt)[0]

    @property
    def recall(self) -> float:
        return _prf(self.correct, self.pred, self.gt)[1]

    @property
    def f1(self) -> float:
        return _prf(self.correct, self.pred, self.gt)[2]

    @property
    def label_accuracy(self) -> float:
        return self.label_correct / self.correct if self.correct > 0 else 0.0


@dataclass
class ArrowCounts:
    pred: int = 0
    gt: int = 0
    matched: int = 0

    def __add__(self, other: "ArrowCounts") -> "ArrowCounts":
        return ArrowCounts(self.pred + other.pred, self.gt + other.gt, self.matched + other.matched)

    @property
    def recall(self) -> float:
        return self.matched / self.gt if self.gt > 0 else 0.0


@dataclass
class MetricsReport:
    node: NodeCounts = field(default_factory=NodeCounts)
    edge: EdgeCounts = field(default_factory=EdgeCounts)
    arrowhead: ArrowCounts = field(default_factory=ArrowCounts)

    def __add__(self, other: "MetricsReport") -> "MetricsReport":
        return MetricsReport(
            self.node + other.node, self.edge + other.edge, self.arrowhead + other.arrowhead
        )

    def to_dict(self) -> dict:
        return {
            "node": {
                "precision": self.node.precision,
                "recall": self.node.recall,
                "f1": self.node.f1,
                "classification_accuracy": self.node.classification_accuracy,
            },
            "edge": {
                "precision": self.edge.precision,
                "recall": self.edge.recall,
                "f1": self.edge.f1,
                "label_accuracy": self.edge.label_accuracy,
            },
            "arrowhead": {"recall": self.arrowhead.recall},
            "counts": {
                "nodes_pred": self.node.pred,
                "nodes_gt": self.node.gt,
                "nodes_matched": self.node.matched,
                "edges_pred": self.edge.pred,
                "edges_gt": self.edge.gt,
                "edges_correct": self.edge.correct,
                "arrowheads_pred": self.arrowhead.pred,
                "arrowheads_gt": self.arrowhead.gt,
            },
        }

    def to_table(self) -> str:
        rows = [
            ("node precision", self.node.precision),
            ("node recall", self.node.recall),
            ("node f1", self.node.f1),
            ("node classification accuracy", self.node.classification_accuracy),
            ("edge precision", self.edge.precision),
            ("edge recall", self.edge.recall),
            ("edge f1", self.edge.f1),
            ("edge label accuracy", self.edge.label_accuracy),
            ("arrowhead recall", self.arrowhead.recall),
        ]
        width = max(len(r[0]) for r in rows)
        lines = [f"{name:<{width}}  {value:8.4f}" for name, value in rows]
        support = (
            f"nodes {self.node.pred}/{self.node.gt} pred/gt, "
            f"edges {self.edge.pred}/{self.edge.gt}, "
            f"arrowheads {self.arrowhead.pred}/{self.arrowhead.gt}"
        )
        return "\n".join(lines + ["", f"support: {support}"])


def score_nodes(pred_graph: FlowGraph, gt_graph: FlowGraph, threshold: float = 0.5) -> tuple[NodeCounts, MatchResult]:
    """Node detection + classification counts, plus the underlying matching
    (edge scoring reuses it). Matching is on boxes only; class correctness is
    measured separately over matched pairs."""
    pred_boxes = [n.bbox for n in pred_graph.nodes]
    gt_boxes = [n.bbox for n in gt_graph.nodes]
    m = match_boxes(pred_boxes, gt_boxes, threshold)
    class_correct = sum(
        1 for pi, gi, _ in m.pairs if pred_graph.nodes[pi].type == gt_graph.nodes[gi].type
    )
    counts = NodeCounts(
        pred=len(pred_boxes), gt=len(gt_boxes), matched=len(m.pairs), class_correct=class_correct
    )
    return counts, m


def score_edges(pred_graph: FlowGraph, gt_graph: FlowGraph, node_match: MatchResult) -> EdgeCounts:
    """Directed-edge correctness through the node matching.

    A predicted edge counts when its endpoints map onto ground-truth nodes
    joined by a ground-truth edge of the same direction; each ground-truth
    edge validates one prediction. Label accuracy (ja/nee/none) conditions on
    correct edges.
    """
    pred_to_gt = {pi: gi for pi, gi, _ in node_match.pairs}
    pred_id_to_gt_id = {
        pred_graph.nodes[pi].id: gt_graph.nodes[gi].id for pi, gi in pred_to_gt.items()
    }
    remaining: dict[tuple[str, str], list[str | None]] = {}
    for e in gt_graph.edges:
        remaining.setdefault((e.source, e.target), []).append(e.label)

    counts = EdgeCounts(pred=len(pred_graph.edges), gt=len(gt_graph.edges))
    for e in pred_graph.edges:
        gs = pred_id_to_gt_id.get(e.source)
        gt_ = pred_id_to_gt_id.get(e.target)
        if gs is None or gt_ is None:
            continue
        labels = remaining.get((gs, gt_))
        if not labels:
            continue
        counts.correct += 1
        if e.label in labels:
            labels.remove(e.label)
            counts.label_correct += 1
        else:
            labels.sort(key=lambda v: v or "")
            labels.pop(0)
    return counts


def score_arrowheads_by_tip(
    pred_tips: list[Point], gt_tips: list[Point], max_dist: float = 6.0
) -> ArrowCounts:
    """Greedy tip-distance matching; small glyphs make IoU too brittle here."""
    candidates = []
    for pi, p in enumerate(pred_tips):
        for gi, g in enumerate(gt_tips):
            d = dist(p, g)
            if d <= max_dist:
                candidates.append((d, pi, gi))
    candidates.sort()
    used_p: set[int] = set()
    used_g: set[int] = set()
    matched = 0
    for d, pi, gi in candidates:
        if pi in used_p or gi in used_g:
            continue
        used_p.add(pi)
        used_g.add(gi)
        matched += 1
    return ArrowCounts(pred=len(pred_tips), gt=len(gt_tips), matched=matched)


def arrow_counts_from_totals(pred_count: int, gt_count: int) -> ArrowCounts:
    """Count-based arrowhead recall for serialized graphs, which carry no
    arrowhead geometry: every reported arrowhead (traced edge or arrowhead
    diagnostic) is taken as detected."""
    return ArrowCounts(pred=pred_count, gt=gt_count, matched=min(pred_count, gt_count))


def score_graphs(pred_graph: FlowGraph, gt_graph: FlowGraph, threshold: float = 0.5) -> MetricsReport:
    """Full per-document report from two graph documents."""
    node_counts, m = score_nodes(pred_graph, gt_graph, threshold)
    edge_counts = score_edges(pred_graph, gt_graph, m)
    pred_arrows = len(pred_graph.edges) + sum(1 for d in pred_graph.diagnostics if "arrowhead" in d)
    gt_arrows = len(gt_graph.edges)
    return MetricsReport(
        node=node_counts,
        edge=edge_counts,
        arrowhead=arrow_counts_from_totals(pred_arrows, gt_arrows),
    )
