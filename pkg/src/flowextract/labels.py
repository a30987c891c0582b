"""Decision-label extraction from OCR sidecars and assignment to edges.

Sidecar files stand in for a live OCR engine: each token carries text, a
center point, and a bbox. Tokens reading "ja"/"nee" that sit outside every
node box are branch labels; they attach to the nearest eligible edge by
distance to the edge's arc-length midpoint.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from pathlib import Path

from .edgetrace import TracedEdge
from .errors import SchemaViolationError
from .geometry import BoundingBox, Point, dist, polyline_length, polyline_point_at
from .nodedetect import DetectedNode, NodeClass

LABEL_VALUES = ("ja", "nee")


@dataclass(frozen=True)
class OcrToken:
    text: str
    center: Point
    bbox: BoundingBox

    def __post_init__(self):
        if not self.bbox.contains(self.center):
            raise ValueError(f"token center {self.center} outside bbox {self.bbox}")


@dataclass
class OcrSidecar:
    tokens: list[OcrToken]


@dataclass(frozen=True)
class DecisionLabel:
    value: str  # "ja" | "nee"
    position: Point

    def __post_init__(self):
        if self.value not in LABEL_VALUES:
            raise ValueError(f"label value must be ja or nee, got {self.value!r}")


@dataclass
class UnassignedLabel:
    value: str
    position: Point
    reason: str = "unassigned-label"


def load_sidecar(path: str | Path) -> OcrSidecar:
    """Parse sidecar JSON: {"tokens": [{"text", "center": [x,y], "bbox": [x,y,w,h]}]}."""
    path = Path(path)
    try:
        payload = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise SchemaViolationError(f"{path}: not valid JSON: {e}") from e
    if not isinstance(payload, dict) or not isinstance(payload.get("tokens"), list):
        raise SchemaViolationError(f"{path}: expected top-level object with 'tokens' list")
    tokens = []
    for i, t in enumerate(payload["tokens"]):
        where = f"{path}: tokens[{i}]"
        if not isinstance(t, dict):
            raise SchemaViolationError(f"{where}: token must be an object")
        try:
            text = t["text"]
            cx, cy = t["center"]
            x, y, w, h = t["bbox"]
        except (KeyError, TypeError, ValueError) as e:
            raise SchemaViolationError(f"{where}: needs 'text', 'center' [x,y], 'bbox' [x,y,w,h]") from e
        if not isinstance(text, str):
            raise SchemaViolationError(f"{where}: 'text' must be a string")
        try:
            token = OcrToken(text=text, center=(float(cx), float(cy)), bbox=BoundingBox(int(x), int(y), int(w), int(h)))
        except ValueError as e:
            raise SchemaViolationError(f"{where}: {e}") from e
        tokens.append(token)
    return OcrSidecar(tokens=tokens)


def extract_labels(
    sidecar: OcrSidecar,
    nodes: list[DetectedNode],
    aliases: dict[str, str] | None = None,
) -> list[DecisionLabel]:
    """Tokens equal (lowercased, trimmed) to ja/nee outside every node bbox.

    `aliases` maps alternative spellings ("yes" -> "ja") for other corpora.
    """
    aliases = aliases or {}
    out = []
    for t in sidecar.tokens:
        word = t.text.strip().lower()
        word = aliases.get(word, word)
        if word not in LABEL_VALUES:
            continue
        if any(n.bbox.contains(t.center) for n in nodes):
            continue
        out.append(DecisionLabel(value=word, position=t.center))
    return out


def path_midpoint(path: list[Point]) -> Point:
    """Point at half the cumulative arc length of a polyline."""
    return polyline_point_at(path, polyline_length(path) / 2.0)


def assign_labels(
    edges: list[TracedEdge],
    labels: list[DecisionLabel],
    nodes: list[DetectedNode],
    max_dist: float = 40.0,
) -> tuple[list[TracedEdge], list[UnassignedLabel]]:
    """Greedy ascending-distance matching of labels to decision-sourced edges.

    Each label lands on at most one edge, each edge takes at most one label;
    leftovers come back as diagnostics. Edge order is preserved.
    """
    class_by_id = {n.id: n.node_class for n in nodes}
    eligible = [i for i, e in enumerate(edges) if class_by_id.get(e.source) == NodeClass.DECISION]
    mids = {i: path_midpoint(edges[i].path) for i in eligible}

    pairs = []
    for li, lab in enumerate(labels):
        for ei in eligible:
            d = dist(lab.position, mids[ei])
            if d <= max_dist:
                pairs.append((d, li, ei))
    pairs.sort()

    label_used: set[int] = set()
    edge_used: set[int] = set()
    assignment: dict[int, str] = {}
    for d, li, ei in pairs:
        if li in label_used or ei in edge_used:
            continue
        label_used.add(li)
        edge_used.add(ei)
        assignment[ei] = labels[li].value

    out = [replace(e, label=assignment.get(i, e.label)) for i, e in enumerate(edges)]
    leftovers = [
        UnassignedLabel(value=lab.value, position=lab.position)
        for li, lab in enumerate(labels)
        if li not in label_used
    ]
    return out, leftovers
