"""Detection and classification of flowchart elements.

Two paths produce the same DetectedNode records: a geometric classifier that
works off closed ink contours (for clean rendered diagrams), and an ingestion
path for external detector output. Unclassifiable shapes are dropped rather
than guessed: a missing node costs recall, a wrong one poisons edges.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path

import numpy as np

from .contours import Component, contour_perimeter, label_components, simplify_closed, trace_outer_contour
from .errors import SchemaViolationError
from .geometry import BoundingBox, Point, dist, polygon_area
from .raster import BinaryImage


class NodeClass(str, Enum):
    PROCESS = "process"
    DECISION = "decision"
    DOCUMENT = "document"
    TERMINATOR = "terminator"
    CONNECTOR = "connector"


@dataclass
class DetectedNode:
    id: str
    node_class: NodeClass
    bbox: BoundingBox
    confidence: float = 1.0
    text: str = ""

    def __post_init__(self):
        if not 0.0 <= self.confidence <= 1.0:
            raise ValueError(f"confidence out of [0,1]: {self.confidence}")


@dataclass
class ShapeParams:
    """Tunables of the geometric classifier (documented defaults)."""

    min_shape_area: int = 400  # px^2, pixel count of the outline component
    poly_epsilon_frac: float = 0.02  # Douglas-Peucker tolerance, fraction of perimeter
    angle_tol_deg: float = 10.0
    circularity_min: float = 0.75
    corner_fill_max: float = 0.15
    wavy_min_frac: float = 0.08
    rect_fill_min: float = 0.85
    corner_window_frac: float = 0.15
    min_side: int = 24  # px; rejects connector polylines, which are thin
    max_aspect: float = 4.0
    footprint_min: float = 0.25  # enclosed area / bbox area; diamonds sit at 0.5
    reject_border_cover_min: float = 0.7  # masking heuristic for broken glyphs


def _side_angles_axis_aligned(approx: list[Point], tol_deg: float) -> bool:
    """True when all four sides are within tol of horizontal or vertical."""
    horiz = vert = 0
    for i in range(4):
        x1, y1 = approx[i]
        x2, y2 = approx[(i + 1) % 4]
        ang = math.degrees(math.atan2(abs(y2 - y1), abs(x2 - x1)))
        if ang <= tol_deg:
            horiz += 1
        elif ang >= 90.0 - tol_deg:
            vert += 1
        else:
            return False
    return horiz == 2 and vert == 2


def _is_diamond(approx: list[Point], bbox: BoundingBox) -> bool:
    """Four vertices sitting near the midpoints of the bbox edges."""
    if len(approx) != 4:
        return False
    cx, cy = bbox.center
    mids = [
        (cx, float(bbox.y)),
        (float(bbox.right - 1), cy),
        (cx, float(bbox.bottom - 1)),
        (float(bbox.x), cy),
    ]
    tol = max(4.0, 0.15 * min(bbox.w, bbox.h))
    taken = [False] * 4
    for v in approx:
        best_i, best_d = -1, float("inf")
        for i, m in enumerate(mids):
            if not taken[i]:
                d = dist(v, m)
                if d < best_d:
                    best_d, best_i = d, i
        if best_d > tol:
            return False
        taken[best_i] = True
    return all(taken)


def _top_corner_ink_ratio(comp: Component, frac: float) -> float:
    """Mean ink fill of square windows at the two top bbox corners.

    Sharp-cornered shapes route their stroke through these windows; rounded
    ends (terminators) leave them nearly empty.
    """
    b = comp.bbox
    s = max(3, int(round(frac * min(b.w, b.h))))
    m = comp.mask
    tl = m[:s, :s]
    tr = m[:s, b.w - s :]
    return float((tl.sum() + tr.sum()) / (2.0 * s * s))


def _bottom_profile_spread(comp: Component) -> float:
    """Spread of the lowest-ink row per column, over the central 60% of the
    width, as a fraction of the component height."""
    b = comp.bbox
    lo = int(round(0.2 * b.w))
    hi = max(lo + 1, int(round(0.8 * b.w)))
    spread_max, spread_min = -1, 1 << 30
    for col in range(lo, hi):
        ys = np.nonzero(comp.mask[:, col])[0]
        if len(ys) == 0:
            continue
        y = int(ys.max())
        spread_max = max(spread_max, y)
        spread_min = min(spread_min, y)
    if spread_max < 0:
        return 0.0
    return (spread_max - spread_min) / float(b.h)


def _border_coverage(comp: Component, band: int = 4) -> float:
    """Mean fraction of each bbox edge backed by ink within `band` px.

    Closed (or nearly closed) rectangle-family outlines hug all four bbox
    edges; connector polylines touch at most two.
    """
    m = comp.mask
    h, w = m.shape
    band = min(band, h, w)
    top = m[:band, :].any(axis=0).mean()
    bot = m[-band:, :].any(axis=0).mean()
    left = m[:, :band].any(axis=1).mean()
    right = m[:, -band:].any(axis=1).mean()
    return float((top + bot + left + right) / 4.0)


def _axis_run_fraction(comp: Component) -> float:
    """Fraction of ink pixels sitting inside a 5-long horizontal or vertical
    run; orthogonal connector strokes score near 1, diagonal or curved
    glyph strokes score low."""
    m = comp.mask
    pad = np.pad(m, 2)
    c = pad[2:-2, 2:-2]
    horiz = c & pad[2:-2, :-4] & pad[2:-2, 4:]
    vert = c & pad[:-4, 2:-2] & pad[4:, 2:-2]
    return float((horiz | vert).sum() / max(1, m.sum()))


def _max_line_deviation(comp: Component) -> float:
    """Largest perpendicular distance of the component's pixels from their
    principal axis; near zero for a single straight stroke."""
    pts = comp.pixel_coords().astype(np.float64)
    pts -= pts.mean(axis=0)
    cov = pts.T @ pts / len(pts)
    evals, evecs = np.linalg.eigh(cov)
    minor = evecs[:, 0]
    return float(np.abs(pts @ minor).max())


def _shape_band_fit(comp: Component) -> float:
    """Best fraction of pixels on either the bbox-inscribed diamond or the
    inscribed ring; broken decision/connector outlines stay close to one of
    those loci even when the closed contour is gone."""
    b = comp.bbox
    pts = comp.pixel_coords().astype(np.float64)
    cx, cy = b.x + (b.w - 1) / 2.0, b.y + (b.h - 1) / 2.0
    hw, hh = max(1.0, (b.w - 1) / 2.0), max(1.0, (b.h - 1) / 2.0)
    dx = np.abs(pts[:, 0] - cx)
    dy = np.abs(pts[:, 1] - cy)
    diamond = np.abs(dx / hw + dy / hh - 1.0) <= 0.18
    r = (hw + hh) / 2.0
    ring = np.abs(np.hypot(dx, dy) - r) <= max(2.5, 0.15 * r)
    n = len(pts)
    return max(float(diamond.sum()) / n, float(ring.sum()) / n)


def _interior_hole_boxes(comp: Component, params: ShapeParams) -> list[BoundingBox]:
    """Node-scale enclosed background regions of a component.

    A damaged glyph merged with its connectors still encloses its interior;
    masking that region (plus the surrounding stroke) keeps the dead node's
    outline from conducting traversals. Connector polylines enclose nothing.
    """
    from scipy import ndimage as _ndi

    filled = _ndi.binary_fill_holes(comp.mask)
    holes = filled & ~comp.mask
    if not holes.any():
        return []
    out = []
    pad = 5  # cover the stroke around the enclosed region
    for hole in label_components(holes):
        if hole.area < params.min_shape_area or min(hole.bbox.w, hole.bbox.h) < params.min_side:
            continue
        x = max(0, hole.bbox.x + comp.bbox.x - pad)
        y = max(0, hole.bbox.y + comp.bbox.y - pad)
        out.append(BoundingBox(x, y, hole.bbox.w + 2 * pad, hole.bbox.h + 2 * pad))
    return out


def _looks_like_broken_glyph(comp: Component, params: ShapeParams) -> bool:
    """Should an unclassifiable node-scale component be masked before line
    detection? True for glyph outlines damaged by noise; False for anything
    resembling a connector polyline, whose strokes must reach the Hough
    stage."""
    if min(comp.bbox.w, comp.bbox.h) < params.min_side:
        return False
    if _border_coverage(comp) >= params.reject_border_cover_min:
        return True
    if _max_line_deviation(comp) <= 4.0:
        return False  # single straight stroke: a connector
    if 1.0 - _axis_run_fraction(comp) >= 0.5:
        return True  # mostly diagonal/curved: diamond or circle debris
    return _shape_band_fit(comp) >= 0.8


def classify_component(comp: Component, params: ShapeParams) -> NodeClass | None:
    """Classify one ink component into a node class, or None to skip it."""
    b = comp.bbox
    if min(b.w, b.h) < params.min_side:
        return None
    aspect = b.w / float(b.h)
    if not (1.0 / params.max_aspect) <= aspect <= params.max_aspect:
        return None
    contour = trace_outer_contour(comp)
    if len(contour) < 8:
        return None
    perimeter = contour_perimeter(contour)
    if perimeter <= 0:
        return None
    area = polygon_area(contour)
    if area < params.footprint_min * b.w * b.h:
        # open polylines and broken outlines enclose almost nothing
        return None
    approx = simplify_closed(contour, params.poly_epsilon_frac * perimeter)
    if len(approx) < 3:
        return None

    rect_fill = area / float(b.w * b.h)
    circularity = 4.0 * math.pi * area / (perimeter * perimeter)

    if _is_diamond(approx, b):
        return NodeClass.DECISION

    if len(approx) == 4 and _side_angles_axis_aligned(approx, params.angle_tol_deg):
        if _bottom_profile_spread(comp) > params.wavy_min_frac:
            return NodeClass.DOCUMENT
        if _top_corner_ink_ratio(comp, params.corner_window_frac) < params.corner_fill_max:
            return NodeClass.TERMINATOR
        return NodeClass.PROCESS

    if circularity > params.circularity_min and 0.8 <= aspect <= 1.25 and len(approx) > 4:
        return NodeClass.CONNECTOR

    if rect_fill >= params.rect_fill_min:
        if _top_corner_ink_ratio(comp, params.corner_window_frac) < params.corner_fill_max:
            return NodeClass.TERMINATOR
        if _bottom_profile_spread(comp) > params.wavy_min_frac:
            return NodeClass.DOCUMENT
        return NodeClass.PROCESS

    return None


def classify_components(
    comps: list[Component], params: ShapeParams | None = None
) -> tuple[list[DetectedNode], list[BoundingBox]]:
    """Classify pre-labeled components; returns (nodes, reject boxes).

    Reject boxes cover node-scale components that failed classification but
    still trace most of their bbox border (typically glyph outlines broken by
    noise). The pipeline masks those too, so their strokes stay out of line
    detection; thin connector polylines are never rejected into this list.
    """
    params = params or ShapeParams()
    nodes: list[DetectedNode] = []
    rejects: list[BoundingBox] = []
    idx = 1
    for comp in comps:
        if comp.area < params.min_shape_area:
            continue
        cls = classify_component(comp, params)
        if cls is None:
            if _looks_like_broken_glyph(comp, params):
                rejects.append(comp.bbox)
            else:
                rejects.extend(_interior_hole_boxes(comp, params))
            continue
        nodes.append(DetectedNode(id=f"n{idx:03d}", node_class=cls, bbox=comp.bbox, confidence=1.0))
        idx += 1
    return nodes, rejects


def detect_nodes_geometric(img: BinaryImage, params: ShapeParams | None = None) -> list[DetectedNode]:
    """Detect and classify node glyphs from closed ink contours.

    Components are visited in raster-scan order of their top-left corner, so
    id assignment ("n001", ...) is deterministic for identical input bytes.
    """
    comps = label_components(img.data)
    nodes, _ = classify_components(comps, params)
    return nodes


_ALLOWED_CLASSES = {c.value for c in NodeClass} | {"arrowhead"}


def load_detection_file(path: str | Path) -> tuple[list[DetectedNode], list[BoundingBox]]:
    """Parse external detection JSON into (nodes, arrowhead boxes).

    Schema: {"detections": [{"id", "class", "bbox": [x,y,w,h], "confidence"}]}.
    Arrowhead entries carry only geometry; their orientation is recovered
    later from the image.
    """
    path = Path(path)
    try:
        payload = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise SchemaViolationError(f"{path}: not valid JSON: {e}") from e
    if not isinstance(payload, dict) or "detections" not in payload:
        raise SchemaViolationError(f"{path}: top-level object must contain 'detections'")
    entries = payload["detections"]
    if not isinstance(entries, list):
        raise SchemaViolationError(f"{path}: 'detections' must be a list")

    nodes: list[DetectedNode] = []
    arrow_boxes: list[BoundingBox] = []
    seen_ids: set[str] = set()
    for i, e in enumerate(entries):
        where = f"{path}: detections[{i}]"
        if not isinstance(e, dict):
            raise SchemaViolationError(f"{where}: entry must be an object")
        for key in ("id", "class", "bbox", "confidence"):
            if key not in e:
                raise SchemaViolationError(f"{where}: missing field '{key}'")
        det_id = e["id"]
        if not isinstance(det_id, str) or not det_id:
            raise SchemaViolationError(f"{where}: 'id' must be a non-empty string")
        if det_id in seen_ids:
            raise SchemaViolationError(f"{where}: duplicate id '{det_id}'")
        seen_ids.add(det_id)
        cls = e["class"]
        if cls not in _ALLOWED_CLASSES:
            raise SchemaViolationError(f"{where}: unknown class '{cls}'")
        bbox = e["bbox"]
        if (
            not isinstance(bbox, list)
            or len(bbox) != 4
            or not all(isinstance(v, int) and not isinstance(v, bool) for v in bbox)
        ):
            raise SchemaViolationError(f"{where}: 'bbox' must be [x, y, w, h] integers")
        x, y, w, h = bbox
        if w <= 0 or h <= 0 or x < 0 or y < 0:
            raise SchemaViolationError(f"{where}: bbox must have non-negative origin and positive size")
        conf = e["confidence"]
        if not isinstance(conf, (int, float)) or isinstance(conf, bool) or not 0.0 <= conf <= 1.0:
            raise SchemaViolationError(f"{where}: 'confidence' must be a number in [0, 1]")
        box = BoundingBox(x, y, w, h)
        if cls == "arrowhead":
            arrow_boxes.append(box)
        else:
            nodes.append(DetectedNode(id=det_id, node_class=NodeClass(cls), bbox=box, confidence=float(conf)))
    return nodes, arrow_boxes


def ingest_detections(path: str | Path) -> list[DetectedNode]:
    """Load node detections from external detector JSON (arrowhead entries
    are consumed by the arrowhead stage, not returned here)."""
    nodes, _ = load_detection_file(path)
    return nodes


def attach_text(nodes: list[DetectedNode], sidecar) -> list[DetectedNode]:
    """Assign each node the space-joined text of all sidecar tokens whose
    center lies inside its bbox, in sidecar order. Returns new records."""
    out = []
    for n in nodes:
        words = [t.text for t in sidecar.tokens if n.bbox.contains(t.center)]
        out.append(replace(n, text=" ".join(words)))
    return out
