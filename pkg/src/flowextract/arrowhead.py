"""Arrowhead detection and orientation.

Arrowheads anchor every proposed edge: the tip marks the target node, the
blunt base points back along the connector toward the source. Detection is
conservative; any blob that fails the area / solidity / triangularity gates
is skipped rather than guessed.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from .contours import Component, label_components
from .geometry import BoundingBox, Point, convex_hull, dist, normalize, polygon_area
from .nodedetect import DetectedNode
from .raster import BinaryImage


@dataclass
class Arrowhead:
    id: str
    bbox: BoundingBox
    tip: Point
    blunt: Point
    direction: Point  # unit vector from blunt toward tip

    def __post_init__(self):
        if self.tip == self.blunt:
            raise ValueError("arrowhead tip and blunt end must differ")


@dataclass
class ArrowParams:
    area_min: int = 30  # px^2
    area_max: int = 400
    solidity_min: float = 0.8
    triangularity_min: float = 0.8  # best inscribed triangle / hull area
    target_tol: float = 15.0  # px, assign_target cutoff
    ambiguity_ratio: float = 1.08  # below this, fall back to nearest-node rule


def _largest_triangle(hull: list[Point]) -> tuple[float, tuple[Point, Point, Point] | None]:
    """Max-area triangle over hull vertices (hulls here are tiny)."""
    best_area, best = 0.0, None
    for a, b, c in combinations(hull, 3):
        area = abs((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1])) / 2.0
        if area > best_area:
            best_area, best = area, (a, b, c)
    return best_area, best


def _farness(hull: list[Point], v: Point) -> float:
    """Distance from v to the centroid of the remaining hull vertices."""
    others = [p for p in hull if p != v]
    cx = sum(p[0] for p in others) / len(others)
    cy = sum(p[1] for p in others) / len(others)
    return dist(v, (cx, cy))


def _nearest_node_distance(p: Point, nodes: list[DetectedNode]) -> float:
    if not nodes:
        return float("inf")
    return min(n.bbox.distance_to_point(p) for n in nodes)


def _orient(
    hull: list[Point], tri: tuple[Point, Point, Point], nodes: list[DetectedNode], ambiguity_ratio: float
) -> tuple[Point, Point]:
    """Pick (tip, blunt) for a triangular blob.

    The tip is the hull vertex farthest from the centroid of the others; when
    the margin over the runner-up is small the blob is near-equilateral, and
    the end closest to a node element wins instead.
    """
    scored = sorted(((_farness(hull, v), v) for v in tri), reverse=True)
    candidates = []
    for _, v in scored:
        others = [p for p in tri if p != v]
        blunt = ((others[0][0] + others[1][0]) / 2.0, (others[0][1] + others[1][1]) / 2.0)
        candidates.append((v, blunt))
    tip, blunt = candidates[0]
    if scored[1][0] > 0 and scored[0][0] / scored[1][0] < ambiguity_ratio and nodes:
        tip, blunt = min(candidates, key=lambda tb: _nearest_node_distance(tb[0], nodes))
    return tip, blunt


def _head_from_component(
    comp: Component, nodes: list[DetectedNode], params: ArrowParams
) -> tuple[Point, Point] | None:
    """Geometric gates + orientation; None when the blob is not a clean head."""
    if not params.area_min <= comp.area <= params.area_max:
        return None
    pts = [(float(x), float(y)) for x, y in comp.pixel_coords()]
    hull = convex_hull(pts)
    if len(hull) < 3:
        return None
    hull_area = polygon_area(hull)
    if hull_area <= 0:
        return None
    solidity = comp.area / hull_area
    if solidity <= params.solidity_min:
        return None
    tri_area, tri = _largest_triangle(hull)
    if tri is None or tri_area / hull_area < params.triangularity_min:
        return None
    tip, blunt = _orient(hull, tri, nodes, params.ambiguity_ratio)
    if tip == blunt:
        return None
    return tip, blunt


def detect_arrowheads(
    img: BinaryImage,
    nodes: list[DetectedNode],
    params: ArrowParams | None = None,
    components: list[Component] | None = None,
) -> list[Arrowhead]:
    """Find filled triangular arrowheads outside all node boxes.

    Pass `components` to reuse a labeling already computed for this image.
    Ids ("a001", ...) follow raster-scan order of the accepted components.
    """
    params = params or ArrowParams()
    if components is None:
        components = label_components(img.data)
    heads: list[Arrowhead] = []
    idx = 1
    for comp in components:
        if comp.area > params.area_max or comp.area < params.area_min:
            continue
        if any(comp.bbox.intersects_interior(n.bbox) for n in nodes):
            continue
        oriented = _head_from_component(comp, nodes, params)
        if oriented is None:
            continue
        tip, blunt = oriented
        heads.append(
            Arrowhead(
                id=f"a{idx:03d}",
                bbox=comp.bbox,
                tip=tip,
                blunt=blunt,
                direction=normalize((tip[0] - blunt[0], tip[1] - blunt[1])),
            )
        )
        idx += 1
    return heads


def arrowheads_from_boxes(
    img: BinaryImage,
    boxes: list[BoundingBox],
    nodes: list[DetectedNode],
    params: ArrowParams | None = None,
) -> list[Arrowhead]:
    """Recover orientation for externally detected arrowhead boxes.

    External detectors emit only bboxes; the largest ink component inside
    each box (grown 2 px) is oriented with the same geometric rule. Boxes
    with no usable blob are skipped.
    """
    params = params or ArrowParams()
    heads: list[Arrowhead] = []
    idx = 1
    for box in boxes:
        g = box.grow(2)
        window = img.data[g.y : min(img.height, g.bottom), g.x : min(img.width, g.right)]
        if window.size == 0 or not window.any():
            continue
        comps = label_components(window)
        if not comps:
            continue
        comp = max(comps, key=lambda c: c.area)
        shifted = Component(
            bbox=BoundingBox(comp.bbox.x + g.x, comp.bbox.y + g.y, comp.bbox.w, comp.bbox.h),
            mask=comp.mask,
            area=comp.area,
        )
        oriented = _head_from_component(shifted, nodes, params)
        if oriented is None:
            continue
        tip, blunt = oriented
        heads.append(
            Arrowhead(
                id=f"a{idx:03d}",
                bbox=shifted.bbox,
                tip=tip,
                blunt=blunt,
                direction=normalize((tip[0] - blunt[0], tip[1] - blunt[1])),
            )
        )
        idx += 1
    return heads


def assign_target(a: Arrowhead, nodes: list[DetectedNode], tol: float = 15.0) -> str | None:
    """Id of the node whose bbox boundary is nearest to the tip, within tol.

    Ties break toward the smaller node id; None when nothing is close enough.
    """
    best_id, best_d = None, float("inf")
    for n in sorted(nodes, key=lambda n: n.id):
        d = n.bbox.distance_to_point(a.tip)
        if d < best_d:
            best_d, best_id = d, n.id
    if best_id is None or best_d > tol:
        return None
    return best_id
