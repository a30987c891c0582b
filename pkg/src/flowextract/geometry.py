"""Shared geometric primitives: bounding boxes, point/segment distances,
polygon measures.

Points are (x, y) tuples in pixel coordinates, y growing downward.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

Point = tuple[float, float]


@dataclass(frozen=True)
class BoundingBox:
    """Axis-aligned box: (x, y) is the top-left corner, w/h its extent."""

    x: int
    y: int
    w: int
    h: int

    def __post_init__(self):
        if self.w <= 0 or self.h <= 0:
            raise ValueError(f"bounding box must have positive extent, got {self}")
        if self.x < 0 or self.y < 0:
            raise ValueError(f"bounding box origin must be non-negative, got {self}")

    @property
    def right(self) -> int:
        return self.x + self.w

    @property
    def bottom(self) -> int:
        return self.y + self.h

    @property
    def center(self) -> Point:
        return (self.x + self.w / 2.0, self.y + self.h / 2.0)

    def contains(self, p: Point) -> bool:
        return self.x <= p[0] < self.right and self.y <= p[1] < self.bottom

    def grow(self, d: int) -> "BoundingBox":
        """Box expanded by d on every side, clamped to non-negative origin."""
        x = max(0, self.x - d)
        y = max(0, self.y - d)
        return BoundingBox(x, y, self.w + (self.x - x) + d, self.h + (self.y - y) + d)

    def distance_to_point(self, p: Point) -> float:
        """Euclidean distance from p to the box (0 when p is inside)."""
        dx = max(self.x - p[0], 0.0, p[0] - self.right)
        dy = max(self.y - p[1], 0.0, p[1] - self.bottom)
        return math.hypot(dx, dy)

    def intersects_interior(self, other: "BoundingBox") -> bool:
        """True when the open interiors overlap (shared borders do not count)."""
        return (
            self.x < other.right
            and other.x < self.right
            and self.y < other.bottom
            and other.y < self.bottom
        )

    def as_list(self) -> list[int]:
        return [self.x, self.y, self.w, self.h]


def dist(a: Point, b: Point) -> float:
    return math.hypot(a[0] - b[0], a[1] - b[1])


def normalize(v: Point) -> Point:
    n = math.hypot(v[0], v[1])
    if n == 0:
        raise ValueError("cannot normalize a zero vector")
    return (v[0] / n, v[1] / n)


def point_segment_distance(p: Point, a: Point, b: Point) -> float:
    """Distance from p to the closed segment a-b."""
    proj, _ = project_onto_segment(p, a, b)
    return dist(p, proj)


def project_onto_segment(p: Point, a: Point, b: Point) -> tuple[Point, float]:
    """Closest point on segment a-b to p, and its parameter t in [0, 1]."""
    ax, ay = a
    bx, by = b
    dx, dy = bx - ax, by - ay
    L2 = dx * dx + dy * dy
    if L2 == 0:
        return a, 0.0
    t = ((p[0] - ax) * dx + (p[1] - ay) * dy) / L2
    t = max(0.0, min(1.0, t))
    return (ax + t * dx, ay + t * dy), t


def segment_box_approach(p1: Point, p2: Point, box: "BoundingBox") -> tuple[float, Point]:
    """Closest approach between segment p1-p2 and a box: (distance, point on
    the segment where it is attained). Distance 0 when they intersect."""
    best_d = box.distance_to_point(p1)
    best_p = p1
    d2 = box.distance_to_point(p2)
    if d2 < best_d:
        best_d, best_p = d2, p2
    corners = [
        (float(box.x), float(box.y)),
        (float(box.right), float(box.y)),
        (float(box.x), float(box.bottom)),
        (float(box.right), float(box.bottom)),
    ]
    for c in corners:
        proj, _ = project_onto_segment(c, p1, p2)
        d = dist(c, proj)
        if d < best_d:
            best_d, best_p = d, proj
    if best_d > 0:
        # Liang-Barsky clip detects an interior crossing exactly
        dx, dy = p2[0] - p1[0], p2[1] - p1[1]
        t0, t1 = 0.0, 1.0
        ok = True
        for p, q in (
            (-dx, p1[0] - box.x),
            (dx, box.right - p1[0]),
            (-dy, p1[1] - box.y),
            (dy, box.bottom - p1[1]),
        ):
            if p == 0:
                if q < 0:
                    ok = False
                    break
            else:
                r = q / p
                if p < 0:
                    t0 = max(t0, r)
                else:
                    t1 = min(t1, r)
        if ok and t0 <= t1:
            best_d = 0.0
            best_p = (p1[0] + t0 * dx, p1[1] + t0 * dy)
    return best_d, best_p


def polygon_area(pts: list[Point]) -> float:
    """Unsigned shoelace area of a closed polygon (vertices in order)."""
    n = len(pts)
    s = 0.0
    for i in range(n):
        x1, y1 = pts[i]
        x2, y2 = pts[(i + 1) % n]
        s += x1 * y2 - x2 * y1
    return abs(s) / 2.0


def polyline_length(pts: list[Point]) -> float:
    return sum(dist(pts[i], pts[i + 1]) for i in range(len(pts) - 1))


def polyline_point_at(pts: list[Point], target: float) -> Point:
    """Point at arc length `target` along the polyline (clamped to its ends)."""
    if len(pts) == 1:
        return pts[0]
    remaining = max(0.0, target)
    for i in range(len(pts) - 1):
        seg = dist(pts[i], pts[i + 1])
        if remaining <= seg or i == len(pts) - 2:
            if seg == 0:
                return pts[i]
            t = min(1.0, remaining / seg)
            return (
                pts[i][0] + t * (pts[i + 1][0] - pts[i][0]),
                pts[i][1] + t * (pts[i + 1][1] - pts[i][1]),
            )
        remaining -= seg
    return pts[-1]


def angle_between_axes(d1: Point, d2: Point) -> float:
    """Smallest angle in degrees between two undirected directions."""
    n1, n2 = normalize(d1), normalize(d2)
    c = abs(n1[0] * n2[0] + n1[1] * n2[1])
    return math.degrees(math.acos(min(1.0, c)))


def angle_between_vectors(d1: Point, d2: Point) -> float:
    """Angle in degrees between two directed vectors."""
    n1, n2 = normalize(d1), normalize(d2)
    c = n1[0] * n2[0] + n1[1] * n2[1]
    return math.degrees(math.acos(max(-1.0, min(1.0, c))))


def convex_hull(pts: list[Point]) -> list[Point]:
    """Andrew's monotone chain; returns hull vertices counter-clockwise
    (screen coordinates, y down), collinear points removed."""
    pts = sorted(set(pts))
    if len(pts) <= 2:
        return list(pts)

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower: list[Point] = []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list[Point] = []
    for p in reversed(pts):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]
