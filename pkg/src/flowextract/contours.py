"""Connected components, outer-contour tracing, and polygon simplification.

Components use 8-connectivity. Contours are traced with Moore neighborhood
walking and simplified with Douglas-Peucker; both operate on pixel centers,
so a traced polygon's shoelace area approximates the enclosed region of an
outline shape (not the stroke's own pixel count).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .geometry import BoundingBox, Point

_EIGHT = np.ones((3, 3), dtype=int)

# Moore neighborhood in clockwise order starting east (dx, dy)
_MOORE = [(1, 0), (1, 1), (0, 1), (-1, 1), (-1, 0), (-1, -1), (0, -1), (1, -1)]


@dataclass
class Component:
    """One 8-connected ink component, cropped to its bounding box."""

    bbox: BoundingBox
    mask: np.ndarray  # bool window of shape (bbox.h, bbox.w)
    area: int  # pixel count

    def pixel_coords(self) -> np.ndarray:
        """Absolute (x, y) coordinates of the component's pixels, Nx2."""
        ys, xs = np.nonzero(self.mask)
        return np.column_stack((xs + self.bbox.x, ys + self.bbox.y))


def label_components(mask: np.ndarray, min_area: int = 1) -> list[Component]:
    """Extract 8-connected components with at least `min_area` pixels,
    ordered by raster scan of their top-left bbox corner."""
    labels, n = ndimage.label(mask, structure=_EIGHT)
    if n == 0:
        return []
    counts = np.bincount(labels.ravel())
    slices = ndimage.find_objects(labels)
    comps = []
    for i, sl in enumerate(slices, start=1):
        if sl is None or counts[i] < min_area:
            continue
        ys, xs = sl
        window = labels[sl] == i
        bbox = BoundingBox(int(xs.start), int(ys.start), int(xs.stop - xs.start), int(ys.stop - ys.start))
        comps.append(Component(bbox=bbox, mask=window, area=int(counts[i])))
    comps.sort(key=lambda c: (c.bbox.y, c.bbox.x, c.bbox.w, c.bbox.h))
    return comps


def trace_outer_contour(comp: Component) -> list[Point]:
    """Outer boundary of a component as an ordered list of pixel centers.

    Moore-neighbor tracing, clockwise in screen coordinates, starting at the
    raster-first ink pixel. Terminates when the first boundary transition
    repeats (Jacob's criterion), which walks in and out of one-pixel spurs
    without getting stuck. Points are absolute (x, y); the polygon closes
    implicitly from the last point back to the first.
    """
    m = comp.mask
    h, w = m.shape
    ys, xs = np.nonzero(m)
    if len(xs) == 0:
        return []
    start_idx = np.lexsort((xs, ys))[0]
    sx, sy = int(xs[start_idx]), int(ys[start_idx])
    if len(xs) == 1:
        return [(sx + comp.bbox.x, sy + comp.bbox.y)]

    def ink(x: int, y: int) -> bool:
        return 0 <= x < w and 0 <= y < h and m[y, x]

    def dir_index(frm: tuple[int, int], to: tuple[int, int]) -> int:
        return _MOORE.index((to[0] - frm[0], to[1] - frm[1]))

    contour: list[tuple[int, int]] = [(sx, sy)]
    p = (sx, sy)
    back = (sx - 1, sy)  # raster order guarantees the west neighbor is background
    first_transition: tuple[tuple[int, int], tuple[int, int]] | None = None
    max_steps = 4 * (h * w + 2)
    for _ in range(max_steps):
        d0 = dir_index(p, back)
        nxt = None
        for k in range(1, 9):
            d = (d0 + k) % 8
            q = (p[0] + _MOORE[d][0], p[1] + _MOORE[d][1])
            if ink(q[0], q[1]):
                prev = (d0 + k - 1) % 8
                back_candidate = (p[0] + _MOORE[prev][0], p[1] + _MOORE[prev][1])
                nxt = (q, back_candidate)
                break
        if nxt is None:
            break  # no ink neighbor: single-pixel component handled above
        q, new_back = nxt
        if first_transition is None:
            first_transition = (p, q)
        elif (p, q) == first_transition:
            contour.pop()  # the repeated start point was appended last time
            break
        contour.append(q)
        back = new_back
        p = q
    return [(px + comp.bbox.x, py + comp.bbox.y) for px, py in contour]


def _dp_simplify(pts: list[Point], eps: float) -> list[Point]:
    """Douglas-Peucker on an open polyline; keeps both endpoints."""
    if len(pts) <= 2:
        return list(pts)
    ax, ay = pts[0]
    bx, by = pts[-1]
    dx, dy = bx - ax, by - ay
    norm = (dx * dx + dy * dy) ** 0.5
    best_d, best_i = -1.0, -1
    for i in range(1, len(pts) - 1):
        px, py = pts[i]
        if norm == 0:
            d = ((px - ax) ** 2 + (py - ay) ** 2) ** 0.5
        else:
            d = abs(dx * (ay - py) - (ax - px) * dy) / norm
        if d > best_d:
            best_d, best_i = d, i
    if best_d <= eps:
        return [pts[0], pts[-1]]
    left = _dp_simplify(pts[: best_i + 1], eps)
    right = _dp_simplify(pts[best_i:], eps)
    return left[:-1] + right


def simplify_closed(contour: list[Point], eps: float) -> list[Point]:
    """Simplify a closed contour, anchoring at the two farthest-apart points
    so the split does not depend on where tracing started."""
    n = len(contour)
    if n <= 3:
        return list(contour)
    pts = np.asarray(contour, dtype=np.float64)
    # anchor 1: farthest from the centroid; anchor 2: farthest from anchor 1
    centroid = pts.mean(axis=0)
    i1 = int(np.argmax(((pts - centroid) ** 2).sum(axis=1)))
    i2 = int(np.argmax(((pts - pts[i1]) ** 2).sum(axis=1)))
    lo, hi = min(i1, i2), max(i1, i2)
    part1 = contour[lo : hi + 1]
    part2 = contour[hi:] + contour[: lo + 1]
    s1 = _dp_simplify(part1, eps)
    s2 = _dp_simplify(part2, eps)
    out = s1[:-1] + s2[:-1]
    # drop near-duplicate consecutive vertices
    cleaned: list[Point] = []
    for p in out:
        if not cleaned or (abs(p[0] - cleaned[-1][0]) + abs(p[1] - cleaned[-1][1])) > 1e-9:
            cleaned.append(p)
    if len(cleaned) > 1 and cleaned[0] == cleaned[-1]:
        cleaned.pop()
    return cleaned


def contour_perimeter(contour: list[Point]) -> float:
    """Arc length of the closed contour polygon."""
    n = len(contour)
    if n < 2:
        return 0.0
    total = 0.0
    for i in range(n):
        x1, y1 = contour[i]
        x2, y2 = contour[(i + 1) % n]
        total += ((x2 - x1) ** 2 + (y2 - y1) ** 2) ** 0.5
    return total
