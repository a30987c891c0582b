"""Rasterization primitives for synthetic diagrams.

Everything paints ink (value 0) onto a uint8 canvas initialized to 255 and
returns the bounding box of the painted pixels, which the generator records
as exact ground truth. No anti-aliasing anywhere: determinism and crisp
binarization matter more than looks.
"""

from __future__ import annotations

import math

import numpy as np

from .geometry import BoundingBox, Point

INK = 0


def _paint(canvas: np.ndarray, mask: np.ndarray, x0: int, y0: int) -> BoundingBox | None:
    """Blit a local boolean mask at (x0, y0); returns the painted bbox."""
    h, w = mask.shape
    H, W = canvas.shape
    cx0, cy0 = max(0, x0), max(0, y0)
    cx1, cy1 = min(W, x0 + w), min(H, y0 + h)
    if cx0 >= cx1 or cy0 >= cy1:
        return None
    sub = mask[cy0 - y0 : cy1 - y0, cx0 - x0 : cx1 - x0]
    if not sub.any():
        return None
    canvas[cy0:cy1, cx0:cx1][sub] = INK
    ys, xs = np.nonzero(sub)
    return BoundingBox(
        cx0 + int(xs.min()),
        cy0 + int(ys.min()),
        int(xs.max() - xs.min()) + 1,
        int(ys.max() - ys.min()) + 1,
    )


def _grid(w: int, h: int, x0: int, y0: int) -> tuple[np.ndarray, np.ndarray]:
    """Pixel-center coordinate grids for a local window."""
    ys, xs = np.mgrid[0:h, 0:w]
    return xs + float(x0), ys + float(y0)


def draw_vline(canvas: np.ndarray, x: int, y0: int, y1: int, thickness: int = 2) -> BoundingBox | None:
    """Vertical bar covering columns x..x+thickness-1, rows y0..y1 inclusive."""
    y0, y1 = min(y0, y1), max(y0, y1)
    mask = np.ones((y1 - y0 + 1, thickness), dtype=bool)
    return _paint(canvas, mask, x, y0)


def draw_hline(canvas: np.ndarray, y: int, x0: int, x1: int, thickness: int = 2) -> BoundingBox | None:
    """Horizontal bar covering rows y..y+thickness-1, columns x0..x1 inclusive."""
    x0, x1 = min(x0, x1), max(x0, x1)
    mask = np.ones((thickness, x1 - x0 + 1), dtype=bool)
    return _paint(canvas, mask, x0, y)


def draw_segment(canvas: np.ndarray, p1: Point, p2: Point, thickness: int = 2) -> BoundingBox | None:
    """General segment: pixels within thickness/2 of the centerline."""
    x0 = int(math.floor(min(p1[0], p2[0]) - thickness))
    y0 = int(math.floor(min(p1[1], p2[1]) - thickness))
    x1 = int(math.ceil(max(p1[0], p2[0]) + thickness)) + 1
    y1 = int(math.ceil(max(p1[1], p2[1]) + thickness)) + 1
    xs, ys = _grid(x1 - x0, y1 - y0, x0, y0)
    ax, ay = p1
    dx, dy = p2[0] - ax, p2[1] - ay
    L2 = dx * dx + dy * dy
    if L2 == 0:
        t = np.zeros_like(xs)
    else:
        t = ((xs - ax) * dx + (ys - ay) * dy) / L2
        t = np.clip(t, 0.0, 1.0)
    d = np.hypot(xs - (ax + t * dx), ys - (ay + t * dy))
    mask = d <= thickness / 2.0
    return _paint(canvas, mask, x0, y0)


def draw_rect_outline(canvas: np.ndarray, x: int, y: int, w: int, h: int, stroke: int = 3) -> BoundingBox:
    """Rectangle outline with the stroke growing inward from (x, y, w, h)."""
    mask = np.zeros((h, w), dtype=bool)
    mask[:stroke, :] = True
    mask[-stroke:, :] = True
    mask[:, :stroke] = True
    mask[:, -stroke:] = True
    box = _paint(canvas, mask, x, y)
    assert box is not None
    return box


def draw_diamond_outline(canvas: np.ndarray, cx: int, cy: int, halfw: int, halfh: int, stroke: int = 3) -> BoundingBox:
    """Diamond (rotated square) outline: L1-ellipse annulus."""
    x0, y0 = cx - halfw, cy - halfh
    xs, ys = _grid(2 * halfw + 1, 2 * halfh + 1, x0, y0)
    v_out = np.abs(xs - cx) / halfw + np.abs(ys - cy) / halfh
    v_in = np.abs(xs - cx) / max(1, halfw - stroke) + np.abs(ys - cy) / max(1, halfh - stroke)
    mask = (v_out <= 1.0) & (v_in > 1.0)
    box = _paint(canvas, mask, x0, y0)
    assert box is not None
    return box


def draw_circle_outline(canvas: np.ndarray, cx: int, cy: int, r: int, stroke: int = 3) -> BoundingBox:
    x0, y0 = cx - r, cy - r
    xs, ys = _grid(2 * r + 1, 2 * r + 1, x0, y0)
    d = np.hypot(xs - cx, ys - cy)
    mask = (d <= r) & (d > r - stroke)
    box = _paint(canvas, mask, x0, y0)
    assert box is not None
    return box


def draw_stadium_outline(canvas: np.ndarray, x: int, y: int, w: int, h: int, stroke: int = 3) -> BoundingBox:
    """Terminator glyph: rectangle with fully rounded ends (radius = h/2).

    Rendered as an annulus of distance to the horizontal core segment.
    """
    r = h / 2.0
    cy = y + (h - 1) / 2.0
    ax, bx = x + r, x + w - r  # core segment endpoints
    xs, ys = _grid(w, h, x, y)
    px = np.clip(xs, ax, bx)
    d = np.hypot(xs - px, ys - cy)
    mask = (d <= r) & (d > r - stroke)
    box = _paint(canvas, mask, x, y)
    assert box is not None
    return box


def draw_document_outline(
    canvas: np.ndarray, x: int, y: int, w: int, h: int, stroke: int = 3, wave_frac: float = 0.09
) -> BoundingBox:
    """Document glyph: straight top and sides, one full sine period along the
    bottom edge (dips below the baseline then rises above it)."""
    amp = max(2, int(round(wave_frac * h)))
    mh = h + amp + stroke  # wave can extend below the nominal box
    mask = np.zeros((mh, w), dtype=bool)
    mask[:stroke, :] = True  # top
    base = h - 1 - amp  # keep the full wave inside nominal height + amp margin
    for col in range(w):
        off = amp * math.sin(2.0 * math.pi * col / (w - 1)) if w > 1 else 0.0
        yy = int(round(base + off))
        mask[yy : yy + stroke, col] = True
    # sides join the top to the wave endpoints (wave is at `base` at both ends)
    mask[: base + stroke, :stroke] = True
    mask[: base + stroke, -stroke:] = True
    box = _paint(canvas, mask, x, y)
    assert box is not None
    return box


def draw_triangle_filled(
    canvas: np.ndarray, tip: Point, direction: Point, length: float, halfwidth: float
) -> tuple[BoundingBox | None, Point]:
    """Filled arrowhead. `direction` points from the base toward the tip;
    returns (bbox, blunt) where blunt is the base midpoint."""
    n = math.hypot(direction[0], direction[1])
    ux, uy = direction[0] / n, direction[1] / n
    bx, by = tip[0] - length * ux, tip[1] - length * uy  # base midpoint
    px, py = -uy, ux
    c1 = (bx + halfwidth * px, by + halfwidth * py)
    c2 = (bx - halfwidth * px, by - halfwidth * py)
    verts = [tip, c1, c2]
    x0 = int(math.floor(min(v[0] for v in verts))) - 1
    y0 = int(math.floor(min(v[1] for v in verts))) - 1
    x1 = int(math.ceil(max(v[0] for v in verts))) + 2
    y1 = int(math.ceil(max(v[1] for v in verts))) + 2
    xs, ys = _grid(x1 - x0, y1 - y0, x0, y0)

    def half_plane(a: Point, b: Point):
        return (b[0] - a[0]) * (ys - a[1]) - (b[1] - a[1]) * (xs - a[0])

    s1 = half_plane(tip, c1)
    s2 = half_plane(c1, c2)
    s3 = half_plane(c2, tip)
    mask = ((s1 >= 0) & (s2 >= 0) & (s3 >= 0)) | ((s1 <= 0) & (s2 <= 0) & (s3 <= 0))
    box = _paint(canvas, mask, x0, y0)
    return box, (bx, by)


def draw_solid_box(canvas: np.ndarray, x: int, y: int, w: int, h: int) -> BoundingBox:
    mask = np.ones((h, w), dtype=bool)
    box = _paint(canvas, mask, x, y)
    assert box is not None
    return box


def flip_pixels(canvas: np.ndarray, coords: list[tuple[int, int]]) -> None:
    """Salt-and-pepper: invert the given (x, y) pixels in place."""
    for x, y in coords:
        if 0 <= y < canvas.shape[0] and 0 <= x < canvas.shape[1]:
            canvas[y, x] = 255 - canvas[y, x]


def erase_rect(canvas: np.ndarray, x: int, y: int, w: int, h: int) -> None:
    """Clear a rectangular window back to background."""
    x0, y0 = max(0, x), max(0, y)
    x1, y1 = min(canvas.shape[1], x + w), min(canvas.shape[0], y + h)
    if x1 > x0 and y1 > y0:
        canvas[y0:y1, x0:x1] = 255
