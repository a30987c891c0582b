"""Line segment detection with a probabilistic Hough transform.

The sampler repeatedly draws an unvoted ink pixel (seeded LCG, so detection
is reproducible), votes across all angle bins, and when an accumulator cell
reaches the vote threshold it walks the corresponding line through the image,
collects the maximal ink run containing the pixel (bridging small gaps),
consumes that run's pixels, and emits it as a segment when it is long enough
and sufficiently covered by ink. Votes of consumed pixels are subtracted so
a line is emitted once.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .geometry import Point, dist
from .raster import BinaryImage
from .rng import Lcg64


@dataclass(frozen=True)
class Segment:
    p1: Point
    p2: Point

    def __post_init__(self):
        if self.p1 == self.p2:
            raise ValueError("segment endpoints must differ")

    @property
    def length(self) -> float:
        return dist(self.p1, self.p2)

    @property
    def direction(self) -> Point:
        L = self.length
        return ((self.p2[0] - self.p1[0]) / L, (self.p2[1] - self.p1[1]) / L)


@dataclass
class HoughParams:
    rho_res: float = 1.0
    theta_res_deg: float = 1.0
    votes_min: int = 30
    min_line_length: float = 20.0
    max_line_gap: float = 5.0
    coverage_min: float = 0.85
    dist_tol: float = 2.0  # px, ink proximity for walking and the coverage oracle
    merge_angle_deg: float = 3.0
    merge_offset: float = 4.0
    seed: int = 42
    min_pool_component: int = 4  # isolated specks never enter the sampling pool


def bresenham(p1: Point, p2: Point) -> list[tuple[int, int]]:
    """Integer raster of the segment p1-p2 (inclusive endpoints)."""
    x0, y0 = int(round(p1[0])), int(round(p1[1]))
    x1, y1 = int(round(p2[0])), int(round(p2[1]))
    points = []
    dx, dy = abs(x1 - x0), -abs(y1 - y0)
    sx = 1 if x0 < x1 else -1
    sy = 1 if y0 < y1 else -1
    err = dx + dy
    x, y = x0, y0
    while True:
        points.append((x, y))
        if x == x1 and y == y1:
            break
        e2 = 2 * err
        if e2 >= dy:
            err += dy
            x += sx
        if e2 <= dx:
            err += dx
            y += sy
    return points


def ink_proximity_mask(ink: np.ndarray, dist_tol: float = 2.0) -> np.ndarray:
    """Pixels within Euclidean `dist_tol` of any ink pixel."""
    r = int(math.floor(dist_tol))
    size = 2 * r + 1
    ys, xs = np.mgrid[-r : r + 1, -r : r + 1]
    disk = (xs * xs + ys * ys) <= dist_tol * dist_tol
    return ndimage.binary_dilation(ink, structure=disk.reshape(size, size))


def segment_coverage(seg: Segment, near_ink: np.ndarray) -> float:
    """Fraction of the segment's Bresenham pixels that are near ink."""
    pts = bresenham(seg.p1, seg.p2)
    h, w = near_ink.shape
    hit = 0
    for x, y in pts:
        if 0 <= x < w and 0 <= y < h and near_ink[y, x]:
            hit += 1
    return hit / len(pts)


def _walk_run(
    seed_xy: tuple[int, int],
    direction: Point,
    near_ink: np.ndarray,
    max_gap: float,
) -> tuple[float, float] | None:
    """Maximal run containing the seed along `direction`, with gaps bridged.

    Returns (t_min, t_max) in step units relative to the seed, ends on hits.
    """
    h, w = near_ink.shape
    x0, y0 = seed_xy
    dx, dy = direction
    gap = int(max_gap)

    def extent(sign: float) -> float:
        # steps to the image border in this direction
        t_edge = 1 << 30
        if sign * dx > 1e-12:
            t_edge = min(t_edge, (w - 1 - x0) / (sign * dx))
        elif sign * dx < -1e-12:
            t_edge = min(t_edge, x0 / -(sign * dx))
        if sign * dy > 1e-12:
            t_edge = min(t_edge, (h - 1 - y0) / (sign * dy))
        elif sign * dy < -1e-12:
            t_edge = min(t_edge, y0 / -(sign * dy))
        n = max(0, int(t_edge))
        if n == 0:
            return 0.0
        ts = np.arange(1, n + 1, dtype=np.float64)
        xs = np.rint(x0 + sign * ts * dx).astype(np.int64)
        ys = np.rint(y0 + sign * ts * dy).astype(np.int64)
        hits = near_ink[ys, xs]
        # last index whose consecutive-miss prefix never exceeded the gap
        misses = ~hits
        if not misses.any():
            return float(n)
        # running length of the current miss streak at each position
        idx = np.arange(n)
        last_hit = np.maximum.accumulate(np.where(hits, idx, -1))
        streak = idx - last_hit
        over = streak > gap
        if not over.any():
            cutoff = n
        else:
            cutoff = int(np.argmax(over))  # first position exceeding the gap
        if cutoff == 0:
            return 0.0
        hit_idx = np.nonzero(hits[:cutoff])[0]
        if len(hit_idx) == 0:
            return 0.0
        return float(hit_idx[-1] + 1)

    if not near_ink[y0, x0]:
        return None
    t_pos = extent(1.0)
    t_neg = -extent(-1.0)
    if t_pos - t_neg <= 0:
        return None
    return t_neg, t_pos


def detect_segments(img: BinaryImage, params: HoughParams | None = None) -> list[Segment]:
    """Probabilistic Hough over the (node-masked) binary image.

    Deterministic for a given seed: identical image + params reproduce the
    identical segment list.
    """
    params = params or HoughParams()
    ink = img.data
    if not ink.any():
        return []
    h, w = ink.shape

    # pool: ink pixels in components big enough to support a line; isolated
    # salt-and-pepper specks neither vote nor extend walks (they would bridge
    # runs past junctions and break T-adjacency)
    if params.min_pool_component > 1:
        labels, n = ndimage.label(ink, structure=np.ones((3, 3), dtype=int))
        counts = np.bincount(labels.ravel())
        pool_mask = ink & (counts[labels] >= params.min_pool_component)
    else:
        pool_mask = ink.copy()
    near_ink = ink_proximity_mask(pool_mask, params.dist_tol)
    ys, xs = np.nonzero(pool_mask)
    if len(xs) == 0:
        return []
    pool = np.column_stack((xs, ys)).astype(np.int64)

    t_count = max(1, int(round(180.0 / params.theta_res_deg)))
    thetas = np.deg2rad(np.arange(t_count) * params.theta_res_deg)
    cos_t, sin_t = np.cos(thetas), np.sin(thetas)
    diag = math.hypot(w, h)
    rho_off = int(math.ceil(diag / params.rho_res)) + 1
    acc = np.zeros((t_count, 2 * rho_off + 1), dtype=np.int32)
    t_idx = np.arange(t_count)
    inv_rho = 1.0 / params.rho_res

    voted = np.zeros_like(ink, dtype=bool)
    consumed = np.zeros_like(ink, dtype=bool)
    rng = Lcg64(params.seed)
    alive = len(pool)
    raw: list[Segment] = []

    def consume_run(p1: Point, p2: Point) -> None:
        """Remove pool pixels near the run and retract their votes."""
        pad = params.dist_tol + 1
        x0 = max(0, int(min(p1[0], p2[0]) - pad))
        x1 = min(w, int(max(p1[0], p2[0]) + pad) + 1)
        y0 = max(0, int(min(p1[1], p2[1]) - pad))
        y1 = min(h, int(max(p1[1], p2[1]) + pad) + 1)
        window = pool_mask[y0:y1, x0:x1] & ~consumed[y0:y1, x0:x1]
        if not window.any():
            return
        wys, wxs = np.nonzero(window)
        px = wxs + x0
        py = wys + y0
        ax, ay = p1
        bx, by = p2
        ddx, ddy = bx - ax, by - ay
        L2 = ddx * ddx + ddy * ddy
        t = ((px - ax) * ddx + (py - ay) * ddy) / L2
        t = np.clip(t, 0.0, 1.0)
        d2 = (px - (ax + t * ddx)) ** 2 + (py - (ay + t * ddy)) ** 2
        close = d2 <= params.dist_tol * params.dist_tol
        if not close.any():
            return
        cx, cy = px[close], py[close]
        consumed[cy, cx] = True
        was_voted = voted[cy, cx]
        if was_voted.any():
            vx, vy = cx[was_voted], cy[was_voted]
            rho_idx = np.rint((vx[:, None] * cos_t + vy[:, None] * sin_t) * inv_rho).astype(np.int64) + rho_off
            np.add.at(acc, (np.broadcast_to(t_idx, rho_idx.shape), rho_idx), -1)
            voted[vy, vx] = False

    while alive > 0:
        k = rng.randrange(alive)
        alive -= 1
        pool[[k, alive]] = pool[[alive, k]]
        x, y = int(pool[alive][0]), int(pool[alive][1])
        if consumed[y, x]:
            continue
        voted[y, x] = True
        idx = np.rint((x * cos_t + y * sin_t) * inv_rho).astype(np.int64) + rho_off
        acc[t_idx, idx] += 1
        vals = acc[t_idx, idx]
        peak = int(vals.max())
        if peak < params.votes_min:
            continue
        t_star = int(np.argmax(vals))
        theta = thetas[t_star]
        direction = (-math.sin(theta), math.cos(theta))
        run = _walk_run((x, y), direction, near_ink, params.max_line_gap)
        if run is None:
            consume_run((float(x), float(y)), (float(x) + 1e-6, float(y)))
            continue
        t_min, t_max = run
        p1 = (x + t_min * direction[0], y + t_min * direction[1])
        p2 = (x + t_max * direction[0], y + t_max * direction[1])
        consume_run(p1, p2)
        if t_max - t_min < params.min_line_length:
            continue
        seg = Segment(p1, p2)
        if segment_coverage(seg, near_ink) >= params.coverage_min:
            raw.append(seg)

    return merge_collinear(raw, params)


def _try_merge(a: Segment, b: Segment, params: HoughParams) -> Segment | None:
    """Spanning segment when a and b are near-collinear and near-contiguous."""
    ref, other = (a, b) if a.length >= b.length else (b, a)
    dx, dy = ref.direction
    cosang = abs(dx * other.direction[0] + dy * other.direction[1])
    if math.degrees(math.acos(min(1.0, cosang))) >= params.merge_angle_deg:
        return None
    nx, ny = -dy, dx
    ox, oy = ref.p1
    for p in (other.p1, other.p2):
        if abs((p[0] - ox) * nx + (p[1] - oy) * ny) >= params.merge_offset:
            return None
    pts = [ref.p1, ref.p2, other.p1, other.p2]
    ts = sorted((p[0] - ox) * dx + (p[1] - oy) * dy for p in pts)
    len_a = a.length
    len_b = b.length
    span = ts[3] - ts[0]
    gap = span - len_a - len_b  # negative when projections overlap
    if gap > params.max_line_gap:
        return None
    best = max(
        ((dist(p, q), (p, q)) for i, p in enumerate(pts) for q in pts[i + 1 :]),
        key=lambda e: e[0],
    )
    p, q = best[1]
    if p == q:
        return None
    return Segment(p, q)


def merge_collinear(segs: list[Segment], params: HoughParams | None = None) -> list[Segment]:
    """Fuse near-collinear, overlapping-or-adjacent segments to a fixpoint."""
    params = params or HoughParams()
    out = list(segs)
    changed = True
    while changed:
        changed = False
        for i in range(len(out)):
            merged_one = None
            for j in range(i + 1, len(out)):
                m = _try_merge(out[i], out[j], params)
                if m is not None:
                    merged_one = (j, m)
                    break
            if merged_one is not None:
                j, m = merged_one
                out[j] = m
                out.pop(i)
                changed = True
                break
    return out
