"""Image loading, binarization, and node-region masking.

All detection stages run on a binary ink mask. Documents are assumed to be
dark ink on a light background; an ``invert`` switch handles the opposite
polarity. Node interiors are masked out before line detection so that shape
outlines never enter the Hough stage.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

from .errors import CorruptImageError, UnsupportedFormatError
from .geometry import BoundingBox

# ITU-R BT.601 luma weights used for RGB -> grayscale conversion
_LUMA = np.array([0.299, 0.587, 0.114])


@dataclass
class GrayImage:
    """8-bit luminance raster, row-major (data shape is (height, width))."""

    data: np.ndarray

    def __post_init__(self):
        if self.data.ndim != 2:
            raise ValueError("GrayImage data must be 2-dimensional")
        if self.data.size == 0:
            raise ValueError("GrayImage must be non-empty")
        self.data = np.ascontiguousarray(self.data, dtype=np.uint8)

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def height(self) -> int:
        return self.data.shape[0]


@dataclass
class BinaryImage:
    """Boolean ink mask; True marks foreground (ink) pixels.

    ``degenerate`` flags the Otsu fallback on a constant-valued image.
    """

    data: np.ndarray
    degenerate: bool = field(default=False)

    def __post_init__(self):
        if self.data.ndim != 2:
            raise ValueError("BinaryImage data must be 2-dimensional")
        if self.data.size == 0:
            raise ValueError("BinaryImage must be non-empty")
        self.data = np.ascontiguousarray(self.data, dtype=bool)

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def height(self) -> int:
        return self.data.shape[0]

    def ink_count(self) -> int:
        return int(self.data.sum())


def load_image(path: str | Path) -> GrayImage:
    """Load a PNG file as a luminance image.

    Color inputs are converted with 0.299R + 0.587G + 0.114B, rounded to the
    nearest integer. Alpha channels are composited over white first.
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"image not found: {path}")
    if path.suffix.lower() != ".png":
        raise UnsupportedFormatError(f"only PNG input is supported, got: {path.name}")
    try:
        with Image.open(path) as im:
            if im.format != "PNG":
                raise UnsupportedFormatError(
                    f"only PNG input is supported, got format {im.format!r}: {path.name}"
                )
            im.load()
            if im.mode == "L":
                return GrayImage(np.asarray(im, dtype=np.uint8))
            if "A" in im.mode or im.mode == "P":
                im = im.convert("RGBA")
                rgba = np.asarray(im, dtype=np.float64)
                alpha = rgba[..., 3:4] / 255.0
                rgb = rgba[..., :3] * alpha + 255.0 * (1.0 - alpha)
            else:
                rgb = np.asarray(im.convert("RGB"), dtype=np.float64)
    except UnidentifiedImageError as e:
        raise CorruptImageError(f"cannot decode image: {path}") from e
    except OSError as e:
        raise CorruptImageError(f"cannot decode image: {path}") from e
    gray = np.rint(rgb @ _LUMA).clip(0, 255).astype(np.uint8)
    return GrayImage(gray)


def otsu_threshold(img: GrayImage) -> int | None:
    """Threshold maximizing inter-class variance over the 256-bin histogram.

    Returns None when the histogram is degenerate (a single gray level), in
    which case no split exists.
    """
    hist = np.bincount(img.data.ravel(), minlength=256).astype(np.float64)
    total = hist.sum()
    if np.count_nonzero(hist) <= 1:
        return None

    # cumulative class probability / mean for thresholds t = 0..255, where
    # class 0 holds luminance < t. Evaluate variance for every t and argmax.
    levels = np.arange(256, dtype=np.float64)
    w0 = np.cumsum(hist)  # weight of luminance <= t
    mu0 = np.cumsum(hist * levels)
    mu_total = mu0[-1]

    best_t, best_var = None, -1.0
    for t in range(1, 256):
        n0 = w0[t - 1]
        n1 = total - n0
        if n0 == 0 or n1 == 0:
            continue
        m0 = mu0[t - 1] / n0
        m1 = (mu_total - mu0[t - 1]) / n1
        var = n0 * n1 * (m0 - m1) ** 2
        if var > best_var:
            best_var, best_t = var, t
    return best_t


def binarize(
    img: GrayImage,
    method: str = "otsu",
    threshold: int = 128,
    invert: bool = False,
) -> BinaryImage:
    """Binarize a luminance image; a pixel is ink iff luminance < threshold.

    method: "otsu" (threshold maximizing inter-class variance) or "fixed"
    (use `threshold` directly). With `invert`, ink is luminance >= threshold,
    for light-on-dark scans.
    """
    if method == "fixed":
        if not 0 <= threshold <= 255:
            raise ValueError(f"fixed threshold out of range: {threshold}")
        t = threshold
    elif method == "otsu":
        t_opt = otsu_threshold(img)
        if t_opt is None:
            # constant image: no ink either way, flag it rather than fail
            return BinaryImage(np.zeros_like(img.data, dtype=bool), degenerate=True)
        t = t_opt
    else:
        raise ValueError(f"unknown binarization method: {method!r}")
    mask = img.data < t
    if invert:
        mask = ~mask
    return BinaryImage(mask)


def mask_node_regions(
    img: BinaryImage, boxes: list[BoundingBox], dilation: int = 3
) -> BinaryImage:
    """Clear all ink inside each box grown by `dilation` px on every side.

    Out-of-bounds boxes are clamped; pixels outside all boxes are untouched.
    """
    out = img.data.copy()
    h, w = out.shape
    for b in boxes:
        x0 = max(0, b.x - dilation)
        y0 = max(0, b.y - dilation)
        x1 = min(w, b.right + dilation)
        y1 = min(h, b.bottom + dilation)
        if x1 > x0 and y1 > y0:
            out[y0:y1, x0:x1] = False
    return BinaryImage(out, degenerate=img.degenerate)
