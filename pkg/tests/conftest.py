from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import pytest

from flowextract.raster import BinaryImage, GrayImage
from flowextract.synthgen import GenParams, generate, save_png, sidecar_payload, truth_payload


def blank_canvas(w: int = 400, h: int = 400) -> np.ndarray:
    return np.full((h, w), 255, dtype=np.uint8)


def to_binary(canvas: np.ndarray) -> BinaryImage:
    return BinaryImage(canvas < 128)


def write_bundle(bundle, directory: Path, stem: str) -> dict[str, Path]:
    """Materialize one generated bundle as corpus-style files."""
    directory.mkdir(parents=True, exist_ok=True)
    paths = {
        "image": directory / f"{stem}.png",
        "truth": directory / f"{stem}.truth.json",
        "ocr": directory / f"{stem}.ocr.json",
    }
    save_png(bundle.image, paths["image"])
    paths["truth"].write_text(json.dumps(truth_payload(bundle), indent=2) + "\n")
    paths["ocr"].write_text(json.dumps(sidecar_payload(bundle.sidecar), indent=2) + "\n")
    return paths


@pytest.fixture(scope="session")
def sample_bundle():
    """One mid-size noise-free diagram reused by several test modules."""
    return generate(GenParams(seed=42, node_count=12, branch_prob=0.6))


@pytest.fixture(scope="session")
def sample_bundle_paths(sample_bundle, tmp_path_factory):
    d = tmp_path_factory.mktemp("bundle")
    return write_bundle(sample_bundle, d, "sample")
