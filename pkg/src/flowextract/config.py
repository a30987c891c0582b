"""Pipeline configuration: one flat key set covering every tunable stage.

Precedence is flags > config file > defaults. Validation happens at load
time and names the offending key, so a bad config never reaches the
pipeline.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, fields
from pathlib import Path

from .arrowhead import ArrowParams
from .edgetrace import TraceParams
from .errors import ConfigError
from .lines import HoughParams
from .nodedetect import ShapeParams


@dataclass
class PipelineConfig:
    # raster
    binarize_method: str = "otsu"  # "otsu" | "fixed"
    fixed_threshold: int = 128
    invert: bool = False
    mask_dilation: int = 3
    # geometric node detection
    min_shape_area: int = 400
    poly_epsilon_frac: float = 0.02
    angle_tol_deg: float = 10.0
    circularity_min: float = 0.75
    corner_fill_max: float = 0.15
    wavy_min_frac: float = 0.08
    # arrowheads
    arrow_area_min: int = 30
    arrow_area_max: int = 400
    solidity_min: float = 0.8
    target_tol: float = 15.0
    # Hough line detection
    rho_res: float = 1.0
    theta_res_deg: float = 1.0
    votes_min: int = 30
    min_line_length: float = 20.0
    max_line_gap: float = 5.0
    coverage_min: float = 0.85
    merge_angle_deg: float = 3.0
    merge_offset: float = 4.0
    hough_seed: int = 42
    # edge tracing
    eps_join: float = 8.0
    start_tol: float = 10.0
    align_tol_deg: float = 30.0
    node_prox: float = 12.0
    max_trace_depth: int = 50
    # labels
    label_max_dist: float = 40.0
    label_aliases: dict = field(default_factory=dict)
    # evaluation
    iou_threshold: float = 0.5

    def validate(self) -> None:
        def require(cond: bool, key: str, why: str) -> None:
            if not cond:
                raise ConfigError(f"config key '{key}': {why} (got {getattr(self, key)!r})")

        require(self.binarize_method in ("otsu", "fixed"), "binarize_method", "must be 'otsu' or 'fixed'")
        require(0 <= self.fixed_threshold <= 255, "fixed_threshold", "must be in [0, 255]")
        require(isinstance(self.invert, bool), "invert", "must be a boolean")
        require(0 <= self.mask_dilation <= 50, "mask_dilation", "must be in [0, 50]")
        require(self.min_shape_area >= 1, "min_shape_area", "must be >= 1")
        require(0 < self.poly_epsilon_frac <= 0.5, "poly_epsilon_frac", "must be in (0, 0.5]")
        require(0 < self.angle_tol_deg <= 45, "angle_tol_deg", "must be in (0, 45]")
        require(0 < self.circularity_min <= 1, "circularity_min", "must be in (0, 1]")
        require(0 < self.corner_fill_max <= 1, "corner_fill_max", "must be in (0, 1]")
        require(0 < self.wavy_min_frac <= 1, "wavy_min_frac", "must be in (0, 1]")
        require(1 <= self.arrow_area_min, "arrow_area_min", "must be >= 1")
        require(self.arrow_area_max > self.arrow_area_min, "arrow_area_max", "must exceed arrow_area_min")
        require(0 < self.solidity_min <= 1, "solidity_min", "must be in (0, 1]")
        require(0 < self.target_tol <= 1000, "target_tol", "must be in (0, 1000]")
        require(0 < self.rho_res <= 10, "rho_res", "must be in (0, 10]")
        require(0 < self.theta_res_deg <= 45, "theta_res_deg", "must be in (0, 45]")
        require(self.votes_min >= 1, "votes_min", "must be >= 1")
        require(0 < self.min_line_length <= 10000, "min_line_length", "must be in (0, 10000]")
        require(0 <= self.max_line_gap <= 1000, "max_line_gap", "must be in [0, 1000]")
        require(0 < self.coverage_min <= 1, "coverage_min", "must be in (0, 1]")
        require(0 < self.merge_angle_deg <= 45, "merge_angle_deg", "must be in (0, 45]")
        require(0 <= self.merge_offset <= 100, "merge_offset", "must be in [0, 100]")
        require(0 < self.eps_join <= 100, "eps_join", "must be in (0, 100]")
        require(0 < self.start_tol <= 1000, "start_tol", "must be in (0, 1000]")
        require(0 < self.align_tol_deg <= 90, "align_tol_deg", "must be in (0, 90]")
        require(0 < self.node_prox <= 1000, "node_prox", "must be in (0, 1000]")
        require(1 <= self.max_trace_depth <= 100000, "max_trace_depth", "must be in [1, 100000]")
        require(0 < self.label_max_dist <= 10000, "label_max_dist", "must be in (0, 10000]")
        require(isinstance(self.label_aliases, dict), "label_aliases", "must be an object")
        for k, v in self.label_aliases.items():
            require(v in ("ja", "nee"), "label_aliases", f"alias '{k}' must map to 'ja' or 'nee'")
        require(0 < self.iou_threshold < 1, "iou_threshold", "must be in (0, 1)")

    # stage parameter views

    def shape_params(self) -> ShapeParams:
        return ShapeParams(
            min_shape_area=self.min_shape_area,
            poly_epsilon_frac=self.poly_epsilon_frac,
            angle_tol_deg=self.angle_tol_deg,
            circularity_min=self.circularity_min,
            corner_fill_max=self.corner_fill_max,
            wavy_min_frac=self.wavy_min_frac,
        )

    def arrow_params(self) -> ArrowParams:
        return ArrowParams(
            area_min=self.arrow_area_min,
            area_max=self.arrow_area_max,
            solidity_min=self.solidity_min,
            target_tol=self.target_tol,
        )

    def hough_params(self) -> HoughParams:
        return HoughParams(
            rho_res=self.rho_res,
            theta_res_deg=self.theta_res_deg,
            votes_min=self.votes_min,
            min_line_length=self.min_line_length,
            max_line_gap=self.max_line_gap,
            coverage_min=self.coverage_min,
            merge_angle_deg=self.merge_angle_deg,
            merge_offset=self.merge_offset,
            seed=self.hough_seed,
        )

    def trace_params(self) -> TraceParams:
        return TraceParams(
            eps_join=self.eps_join,
            start_tol=self.start_tol,
            align_tol_deg=self.align_tol_deg,
            node_prox=self.node_prox,
            max_depth=self.max_trace_depth,
            target_tol=self.target_tol,
        )


_FIELD_TYPES = {f.name: f.type for f in fields(PipelineConfig)}


def _coerce(key: str, value):
    """Best-effort coercion of file/flag values into the field's type."""
    current = getattr(PipelineConfig(), key)
    if isinstance(current, bool):
        if isinstance(value, bool):
            return value
        if isinstance(value, str) and value.lower() in ("true", "false", "1", "0"):
            return value.lower() in ("true", "1")
        raise ConfigError(f"config key '{key}': expected a boolean, got {value!r}")
    if isinstance(current, int) and not isinstance(current, bool):
        try:
            f = float(value)
        except (TypeError, ValueError):
            raise ConfigError(f"config key '{key}': expected an integer, got {value!r}") from None
        if f != int(f):
            raise ConfigError(f"config key '{key}': expected an integer, got {value!r}")
        return int(f)
    if isinstance(current, float):
        try:
            return float(value)
        except (TypeError, ValueError):
            raise ConfigError(f"config key '{key}': expected a number, got {value!r}") from None
    if isinstance(current, dict):
        if isinstance(value, dict):
            return value
        raise ConfigError(f"config key '{key}': expected an object, got {value!r}")
    return str(value)


def load_config(path: str | Path | None = None, overrides: dict | None = None) -> PipelineConfig:
    """Defaults, then config-file values, then explicit overrides."""
    cfg = PipelineConfig()
    if path is not None:
        path = Path(path)
        if not path.exists():
            raise ConfigError(f"config file not found: {path}")
        try:
            payload = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as e:
            raise ConfigError(f"{path}: not valid JSON: {e}") from e
        if not isinstance(payload, dict):
            raise ConfigError(f"{path}: config must be a JSON object")
        for key, value in payload.items():
            if key not in _FIELD_TYPES:
                raise ConfigError(f"{path}: unknown config key '{key}'")
            setattr(cfg, key, _coerce(key, value))
    for key, value in (overrides or {}).items():
        if key not in _FIELD_TYPES:
            raise ConfigError(f"unknown config key '{key}'")
        setattr(cfg, key, _coerce(key, value))
    cfg.validate()
    return cfg
