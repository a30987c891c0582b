from __future__ import annotations

import json

import pytest

from flowextract.config import PipelineConfig, load_config
from flowextract.errors import ConfigError


def test_defaults_are_valid():
    cfg = load_config()
    assert cfg.votes_min == 30
    assert cfg.eps_join == 8.0
    assert cfg.iou_threshold == 0.5
    assert cfg.mask_dilation == 3


def test_file_values_override_defaults(tmp_path):
    p = tmp_path / "cfg.json"
    p.write_text(json.dumps({"votes_min": 25, "label_max_dist": 55.5, "invert": True}))
    cfg = load_config(p)
    assert cfg.votes_min == 25
    assert cfg.label_max_dist == 55.5
    assert cfg.invert is True


def test_overrides_beat_file(tmp_path):
    p = tmp_path / "cfg.json"
    p.write_text(json.dumps({"votes_min": 25}))
    cfg = load_config(p, {"votes_min": "40"})
    assert cfg.votes_min == 40


def test_unknown_key_named(tmp_path):
    p = tmp_path / "cfg.json"
    p.write_text(json.dumps({"votes": 25}))
    with pytest.raises(ConfigError, match="'votes'"):
        load_config(p)


def test_out_of_range_named():
    with pytest.raises(ConfigError, match="align_tol_deg"):
        load_config(None, {"align_tol_deg": 400})


def test_type_errors_reported():
    with pytest.raises(ConfigError, match="votes_min"):
        load_config(None, {"votes_min": "many"})
    with pytest.raises(ConfigError, match="invert"):
        load_config(None, {"invert": "perhaps"})


def test_missing_file():
    with pytest.raises(ConfigError, match="not found"):
        load_config("/nonexistent/cfg.json")


def test_alias_values_checked():
    with pytest.raises(ConfigError, match="label_aliases"):
        load_config(None, {"label_aliases": {"yes": "oui"}})
    cfg = load_config(None, {"label_aliases": {"yes": "ja", "no": "nee"}})
    assert cfg.label_aliases == {"yes": "ja", "no": "nee"}


def test_stage_param_views_carry_values():
    cfg = load_config(None, {"votes_min": 31, "eps_join": 9, "arrow_area_min": 35})
    assert cfg.hough_params().votes_min == 31
    assert cfg.trace_params().eps_join == 9.0
    assert cfg.arrow_params().area_min == 35
    assert cfg.shape_params().min_shape_area == 400
