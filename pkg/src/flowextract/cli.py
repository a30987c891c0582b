"""Command-line interface: extract, eval, synth, serve.

Exit codes: 0 success, 2 input/config error, 1 internal error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import evaluation, graph as graphmod, synthgen
from .config import load_config
from .errors import (
    ConfigError,
    CorruptImageError,
    FlowExtractError,
    LayoutOverflowError,
    SchemaViolationError,
    UnsupportedFormatError,
)
from .pipeline import extract_document
from .server import serve_bundles

_INPUT_ERRORS = (
    FileNotFoundError,
    ConfigError,
    SchemaViolationError,
    LayoutOverflowError,
    UnsupportedFormatError,
    CorruptImageError,
)


def _parse_overrides(pairs: list[str]) -> dict:
    out = {}
    for pair in pairs:
        if "=" not in pair:
            raise ConfigError(f"--set expects key=value, got '{pair}'")
        key, value = pair.split("=", 1)
        out[key.strip()] = value.strip()
    return out


def _resolve_config(args) -> "PipelineConfig":
    path = args.config or os.environ.get("FLOWEXTRACT_CONFIG")
    overrides = _parse_overrides(args.set or [])
    if getattr(args, "invert", False):
        overrides["invert"] = True
    return load_config(path, overrides)


def cmd_extract(args) -> int:
    cfg = _resolve_config(args)
    image = Path(args.image)
    if not image.exists():
        raise FileNotFoundError(f"image not found: {image}")
    result = extract_document(
        image, cfg, detections_path=args.detections, ocr_path=args.ocr
    )
    data = graphmod.serialize(result.graph, jsonld=args.jsonld)
    out = Path(args.output)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_bytes(data)
    if args.summary:
        g = result.graph
        print(
            f"nodes: {len(g.nodes)}  edges: {len(g.edges)}  diagnostics: {len(g.diagnostics)}"
        )
    return 0


def _load_truth(path: Path) -> graphmod.FlowGraph:
    try:
        payload = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise SchemaViolationError(f"{path}: not valid JSON: {e}") from e
    return graphmod.from_payload(payload, where=str(path))


def _eval_pair(pred_path: Path, truth_path: Path, threshold: float) -> evaluation.MetricsReport:
    pred = graphmod.load(pred_path)
    truth = _load_truth(truth_path)
    return evaluation.score_graphs(pred, truth, threshold)


def cmd_eval(args) -> int:
    pred = Path(args.pred)
    truth = Path(args.truth)
    threshold = args.threshold
    if truth.is_dir():
        if not pred.is_dir():
            raise SchemaViolationError("corpus evaluation requires a prediction directory")
        manifest_path = truth / "manifest.json"
        if not manifest_path.exists():
            raise SchemaViolationError(f"no manifest.json in corpus directory {truth}")
        manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
        instances = manifest.get("instances", [])
        pred_files = sorted(p for p in pred.glob("diagram_*.json") if not p.name.endswith(".truth.json"))
        if len(pred_files) != len(instances):
            raise SchemaViolationError(
                f"mismatched corpus sizes: {len(pred_files)} predictions vs {len(instances)} instances"
            )
        total = evaluation.MetricsReport()
        for inst in instances:
            stem = Path(inst["truth"]).name.replace(".truth.json", "")
            pred_path = pred / f"{stem}.json"
            if not pred_path.exists():
                raise SchemaViolationError(f"missing prediction for instance: {pred_path.name}")
            total = total + _eval_pair(pred_path, truth / inst["truth"], threshold)
        report = total
    else:
        if not pred.exists():
            raise FileNotFoundError(f"prediction file not found: {pred}")
        if not truth.exists():
            raise FileNotFoundError(f"truth file not found: {truth}")
        report = _eval_pair(pred, truth, threshold)
    print(report.to_table())
    print(json.dumps(report.to_dict(), indent=2))
    return 0


def cmd_synth(args) -> int:
    tier: dict = {
        "branch_prob": args.branch_prob,
        "noise": args.noise,
        "occlusion_prob": args.occlusion,
        "line_thickness": args.line_thickness,
    }
    if args.diagonals:
        tier["diagonals"] = True
    if args.canvas:
        try:
            w, h = (int(v) for v in args.canvas.lower().split("x"))
        except ValueError:
            raise ConfigError(f"--canvas expects WIDTHxHEIGHT, got '{args.canvas}'") from None
        tier["canvas"] = (w, h)
    if args.node_count_min is not None or args.node_count_max is not None:
        lo = args.node_count_min if args.node_count_min is not None else args.node_count
        hi = args.node_count_max if args.node_count_max is not None else args.node_count
        tier["node_count_range"] = [lo, hi]
    else:
        tier["node_count"] = args.node_count
    manifest = synthgen.generate_corpus(args.seed, args.count, args.out, tiers=[tier])
    print(f"wrote {len(manifest['instances'])} diagrams to {args.out}")
    return 0


def cmd_serve(args) -> int:
    bundle = Path(args.bundle)
    if not bundle.is_dir():
        raise FileNotFoundError(f"bundle directory not found: {bundle}")
    ui_dir = args.ui_dir
    if ui_dir is None:
        default_ui = Path(__file__).resolve().parents[2] / "frontend" / "dist"
        if default_ui.is_dir():
            ui_dir = default_ui
    server = serve_bundles(bundle, port=args.port, host=args.host, ui_dir=ui_dir)
    host, port = server.server_address[:2]
    print(f"serving {bundle} on http://{host}:{port}/ (ctrl-c to stop)")
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="flowextract",
        description="Extract directed graphs from raster flowchart images",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract", help="run the extraction pipeline on one image")
    p.add_argument("image", help="input PNG")
    p.add_argument("--output", "-o", required=True, help="output graph JSON path")
    p.add_argument("--config", help="pipeline config JSON (or FLOWEXTRACT_CONFIG)")
    p.add_argument("--detections", help="external detection JSON instead of geometric detection")
    p.add_argument("--ocr", help="OCR sidecar JSON for text and decision labels")
    p.add_argument("--jsonld", action="store_true", help="prepend the JSON-LD @context")
    p.add_argument("--invert", action="store_true", help="treat input as light ink on dark background")
    p.add_argument("--summary", action="store_true", help="print node/edge/diagnostic counts")
    p.add_argument("--set", action="append", metavar="KEY=VALUE", help="override a config key")
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("eval", help="score predictions against ground truth")
    p.add_argument("pred", help="prediction JSON file or directory")
    p.add_argument("truth", help="truth JSON file or synthgen corpus directory")
    p.add_argument("--threshold", type=float, default=0.5, help="IoU threshold (strict >)")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("synth", help="generate a synthetic corpus with ground truth")
    p.add_argument("--out", required=True, help="corpus output directory")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--count", type=int, default=10, help="diagrams to generate")
    p.add_argument("--node-count", type=int, default=10)
    p.add_argument("--node-count-min", type=int, default=None)
    p.add_argument("--node-count-max", type=int, default=None)
    p.add_argument("--branch-prob", type=float, default=0.6)
    p.add_argument("--noise", type=float, default=0.0)
    p.add_argument("--occlusion", type=float, default=0.0)
    p.add_argument("--line-thickness", type=int, default=2)
    p.add_argument("--canvas", help="canvas size as WIDTHxHEIGHT")
    p.add_argument("--diagonals", action="store_true", help="render diagonal connectors")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("serve", help="serve extraction bundles for the review UI")
    p.add_argument("bundle", help="directory of <id>.png + <id>.json pairs")
    p.add_argument("--port", type=int, default=8020)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--ui-dir", help="static asset directory (defaults to frontend/dist)")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except _INPUT_ERRORS as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except FlowExtractError as e:
        print(f"internal error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
