"""End-to-end document extraction: wiring of all detection stages.

The intermediate products stay available on the result object; the
acceptance suite and the review workflow both need them (segments for the
coverage oracle, arrowheads for recall coupling).
"""

from __future__ import annotations

from contextlib import contextmanager
from dataclasses import dataclass, field
from pathlib import Path

from .arrowhead import Arrowhead, arrowheads_from_boxes, detect_arrowheads
from .config import PipelineConfig
from .contours import label_components
from .edgetrace import NotTraced, SegmentGraph, TracedEdge, build_segment_graph, trace_all
from .graph import FlowGraph, assemble
from .labels import OcrSidecar, UnassignedLabel, assign_labels, extract_labels, load_sidecar
from .lines import Segment, detect_segments
from .nodedetect import DetectedNode, attach_text, classify_components, load_detection_file
from .raster import BinaryImage, binarize, load_image, mask_node_regions


@contextmanager
def _stage(name: str):
    """Tag errors with the pipeline stage they came from."""
    try:
        yield
    except Exception as e:
        if not getattr(e, "_stage_tagged", False):
            e._stage_tagged = True
            e.args = (f"[{name}] {e.args[0] if e.args else e}",) + e.args[1:]
        raise


@dataclass
class ExtractionResult:
    graph: FlowGraph
    nodes: list[DetectedNode]
    arrowheads: list[Arrowhead]
    segments: list[Segment]
    seg_graph: SegmentGraph
    edges: list[TracedEdge]
    failures: list[NotTraced]
    unassigned_labels: list[UnassignedLabel] = field(default_factory=list)
    binary: BinaryImage | None = None
    masked: BinaryImage | None = None


def extract_document(
    image_path: str | Path,
    config: PipelineConfig | None = None,
    detections_path: str | Path | None = None,
    ocr_path: str | Path | None = None,
) -> ExtractionResult:
    """Run raster -> nodes -> arrowheads -> lines -> tracing -> labels -> graph."""
    cfg = config or PipelineConfig()
    with _stage("raster"):
        gray = load_image(image_path)
        binary = binarize(gray, method=cfg.binarize_method, threshold=cfg.fixed_threshold, invert=cfg.invert)

    comps = label_components(binary.data)
    reject_boxes = []
    with _stage("nodedetect"):
        if detections_path is not None:
            nodes, arrow_boxes = load_detection_file(detections_path)
        else:
            nodes, reject_boxes = classify_components(comps, cfg.shape_params())
    with _stage("arrowhead"):
        if detections_path is not None:
            arrows = arrowheads_from_boxes(binary, arrow_boxes, nodes, cfg.arrow_params())
        else:
            arrows = detect_arrowheads(binary, nodes, cfg.arrow_params(), components=comps)

    sidecar: OcrSidecar | None = None
    if ocr_path is not None:
        with _stage("labels"):
            sidecar = load_sidecar(ocr_path)
            nodes = attach_text(nodes, sidecar)

    with _stage("lines"):
        mask_boxes = [n.bbox for n in nodes] + reject_boxes
        masked = mask_node_regions(binary, mask_boxes, cfg.mask_dilation)
        segments = detect_segments(masked, cfg.hough_params())
    with _stage("edgetrace"):
        seg_graph = build_segment_graph(segments, cfg.eps_join)
        edges, failures = trace_all(arrows, seg_graph, nodes, cfg.trace_params())

    unassigned: list[UnassignedLabel] = []
    if sidecar is not None:
        with _stage("labels"):
            labels = extract_labels(sidecar, nodes, cfg.label_aliases)
            edges, unassigned = assign_labels(edges, labels, nodes, cfg.label_max_dist)

    with _stage("graph"):
        graph = assemble(nodes, edges, list(failures) + list(unassigned))
    return ExtractionResult(
        graph=graph,
        nodes=nodes,
        arrowheads=arrows,
        segments=segments,
        seg_graph=seg_graph,
        edges=edges,
        failures=failures,
        unassigned_labels=unassigned,
        binary=binary,
        masked=masked,
    )
