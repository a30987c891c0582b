"""Final graph assembly and canonical JSON serialization.

The output document is byte-stable: fixed key order, sorted node and edge
lists, 2-space indentation, UTF-8, newline-terminated. Equal graphs always
serialize to identical bytes, which the golden-file tests pin down.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .edgetrace import NotTraced, TracedEdge
from .errors import DanglingEdgeError, SchemaViolationError
from .geometry import BoundingBox
from .labels import UnassignedLabel
from .nodedetect import DetectedNode, NodeClass

# minimal JSON-LD context; full RDF mapping is out of scope
JSONLD_CONTEXT = {
    "nodes": "https://flowextract.dev/vocab#nodes",
    "edges": "https://flowextract.dev/vocab#edges",
    "source": "https://flowextract.dev/vocab#source",
    "target": "https://flowextract.dev/vocab#target",
}

EDGE_TYPE_FLOW = "flow"


@dataclass
class GraphNode:
    id: str
    type: NodeClass
    bbox: BoundingBox
    text: str = ""


@dataclass
class GraphEdge:
    source: str
    target: str
    type: str = EDGE_TYPE_FLOW
    label: str | None = None


@dataclass
class FlowGraph:
    nodes: list[GraphNode] = field(default_factory=list)
    edges: list[GraphEdge] = field(default_factory=list)
    diagnostics: list[dict] = field(default_factory=list)

    def node_ids(self) -> set[str]:
        return {n.id for n in self.nodes}


def _diagnostic_dicts(diags: list) -> list[dict]:
    out = []
    for d in diags:
        if isinstance(d, NotTraced):
            out.append({"arrowhead": d.arrowhead, "reason": d.reason})
        elif isinstance(d, UnassignedLabel):
            out.append(
                {
                    "label": d.value,
                    "position": [round(d.position[0], 1), round(d.position[1], 1)],
                    "reason": d.reason,
                }
            )
        elif isinstance(d, dict):
            out.append(d)
        else:
            raise TypeError(f"unsupported diagnostic: {d!r}")
    return out


def assemble(
    nodes: list[DetectedNode],
    edges: list[TracedEdge],
    diagnostics: list | None = None,
) -> FlowGraph:
    """Build the output graph: nodes sorted by id, edges by (source, target,
    label), referential integrity enforced."""
    ids = {n.id for n in nodes}
    if len(ids) != len(nodes):
        raise DanglingEdgeError("duplicate node ids in assembly input")
    for e in edges:
        if e.source not in ids:
            raise DanglingEdgeError(f"edge references missing source node '{e.source}'")
        if e.target not in ids:
            raise DanglingEdgeError(f"edge references missing target node '{e.target}'")
    gnodes = sorted(
        (GraphNode(id=n.id, type=n.node_class, bbox=n.bbox, text=n.text) for n in nodes),
        key=lambda n: n.id,
    )
    gedges = sorted(
        (GraphEdge(source=e.source, target=e.target, label=e.label) for e in edges),
        key=lambda e: (e.source, e.target, e.label or ""),
    )
    return FlowGraph(nodes=gnodes, edges=gedges, diagnostics=_diagnostic_dicts(diagnostics or []))


def canonical(
    nodes: list[GraphNode], edges: list[GraphEdge], diagnostics: list[dict] | None = None
) -> FlowGraph:
    """FlowGraph from pre-built records, with the same ordering and
    referential checks as assemble()."""
    ids = {n.id for n in nodes}
    if len(ids) != len(nodes):
        raise DanglingEdgeError("duplicate node ids")
    for e in edges:
        if e.source not in ids or e.target not in ids:
            raise DanglingEdgeError(f"edge {e.source}->{e.target} references a missing node")
    return FlowGraph(
        nodes=sorted(nodes, key=lambda n: n.id),
        edges=sorted(edges, key=lambda e: (e.source, e.target, e.label or "")),
        diagnostics=list(diagnostics or []),
    )


def to_payload(g: FlowGraph, jsonld: bool = False) -> dict:
    """Plain-dict form of the graph in canonical key order."""
    payload: dict = {}
    if jsonld:
        payload["@context"] = dict(JSONLD_CONTEXT)
    payload["nodes"] = [
        {"id": n.id, "type": n.type.value, "bbox": n.bbox.as_list(), "text": n.text} for n in g.nodes
    ]
    payload["edges"] = [
        {"source": e.source, "target": e.target, "type": e.type}
        | ({"label": e.label} if e.label is not None else {})
        for e in g.edges
    ]
    payload["diagnostics"] = list(g.diagnostics)
    return payload


def serialize(g: FlowGraph, jsonld: bool = False) -> bytes:
    """Canonical bytes: fixed key order, 2-space indent, newline-terminated."""
    return (json.dumps(to_payload(g, jsonld=jsonld), indent=2, ensure_ascii=False) + "\n").encode("utf-8")


def _parse_node(obj: dict, where: str) -> GraphNode:
    for key in ("id", "type", "bbox", "text"):
        if key not in obj:
            raise SchemaViolationError(f"{where}: missing field '{key}'")
    try:
        cls = NodeClass(obj["type"])
    except ValueError as e:
        raise SchemaViolationError(f"{where}: unknown node type '{obj['type']}'") from e
    bbox = obj["bbox"]
    if not isinstance(bbox, list) or len(bbox) != 4:
        raise SchemaViolationError(f"{where}: 'bbox' must be [x, y, w, h]")
    try:
        box = BoundingBox(int(bbox[0]), int(bbox[1]), int(bbox[2]), int(bbox[3]))
    except (TypeError, ValueError) as e:
        raise SchemaViolationError(f"{where}: invalid bbox: {e}") from e
    if not isinstance(obj["id"], str) or not obj["id"]:
        raise SchemaViolationError(f"{where}: 'id' must be a non-empty string")
    if not isinstance(obj["text"], str):
        raise SchemaViolationError(f"{where}: 'text' must be a string")
    return GraphNode(id=obj["id"], type=cls, bbox=box, text=obj["text"])


def _parse_edge(obj: dict, node_ids: set[str], where: str) -> GraphEdge:
    for key in ("source", "target", "type"):
        if key not in obj:
            raise SchemaViolationError(f"{where}: missing field '{key}'")
    label = obj.get("label")
    if label is not None and label not in ("ja", "nee"):
        raise SchemaViolationError(f"{where}: label must be 'ja' or 'nee', got {label!r}")
    for end in ("source", "target"):
        if obj[end] not in node_ids:
            raise SchemaViolationError(f"{where}: {end} '{obj[end]}' is not a node id")
    return GraphEdge(source=obj["source"], target=obj["target"], type=obj["type"], label=label)


def from_payload(payload: dict, where: str = "graph") -> FlowGraph:
    """Validate and build a FlowGraph from parsed JSON."""
    if not isinstance(payload, dict):
        raise SchemaViolationError(f"{where}: document must be an object")
    for key in ("nodes", "edges"):
        if not isinstance(payload.get(key), list):
            raise SchemaViolationError(f"{where}: missing or invalid '{key}' list")
    nodes = [_parse_node(n, f"{where}: nodes[{i}]") for i, n in enumerate(payload["nodes"])]
    ids = {n.id for n in nodes}
    if len(ids) != len(nodes):
        raise SchemaViolationError(f"{where}: node ids must be unique")
    edges = [_parse_edge(e, ids, f"{where}: edges[{i}]") for i, e in enumerate(payload["edges"])]
    diags = payload.get("diagnostics", [])
    if not isinstance(diags, list):
        raise SchemaViolationError(f"{where}: 'diagnostics' must be a list")
    return FlowGraph(nodes=nodes, edges=edges, diagnostics=list(diags))


def parse(data: bytes | str) -> FlowGraph:
    """Inverse of serialize; validates the schema on the way in."""
    try:
        payload = json.loads(data)
    except json.JSONDecodeError as e:
        raise SchemaViolationError(f"graph document is not valid JSON: {e}") from e
    return from_payload(payload)


def load(path: str | Path) -> FlowGraph:
    path = Path(path)
    try:
        return parse(path.read_text(encoding="utf-8"))
    except SchemaViolationError as e:
        raise SchemaViolationError(f"{path}: {e}") from e
