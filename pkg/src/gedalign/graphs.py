"""Labeled undirected graphs: model, validation, padding, adjacency, JSON I/O.

Graph JSON schema::

    {"nodes": [{"id": 0, "label": "a"}, ...],   # sorted by id, ids contiguous from 0
     "edges": [[0, 1], ...]}                    # unordered pairs, stored with first < second

Serialization is canonical (sorted keys, nodes by id, sorted edges) so that a
saved graph is byte-stable and usable as a golden file.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import IO, Iterable, Sequence

import numpy as np

from .errors import GraphFormatError

#: Reserved label for padding nodes. Real graphs must never use it.
DUMMY_LABEL = "ε"


@dataclass(frozen=True)
class LabeledGraph:
    """Immutable node-labeled simple undirected graph.

    ``labels[i]`` is the label of node ``i``; node ids are the contiguous range
    ``0..order-1``. ``edges`` holds ``(i, j)`` pairs with ``i < j``, sorted.
    Padding nodes carry :data:`DUMMY_LABEL` and are always isolated and stored
    after every real node.
    """

    labels: tuple[str, ...]
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        n = len(self.labels)
        seen: set[tuple[int, int]] = set()
        prev = None
        for edge in self.edges:
            i, j = edge
            if not (0 <= i < n and 0 <= j < n):
                raise GraphFormatError(f"edge {edge!r}: endpoint out of range 0..{n - 1}")
            if i == j:
                raise GraphFormatError(f"edge {edge!r}: self-loop")
            if i > j:
                raise GraphFormatError(f"edge {edge!r}: endpoints must be ordered")
            if edge in seen:
                raise GraphFormatError(f"edge {edge!r}: duplicate")
            if prev is not None and edge < prev:
                raise GraphFormatError("edges are not sorted")
            seen.add(edge)
            prev = edge
        dummy_zone = False
        for i, label in enumerate(self.labels):
            if label == DUMMY_LABEL:
                dummy_zone = True
            elif dummy_zone:
                raise GraphFormatError(f"node {i}: real node after a padding node")
        for i, j in self.edges:
            if self.labels[i] == DUMMY_LABEL or self.labels[j] == DUMMY_LABEL:
                raise GraphFormatError(f"edge ({i}, {j}): touches a padding node")

    @property
    def order(self) -> int:
        return len(self.labels)

    @property
    def dummy_count(self) -> int:
        return sum(1 for label in self.labels if label == DUMMY_LABEL)

    def is_dummy(self, node: int) -> bool:
        return self.labels[node] == DUMMY_LABEL

    def real_labels(self) -> frozenset[str]:
        """Set of labels carried by non-padding nodes."""
        return frozenset(label for label in self.labels if label != DUMMY_LABEL)


def make_graph(labels: Sequence[str], edges: Iterable[Sequence[int]]) -> LabeledGraph:
    """Build a graph from unnormalized parts, rejecting invariant violations.

    Edge pairs may come in either orientation; they are normalized to
    ``first < second`` and sorted. Duplicates (in any orientation) and
    self-loops are errors, as is any use of the reserved padding label.
    """
    for i, label in enumerate(labels):
        if label == DUMMY_LABEL:
            raise GraphFormatError(f"node {i}: label {DUMMY_LABEL!r} is reserved for padding")
    normalized: list[tuple[int, int]] = []
    seen: set[tuple[int, int]] = set()
    n = len(labels)
    for pos, edge in enumerate(edges):
        if len(edge) != 2:
            raise GraphFormatError(f"edges[{pos}]: expected a pair, got {list(edge)!r}")
        i, j = int(edge[0]), int(edge[1])
        if i == j:
            raise GraphFormatError(f"edges[{pos}]: self-loop on node {i}")
        if not (0 <= i < n and 0 <= j < n):
            raise GraphFormatError(f"edges[{pos}]: endpoint out of range 0..{n - 1}")
        key = (min(i, j), max(i, j))
        if key in seen:
            raise GraphFormatError(f"edges[{pos}]: duplicate edge {key}")
        seen.add(key)
        normalized.append(key)
    normalized.sort()
    return LabeledGraph(labels=tuple(labels), edges=tuple(normalized))


@dataclass(frozen=True)
class GraphPair:
    """Two graphs padded to a common order.

    At most one side carries padding nodes, and only as many as the original
    size difference.
    """

    g1: LabeledGraph
    g2: LabeledGraph

    def __post_init__(self) -> None:
        if self.g1.order != self.g2.order:
            raise GraphFormatError(
                f"pair orders differ: {self.g1.order} vs {self.g2.order}"
            )
        if self.g1.dummy_count and self.g2.dummy_count:
            raise GraphFormatError("both graphs of a pair carry padding nodes")

    @property
    def order(self) -> int:
        return self.g1.order

    def real_label_pool(self) -> frozenset[str]:
        """Union of the two graphs' real label sets."""
        return self.g1.real_labels() | self.g2.real_labels()


def _pad(g: LabeledGraph, count: int) -> LabeledGraph:
    if count == 0:
        return g
    return LabeledGraph(labels=g.labels + (DUMMY_LABEL,) * count, edges=g.edges)


def pad_pair(g1: LabeledGraph, g2: LabeledGraph) -> GraphPair:
    """Equalize graph orders by appending isolated padding nodes to the smaller one.

    Original node indices are preserved; padding nodes take the trailing
    indices. Inputs must be unpadded.
    """
    if g1.dummy_count or g2.dummy_count:
        raise GraphFormatError("pad_pair inputs must not already contain padding nodes")
    n = max(g1.order, g2.order)
    return GraphPair(g1=_pad(g1, n - g1.order), g2=_pad(g2, n - g2.order))


def adjacency(g: LabeledGraph) -> np.ndarray:
    """Dense symmetric 0/1 adjacency matrix; padding nodes give zero rows/columns."""
    a = np.zeros((g.order, g.order), dtype=np.float64)
    for i, j in g.edges:
        a[i, j] = 1.0
        a[j, i] = 1.0
    return a


def load_graph(source: bytes | str | IO) -> LabeledGraph:
    """Parse and validate a graph document (bytes, text, or a readable stream).

    The result never contains padding nodes. Every violation is reported with
    the offending location.
    """
    if hasattr(source, "read"):
        data = source.read()
    else:
        data = source
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise GraphFormatError(f"graph JSON parse error: {exc}") from exc
    if not isinstance(doc, dict):
        raise GraphFormatError("graph document must be a JSON object")
    for key in ("nodes", "edges"):
        if key not in doc:
            raise GraphFormatError(f"graph document missing {key!r}")
        if not isinstance(doc[key], list):
            raise GraphFormatError(f"{key!r} must be an array")
    labels: list[str] = []
    for pos, node in enumerate(doc["nodes"]):
        if not isinstance(node, dict) or "id" not in node or "label" not in node:
            raise GraphFormatError(f"nodes[{pos}]: expected an object with 'id' and 'label'")
        if not isinstance(node["id"], int) or isinstance(node["id"], bool):
            raise GraphFormatError(f"nodes[{pos}]: 'id' must be an integer")
        if node["id"] != pos:
            raise GraphFormatError(
                f"nodes[{pos}]: id {node['id']} out of order; ids must be contiguous from 0"
            )
        if not isinstance(node["label"], str):
            raise GraphFormatError(f"nodes[{pos}]: 'label' must be a string")
        labels.append(node["label"])
    for pos, edge in enumerate(doc["edges"]):
        if (
            not isinstance(edge, list)
            or len(edge) != 2
            or not all(isinstance(e, int) and not isinstance(e, bool) for e in edge)
        ):
            raise GraphFormatError(f"edges[{pos}]: expected a pair of integer node ids")
    return make_graph(labels, doc["edges"])


def save_graph(g: LabeledGraph) -> str:
    """Canonical JSON text for a graph; refuses graphs with padding nodes."""
    if g.dummy_count:
        raise GraphFormatError("cannot serialize a padded graph")
    doc = {
        "nodes": [{"id": i, "label": label} for i, label in enumerate(g.labels)],
        "edges": [list(edge) for edge in g.edges],
    }
    return json.dumps(doc, sort_keys=True, ensure_ascii=False, indent=2) + "\n"
