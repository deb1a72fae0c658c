"""Exact edit accounting under a fixed mapping, edit-path extraction, and the
brute-force oracle.

The distance realized by a mapping ``pi`` over a padded pair is the node term
plus the edge term::

    sum_v cost(label(v) -> label(pi(v)))
    + sum_{v1 < v2} edge_cost_squared * [exactly one of (v1,v2), (pi(v1),pi(v2)) is an edge]

Mapping a real node onto a padding node is a deletion, a padding node onto a
real node an insertion, and two differently labeled real nodes a substitution.
Both accounting functions below accumulate in sorted index order so repeated
evaluation is bit-for-bit reproducible.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Union

import numpy as np

from .assignment import Permutation
from .costs import CostModel, build_cost_matrix
from .errors import BudgetExceededError
from .graphs import GraphPair, LabeledGraph, adjacency, pad_pair

#: Default cap on the padded order accepted by the exhaustive oracle.
DEFAULT_NODE_BUDGET = 9

_PERM_BLOCK = 5040  # permutations per scoring block; bounds peak memory


@dataclass(frozen=True)
class NodeInsert:
    target: int  # node index in g2
    label: str
    cost: float
    kind = "node_insert"


@dataclass(frozen=True)
class NodeDelete:
    node: int  # node index in g1
    label: str
    cost: float
    kind = "node_delete"


@dataclass(frozen=True)
class NodeSubstitute:
    node: int
    target: int
    from_label: str
    to_label: str
    cost: float
    kind = "node_substitute"


@dataclass(frozen=True)
class EdgeInsert:
    node_a: int  # endpoints in g1 index space
    node_b: int
    target_a: int  # the inserted edge's endpoints in g2 index space
    target_b: int
    cost: float
    kind = "edge_insert"


@dataclass(frozen=True)
class EdgeDelete:
    node_a: int
    node_b: int
    cost: float
    kind = "edge_delete"


EditOp = Union[NodeInsert, NodeDelete, NodeSubstitute, EdgeInsert, EdgeDelete]


@dataclass(frozen=True)
class EditPath:
    """Ordered edit operations realizing a mapping, with their exact total."""

    ops: tuple[EditOp, ...]
    total_cost: float

    def to_json(self) -> dict:
        return {
            "ops": [_op_json(op) for op in self.ops],
            "total_cost": self.total_cost,
        }


def _op_json(op: EditOp) -> dict:
    doc = {"kind": op.kind}
    for key, value in vars(op).items():
        doc[key] = value
    return doc


@dataclass(frozen=True)
class ExactResult:
    """True minimum distance and a mapping attaining it."""

    ged: float
    optimal_mapping: Permutation


def ged_under_mapping(pair: GraphPair, perm: Permutation, cm: CostModel) -> float:
    """Exact edit cost realized by ``perm`` on a padded pair."""
    n = pair.order
    if perm.order != n:
        raise ValueError(f"mapping order {perm.order} does not match pair order {n}")
    pool = pair.real_label_pool()
    labels1 = pair.g1.labels
    labels2 = pair.g2.labels
    m = perm.mapping
    total = 0.0
    for v in range(n):
        total += cm.node_edit_cost(labels1[v], labels2[m[v]], pool)
    e1 = set(pair.g1.edges)
    e2 = set(pair.g2.edges)
    k2 = cm.edge_cost_squared
    for v1 in range(n):
        for v2 in range(v1 + 1, n):
            w1, w2 = m[v1], m[v2]
            present1 = (v1, v2) in e1
            present2 = ((w1, w2) if w1 < w2 else (w2, w1)) in e2
            if present1 != present2:
                total += k2
    return total


def extract_edit_path(pair: GraphPair, perm: Permutation, cm: CostModel) -> EditPath:
    """Edit operations realized by ``perm``; total matches
    :func:`ged_under_mapping` bit-for-bit.

    Edge operations are reported in the first graph's index space; insertions
    additionally name the inserted edge's endpoints in the second graph.
    """
    n = pair.order
    if perm.order != n:
        raise ValueError(f"mapping order {perm.order} does not match pair order {n}")
    pool = pair.real_label_pool()
    labels1 = pair.g1.labels
    labels2 = pair.g2.labels
    m = perm.mapping
    dummy1 = pair.g1.is_dummy
    dummy2 = pair.g2.is_dummy
    ops: list[EditOp] = []
    total = 0.0
    for v in range(n):
        w = m[v]
        l1 = labels1[v]
        l2 = labels2[w]
        if l1 == l2:
            continue
        if dummy1(v):
            cost = cm.node_insert_cost(l2)
            ops.append(NodeInsert(target=w, label=l2, cost=cost))
        elif dummy2(w):
            cost = cm.node_delete_cost(l1)
            ops.append(NodeDelete(node=v, label=l1, cost=cost))
        else:
            cost = cm.node_substitute_cost(l1, l2, pool)
            ops.append(
                NodeSubstitute(node=v, target=w, from_label=l1, to_label=l2, cost=cost)
            )
        total += cost
    e1 = set(pair.g1.edges)
    e2 = set(pair.g2.edges)
    k2 = cm.edge_cost_squared
    for v1 in range(n):
        for v2 in range(v1 + 1, n):
            w1, w2 = m[v1], m[v2]
            present1 = (v1, v2) in e1
            present2 = ((w1, w2) if w1 < w2 else (w2, w1)) in e2
            if present1 == present2:
                continue
            if present1:
                ops.append(EdgeDelete(node_a=v1, node_b=v2, cost=k2))
            else:
                ops.append(
                    EdgeInsert(
                        node_a=v1,
                        node_b=v2,
                        target_a=min(w1, w2),
                        target_b=max(w1, w2),
                        cost=k2,
                    )
                )
            total += k2
    return EditPath(ops=tuple(ops), total_cost=total)


def _permutation_blocks(n: int) -> Iterator[np.ndarray]:
    """Lexicographically ordered permutations of ``0..n-1`` in bounded blocks."""
    it = itertools.permutations(range(n))
    while True:
        block = list(itertools.islice(it, _PERM_BLOCK))
        if not block:
            return
        yield np.array(block, dtype=np.int64)


def exact_ged(
    g1: LabeledGraph,
    g2: LabeledGraph,
    cm: CostModel,
    node_budget: int = DEFAULT_NODE_BUDGET,
) -> ExactResult:
    """True distance by exhaustive enumeration of all mappings.

    Ties are broken toward the lexicographically smallest mapping. Refuses
    pairs whose padded order exceeds ``node_budget`` rather than approximating.

    Mappings are scored in vectorized blocks; the winner is re-evaluated with
    :func:`ged_under_mapping` so the reported value matches the per-mapping
    accounting exactly.
    """
    pair = pad_pair(g1, g2)
    n = pair.order
    if n > node_budget:
        raise BudgetExceededError(
            f"padded order {n} exceeds the exact-search budget {node_budget}"
        )
    if n == 0:
        return ExactResult(ged=0.0, optimal_mapping=Permutation(()))
    d = build_cost_matrix(pair, cm)
    a = adjacency(pair.g1)
    b = adjacency(pair.g2)
    k2 = cm.edge_cost_squared
    rows = np.arange(n)
    best_total = np.inf
    best_perm: np.ndarray | None = None
    for perms in _permutation_blocks(n):
        node_term = d[rows[None, :], perms].sum(axis=1)
        permuted_b = b[perms[:, :, None], perms[:, None, :]]
        mismatches = (a[None, :, :] != permuted_b).sum(axis=(1, 2)) // 2
        totals = node_term + k2 * mismatches
        k = int(np.argmin(totals))
        if totals[k] < best_total:
            best_total = float(totals[k])
            best_perm = perms[k].copy()
    assert best_perm is not None
    mapping = Permutation(tuple(int(j) for j in best_perm))
    return ExactResult(ged=ged_under_mapping(pair, mapping, cm), optimal_mapping=mapping)
