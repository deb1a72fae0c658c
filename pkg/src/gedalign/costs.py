"""Edit-cost semantics: built-in settings, custom cost files, node-cost matrices.

A cost model fixes the price of every node edit (insert, delete, substitute)
and a single squared edge-edit cost. The node-cost matrix ``D`` of a padded
pair prices mapping node ``i`` of the first graph onto node ``j`` of the
second:

* ``i`` is a padding node  ->  insertion cost of ``j``'s label
* ``j`` is a padding node  ->  deletion cost of ``i``'s label
* labels differ            ->  substitution cost
* otherwise                ->  0
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import IO, AbstractSet, Mapping

import numpy as np

from .errors import CostModelError
from .graphs import DUMMY_LABEL, GraphPair

BUILTIN_SETTINGS = ("case1", "case2", "case3")


@dataclass(frozen=True)
class CostModel:
    """Node edit costs plus the squared edge insertion/deletion cost.

    Per-label tables override the defaults. With ``nearest_label_substitution``
    set, substitution is priced by integer-id proximity instead of the tables:
    cost 1 when the target label is a nearest neighbor of the source label
    within the supplied label pool (ties inclusive), cost 2 otherwise.
    """

    edge_cost_squared: float
    insert_default: float
    delete_default: float
    substitute_default: float = 0.0
    insert_costs: Mapping[str, float] = field(default_factory=dict)
    delete_costs: Mapping[str, float] = field(default_factory=dict)
    substitute_costs: Mapping[tuple[str, str], float] = field(default_factory=dict)
    nearest_label_substitution: bool = False

    def __post_init__(self) -> None:
        if not (self.edge_cost_squared > 0) or not math.isfinite(self.edge_cost_squared):
            raise CostModelError("edge_cost_squared must be a positive finite number")
        for name, value in (
            ("insert_default", self.insert_default),
            ("delete_default", self.delete_default),
            ("substitute_default", self.substitute_default),
        ):
            _check_cost(name, value)
        for table_name, table in (
            ("node_insert", self.insert_costs),
            ("node_delete", self.delete_costs),
        ):
            for label, value in table.items():
                _check_cost(f"{table_name}[{label!r}]", value)
        for (l1, l2), value in self.substitute_costs.items():
            _check_cost(f"node_substitute[{l1!r}, {l2!r}]", value)
            if l1 == l2 and value != 0:
                raise CostModelError(
                    f"substitution cost for identical label {l1!r} must be 0"
                )

    @property
    def kappa(self) -> float:
        """Scaling factor applied to adjacency matrices: sqrt(edge cost)."""
        return math.sqrt(self.edge_cost_squared)

    def node_insert_cost(self, label: str) -> float:
        return float(self.insert_costs.get(label, self.insert_default))

    def node_delete_cost(self, label: str) -> float:
        return float(self.delete_costs.get(label, self.delete_default))

    def node_substitute_cost(
        self, from_label: str, to_label: str, label_pool: AbstractSet[str] | None = None
    ) -> float:
        if from_label == to_label:
            return 0.0
        if self.nearest_label_substitution:
            if label_pool is None:
                raise CostModelError(
                    "nearest-label substitution needs the pair's label pool"
                )
            return _nearest_label_cost(from_label, to_label, label_pool)
        return float(
            self.substitute_costs.get((from_label, to_label), self.substitute_default)
        )

    def node_edit_cost(
        self, from_label: str, to_label: str, label_pool: AbstractSet[str] | None = None
    ) -> float:
        """Cost of mapping a node with ``from_label`` onto one with ``to_label``.

        Either side may be the padding label, encoding insertion or deletion.
        """
        if from_label == to_label:
            return 0.0
        if from_label == DUMMY_LABEL:
            return self.node_insert_cost(to_label)
        if to_label == DUMMY_LABEL:
            return self.node_delete_cost(from_label)
        return self.node_substitute_cost(from_label, to_label, label_pool)


def _check_cost(name: str, value: float) -> None:
    if not isinstance(value, (int, float)) or isinstance(value, bool):
        raise CostModelError(f"{name}: cost must be a number, got {value!r}")
    if not math.isfinite(value) or value < 0:
        raise CostModelError(f"{name}: cost must be finite and nonnegative, got {value}")


def _label_id(label: str) -> int:
    try:
        return int(label, 10)
    except ValueError:
        raise CostModelError(
            f"label {label!r} is not an integer id; nearest-label substitution "
            "requires integer labels"
        ) from None


def _nearest_label_cost(from_label: str, to_label: str, pool: AbstractSet[str]) -> float:
    """Substitution price under the integer-id nearest-neighbor rule.

    Candidates are the pool's real labels other than the source label itself.
    The target costs 1 when its id distance attains the candidate minimum
    (ties count as nearest), otherwise 2. A pool with no other candidate
    cannot rank the target, which then costs 2.
    """
    src = _label_id(from_label)
    dst = _label_id(to_label)
    best: int | None = None
    for label in pool:
        if label == from_label or label == DUMMY_LABEL:
            continue
        dist = abs(_label_id(label) - src)
        if best is None or dist < best:
            best = dist
    if best is None:
        return 2.0
    return 1.0 if abs(dst - src) == best else 2.0


def builtin_cost_model(setting: str) -> CostModel:
    """One of the three built-in cost settings.

    * ``case1``: insert 3, delete 1, substitution free, squared edge cost 2.
    * ``case2``: as ``case1`` but substitution costs 1 for a nearest-neighbor
      label (by integer-id distance over the pair's labels) and 2 otherwise.
    * ``case3``: every insert/delete costs 1, substitution free, squared edge
      cost 1.
    """
    if setting == "case1":
        return CostModel(edge_cost_squared=2.0, insert_default=3.0, delete_default=1.0)
    if setting == "case2":
        return CostModel(
            edge_cost_squared=2.0,
            insert_default=3.0,
            delete_default=1.0,
            nearest_label_substitution=True,
        )
    if setting == "case3":
        return CostModel(edge_cost_squared=1.0, insert_default=1.0, delete_default=1.0)
    raise CostModelError(
        f"unknown cost setting {setting!r}; expected one of {', '.join(BUILTIN_SETTINGS)}"
    )


def load_cost_model(source: bytes | str | IO) -> CostModel:
    """Parse a cost file.

    Schema::

        {"edge_cost_squared": 1.0,
         "node_insert":     {"default": 2.0, "C": 3.0, ...},
         "node_delete":     {"default": 2.0, ...},
         "node_substitute": {"default": 0.0, "pairs": [["C", "N", 1.0], ...]}}

    ``node_insert`` and ``node_delete`` must declare a ``default``; extra keys
    are per-label overrides. Substitution pairs are ordered; missing pairs fall
    back to the declared default.
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
        raise CostModelError(f"cost JSON parse error: {exc}") from exc
    if not isinstance(doc, dict):
        raise CostModelError("cost document must be a JSON object")
    if "edge_cost_squared" not in doc:
        raise CostModelError("cost document missing 'edge_cost_squared'")

    def _table(section: str) -> tuple[float, dict[str, float]]:
        raw = doc.get(section)
        if not isinstance(raw, dict) or "default" not in raw:
            raise CostModelError(f"{section!r} must be an object with a 'default' cost")
        table = {k: v for k, v in raw.items() if k != "default"}
        return raw["default"], table

    insert_default, insert_costs = _table("node_insert")
    delete_default, delete_costs = _table("node_delete")
    sub_raw = doc.get("node_substitute", {"default": 0.0})
    if not isinstance(sub_raw, dict) or "default" not in sub_raw:
        raise CostModelError("'node_substitute' must be an object with a 'default' cost")
    sub_pairs: dict[tuple[str, str], float] = {}
    for pos, entry in enumerate(sub_raw.get("pairs", [])):
        if (
            not isinstance(entry, list)
            or len(entry) != 3
            or not isinstance(entry[0], str)
            or not isinstance(entry[1], str)
        ):
            raise CostModelError(
                f"node_substitute.pairs[{pos}]: expected [from_label, to_label, cost]"
            )
        sub_pairs[(entry[0], entry[1])] = entry[2]
    return CostModel(
        edge_cost_squared=doc["edge_cost_squared"],
        insert_default=insert_default,
        delete_default=delete_default,
        substitute_default=sub_raw["default"],
        insert_costs=insert_costs,
        delete_costs=delete_costs,
        substitute_costs=sub_pairs,
    )


def build_cost_matrix(pair: GraphPair, cm: CostModel) -> np.ndarray:
    """Node-cost matrix ``D`` of a padded pair; entry ``(i, j)`` prices ``i -> j``."""
    pool = pair.real_label_pool()
    n = pair.order
    d = np.zeros((n, n), dtype=np.float64)
    labels1 = pair.g1.labels
    labels2 = pair.g2.labels
    for i in range(n):
        for j in range(n):
            d[i, j] = cm.node_edit_cost(labels1[i], labels2[j], pool)
    return d
