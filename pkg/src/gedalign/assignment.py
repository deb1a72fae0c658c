"""Exact linear assignment and rounding of relaxed alignments to permutations.

The solver is the O(n^3) shortest-augmenting-path method on dense costs.
Determinism contract: among all optimal assignments, the lexicographically
smallest mapping is returned. The augmenting search alone does not guarantee
that, so a second pass refines the solution inside the graph of tight edges
(zero reduced cost under the optimal duals), where every optimal assignment
lives by complementary slackness.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Permutation:
    """Bijection on ``0..n-1``; ``mapping[i]`` is the image of ``i``."""

    mapping: tuple[int, ...]

    def __post_init__(self) -> None:
        n = len(self.mapping)
        if sorted(self.mapping) != list(range(n)):
            raise ValueError(f"not a bijection on 0..{n - 1}: {self.mapping!r}")

    @staticmethod
    def identity(n: int) -> Permutation:
        return Permutation(tuple(range(n)))

    @property
    def order(self) -> int:
        return len(self.mapping)

    def matrix(self) -> np.ndarray:
        """0/1 matrix ``P`` with ``P[i, mapping[i]] = 1``."""
        n = self.order
        p = np.zeros((n, n), dtype=np.float64)
        p[np.arange(n), list(self.mapping)] = 1.0
        return p

    def inverse(self) -> Permutation:
        inv = [0] * self.order
        for i, j in enumerate(self.mapping):
            inv[j] = i
        return Permutation(tuple(inv))

    def then(self, other: Permutation) -> Permutation:
        """Composition ``i -> other(self(i))``; matches the matrix product
        ``self.matrix() @ other.matrix()``."""
        if other.order != self.order:
            raise ValueError("cannot compose permutations of different orders")
        return Permutation(tuple(other.mapping[j] for j in self.mapping))


def _augmenting_path_lap(cost: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Minimize a square assignment; returns (row_to_col, row duals, column duals).

    Rows are inserted in index order and every scan over columns runs in index
    order with strict-improvement comparisons, so the outcome is deterministic.
    """
    n = cost.shape[0]
    u = np.zeros(n, dtype=np.float64)
    v = np.zeros(n + 1, dtype=np.float64)  # index n is the virtual start column
    col_to_row = np.full(n + 1, -1, dtype=np.int64)
    way = np.full(n, -1, dtype=np.int64)
    for i in range(n):
        col_to_row[n] = i
        j0 = n
        minv = np.full(n, np.inf, dtype=np.float64)
        used = np.zeros(n + 1, dtype=bool)
        while True:
            used[j0] = True
            i0 = col_to_row[j0]
            free = ~used[:n]
            idx = np.nonzero(free)[0]
            reduced = cost[i0, idx] - u[i0] - v[idx]
            better = reduced < minv[idx]
            sel = idx[better]
            minv[sel] = reduced[better]
            way[sel] = j0
            k = int(np.argmin(minv[idx]))
            j1 = int(idx[k])
            delta = minv[j1]
            used_cols = np.nonzero(used[:n])[0]
            u[col_to_row[used_cols]] += delta
            u[i] += delta  # the virtual column is always in use and carries row i
            v[used_cols] -= delta
            minv[idx] -= delta
            j0 = j1
            if col_to_row[j0] == -1:
                break
        while j0 != n:
            j1 = int(way[j0])
            col_to_row[j0] = col_to_row[j1]
            j0 = j1
    row_to_col = np.empty(n, dtype=np.int64)
    row_to_col[col_to_row[:n]] = np.arange(n)
    return row_to_col, u, v[:n]


def _lexicographic_refine(tight: np.ndarray, row_to_col: np.ndarray) -> np.ndarray:
    """Lexicographically smallest perfect matching inside the tight-edge graph.

    Starting from a known perfect matching, rows are pinned in index order to
    their smallest feasible tight column; feasibility of a candidate column is
    checked by rerouting the displaced row through an alternating path that
    avoids pinned rows and columns.
    """
    n = tight.shape[0]
    col_of = row_to_col.copy()
    row_of = np.empty(n, dtype=np.int64)
    row_of[col_of] = np.arange(n)
    pinned_col = np.zeros(n, dtype=bool)

    def reroute(row: int, visited: np.ndarray) -> bool:
        for j in range(n):
            if not tight[row, j] or pinned_col[j] or visited[j]:
                continue
            visited[j] = True
            if row_of[j] == -1 or reroute(int(row_of[j]), visited):
                col_of[row] = j
                row_of[j] = row
                return True
        return False

    for i in range(n):
        current = int(col_of[i])
        for j in range(current):
            if not tight[i, j] or pinned_col[j]:
                continue
            displaced = int(row_of[j])
            saved_col_of = col_of.copy()
            saved_row_of = row_of.copy()
            col_of[i] = j
            row_of[j] = i
            row_of[current] = -1
            visited = np.zeros(n, dtype=bool)
            visited[j] = True
            if reroute(displaced, visited):
                break
            col_of = saved_col_of
            row_of = saved_row_of
        pinned_col[int(col_of[i])] = True
    return col_of


def solve_assignment(cost: np.ndarray, sense: str = "min") -> Permutation:
    """Optimal assignment for a square cost matrix.

    ``sense`` is ``"min"`` or ``"max"`` (maximization negates the costs).
    Among optimal assignments the lexicographically smallest mapping wins.
    """
    cost = np.asarray(cost, dtype=np.float64)
    if cost.ndim != 2 or cost.shape[0] != cost.shape[1]:
        raise ValueError(f"cost matrix must be square, got shape {cost.shape}")
    if not np.all(np.isfinite(cost)):
        raise ValueError("cost matrix contains non-finite entries")
    if sense not in ("min", "max"):
        raise ValueError(f"sense must be 'min' or 'max', got {sense!r}")
    n = cost.shape[0]
    if n == 0:
        return Permutation(())
    work = -cost if sense == "max" else cost
    row_to_col, u, v = _augmenting_path_lap(work)
    scale = max(1.0, float(np.abs(work).max()))
    tight = (work - u[:, None] - v[None, :]) <= 1e-9 * scale
    tight[np.arange(n), row_to_col] = True  # matched edges are tight up to roundoff
    refined = _lexicographic_refine(tight, row_to_col)
    return Permutation(tuple(int(j) for j in refined))


def round_to_permutation(p: np.ndarray) -> Permutation:
    """Nearest permutation to a relaxed alignment: maximize the total overlap
    ``sum_i p[i, mapping[i]]``."""
    return solve_assignment(p, sense="max")
