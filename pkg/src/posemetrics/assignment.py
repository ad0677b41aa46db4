"""Min-cost bipartite assignment with deterministic tie-breaking.

``solve_min_cost`` runs an O(n^3) shortest-augmenting-path solver
(Jonker-Volgenant style) and then canonicalizes ties so that among all
optimal assignments the lexicographically smallest pair list is returned.
Reports built on top of it are therefore byte-reproducible across runs
and platforms. ``brute_force_min_cost`` is the exhaustive oracle used to
verify it and is deliberately kept free of any shared code.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations

import numpy as np

__all__ = ["CostMatrix", "Assignment", "solve_min_cost", "brute_force_min_cost"]

_BRUTE_FORCE_LIMIT = 9


@dataclass(frozen=True)
class CostMatrix:
    """A validated m x n matrix of finite, non-negative costs."""

    values: np.ndarray

    def __post_init__(self):
        arr = np.array(self.values, dtype=float, copy=True)
        if arr.ndim != 2:
            raise ValueError(f"cost matrix must be 2-dimensional, got shape {arr.shape}")
        if arr.size and not np.all(np.isfinite(arr)):
            raise ValueError("cost matrix entries must be finite")
        if arr.size and arr.min() < 0:
            raise ValueError("cost matrix entries must be non-negative")
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape


@dataclass(frozen=True)
class Assignment:
    """min(m, n) pairs of (row, col), sorted by row, plus their total cost."""

    pairs: tuple[tuple[int, int], ...]
    total_cost: float

    def __post_init__(self):
        object.__setattr__(self, "pairs", tuple((int(r), int(c)) for r, c in self.pairs))
        rows = [r for r, _ in self.pairs]
        cols = [c for _, c in self.pairs]
        if len(set(rows)) != len(rows) or len(set(cols)) != len(cols):
            raise ValueError("assignment pairs must use distinct rows and distinct columns")


def _as_array(c: CostMatrix | np.ndarray) -> np.ndarray:
    if isinstance(c, CostMatrix):
        return c.values
    return CostMatrix(np.asarray(c, dtype=float)).values


def _pair_sum(values: np.ndarray, pairs) -> float:
    total = 0.0
    for r, c in pairs:
        total += float(values[r, c])
    return total


def _jv(cost: np.ndarray):
    """Shortest-augmenting-path assignment for an m x n matrix with m <= n.

    Returns (col4row, u, v): the matched column per row and the dual
    potentials. The duals satisfy u[i] + v[j] <= cost[i, j] (up to float
    noise) with equality on every edge that any optimal assignment uses.
    """
    m, n = cost.shape
    u = np.zeros(m)
    v = np.zeros(n)
    col4row = np.full(m, -1, dtype=np.int64)
    row4col = np.full(n, -1, dtype=np.int64)

    for cur_row in range(m):
        shortest = np.full(n, np.inf)
        path = np.full(n, -1, dtype=np.int64)
        scanned_cols = np.zeros(n, dtype=bool)
        scanned_rows: list[int] = []
        i = cur_row
        min_val = 0.0
        sink = -1
        while sink == -1:
            scanned_rows.append(i)
            reduced = min_val + cost[i] - u[i] - v
            improve = ~scanned_cols & (reduced < shortest)
            shortest[improve] = reduced[improve]
            path[improve] = i
            masked = np.where(scanned_cols, np.inf, shortest)
            j = int(np.argmin(masked))
            min_val = masked[j]
            scanned_cols[j] = True
            if row4col[j] == -1:
                sink = j
            else:
                i = int(row4col[j])

        u[cur_row] += min_val
        others = np.array([r for r in scanned_rows if r != cur_row], dtype=np.int64)
        if others.size:
            u[others] += min_val - shortest[col4row[others]]
        v[scanned_cols] -= min_val - shortest[scanned_cols]

        j = sink
        while True:
            i = int(path[j])
            row4col[j] = i
            col4row[i], j = j, int(col4row[i])
            if i == cur_row:
                break

    return col4row, u, v


def _solve_any(cost: np.ndarray):
    """JV solve for any orientation; returns (pairs sorted by row, u, v)."""
    m, n = cost.shape
    if m <= n:
        col4row, u, v = _jv(cost)
        pairs = [(r, int(col4row[r])) for r in range(m)]
    else:
        # solve the transpose; its row duals index our columns and vice versa
        row4col, col_duals, row_duals = _jv(cost.T)
        pairs = sorted((int(row4col[c]), c) for c in range(n))
        u, v = row_duals, col_duals
    return pairs, u, v


def solve_min_cost(c: CostMatrix | np.ndarray) -> Assignment:
    """Globally optimal assignment of min(m, n) pairs.

    Under ties the lexicographically smallest pair list among all optimal
    assignments is returned. Tie canonicalization only re-solves
    subproblems when the dual certificate leaves more than one candidate,
    so the common unique-optimum case costs a single solve.
    """
    values = _as_array(c)
    m, n = values.shape
    p = min(m, n)
    if p == 0:
        return Assignment((), 0.0)

    witness, u, v = _solve_any(values)
    best_cost = _pair_sum(values, witness)
    scale = max(1.0, float(values.max()))
    eps = 1e-9 * scale
    tol = 1e-9 * max(1.0, best_cost)
    slack = values - u[:, None] - v[None, :]

    chosen: list[tuple[int, int]] = []
    avail = list(range(n))
    fixed = 0.0
    last_row = -1
    for pos in range(p):
        remaining = p - pos - 1
        w_row, w_col = witness[pos]
        placed = False
        for r in range(last_row + 1, m - remaining):
            if placed:
                break
            if r > w_row:
                raise RuntimeError("assignment canonicalization lost its optimal witness")
            cands = [cc for cc in avail if slack[r, cc] <= eps]
            for cc in cands:
                if r == w_row and cc == w_col:
                    # witness pair: optimal by construction, no re-solve needed
                    placed = True
                elif remaining == 0:
                    placed = abs(fixed + values[r, cc] - best_cost) <= tol
                else:
                    sub_rows = np.arange(r + 1, m)
                    sub_cols = np.array([a for a in avail if a != cc], dtype=np.int64)
                    sub = values[np.ix_(sub_rows, sub_cols)]
                    sub_pairs, _, _ = _solve_any(sub)
                    sub_cost = _pair_sum(sub, sub_pairs)
                    if abs(fixed + values[r, cc] + sub_cost - best_cost) <= tol:
                        witness = chosen + [(r, cc)] + [
                            (int(sub_rows[sr]), int(sub_cols[sc])) for sr, sc in sub_pairs
                        ]
                        placed = True
                if placed:
                    chosen.append((r, cc))
                    fixed += float(values[r, cc])
                    avail.remove(cc)
                    last_row = r
                    break
        if not placed:
            raise RuntimeError("assignment canonicalization failed to place a pair")

    return Assignment(tuple(chosen), _pair_sum(values, chosen))


def brute_force_min_cost(c: CostMatrix | np.ndarray) -> Assignment:
    """Exhaustive assignment oracle for matrices with max(m, n) <= 9.

    Enumerates every injection of the smaller side into the larger and
    returns the optimum, breaking ties toward the lexicographically
    smallest pair list. Independent of ``solve_min_cost`` by design.
    """
    values = _as_array(c)
    m, n = values.shape
    if max(m, n) > _BRUTE_FORCE_LIMIT:
        raise ValueError(
            f"brute force refuses matrices larger than {_BRUTE_FORCE_LIMIT} "
            f"on a side, got {m}x{n}"
        )
    if min(m, n) == 0:
        return Assignment((), 0.0)

    tie_tol = 1e-12
    best_cost = np.inf
    best_pairs: tuple[tuple[int, int], ...] | None = None
    if m <= n:
        candidates = (
            tuple((r, c) for r, c in enumerate(cols))
            for cols in permutations(range(n), m)
        )
    else:
        candidates = (
            tuple(sorted((r, c) for c, r in enumerate(rows)))
            for rows in permutations(range(m), n)
        )
    for pairs in candidates:
        cost = 0.0
        for r, c in pairs:
            cost += float(values[r, c])
        if cost < best_cost - tie_tol:
            best_cost, best_pairs = cost, pairs
        elif cost < best_cost + tie_tol and (best_pairs is None or pairs < best_pairs):
            best_cost, best_pairs = min(best_cost, cost), pairs
    assert best_pairs is not None
    return Assignment(best_pairs, _pair_sum(values, best_pairs))
