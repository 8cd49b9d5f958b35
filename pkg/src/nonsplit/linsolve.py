"""Exact sparse linear systems over the rationals.

Rows are dicts ``{column: coefficient}``.  Elimination runs per connected
component of the row/column incidence graph, which keeps the obstruction
systems small: they decouple by even polynomial degree and odd monomial.
"""
from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence


@dataclass
class LinearSolution:
    solvable: bool
    values: dict[int, Fraction] = field(default_factory=dict)
    # index of a row that reduced to ``0 = c`` with ``c != 0``
    inconsistent_row: int | None = None
    rank: int = 0


def _components(rows: Sequence[Mapping[int, object]]) -> list[list[int]]:
    parent: dict[int, int] = {}

    def find(c):
        while parent[c] != c:
            parent[c] = parent[parent[c]]
            c = parent[c]
        return c

    for row in rows:
        cols = list(row)
        for c in cols:
            parent.setdefault(c, c)
        for c in cols[1:]:
            a, b = find(cols[0]), find(c)
            if a != b:
                parent[max(a, b)] = min(a, b)
    groups: dict[object, list[int]] = {}
    for i, row in enumerate(rows):
        key = find(next(iter(row))) if row else ("empty", i)
        groups.setdefault(key, []).append(i)
    return [groups[k] for k in sorted(groups, key=lambda k: (isinstance(k, tuple), k))]


def _reduce(row: dict, rhs: Fraction, pivots: dict) -> tuple[dict, Fraction]:
    heap = [c for c in row if c in pivots]
    heapq.heapify(heap)
    seen = set(heap)
    while heap:
        c = heapq.heappop(heap)
        a = row.get(c)
        if not a:
            continue
        prow, prhs = pivots[c]
        for cc, v in prow.items():
            nv = row.get(cc, 0) - a * v
            if nv:
                row[cc] = nv
                if cc in pivots and cc not in seen:
                    seen.add(cc)
                    heapq.heappush(heap, cc)
            else:
                row.pop(cc, None)
        rhs = rhs - a * prhs
    return row, rhs


def solve_sparse(rows: Sequence[Mapping[int, object]], rhs: Sequence[object]) -> LinearSolution:
    """Solve ``rows . x = rhs`` exactly; free unknowns are set to zero.

    The pivot of each row is its smallest surviving column, so the returned
    solution is deterministic for a fixed column numbering.
    """
    if len(rows) != len(rhs):
        raise ValueError("row and right-hand side counts differ")
    values: dict[int, Fraction] = {}
    rank = 0
    for comp in _components(rows):
        pivots: dict[int, tuple[dict, Fraction]] = {}
        for i in comp:
            row = {c: Fraction(v) for c, v in rows[i].items() if v}
            row, b = _reduce(row, Fraction(rhs[i]), pivots)
            if not row:
                if b:
                    return LinearSolution(False, {}, i, rank)
                continue
            c0 = min(row)
            a0 = row[c0]
            if a0 != 1:
                row = {c: v / a0 for c, v in row.items()}
                b = b / a0
            pivots[c0] = (row, b)
        rank += len(pivots)
        for c in sorted(pivots, reverse=True):
            prow, b = pivots[c]
            s = b
            for cc, v in prow.items():
                if cc != c:
                    s -= v * values.get(cc, 0)
            if s:
                values[c] = s
    return LinearSolution(True, values, None, rank)
