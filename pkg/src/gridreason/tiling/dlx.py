"""Algorithm X with dancing links.

The matrix is stored as parallel integer arrays (left, right, up, down,
column) in Knuth's style. Node 0 is the root, nodes 1..n are column
headers, data nodes follow.
"""

from __future__ import annotations

from typing import Callable, Iterator, Optional, Sequence

import numpy as np


class DancingLinks:
    def __init__(self, n_cols: int, rows: Sequence[Sequence[int]]):
        self.n_cols = n_cols
        n = n_cols + 1
        self.L = list(range(-1, n - 1))
        self.R = list(range(1, n + 1))
        self.L[0] = n_cols
        self.R[n_cols] = 0
        self.U = list(range(n))
        self.D = list(range(n))
        self.C = list(range(n))
        self.row_of = [-1] * n
        self.size = [0] * n
        for row_id, cols in enumerate(rows):
            first = None
            for col in sorted(set(cols)):
                if not 0 <= col < n_cols:
                    raise ValueError(f"column {col} out of range")
                h = col + 1
                node = len(self.C)
                self.C.append(h)
                self.row_of.append(row_id)
                self.U.append(self.U[h])
                self.D.append(h)
                self.D[self.U[h]] = node
                self.U[h] = node
                self.size[h] += 1
                if first is None:
                    first = node
                    self.L.append(node)
                    self.R.append(node)
                else:
                    self.L.append(self.L[first])
                    self.R.append(first)
                    self.R[self.L[first]] = node
                    self.L[first] = node

    def _cover(self, h: int) -> None:
        L, R, U, D, C, size = self.L, self.R, self.U, self.D, self.C, self.size
        R[L[h]] = R[h]
        L[R[h]] = L[h]
        i = D[h]
        while i != h:
            j = R[i]
            while j != i:
                D[U[j]] = D[j]
                U[D[j]] = U[j]
                size[C[j]] -= 1
                j = R[j]
            i = D[i]

    def _uncover(self, h: int) -> None:
        L, R, U, D, C, size = self.L, self.R, self.U, self.D, self.C, self.size
        i = U[h]
        while i != h:
            j = L[i]
            while j != i:
                size[C[j]] += 1
                D[U[j]] = j
                U[D[j]] = j
                j = L[j]
            i = U[i]
        R[L[h]] = h
        L[R[h]] = h

    def _choose(self) -> int:
        # fewest remaining rows; ties go to the lowest column index
        best, best_size = 0, None
        h = self.R[0]
        while h != 0:
            if best_size is None or self.size[h] < best_size:
                best, best_size = h, self.size[h]
            h = self.R[h]
        return best

    def solutions(self, compatible: Optional[Callable[[Sequence[int], int], bool]] = None) -> Iterator[list[int]]:
        """Yield every exact cover as a list of row ids in selection order.

        `compatible(partial, row)` may veto a row given the rows already
        chosen; it is how callers prune symmetric duplicates.
        """
        partial: list[int] = []

        def search() -> Iterator[list[int]]:
            if self.R[0] == 0:
                yield list(partial)
                return
            h = self._choose()
            if self.size[h] == 0:
                return
            self._cover(h)
            r = self.D[h]
            while r != h:
                row = self.row_of[r]
                if compatible is None or compatible(partial, row):
                    partial.append(row)
                    j = self.R[r]
                    while j != r:
                        self._cover(self.C[j])
                        j = self.R[j]
                    yield from search()
                    j = self.L[r]
                    while j != r:
                        self._uncover(self.C[j])
                        j = self.L[j]
                    partial.pop()
                r = self.D[r]
            self._uncover(h)

        yield from search()


def solve_exact_cover(
    matrix,
    compatible: Optional[Callable[[Sequence[int], int], bool]] = None,
    limit: Optional[int] = None,
) -> list[frozenset[int]]:
    """All exact covers of a 0/1 matrix, as sets of row indices.

    Solutions come out in search order, which is deterministic. An empty
    matrix (no columns) has exactly one solution, the empty row set. All-zero
    rows cover nothing and are never selected.
    """
    m = np.asarray(matrix)
    if m.ndim != 2:
        raise ValueError("matrix must be 2-D")
    if not np.isin(m, (0, 1)).all():
        raise ValueError("matrix must be 0/1")
    rows = [np.flatnonzero(r).tolist() for r in m]
    dl = DancingLinks(m.shape[1], rows)
    out = []
    for sol in dl.solutions(compatible):
        out.append(frozenset(sol))
        if limit is not None and len(out) >= limit:
            break
    return out
