"""Tiling as exact cover and as SAT, with solution decoding.

Both backends enumerate every tiling of a region by a multiset of pieces.
Pieces of the same type occupy separate slots; with symmetry breaking on,
same-type slots must take placements in increasing (anchor, variant)
order, so each physical tiling is found once.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Iterator, Optional, Sequence

import numpy as np

from ..grid import Coord
from .dlx import solve_exact_cover
from .shapes import Placement, Variant, placements


@dataclass(frozen=True)
class Row:
    slot: int
    placement: Placement

    @property
    def key(self) -> tuple:
        p = self.placement
        return (p.anchor.row, p.anchor.col, p.variant.variant_index)


@dataclass
class ExactCoverProblem:
    """Exact-cover matrix: one identity column per slot, then one per cell."""

    pieces: tuple[str, ...]
    cells: tuple[Coord, ...]
    rows: list[Row]
    matrix: np.ndarray
    symmetry_breaking: bool

    def compatible(self, partial: Sequence[int], row: int) -> bool:
        if not self.symmetry_breaking:
            return True
        new = self.rows[row]
        name = self.pieces[new.slot]
        for other in partial:
            o = self.rows[other]
            if self.pieces[o.slot] != name:
                continue
            lo, hi = (o, new) if o.slot < new.slot else (new, o)
            if lo.key >= hi.key:
                return False
        return True

    def decode(self, row_ids: Iterable[int]) -> "TilingConfiguration":
        chosen = sorted((self.rows[i] for i in row_ids), key=lambda r: r.slot)
        return TilingConfiguration(self.cells, tuple(r.placement for r in chosen))


@dataclass(frozen=True)
class TilingConfiguration:
    cells: tuple[Coord, ...]
    placements: tuple[Placement, ...]

    def canonical(self) -> frozenset:
        """Slot-independent identity: the set of (piece, covered cells)."""
        return frozenset((p.piece, p.covered) for p in self.placements)

    def owner(self) -> dict[Coord, int]:
        return {c: i for i, p in enumerate(self.placements) for c in p.covered}

    def is_exact(self) -> bool:
        seen: list[Coord] = [c for p in self.placements for c in p.covered]
        return len(seen) == len(set(seen)) and set(seen) == set(self.cells)


def rect_cells(width: int, height: int) -> tuple[Coord, ...]:
    return tuple(Coord(r, c) for r in range(height) for c in range(width))


def _rows_for(pieces: Sequence[str], cells: Sequence[Coord], fixed: Optional[dict[int, Variant]] = None) -> list[Row]:
    fixed = fixed or {}
    cache: dict[tuple, list[Placement]] = {}
    rows = []
    for slot, name in enumerate(pieces):
        only = fixed.get(slot)
        key = (name, only.cells if only else None)
        if key not in cache:
            cache[key] = placements(name, cells, only)
        rows.extend(Row(slot, p) for p in cache[key])
    return rows


def build_exact_cover_matrix(
    cells: Sequence[Coord],
    pieces: Sequence[str],
    symmetry_breaking: bool = True,
    fixed: Optional[dict[int, Variant]] = None,
) -> ExactCoverProblem:
    """Build the 0/1 matrix for tiling `cells` with `pieces`.

    `fixed` restricts a slot to a single variant (used by completion
    search). Symmetry breaking is applied during search, so the matrix
    always has exactly len(pieces) + len(cells) columns.
    """
    cells = tuple(sorted(Coord(*c) for c in cells))
    pieces = tuple(pieces)
    index = {c: len(pieces) + i for i, c in enumerate(cells)}
    rows = _rows_for(pieces, cells, fixed)
    matrix = np.zeros((len(rows), len(pieces) + len(cells)), dtype=np.uint8)
    for i, row in enumerate(rows):
        matrix[i, row.slot] = 1
        for c in row.placement.covered:
            matrix[i, index[c]] = 1
    return ExactCoverProblem(pieces, cells, rows, matrix, symmetry_breaking)


def solve_tiling_dlx(
    cells: Sequence[Coord],
    pieces: Sequence[str],
    symmetry_breaking: bool = True,
    fixed: Optional[dict[int, Variant]] = None,
    limit: Optional[int] = None,
) -> list[TilingConfiguration]:
    prob = build_exact_cover_matrix(cells, pieces, symmetry_breaking, fixed)
    sols = solve_exact_cover(prob.matrix, prob.compatible, limit=limit)
    return [prob.decode(s) for s in sols]


# --- SAT ---------------------------------------------------------------


@dataclass
class SatEncoding:
    n_vars: int
    clauses: list[tuple[int, ...]]
    var_rows: list[Row]  # var v (1-based) -> var_rows[v - 1]
    cells: tuple[Coord, ...]

    def decode(self, model: Iterable[int]) -> TilingConfiguration:
        chosen = sorted((self.var_rows[v - 1] for v in model if v > 0), key=lambda r: r.slot)
        return TilingConfiguration(self.cells, tuple(r.placement for r in chosen))


def encode_sat(
    cells: Sequence[Coord],
    pieces: Sequence[str],
    symmetry_breaking: bool = True,
    fixed: Optional[dict[int, Variant]] = None,
) -> SatEncoding:
    """CNF with one variable per (slot, placement).

    Clauses: at least one placement per slot, pairwise at most one per
    slot, and pairwise exclusion of overlapping placements in different
    slots. Piece area must equal the region size, so a conflict-free
    choice of one placement per slot is always a full cover.
    """
    cells = tuple(sorted(Coord(*c) for c in cells))
    pieces = tuple(pieces)
    if 4 * len(pieces) != len(cells):
        raise ValueError(f"{len(pieces)} tetrominoes cannot exactly cover {len(cells)} cells")
    rows = _rows_for(pieces, cells, fixed)
    by_slot: dict[int, list[int]] = {s: [] for s in range(len(pieces))}
    for v, row in enumerate(rows, start=1):
        by_slot[row.slot].append(v)
    clauses: list[tuple[int, ...]] = []
    for s in range(len(pieces)):
        clauses.append(tuple(by_slot[s]))
        clauses.extend((-a, -b) for a, b in combinations(by_slot[s], 2))
    by_cell: dict[Coord, list[int]] = {}
    for v, row in enumerate(rows, start=1):
        for c in row.placement.covered:
            by_cell.setdefault(c, []).append(v)
    conflicts = set()
    for vs in by_cell.values():
        for a, b in combinations(vs, 2):
            if rows[a - 1].slot != rows[b - 1].slot:
                conflicts.add((a, b))
    clauses.extend((-a, -b) for a, b in sorted(conflicts))
    if symmetry_breaking:
        for s, t in combinations(range(len(pieces)), 2):
            if pieces[s] != pieces[t]:
                continue
            for a in by_slot[s]:
                for b in by_slot[t]:
                    if rows[a - 1].key >= rows[b - 1].key:
                        clauses.append((-a, -b))
    return SatEncoding(len(rows), clauses, rows, cells)


def enumerate_models(n_vars: int, clauses: Sequence[Sequence[int]]) -> Iterator[list[int]]:
    """Every satisfying assignment of a CNF, by DPLL with unit propagation.

    Branching picks the open clause with the fewest unassigned literals and
    splits it into disjoint cases (first literal true; first false and
    second true; ...), so no model is produced twice. Models are yielded
    as signed literals for all variables 1..n_vars.
    """
    clauses = [tuple(c) for c in clauses]
    if any(len(c) == 0 for c in clauses):
        return
    value = [0] * (n_vars + 1)
    occurs: dict[int, list[int]] = {}
    for ci, c in enumerate(clauses):
        for lit in c:
            occurs.setdefault(lit, []).append(ci)

    def lit_val(lit: int) -> int:
        v = value[abs(lit)]
        return v if lit > 0 else -v

    def assign(lit: int, trail: list[int]) -> bool:
        """Set `lit` true and propagate units; False on conflict."""
        queue = [lit]
        while queue:
            lit = queue.pop()
            cur = lit_val(lit)
            if cur == 1:
                continue
            if cur == -1:
                return False
            value[abs(lit)] = 1 if lit > 0 else -1
            trail.append(abs(lit))
            for ci in occurs.get(-lit, ()):
                unassigned = None
                n_unassigned = 0
                sat = False
                for l2 in clauses[ci]:
                    lv = lit_val(l2)
                    if lv == 1:
                        sat = True
                        break
                    if lv == 0:
                        n_unassigned += 1
                        unassigned = l2
                if sat:
                    continue
                if n_unassigned == 0:
                    return False
                if n_unassigned == 1:
                    queue.append(unassigned)
        return True

    def undo(trail: list[int]) -> None:
        for v in trail:
            value[v] = 0

    def pick() -> Optional[list[int]]:
        best = None
        for c in clauses:
            open_lits = []
            for lit in c:
                lv = lit_val(lit)
                if lv == 1:
                    open_lits = None
                    break
                if lv == 0:
                    open_lits.append(lit)
            if open_lits is None:
                continue
            if best is None or len(open_lits) < len(best):
                best = open_lits
                if len(best) <= 1:
                    break
        return best

    def search() -> Iterator[list[int]]:
        branch = pick()
        if branch is None:
            free = [v for v in range(1, n_vars + 1) if value[v] == 0]
            fixed = [v * value[v] for v in range(1, n_vars + 1) if value[v] != 0]
            for bits in range(1 << len(free)):
                model = fixed + [v if bits >> i & 1 else -v for i, v in enumerate(free)]
                yield sorted(model, key=abs)
            return
        negated: list[int] = []
        for lit in branch:
            trail: list[int] = []
            ok = all(assign(-n, trail) for n in negated) and assign(lit, trail)
            if ok:
                yield from search()
            undo(trail)
            negated.append(lit)

    trail: list[int] = []
    units = [c[0] for c in clauses if len(c) == 1]
    if all(assign(u, trail) for u in units):
        yield from search()
    undo(trail)


def solve_tiling_sat(
    cells: Sequence[Coord],
    pieces: Sequence[str],
    symmetry_breaking: bool = True,
    fixed: Optional[dict[int, Variant]] = None,
) -> list[TilingConfiguration]:
    enc = encode_sat(cells, pieces, symmetry_breaking, fixed)
    return [enc.decode(m) for m in enumerate_models(enc.n_vars, enc.clauses)]
