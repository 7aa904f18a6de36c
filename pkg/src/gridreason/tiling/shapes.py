"""Tetromino shapes, their rotation/reflection variants and placements."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable

from ..grid import Coord

Cells = tuple[Coord, ...]

BASE_SHAPES: dict[str, tuple[tuple[int, int], ...]] = {
    "I": ((0, 0), (0, 1), (0, 2), (0, 3)),
    "T": ((0, 0), (0, 1), (0, 2), (1, 1)),
    "L": ((0, 0), (1, 0), (2, 0), (2, 1)),
}


def normalize(cells: Iterable[tuple[int, int]]) -> Cells:
    """Translate so min row = min col = 0 and sort."""
    cells = list(cells)
    r0 = min(r for r, _ in cells)
    c0 = min(c for _, c in cells)
    return tuple(sorted(Coord(r - r0, c - c0) for r, c in cells))


def is_connected(cells: Iterable[tuple[int, int]]) -> bool:
    cells = set(map(tuple, cells))
    if not cells:
        return False
    todo = [next(iter(cells))]
    seen = set(todo)
    while todo:
        r, c = todo.pop()
        for n in ((r + 1, c), (r - 1, c), (r, c + 1), (r, c - 1)):
            if n in cells and n not in seen:
                seen.add(n)
                todo.append(n)
    return seen == cells


@dataclass(frozen=True)
class Polyomino:
    name: str
    base_cells: Cells

    @classmethod
    def named(cls, name: str) -> "Polyomino":
        return cls(name, normalize(BASE_SHAPES[name]))


@dataclass(frozen=True)
class Variant:
    parent: str
    rotation: int  # degrees clockwise, one of 0/90/180/270
    reflected: bool
    cells: Cells
    variant_index: int

    @property
    def height(self) -> int:
        return max(c.row for c in self.cells) + 1

    @property
    def width(self) -> int:
        return max(c.col for c in self.cells) + 1


def _rotate(cells, times):
    for _ in range(times):
        cells = [(c, -r) for r, c in cells]
    return cells


@lru_cache(maxsize=None)
def variants(name: str) -> tuple[Variant, ...]:
    """Distinct normalized variants of a piece under rotation and reflection.

    Transforms are tried as (no reflection, 0/90/180/270) then (reflected,
    0/90/180/270); the first transform producing a new cell set names it.
    """
    base = Polyomino.named(name).base_cells
    out: list[Variant] = []
    seen: set[Cells] = set()
    for reflected in (False, True):
        src = [(r, -c) for r, c in base] if reflected else list(base)
        for quarter in range(4):
            cells = normalize(_rotate(src, quarter))
            if cells in seen:
                continue
            seen.add(cells)
            out.append(Variant(name, 90 * quarter, reflected, cells, len(out)))
    return tuple(out)


def variant_of(name: str, cells: Iterable[tuple[int, int]]) -> Variant:
    """The variant of `name` whose shape matches `cells` up to translation."""
    shape = normalize(cells)
    for v in variants(name):
        if v.cells == shape:
            return v
    raise ValueError(f"cells do not form a variant of {name}")


@dataclass(frozen=True)
class Placement:
    variant: Variant
    anchor: Coord
    covered: frozenset[Coord]

    @property
    def piece(self) -> str:
        return self.variant.parent


def placements(name: str, region: Iterable[tuple[int, int]], only: Variant | None = None) -> list[Placement]:
    """Every placement of piece `name` fully inside `region`.

    The anchor is the offset of the variant's bounding box. Placements are
    ordered by variant index, then anchor.
    """
    region = {Coord(*c) for c in region}
    if not region:
        return []
    rmin = min(c.row for c in region)
    rmax = max(c.row for c in region)
    cmin = min(c.col for c in region)
    cmax = max(c.col for c in region)
    out = []
    for v in variants(name):
        if only is not None and v.cells != only.cells:
            continue
        for r in range(rmin, rmax - v.height + 2):
            for c in range(cmin, cmax - v.width + 2):
                covered = frozenset(Coord(r + dr, c + dc) for dr, dc in v.cells)
                if covered <= region:
                    out.append(Placement(v, Coord(r, c), covered))
    return out


def render_variant(v: Variant, glyph: str, empty: str) -> str:
    """Draw a variant in its bounding box."""
    rows = [[empty] * v.width for _ in range(v.height)]
    for cell in v.cells:
        rows[cell.row][cell.col] = glyph
    return "\n".join("".join(r) for r in rows)
