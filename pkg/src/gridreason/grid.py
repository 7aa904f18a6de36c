"""Grid coordinates, directions, cell kinds and the text grid format.

Row 0 is the top line of a rendered grid, so moving up decreases the row.
Grids are rendered one glyph per cell, one line per row, rows joined by
newlines with no trailing whitespace.
"""

from __future__ import annotations

import enum
import unicodedata
from dataclasses import dataclass, field
from typing import Iterable, Iterator, NamedTuple, Optional, Sequence


class ParseError(ValueError):
    """Raised when grid text cannot be parsed."""

    def __init__(self, kind: str, message: str = ""):
        super().__init__(f"{kind}: {message}" if message else kind)
        self.kind = kind


class ConfigError(ValueError):
    """Raised for invalid palettes and other configuration problems."""


class Coord(NamedTuple):
    row: int
    col: int


class Direction(enum.Enum):
    UP = "up"
    DOWN = "down"
    LEFT = "left"
    RIGHT = "right"

    @property
    def delta(self) -> tuple[int, int]:
        return _DELTAS[self]

    @property
    def opposite(self) -> "Direction":
        return _OPPOSITES[self]

    @property
    def is_vertical(self) -> bool:
        return self in (Direction.UP, Direction.DOWN)

    def __str__(self) -> str:
        return self.value

    @classmethod
    def parse(cls, text: str) -> "Direction":
        return cls(text.strip().lower())


_DELTAS = {
    Direction.UP: (-1, 0),
    Direction.DOWN: (1, 0),
    Direction.LEFT: (0, -1),
    Direction.RIGHT: (0, 1),
}
_OPPOSITES = {
    Direction.UP: Direction.DOWN,
    Direction.DOWN: Direction.UP,
    Direction.LEFT: Direction.RIGHT,
    Direction.RIGHT: Direction.LEFT,
}


class CellKind(enum.Enum):
    START = "start"
    DESTINATION = "destination"
    ROAD = "road"
    OBSTACLE = "obstacle"
    UNKNOWN = "unknown"

    @property
    def passable(self) -> bool:
        return self in (CellKind.START, CellKind.DESTINATION, CellKind.ROAD)


def step(c: Coord, d: Direction) -> Optional[Coord]:
    """Move one cell from `c` in direction `d`.

    Returns None if the move would leave the nonnegative quadrant. Grid
    bounds are not checked here.
    """
    dr, dc = d.delta
    row, col = c.row + dr, c.col + dc
    if row < 0 or col < 0:
        return None
    return Coord(row, col)


@dataclass(frozen=True)
class RenderPalette:
    """Glyphs used to draw navigation maps and tiling rectangles.

    `piece_glyphs` maps tetromino names to the glyph drawn for each filled
    cell of that type; `empty_glyph` marks unfilled (masked) tiling cells.
    """

    name: str
    start_glyph: str
    dest_glyph: str
    road_glyph: str
    obstacle_glyph: str
    piece_glyphs: tuple[tuple[str, str], ...] = ()
    empty_glyph: str = ""

    def __post_init__(self):
        glyphs = [g for g in self.all_glyphs() if g]
        if len(set(glyphs)) != len(glyphs):
            raise ConfigError(f"palette {self.name!r} has duplicate glyphs")
        for g in glyphs:
            if any(ch.isspace() for ch in g):
                raise ConfigError(f"palette {self.name!r}: whitespace glyph {g!r}")

    def all_glyphs(self) -> list[str]:
        return [
            self.start_glyph,
            self.dest_glyph,
            self.road_glyph,
            self.obstacle_glyph,
            *(g for _, g in self.piece_glyphs),
            self.empty_glyph,
        ]

    def piece_glyph(self, piece: str) -> str:
        for name, glyph in self.piece_glyphs:
            if name == piece:
                return glyph
        raise ConfigError(f"palette {self.name!r} has no glyph for piece {piece!r}")

    def piece_for_glyph(self, glyph: str) -> Optional[str]:
        for name, g in self.piece_glyphs:
            if g == glyph:
                return name
        return None

    def glyph_for(self, kind: CellKind) -> str:
        glyph = {
            CellKind.START: self.start_glyph,
            CellKind.DESTINATION: self.dest_glyph,
            CellKind.ROAD: self.road_glyph,
            CellKind.OBSTACLE: self.obstacle_glyph,
        }.get(kind)
        if not glyph:
            raise ConfigError(f"palette {self.name!r} has no glyph for {kind.value}")
        return glyph

    def kind_for(self, glyph: str) -> Optional[CellKind]:
        return {
            self.start_glyph: CellKind.START,
            self.dest_glyph: CellKind.DESTINATION,
            self.road_glyph: CellKind.ROAD,
            self.obstacle_glyph: CellKind.OBSTACLE,
        }.get(glyph)


ASCII_PALETTE = RenderPalette(
    name="ascii",
    start_glyph="S",
    dest_glyph="D",
    road_glyph=".",
    obstacle_glyph="#",
    piece_glyphs=(("I", "I"), ("T", "T"), ("L", "L")),
    empty_glyph="_",
)

EMOJI_PALETTE = RenderPalette(
    name="emoji",
    start_glyph="\U0001F3E0",  # house
    dest_glyph="\U0001F3E2",  # office
    road_glyph="⬜",  # white square
    obstacle_glyph="\U0001F6A7",  # construction
    piece_glyphs=(("I", "\U0001F7E5"), ("T", "\U0001F7E8"), ("L", "\U0001F7E9")),
    empty_glyph="⬛",  # black square
)

PALETTES = {p.name: p for p in (ASCII_PALETTE, EMOJI_PALETTE)}


def get_palette(name: str) -> RenderPalette:
    try:
        return PALETTES[name]
    except KeyError:
        raise ConfigError(f"unknown palette {name!r}; known: {sorted(PALETTES)}") from None


@dataclass(frozen=True)
class GridMap:
    """A rectangular map of cells.

    `cells` is row-major. Maps parsed from model output may lack a start or
    destination and may contain UNKNOWN cells; the original glyph of each
    unknown cell is kept in `unknown`.
    """

    width: int
    height: int
    cells: tuple[tuple[CellKind, ...], ...]
    start: Optional[Coord] = None
    dest: Optional[Coord] = None
    unknown: tuple[tuple[Coord, str], ...] = field(default=(), compare=True)

    def __getitem__(self, c: Coord) -> CellKind:
        return self.cells[c.row][c.col]

    def in_bounds(self, c: Coord) -> bool:
        return 0 <= c.row < self.height and 0 <= c.col < self.width

    def coords(self) -> Iterator[Coord]:
        for r in range(self.height):
            for c in range(self.width):
                yield Coord(r, c)

    def neighbors(self, c: Coord) -> Iterator[tuple[Direction, Coord]]:
        for d in Direction:
            n = step(c, d)
            if n is not None and self.in_bounds(n):
                yield d, n

    @classmethod
    def from_cells(cls, cells: Sequence[Sequence[CellKind]], unknown=()) -> "GridMap":
        rows = tuple(tuple(r) for r in cells)
        if not rows or not rows[0]:
            raise ValueError("empty grid")
        width = len(rows[0])
        if any(len(r) != width for r in rows):
            raise ValueError("ragged grid")
        start = dest = None
        for r, row in enumerate(rows):
            for c, kind in enumerate(row):
                if kind is CellKind.START:
                    start = Coord(r, c) if start is None else start
                elif kind is CellKind.DESTINATION:
                    dest = Coord(r, c) if dest is None else dest
        return cls(width, len(rows), rows, start, dest, tuple(unknown))

    def count(self, kind: CellKind) -> int:
        return sum(row.count(kind) for row in self.cells)


def split_glyphs(line: str, known: Iterable[str] = ()) -> list[str]:
    """Tokenize a line into glyphs.

    Known (possibly multi-character) glyphs are matched greedily; other
    characters become one glyph each, with combining marks, variation
    selectors and zero-width joiners attached to the preceding glyph.
    Whitespace is dropped.
    """
    known = sorted({g for g in known if g}, key=len, reverse=True)
    out: list[str] = []
    i = 0
    while i < len(line):
        ch = line[i]
        if ch.isspace():
            i += 1
            continue
        for g in known:
            if line.startswith(g, i):
                out.append(g)
                i += len(g)
                break
        else:
            if out and _is_modifier(ch):
                out[-1] += ch
            elif out and out[-1].endswith("‍"):
                out[-1] += ch
            else:
                out.append(ch)
            i += 1
    return out


def _is_modifier(ch: str) -> bool:
    cp = ord(ch)
    return (
        unicodedata.category(ch) in ("Mn", "Me")
        or 0xFE00 <= cp <= 0xFE0F
        or cp == 0x200D
        or 0x1F3FB <= cp <= 0x1F3FF
        or cp == 0x20E3
    )


def render_rows(rows: Sequence[Sequence[str]]) -> str:
    return "\n".join("".join(r) for r in rows)


def render_grid(m: GridMap, p: RenderPalette) -> str:
    """Render a map as newline-separated rows of glyphs."""
    unknown = dict(m.unknown)
    rows = []
    for r, row in enumerate(m.cells):
        line = []
        for c, kind in enumerate(row):
            if kind is CellKind.UNKNOWN:
                line.append(unknown.get(Coord(r, c), "?"))
            else:
                line.append(p.glyph_for(kind))
        rows.append("".join(line))
    return "\n".join(rows)


def parse_glyph_rows(text: str, known: Iterable[str] = ()) -> list[list[str]]:
    """Split grid text into equal-length rows of glyphs."""
    lines = [ln for ln in text.strip("\n").split("\n") if ln.strip()]
    if not lines:
        raise ParseError("empty", "no grid lines")
    rows = [split_glyphs(ln, known) for ln in lines]
    if len({len(r) for r in rows}) != 1:
        raise ParseError("ragged", f"row lengths {[len(r) for r in rows]}")
    return rows


def parse_grid(t: str, p: RenderPalette) -> GridMap:
    """Parse grid text rendered with palette `p`.

    Glyphs outside the palette become UNKNOWN cells whose glyphs are kept,
    so a grader can tell markers from noise later.
    """
    rows = parse_glyph_rows(t, p.all_glyphs())
    cells = []
    unknown = []
    for r, row in enumerate(rows):
        out = []
        for c, glyph in enumerate(row):
            kind = p.kind_for(glyph)
            if kind is None:
                kind = CellKind.UNKNOWN
                unknown.append((Coord(r, c), glyph))
            out.append(kind)
        cells.append(out)
    return GridMap.from_cells(cells, unknown)
