"""Visual navigation maps: enumeration, simulation, rendering and QA.

A k-hop map is built from a direction sequence that alternates between the
horizontal and vertical axis. Every instruction starts with distance 1; the
walk is simulated on an unbounded lattice and distances are stretched until
the path neither revisits nor touches itself, then the bounding box of the
path is rendered as a grid.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .grid import (
    ASCII_PALETTE,
    CellKind,
    Coord,
    Direction,
    GridMap,
    RenderPalette,
    render_grid,
)

_FIRST = (Direction.UP, Direction.DOWN, Direction.LEFT, Direction.RIGHT)
_VERTICAL = (Direction.UP, Direction.DOWN)
_HORIZONTAL = (Direction.LEFT, Direction.RIGHT)

# lattice deltas (x right, y up)
_LATTICE = {
    Direction.UP: (0, 1),
    Direction.DOWN: (0, -1),
    Direction.LEFT: (-1, 0),
    Direction.RIGHT: (1, 0),
}


@dataclass(frozen=True)
class InstructionPlan:
    directions: tuple[Direction, ...]
    distances: tuple[int, ...]

    def __post_init__(self):
        if len(self.directions) != len(self.distances):
            raise ValueError("directions and distances differ in length")
        if not alternates(self.directions):
            raise ValueError("directions must alternate between axes")
        if any(d < 1 for d in self.distances):
            raise ValueError("distances must be positive")

    @property
    def k(self) -> int:
        return len(self.directions)

    def expand(self) -> list[Direction]:
        """Unit-step expansion, e.g. (UP x2, RIGHT x1) -> [UP, UP, RIGHT]."""
        return [d for d, n in zip(self.directions, self.distances) for _ in range(n)]


@dataclass(frozen=True)
class NavMapRecord:
    k: int
    plan: InstructionPlan
    map: GridMap
    path: tuple[Coord, ...]
    turning_indices: tuple[int, ...]
    config_id: int

    @property
    def turning_points(self) -> tuple[Coord, ...]:
        return tuple(self.path[i] for i in self.turning_indices)


@dataclass(frozen=True)
class NavQAInstance:
    id: str
    kind: str  # "route_planning" | "next_step"
    k: int
    config_id: int
    map_text: str
    given_instructions: tuple[Direction, ...]
    gold: tuple[Direction, ...]
    palette_id: str

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "task": self.kind,
            "k": self.k,
            "config_id": self.config_id,
            "map_text": self.map_text,
            "given_instructions": [d.value for d in self.given_instructions],
            "gold": [d.value for d in self.gold],
            "palette_id": self.palette_id,
        }


def alternates(dirs: Sequence[Direction]) -> bool:
    return all(a.is_vertical != b.is_vertical for a, b in zip(dirs, dirs[1:]))


def enumerate_direction_sequences(k: int) -> list[tuple[Direction, ...]]:
    """All 2^(k+1) axis-alternating direction sequences of length k.

    The first direction cycles UP, DOWN, LEFT, RIGHT; each later position
    picks the first or second direction of the other axis, enumerated in
    binary order. The index in this list is the map's config id.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    out = []
    for first in _FIRST:
        for bits in itertools.product((0, 1), repeat=k - 1):
            seq = [first]
            for b in bits:
                seq.append((_HORIZONTAL if seq[-1].is_vertical else _VERTICAL)[b])
            out.append(tuple(seq))
    return out


def _trace(dirs: Sequence[Direction], dists: Sequence[int]) -> Optional[int]:
    """Walk the plan on the lattice; return the index of the first segment
    that revisits or touches an earlier point, or None if the walk is clean.

    Touching means landing 4-adjacent to any visited point other than the
    one just left; such contacts would render as shortcuts in the grid.
    """
    x, y = 0, 0
    seen = {(0, 0)}
    for i, (d, n) in enumerate(zip(dirs, dists)):
        dx, dy = _LATTICE[d]
        for _ in range(n):
            px, py = x, y
            x, y = x + dx, y + dy
            if (x, y) in seen:
                return i
            for ax, ay in ((1, 0), (-1, 0), (0, 1), (0, -1)):
                q = (x + ax, y + ay)
                if q != (px, py) and q in seen:
                    return i
            seen.add((x, y))
    return None


def simulate_plan(dirs: Sequence[Direction], max_backtrack: int = 1) -> Optional[InstructionPlan]:
    """Assign distances to `dirs` so the traced path is self-avoiding.

    Segments are checked in walk order. When the walk up to segment i
    collides in segment j, the instruction before j is lengthened by one
    and the walk re-checked. A collision may surface in the current segment
    or, after lengthening, in up to `max_backtrack` segments before it;
    anything further back, or a collision in the first segment, means the
    overlap cannot be resolved in one pass and None is returned.
    """
    dirs = tuple(dirs)
    if not alternates(dirs):
        raise ValueError("directions must alternate between axes")
    dists = [1] * len(dirs)
    for i in range(len(dirs)):
        while True:
            j = _trace(dirs[: i + 1], dists[: i + 1])
            if j is None:
                break
            if j == 0 or j < i - max_backtrack:
                return None
            dists[j - 1] += 1
    return InstructionPlan(dirs, tuple(dists))


def trace_points(plan: InstructionPlan) -> tuple[list[tuple[int, int]], list[int]]:
    """Lattice points visited by `plan` and the indices of turning points."""
    pts = [(0, 0)]
    turns = [0]
    for d, n in zip(plan.directions, plan.distances):
        dx, dy = _LATTICE[d]
        for _ in range(n):
            x, y = pts[-1]
            pts.append((x + dx, y + dy))
        turns.append(len(pts) - 1)
    return pts, turns


def render_nav_map(plan: InstructionPlan, config_id: int = 0) -> NavMapRecord:
    """Render the bounding box of the plan's path as a grid map."""
    pts, turns = trace_points(plan)
    xs = [x for x, _ in pts]
    ys = [y for _, y in pts]
    x0, y1 = min(xs), max(ys)
    width = max(xs) - x0 + 1
    height = y1 - min(ys) + 1
    path = tuple(Coord(y1 - y, x - x0) for x, y in pts)
    cells = [[CellKind.OBSTACLE] * width for _ in range(height)]
    for c in path[1:-1]:
        cells[c.row][c.col] = CellKind.ROAD
    cells[path[0].row][path[0].col] = CellKind.START
    cells[path[-1].row][path[-1].col] = CellKind.DESTINATION
    m = GridMap.from_cells(cells)
    return NavMapRecord(plan.k, plan, m, path, tuple(turns), config_id)


def generate_maps(k: int) -> list[NavMapRecord]:
    """All maps for `k` that survive simulation, in config-id order."""
    out = []
    for config_id, dirs in enumerate(enumerate_direction_sequences(k)):
        plan = simulate_plan(dirs)
        if plan is not None:
            out.append(render_nav_map(plan, config_id))
    return out


def emit_nav_qa(rec: NavMapRecord, palette: RenderPalette = ASCII_PALETTE) -> list[NavQAInstance]:
    """One route-planning instance plus next-step instances for t = 1..k-1."""
    text = render_grid(rec.map, palette)
    dirs = rec.plan.directions
    base = f"nav-k{rec.k}-c{rec.config_id}"
    out = [
        NavQAInstance(f"{base}-route", "route_planning", rec.k, rec.config_id, text, (), dirs, palette.name)
    ]
    for t in range(1, rec.k):
        out.append(
            NavQAInstance(
                f"{base}-next{t}", "next_step", rec.k, rec.config_id, text,
                dirs[:t], (dirs[t],), palette.name,
            )
        )
    return out


def generate_dataset(
    ks: Iterable[int], palette: RenderPalette = ASCII_PALETTE
) -> tuple[list[NavQAInstance], dict[int, dict[str, int]]]:
    """QA instances for every k plus per-k counts of maps and instances."""
    instances: list[NavQAInstance] = []
    stats: dict[int, dict[str, int]] = {}
    for k in ks:
        maps = generate_maps(k)
        qa = [q for rec in maps for q in emit_nav_qa(rec, palette)]
        stats[k] = {
            "sequences": 2 ** (k + 1),
            "maps": len(maps),
            "route_planning": sum(q.kind == "route_planning" for q in qa),
            "next_step": sum(q.kind == "next_step" for q in qa),
        }
        instances.extend(qa)
    return instances, stats


def write_jsonl(instances: Iterable, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for inst in instances:
            fh.write(json.dumps(inst.to_json(), ensure_ascii=False) + "\n")


def gold_path(m: GridMap) -> list[Coord]:
    """The path from start to destination over passable cells.

    Assumes the passable cells form a single simple path, as every
    generated map does.
    """
    if m.start is None or m.dest is None:
        raise ValueError("map lacks start or destination")
    path = [m.start]
    prev = None
    cur = m.start
    while cur != m.dest:
        nxt = [n for _, n in m.neighbors(cur) if m[n].passable and n != prev]
        if len(nxt) != 1:
            raise ValueError(f"map is not a simple path at {cur}")
        prev, cur = cur, nxt[0]
        path.append(cur)
    return path


def path_directions(path: Sequence[Coord]) -> list[Direction]:
    """Collapse a cell path into one direction per straight segment."""
    out: list[Direction] = []
    for a, b in zip(path, path[1:]):
        d = next(d for d in Direction if (a.row + d.delta[0], a.col + d.delta[1]) == tuple(b))
        if not out or out[-1] is not d:
            out.append(d)
    return out

