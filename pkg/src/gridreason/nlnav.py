"""Natural-language navigation over a 3x3 landmark grid, and the ring variant.

The square map is described by walking its nine vertices in snake order
from the bottom-left corner (right, right, up, left, left, up, right,
right); the question is a random walk along grid edges.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from typing import Iterable, Optional, Sequence

import numpy as np

from .grid import ConfigError, Coord, Direction, step
from .rng import STREAM_NLNAV, STREAM_RING, make_rng

GRID_SIDE = 3
SQUARE_TEMPLATE_VERSION = "square-v1"
RING_TEMPLATE_VERSION = "ring-v1-reconstructed"
DEFAULT_WALK_RANGE = (4, 10)
DEFAULT_RING_MOVES = (2, 4)
DEFAULT_RING_STEPS = (1, 20)

# snake order from the bottom-left corner, with the move that reaches each vertex
SNAKE = (
    (Coord(2, 0), None),
    (Coord(2, 1), Direction.RIGHT),
    (Coord(2, 2), Direction.RIGHT),
    (Coord(1, 2), Direction.UP),
    (Coord(1, 1), Direction.LEFT),
    (Coord(1, 0), Direction.LEFT),
    (Coord(0, 0), Direction.UP),
    (Coord(0, 1), Direction.RIGHT),
    (Coord(0, 2), Direction.RIGHT),
)


@lru_cache(maxsize=None)
def default_vocabulary() -> tuple[str, ...]:
    text = resources.files("gridreason.data").joinpath("landmarks.txt").read_text(encoding="utf-8")
    return tuple(line.strip() for line in text.splitlines() if line.strip())


def with_article(name: str) -> str:
    return ("an " if name[0].lower() in "aeiou" else "a ") + name


@dataclass(frozen=True)
class LandmarkMap:
    landmarks: tuple[str, ...]  # snake order

    def __post_init__(self):
        if len(self.landmarks) != GRID_SIDE * GRID_SIDE or len(set(self.landmarks)) != len(self.landmarks):
            raise ValueError("a landmark map needs 9 distinct names")

    @property
    def positions(self) -> dict[str, Coord]:
        return {name: pos for name, (pos, _) in zip(self.landmarks, SNAKE)}

    def at(self, c: Coord) -> str:
        for name, (pos, _) in zip(self.landmarks, SNAKE):
            if pos == c:
                return name
        raise KeyError(c)

    def describe(self) -> str:
        parts = []
        for i, (name, (_, move)) in enumerate(zip(self.landmarks, SNAKE)):
            if move is None:
                parts.append(
                    "Initially, you are positioned at the bottom-left corner of the grid, "
                    f"where you will find {with_article(name)}"
                )
            elif i % 3 == 0:
                parts.append(f". Then you go {move.value}, where you will find {with_article(name)}")
            else:
                parts.append(f", then you go {move.value}, where you will find {with_article(name)}")
        return "".join(parts) + "."


@dataclass(frozen=True)
class NLNavInstance:
    id: str
    map: LandmarkMap
    start_object: str
    instructions: tuple[Direction, ...]
    gold_object: str
    prompt_text: str
    seed: int
    template_version: str = SQUARE_TEMPLATE_VERSION

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "task": "nlnav",
            "variant": "square",
            "prompt_text": self.prompt_text,
            "gold_object": self.gold_object,
            "seed": self.seed,
            "template_version": self.template_version,
            "num_instructions": len(self.instructions),
            "start_object": self.start_object,
            "instructions": [d.value for d in self.instructions],
            "landmarks": list(self.map.landmarks),
        }


@dataclass(frozen=True)
class RingNavInstance:
    id: str
    landmarks: tuple[str, ...]  # clockwise order
    start_index: int
    moves: tuple[tuple[str, int], ...]  # ("clockwise" | "counterclockwise", steps)
    gold_object: str
    prompt_text: str
    seed: int
    template_version: str = RING_TEMPLATE_VERSION

    @property
    def ring_size(self) -> int:
        return len(self.landmarks)

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "task": "ring",
            "variant": "ring",
            "prompt_text": self.prompt_text,
            "gold_object": self.gold_object,
            "seed": self.seed,
            "template_version": self.template_version,
            "num_instructions": len(self.moves),
            "ring_size": self.ring_size,
            "start_index": self.start_index,
            "moves": [list(m) for m in self.moves],
            "landmarks": list(self.landmarks),
        }


def _sample_names(rng: np.random.Generator, vocab: Sequence[str], n: int) -> tuple[str, ...]:
    if len(set(vocab)) < n:
        raise ConfigError(f"vocabulary has {len(set(vocab))} distinct names, need {n}")
    pool = sorted(set(vocab))
    return tuple(pool[i] for i in rng.choice(len(pool), size=n, replace=False))


def generate_landmark_map(rng: np.random.Generator, vocab: Optional[Sequence[str]] = None) -> LandmarkMap:
    vocab = default_vocabulary() if vocab is None else vocab
    return LandmarkMap(_sample_names(rng, vocab, GRID_SIDE * GRID_SIDE))


def execute_walk(start: Coord, instructions: Iterable[Direction]) -> Coord:
    """Follow unit moves on the 3x3 vertex grid; leaving it is an error."""
    pos = start
    for d in instructions:
        nxt = step(pos, d)
        if nxt is None or nxt.row >= GRID_SIDE or nxt.col >= GRID_SIDE:
            raise ValueError(f"move {d.value} leaves the grid at {pos}")
        pos = nxt
    return pos


def walk_sentence(start_object: str, instructions: Sequence[Direction]) -> str:
    moves = [f"you go {d.value} by one step" for d in instructions]
    head = f"You start at the position where the {start_object} is located"
    if len(moves) == 1:
        return f"{head}, and then {moves[0]}."
    return f"{head}, then " + ", then ".join(moves[:-1]) + f", and then {moves[-1]}."


def square_prompt(m: LandmarkMap, start_object: str, instructions: Sequence[Direction]) -> str:
    return (
        "You have been given a 3 by 3 square grid. Starting from a vertex, you will move along "
        "the edges of the grid. "
        + m.describe()
        + " Now you have all the information on the map. "
        + walk_sentence(start_object, instructions)
        + " What will you find?"
    )


def generate_walk(
    m: LandmarkMap,
    rng: np.random.Generator,
    walk_len: Optional[int] = None,
    walk_range: tuple[int, int] = DEFAULT_WALK_RANGE,
    *,
    id: str = "nlnav",
    seed: int = 0,
) -> NLNavInstance:
    """Random walk from a uniformly chosen landmark.

    Each step is uniform over the directions that stay on the grid. If
    `walk_len` is None it is drawn uniformly from `walk_range` inclusive.
    """
    if walk_len is None:
        walk_len = int(rng.integers(walk_range[0], walk_range[1] + 1))
    if walk_len < 1:
        raise ValueError("walk length must be >= 1")
    start_object = m.landmarks[int(rng.integers(len(m.landmarks)))]
    pos = m.positions[start_object]
    dirs = []
    for _ in range(walk_len):
        options = [
            d for d in Direction
            if (n := step(pos, d)) is not None and n.row < GRID_SIDE and n.col < GRID_SIDE
        ]
        d = options[int(rng.integers(len(options)))]
        dirs.append(d)
        pos = step(pos, d)
    return NLNavInstance(
        id=id,
        map=m,
        start_object=start_object,
        instructions=tuple(dirs),
        gold_object=m.at(pos),
        prompt_text=square_prompt(m, start_object, dirs),
        seed=seed,
    )


def normalize_ring(moves: Iterable[tuple[str, int]], ring_size: int = 12) -> int:
    """Net clockwise displacement modulo the ring size."""
    total = 0
    for direction, n in moves:
        if direction == "clockwise":
            total += n
        elif direction == "counterclockwise":
            total -= n
        else:
            raise ValueError(f"unknown ring direction {direction!r}")
    return total % ring_size


def ring_prompt(landmarks: Sequence[str], start_index: int, moves: Sequence[tuple[str, int]]) -> str:
    parts = [
        f"You have been given a circular ring with {len(landmarks)} positions. Starting from a "
        "position, you will move along the ring. Initially, you are positioned at a position "
        f"where you will find {with_article(landmarks[0])}"
    ]
    for name in landmarks[1:]:
        parts.append(f", then you go one step clockwise, where you will find {with_article(name)}")
    parts.append(". Now you have all the information on the map. ")
    steps = [f"you go {n} step{'s' if n != 1 else ''} {d}" for d, n in moves]
    head = f"You start at the position where the {landmarks[start_index]} is located"
    if not steps:
        walk = f"{head}."
    elif len(steps) == 1:
        walk = f"{head}, and then {steps[0]}."
    else:
        walk = f"{head}, then " + ", then ".join(steps[:-1]) + f", and then {steps[-1]}."
    return "".join(parts) + walk + " What will you find?"


def generate_ring(
    rng: np.random.Generator,
    vocab: Optional[Sequence[str]] = None,
    ring_size: int = 12,
    n_moves: tuple[int, int] = DEFAULT_RING_MOVES,
    steps: tuple[int, int] = DEFAULT_RING_STEPS,
    *,
    id: str = "ring",
    seed: int = 0,
) -> RingNavInstance:
    vocab = default_vocabulary() if vocab is None else vocab
    landmarks = _sample_names(rng, vocab, ring_size)
    start = int(rng.integers(ring_size))
    moves = []
    for _ in range(int(rng.integers(n_moves[0], n_moves[1] + 1))):
        direction = ("clockwise", "counterclockwise")[int(rng.integers(2))]
        moves.append((direction, int(rng.integers(steps[0], steps[1] + 1))))
    gold = landmarks[(start + normalize_ring(moves, ring_size)) % ring_size]
    return RingNavInstance(
        id=id,
        landmarks=landmarks,
        start_index=start,
        moves=tuple(moves),
        gold_object=gold,
        prompt_text=ring_prompt(landmarks, start, moves),
        seed=seed,
    )


def generate_square_dataset(count: int, seed: int, vocab: Optional[Sequence[str]] = None) -> list[NLNavInstance]:
    out = []
    for i in range(count):
        rng = make_rng(seed, STREAM_NLNAV, i)
        m = generate_landmark_map(rng, vocab)
        out.append(generate_walk(m, rng, id=f"nlnav-{i}", seed=seed))
    return out


def generate_ring_dataset(
    count: int, seed: int, ring_size: int = 12, vocab: Optional[Sequence[str]] = None
) -> list[RingNavInstance]:
    return [
        generate_ring(make_rng(seed, STREAM_RING, i), vocab, ring_size, id=f"ring-{i}", seed=seed)
        for i in range(count)
    ]


def write_jsonl(instances, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for inst in instances:
            fh.write(json.dumps(inst.to_json(), ensure_ascii=False) + "\n")
