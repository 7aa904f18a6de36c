"""Answer extraction, instruction execution and answer-level metrics."""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .grid import CellKind, Coord, Direction, GridMap, step
from .navigation import gold_path

log = logging.getLogger(__name__)

ANSWER_MARKERS = ("answer is", "answer:", "final answer")

_DIRECTION_WORDS = {
    Direction.UP: ("upwards", "upward", "up", "north", "↑", "⬆️", "⬆"),
    Direction.DOWN: ("downwards", "downward", "down", "south", "↓", "⬇️", "⬇"),
    Direction.LEFT: ("leftwards", "leftward", "left", "west", "←", "⬅️", "⬅"),
    Direction.RIGHT: ("rightwards", "rightward", "right", "east", "→", "➡️", "➡"),
}
_WORD_TO_DIR = {w: d for d, ws in _DIRECTION_WORDS.items() for w in ws}
_DIR_RE = re.compile(
    "|".join(
        (r"\b" + re.escape(w) + r"\b") if w.isalpha() else re.escape(w)
        for w in sorted(_WORD_TO_DIR, key=len, reverse=True)
    ),
    re.IGNORECASE,
)


@dataclass(frozen=True)
class Extraction:
    text: str
    rule: str  # "marker" | "keyword" | "whole" | "empty"
    start: int  # offset in the raw output where the answer begins


@dataclass(frozen=True)
class AnswerJudgment:
    extracted_answer: str
    correct: bool
    rule: str = ""


@dataclass(frozen=True)
class ExecutionTrace:
    attempted: tuple[Direction, ...]
    executed: tuple[tuple[Direction, Coord], ...]
    ignored: tuple[tuple[int, str], ...]
    final_pos: Coord
    t: int
    k: int
    reached_dest: bool

    @property
    def completing_rate(self) -> Fraction:
        return Fraction(self.t, self.k)


def extract_answer(
    raw: str,
    keywords: Sequence[str] = (),
    markers: Sequence[str] = ANSWER_MARKERS,
    rest: bool = False,
) -> Extraction:
    """Locate the final answer in a model output.

    Rules, in order: text after the last answer marker (to the end of its
    line, or to the end of the output if `rest`); the last line mentioning
    one of `keywords`; the whole output.
    """
    if not raw.strip():
        return Extraction("", "empty", len(raw))
    lower = raw.lower()
    best = None
    for m in markers:
        pos = lower.rfind(m.lower())
        if pos >= 0 and (best is None or pos > best[0] or (pos == best[0] and len(m) > len(best[1]))):
            best = (pos, m)
    if best is not None:
        pos, m = best
        tail = raw[pos + len(m):]
        if rest:
            text = tail
        else:
            lines = tail.split("\n")
            text = lines[0]
            if not text.strip(" \t:*-#"):
                text = next((ln for ln in lines[1:] if ln.strip()), "")
        log.debug("answer via marker %r", m)
        return Extraction(text.strip().strip(":*").strip(), "marker", pos)
    if keywords:
        offset = 0
        hit = None
        for line in raw.split("\n"):
            low = line.lower()
            if any(kw.lower() in low for kw in keywords):
                hit = (offset, line)
            offset += len(line) + 1
        if hit is not None:
            log.debug("answer via keyword line")
            return Extraction(hit[1].strip(), "keyword", hit[0])
    log.debug("answer via whole output")
    return Extraction(raw.strip(), "whole", len(raw))


def normalize_direction_words(text: str) -> str:
    """Rewrite direction synonyms (upward, north, arrows, ...) to up/down/left/right."""
    return _DIR_RE.sub(lambda m: _WORD_TO_DIR[m.group(0).lower()].value, text)


def parse_directions(text: str) -> list[Direction]:
    """Direction words in the order they appear."""
    return [_WORD_TO_DIR[m.group(0).lower()] for m in _DIR_RE.finditer(text)]


def score_answer(
    raw_output: str,
    gold: str,
    keywords: Sequence[str] = (),
    directional: Optional[bool] = None,
) -> AnswerJudgment:
    """Case-insensitive substring match of `gold` in the extracted answer.

    Direction-valued golds are compared after synonym normalization; this
    is auto-detected when `directional` is None. Note that substring
    matching accepts e.g. "upward" and "update" for gold "up".
    """
    if directional is None:
        directional = gold.strip().lower() in {d.value for d in Direction}
    ex = extract_answer(raw_output, keywords)
    text = ex.text
    if directional:
        text = normalize_direction_words(text)
    correct = bool(ex.text) and gold.strip().lower() in text.lower()
    return AnswerJudgment(ex.text, correct, ex.rule)


def turning_indices(path: Sequence[Coord]) -> list[int]:
    """Path indices where a straight segment ends (the last is the destination)."""
    out = []
    for i in range(1, len(path)):
        if i == len(path) - 1:
            out.append(i)
            continue
        a, b, c = path[i - 1], path[i], path[i + 1]
        if (b.row - a.row, b.col - a.col) != (c.row - b.row, c.col - b.col):
            out.append(i)
    return out


def execute_instructions(
    m: GridMap,
    dirs: Iterable[Direction],
    mode: str = "segment",
    progress: str = "path",
) -> ExecutionTrace:
    """Run instructions from the start cell and measure progress.

    In "segment" mode an instruction moves along the road until the next
    cell is blocked, i.e. to the end of the straight stretch; in "unit"
    mode it moves one cell. An instruction whose first move is blocked is
    ignored and the position is unchanged.

    With progress="path", t is the number of turning points of the gold
    path at or before the current cell, so turning back lowers t. With
    progress="moves", t is the number of executed instructions, capped at k.
    """
    if mode not in ("segment", "unit"):
        raise ValueError(f"unknown mode {mode!r}")
    path = gold_path(m)
    turns = turning_indices(path)
    k = len(turns)
    index = {c: i for i, c in enumerate(path)}
    attempted = tuple(dirs)
    pos = m.start
    executed, ignored = [], []
    for i, d in enumerate(attempted):
        nxt = step(pos, d)
        if nxt is None or not m.in_bounds(nxt):
            ignored.append((i, "boundary"))
            continue
        if not m[nxt].passable:
            ignored.append((i, "obstacle"))
            continue
        pos = nxt
        if mode == "segment":
            while True:
                nxt = step(pos, d)
                if nxt is None or not m.in_bounds(nxt) or not m[nxt].passable:
                    break
                pos = nxt
        executed.append((d, pos))
    if progress == "path":
        t = sum(1 for ti in turns if ti <= index[pos])
    elif progress == "moves":
        t = min(len(executed), k)
    else:
        raise ValueError(f"unknown progress measure {progress!r}")
    t = max(t, 0)
    return ExecutionTrace(attempted, tuple(executed), tuple(ignored), pos, t, k, m[pos] is CellKind.DESTINATION)


@dataclass(frozen=True)
class MetricRecord:
    task: str
    n: int
    accuracy: Optional[float] = None
    completing_rate: Optional[float] = None
    success_rate: Optional[float] = None
    exact: dict = field(default_factory=dict, compare=False)

    def to_json(self) -> dict:
        return {
            "task": self.task,
            "n": self.n,
            "accuracy": self.accuracy,
            "completing_rate": self.completing_rate,
            "success_rate": self.success_rate,
        }


def percent(x: Fraction) -> float:
    return float(round(x * 100, 2))


def aggregate(items: Sequence, task: str) -> MetricRecord:
    """Mean accuracy for judgments, or completing/success rate for traces."""
    items = list(items)
    if not items:
        raise ValueError("cannot aggregate an empty set")
    n = len(items)
    if all(isinstance(x, ExecutionTrace) for x in items):
        completing = sum((x.completing_rate for x in items), Fraction(0)) / n
        success = Fraction(sum(x.t == x.k for x in items), n)
        return MetricRecord(
            task, n, completing_rate=percent(completing), success_rate=percent(success),
            exact={"completing_rate": completing, "success_rate": success},
        )
    if all(isinstance(x, AnswerJudgment) for x in items):
        acc = Fraction(sum(x.correct for x in items), n)
        return MetricRecord(task, n, accuracy=percent(acc), exact={"accuracy": acc})
    raise TypeError("items must all be AnswerJudgment or all ExecutionTrace")
