"""Transcript parsing, visual state tracking rates and visualization grading.

A visualization is a run of at least two consecutive lines drawn only from
a grid alphabet: the task palette plus an open set of marker symbols
(digits, arrows, emoji, ``*``, ``@``, ...). Letters outside the palette
and prose punctuation end a run, so ordinary sentences never qualify.
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Sequence

from .evaluation import AnswerJudgment, Extraction, extract_answer, turning_indices
from .grid import (
    CellKind,
    Coord,
    Direction,
    GridMap,
    RenderPalette,
    get_palette,
    parse_glyph_rows,
    parse_grid,
    split_glyphs,
)
from .navigation import gold_path
from .tiling.shapes import variants
from .tiling.solver import solve_tiling_dlx

MARKER_LETTERS = frozenset("xXoOvP")
_PROSE_PUNCT = frozenset(".,:;!?()[]{}\"'`")

NAV_TASKS = ("route_planning", "next_step")
TILING_TASKS = ("tiling",)


def grid_alphabet_ok(glyph: str, palette_glyphs: frozenset) -> bool:
    if glyph in palette_glyphs:
        return True
    if glyph in MARKER_LETTERS:
        return True
    ch = glyph[0]
    if ch in _PROSE_PUNCT:
        return False
    return not unicodedata.category(ch).startswith("L")


@dataclass(frozen=True)
class VizBlock:
    start: int  # character offsets in the raw transcript
    end: int
    text: str
    rows: Optional[tuple[tuple[str, ...], ...]]  # None when ragged
    error: str = ""


@dataclass
class Transcript:
    raw: str
    task: str
    steps: list[tuple[int, int]]
    visualizations: list[VizBlock]
    answer: Extraction
    l_s: int
    l_v: int

    @property
    def complete(self) -> bool:
        return self.l_v == self.l_s

    @property
    def partial(self) -> bool:
        return self.l_v > 0

    def visualizations_before_answer(self) -> list[VizBlock]:
        return [v for v in self.visualizations if v.end <= self.answer.start]


@dataclass
class VizGrade:
    compliant: bool
    accurate: bool
    reasons: list[str] = field(default_factory=list)


def reasoning_steps(record: Mapping) -> int:
    """Number of reasoning steps a full trace should visualize.

    Route planning: one per gold instruction; next step: the given
    instructions plus the predicted one; tiling: one per masked piece;
    language navigation: one per walk instruction.
    """
    task = record["task"]
    if task == "route_planning":
        return int(record["k"])
    if task == "next_step":
        return len(record["given_instructions"]) + 1
    if task == "tiling":
        return int(record["mask_count"])
    if task in ("nlnav", "ring"):
        return int(record["num_instructions"])
    raise ValueError(f"unknown task {task!r}")


def palette_for(record: Mapping) -> Optional[RenderPalette]:
    pid = record.get("palette_id")
    return get_palette(pid) if pid else None


def find_visualizations(raw: str, palette: Optional[RenderPalette] = None) -> list[VizBlock]:
    known = palette.all_glyphs() if palette else []
    pal = frozenset(g for g in known if g)
    lines = raw.split("\n")
    offsets = []
    pos = 0
    for ln in lines:
        offsets.append(pos)
        pos += len(ln) + 1
    tokens: list[Optional[list[str]]] = []
    for ln in lines:
        if not ln.strip():
            tokens.append(None)
            continue
        toks = split_glyphs(ln, known)
        tokens.append(toks if all(grid_alphabet_ok(t, pal) for t in toks) else None)
    blocks = []
    i = 0
    while i < len(lines):
        if tokens[i] is None:
            i += 1
            continue
        j = i
        while j + 1 < len(lines) and tokens[j + 1] is not None:
            j += 1
        if j > i:
            start, end = offsets[i], offsets[j] + len(lines[j])
            text = raw[start:end]
            run = tokens[i : j + 1]
            if len({len(t) for t in run}) == 1:
                blocks.append(VizBlock(start, end, text, tuple(tuple(t) for t in run)))
            else:
                blocks.append(VizBlock(start, end, text, None, "ragged"))
        i = j + 1
    return blocks


def answer_keywords(record: Mapping) -> list[str]:
    task = record["task"]
    if task in NAV_TASKS:
        return [d.value for d in Direction]
    if task == "tiling":
        return ["variation"]
    if task in ("nlnav", "ring"):
        return list(record.get("landmarks", [])) or [record["gold_object"]]
    return []


def parse_transcript(raw: str, record: Mapping) -> Transcript:
    palette = palette_for(record)
    blocks = find_visualizations(raw, palette)
    answer = extract_answer(raw, answer_keywords(record), rest=record["task"] == "route_planning")
    steps = []
    prev = 0
    for b in blocks:
        if raw[prev:b.start].strip():
            steps.append((prev, b.start))
        prev = b.end
    if raw[prev:].strip() or not steps:
        steps.append((prev, len(raw)))
    l_v = sum(1 for b in blocks if b.end <= answer.start)
    return Transcript(raw, record["task"], steps, blocks, answer, reasoning_steps(record), l_v)


def tracking_rates(transcripts: Sequence[Transcript]) -> tuple[Fraction, Fraction]:
    """(complete, partial) tracking rates over a set of transcripts."""
    if not transcripts:
        raise ValueError("no transcripts")
    n = len(transcripts)
    return (
        Fraction(sum(t.complete for t in transcripts), n),
        Fraction(sum(t.partial for t in transcripts), n),
    )


# --- state rendering ---------------------------------------------------


def nav_state(record: Mapping) -> tuple[GridMap, list[Coord], Coord]:
    """True map, visited cells and current cell after the given instructions."""
    palette = palette_for(record)
    m = parse_grid(record["map_text"], palette)
    path = gold_path(m)
    if record["task"] == "route_planning":
        return m, path, path[-1]
    t = len(record["given_instructions"])
    end = turning_indices(path)[t - 1]
    return m, path[: end + 1], path[end]


def render_nav_state(
    m: GridMap,
    palette: RenderPalette,
    visited: Sequence[Coord],
    current: Coord,
    trail: str = "*",
    here: str = "@",
) -> str:
    rows = [[palette.glyph_for(m[Coord(r, c)]) for c in range(m.width)] for r in range(m.height)]
    for c in visited:
        if m[c] is CellKind.ROAD:
            rows[c.row][c.col] = trail
    if m[current] is CellKind.ROAD:
        rows[current.row][current.col] = here
    return "\n".join("".join(r) for r in rows)


def render_tiling_state(record: Mapping, filled: Iterable[str]) -> str:
    """The input rectangle with the true cells of the named masked pieces filled."""
    palette = palette_for(record)
    rows = [list(r) for r in parse_glyph_rows(record["rect_text"], palette.all_glyphs())]
    for name in filled:
        for r, c in record["masked_cells"][name]:
            rows[r][c] = palette.piece_glyph(name)
    return "\n".join("".join(r) for r in rows)


# --- grading -----------------------------------------------------------


def grade_nav(rows: Sequence[Sequence[str]], record: Mapping) -> VizGrade:
    palette = palette_for(record)
    m, visited, current = nav_state(record)
    if len(rows) != m.height or len(rows[0]) != m.width:
        return VizGrade(False, False, ["shape_mismatch"])
    marked = set()
    reasons = []
    for c in m.coords():
        glyph = rows[c.row][c.col]
        kind = palette.kind_for(glyph)
        if kind is m[c]:
            continue
        if m[c] is CellKind.OBSTACLE:
            reasons.append("obstacle_violation")
        else:
            marked.add(c)
    reasons = sorted(set(reasons))
    if reasons:
        return VizGrade(False, False, reasons)
    visited_set = set(visited)
    ends = {m.start, m.dest}
    accurate = (
        bool(marked)
        and marked <= visited_set
        and (current in marked or current in ends)
        and (visited_set - {m.start, current} <= marked or marked <= {current})
    )
    return VizGrade(True, accurate, [] if accurate else ["wrong_state"])


def _tiling_completions(record: Mapping):
    names = list(record["masked_pieces"])
    q = record["query_piece"]
    region = sorted(Coord(r, c) for cells in record["masked_cells"].values() for r, c in cells)
    gold_cells = [tuple(x) for x in record["masked_cells"][q]]
    shape = _normalize(gold_cells)
    gold_variant = next(v for v in variants(q) if v.cells == shape)
    return solve_tiling_dlx(region, names, symmetry_breaking=False, fixed={names.index(q): gold_variant})


def _normalize(cells):
    r0 = min(r for r, _ in cells)
    c0 = min(c for _, c in cells)
    return tuple(sorted(Coord(r - r0, c - c0) for r, c in cells))


def grade_tiling(rows: Sequence[Sequence[str]], record: Mapping) -> VizGrade:
    palette = palette_for(record)
    base = parse_glyph_rows(record["rect_text"], palette.all_glyphs())
    if len(rows) != len(base) or len(rows[0]) != len(base[0]):
        return VizGrade(False, False, ["out_of_bounds"])
    empty = palette.empty_glyph
    filled: dict[str, set[Coord]] = {}
    overlap = False
    for r, (got, want) in enumerate(zip(rows, base)):
        for c, (g, w) in enumerate(zip(got, want)):
            if w != empty:
                overlap |= g != w
            elif g != empty:
                filled.setdefault(g, set()).add(Coord(r, c))
    if overlap:
        return VizGrade(False, False, ["overlap"])
    if not filled:
        return VizGrade(True, False, ["wrong_state"])
    all_filled = set().union(*filled.values())
    for conf in _tiling_completions(record):
        pieces = [p.covered for p in conf.placements]
        query = next(p.covered for p in conf.placements if p.piece == record["query_piece"])
        if query <= all_filled and all(_whole_pieces(g, pieces) for g in filled.values()):
            return VizGrade(True, True, [])
    return VizGrade(True, False, ["wrong_state"])


def _whole_pieces(group: set, pieces) -> bool:
    """Whether `group` is exactly a union of whole pieces."""
    touching = [p for p in pieces if p & group]
    return bool(touching) and all(p <= group for p in touching) and group == set().union(*touching)


def grade_last_visualization(
    tr: Transcript, record: Mapping, judgment: Optional[AnswerJudgment] = None
) -> Optional[VizGrade]:
    """Grade the last visualization drawn before the answer.

    Returns None when the transcript has no such visualization.
    """
    if record["task"] not in NAV_TASKS + TILING_TASKS:
        raise ValueError(f"task {record['task']!r} has no visualization grader")
    before = tr.visualizations_before_answer()
    if not before:
        return None
    last = before[-1]
    if last.rows is None:
        grade = VizGrade(False, False, ["unparseable"])
    elif record["task"] in NAV_TASKS:
        grade = grade_nav(last.rows, record)
    else:
        grade = grade_tiling(last.rows, record)
    if record["task"] in NAV_TASKS and grade.accurate and not grade.compliant:
        raise AssertionError("accurate navigation grade must be compliant")
    if judgment is not None and grade.accurate and not judgment.correct:
        grade.reasons.append("language_visualization_disagreement")
    return grade


def spatial_understanding_accuracy(
    graded: Iterable[tuple[Optional[VizGrade], AnswerJudgment]]
) -> Optional[Fraction]:
    """P(answer correct | last visualization accurate); None if none accurate."""
    accurate = [j for g, j in graded if g is not None and g.accurate]
    if not accurate:
        return None
    return Fraction(sum(j.correct for j in accurate), len(accurate))
