"""Score one transcript against its dataset record."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional

from .evaluation import AnswerJudgment, ExecutionTrace, execute_instructions, extract_answer, parse_directions, score_answer
from .grid import parse_grid
from .traces import answer_keywords, palette_for

TASKS = ("route_planning", "next_step", "tiling", "nlnav", "ring")


def gold_text(record: Mapping) -> str:
    task = record["task"]
    if task == "next_step":
        return record["gold"][0]
    if task == "route_planning":
        return ", ".join(record["gold"])
    if task == "tiling":
        return record["gold"]
    if task in ("nlnav", "ring"):
        return record["gold_object"]
    raise ValueError(f"unknown task {task!r}")


@dataclass(frozen=True)
class Scored:
    judgment: AnswerJudgment
    trace: Optional[ExecutionTrace] = None


def score_record(record: Mapping, raw: str) -> Scored:
    """Route planning is executed on the map; other tasks are substring-judged."""
    if record["task"] == "route_planning":
        ex = extract_answer(raw, answer_keywords(record), rest=True)
        m = parse_grid(record["map_text"], palette_for(record))
        trace = execute_instructions(m, parse_directions(ex.text))
        return Scored(AnswerJudgment(ex.text, trace.reached_dest, ex.rule), trace)
    return Scored(score_answer(raw, gold_text(record), answer_keywords(record)))
