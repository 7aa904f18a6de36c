"""Prompt settings and per-task instruction templates.

A prompt is a single zero-shot user message: task instruction, rendered
inputs, then the setting's suffix sentence. Templates carry a version id;
the visual-task wording is reconstructed, the language-navigation prompt
is generated by :mod:`gridreason.nlnav`.
"""

from __future__ import annotations

import enum
from typing import Mapping

from ..grid import get_palette

TEMPLATE_VERSIONS = {
    "route_planning": "nav-v1-reconstructed",
    "next_step": "nav-v1-reconstructed",
    "tiling": "tiling-v1-reconstructed",
    "nlnav": "square-v1",
    "ring": "ring-v1-reconstructed",
}

VOT_SENTENCE = "Visualize the state after each reasoning step."


class PromptSetting(enum.Enum):
    COT = "CoT"
    NOVIZ = "NoViz"
    VOT = "VoT"
    VOT_ASCII = "VoTAscii"

    @property
    def suffix_text(self) -> str:
        return {
            PromptSetting.COT: "Let's think step by step.",
            PromptSetting.NOVIZ: "Don't use visualization. Let's think step by step.",
            PromptSetting.VOT: VOT_SENTENCE,
            PromptSetting.VOT_ASCII: "Use ascii-art to visualize the state after each reasoning step.",
        }[self]

    @classmethod
    def parse(cls, name: str) -> "PromptSetting":
        for s in cls:
            if s.value.lower() == name.strip().lower():
                return s
        raise ValueError(f"unknown prompt setting {name!r}; known: {[s.value for s in cls]}")


def _nav_instruction(record: Mapping) -> str:
    p = get_palette(record["palette_id"])
    return (
        "Navigation Task: for a provided map, "
        f"{p.start_glyph} is the home as starting point, {p.dest_glyph} is the office as the destination. "
        f"{p.road_glyph} means the road, {p.obstacle_glyph} means the obstacle. "
        "There exists one and only one viable route for each map. "
        "Each step, you choose a direction (up, down, left or right) and move along the road "
        "until the end of the straight stretch or the destination. "
        "You can not cross obstacles or leave the map."
    )


def _route_planning(record: Mapping) -> str:
    p = get_palette(record["palette_id"])
    return (
        _nav_instruction(record)
        + "\n\nMap:\n"
        + record["map_text"]
        + f"\n\nStarting from {p.start_glyph}, provide the steps to navigate to {p.dest_glyph}."
    )


def _next_step(record: Mapping) -> str:
    p = get_palette(record["palette_id"])
    moves = ", then ".join(record["given_instructions"])
    return (
        _nav_instruction(record)
        + "\n\nMap:\n"
        + record["map_text"]
        + f"\n\nStarting from {p.start_glyph}, you moved {moves}. "
        "What is the next step? Answer with one direction: up, down, left or right."
    )


def _tiling(record: Mapping) -> str:
    p = get_palette(record["palette_id"])
    pieces = record["masked_pieces"]
    glyphs = ", ".join(f"{p.piece_glyph(n)} is a piece of tetromino {n}" for n in "ITL")
    lines = [
        "Polyomino Tiling Task: a rectangle is filled with tetromino pieces, where "
        f"{glyphs} and {p.empty_glyph} marks an empty cell. Several pieces have been removed. "
        "Fill the empty cells with the removed pieces so that every cell is covered exactly once "
        "and no pieces overlap. Pieces can not be rotated or reflected beyond the variations given.",
        "",
        "Rectangle:",
        record["rect_text"],
        "",
        "Removed pieces: " + ", ".join(f"tetromino {n}" for n in pieces) + ".",
    ]
    offered = dict(record["context_variant_texts"])
    offered[record["query_piece"]] = record["offered_variant_texts"]
    for name in pieces:
        for i, text in enumerate(offered[name]):
            lines += ["", f"Variation {i + 1} of tetromino {name}:", text]
    lines += [
        "",
        f"Which variation of tetromino {record['query_piece']} fits into the empty cells "
        "as part of a complete filling? Answer with Variation 1 or Variation 2.",
    ]
    return "\n".join(lines)


def _language(record: Mapping) -> str:
    return record["prompt_text"]


_BUILDERS = {
    "route_planning": _route_planning,
    "next_step": _next_step,
    "tiling": _tiling,
    "nlnav": _language,
    "ring": _language,
}


def build_prompt(record: Mapping, setting: PromptSetting) -> list[dict]:
    """Chat messages for one instance under one prompt setting."""
    try:
        builder = _BUILDERS[record["task"]]
    except KeyError:
        raise ValueError(f"no template for task {record.get('task')!r}") from None
    return [{"role": "user", "content": builder(record) + "\n\n" + setting.suffix_text}]
