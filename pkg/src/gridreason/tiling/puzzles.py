"""Masked-rectangle tiling questions.

For every tiling of the rectangle, pieces of distinct types are masked and
one question is asked per masked piece: which of two offered variants of
that piece fits the blank region. A question is kept only if exactly one
of the offered variants can take part in a completion of the region.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from ..grid import ASCII_PALETTE, Coord, RenderPalette
from ..rng import STREAM_TILING, make_rng
from .shapes import Variant, render_variant, variants
from .solver import TilingConfiguration, rect_cells, solve_tiling_dlx

RECT_WIDTH = 5
RECT_HEIGHT = 4
DEFAULT_PIECES = ("I", "I", "T", "T", "L")


@dataclass(frozen=True)
class TilingQAInstance:
    id: str
    config_id: int
    mask_count: int
    masked_pieces: tuple[str, ...]  # types, in slot order
    masked_cells: dict[str, tuple[Coord, ...]]  # type -> true cells
    rect_text: str
    query_piece: str
    offered_variants: tuple[Variant, Variant]
    gold_index: int
    context_variants: dict[str, tuple[Variant, Variant]]  # other masked pieces
    palette_id: str
    width: int = RECT_WIDTH
    height: int = RECT_HEIGHT

    @property
    def gold_text(self) -> str:
        return option_label(self.gold_index)

    def to_json(self, palette: RenderPalette = ASCII_PALETTE) -> dict:
        def texts(pair):
            return [render_variant(v, palette.piece_glyph(v.parent), palette.empty_glyph) for v in pair]

        return {
            "id": self.id,
            "task": "tiling",
            "mask_count": self.mask_count,
            "rect_text": self.rect_text,
            "query_piece": self.query_piece,
            "offered_variant_texts": texts(self.offered_variants),
            "gold_index": self.gold_index,
            "gold": self.gold_text,
            "config_id": self.config_id,
            "masked_pieces": list(self.masked_pieces),
            "masked_cells": {k: [list(c) for c in v] for k, v in self.masked_cells.items()},
            "offered_variant_indices": [v.variant_index for v in self.offered_variants],
            "context_variant_texts": {k: texts(v) for k, v in self.context_variants.items()},
            "palette_id": self.palette_id,
        }


def option_label(index: int) -> str:
    return f"Variation {index + 1}"


@dataclass
class TilingStats:
    configurations: int = 0
    masked_configurations: dict[int, int] = field(default_factory=dict)
    instances: dict[int, int] = field(default_factory=dict)
    dropped: dict[int, int] = field(default_factory=dict)


def generate_configurations(
    width: int = RECT_WIDTH, height: int = RECT_HEIGHT, pieces: Sequence[str] = DEFAULT_PIECES
) -> list[TilingConfiguration]:
    return solve_tiling_dlx(rect_cells(width, height), pieces)


def render_rect(
    config: TilingConfiguration, masked: Iterable[int], palette: RenderPalette, width: int, height: int
) -> str:
    masked = set(masked)
    rows = [[palette.empty_glyph] * width for _ in range(height)]
    for i, p in enumerate(config.placements):
        glyph = palette.empty_glyph if i in masked else palette.piece_glyph(p.piece)
        for c in p.covered:
            rows[c.row][c.col] = glyph
    return "\n".join("".join(r) for r in rows)


def completable(region: Iterable[Coord], pieces: Sequence[str], query_slot: int, variant: Variant) -> bool:
    """Whether `region` can be tiled by `pieces` with the query slot fixed to `variant`."""
    sols = solve_tiling_dlx(tuple(region), pieces, symmetry_breaking=False, fixed={query_slot: variant}, limit=1)
    return bool(sols)


def mask_choices(config: TilingConfiguration, mask_count: int) -> list[tuple[int, ...]]:
    """Sets of slot indices masking `mask_count` pieces of distinct types."""
    by_type: dict[str, list[int]] = {}
    for i, p in enumerate(config.placements):
        by_type.setdefault(p.piece, []).append(i)
    out = []
    for types in itertools.combinations(sorted(by_type, key="ITL".index), mask_count):
        for slots in itertools.product(*(by_type[t] for t in types)):
            out.append(tuple(sorted(slots)))
    return out


def _pick_pair(
    rng: np.random.Generator, true_v: Variant, region, pieces, slot
) -> tuple[tuple[Variant, Variant], int, bool]:
    """Draw a distractor, re-drawing until one cannot complete the region.

    Returns the offered pair, the gold index and whether the pair passes
    the uniqueness filter. If no distractor passes, the first drawn one is
    kept for display and the pair is marked as failing.
    """
    others = [v for v in variants(true_v.parent) if v.cells != true_v.cells]
    order = rng.permutation(len(others))
    gold = int(rng.integers(2))
    chosen, ok = others[order[0]], False
    for i in order:
        if not completable(region, pieces, slot, others[i]):
            chosen, ok = others[i], True
            break
    pair = (true_v, chosen) if gold == 0 else (chosen, true_v)
    return pair, gold, ok


def mask_and_emit_qa(
    config: TilingConfiguration,
    config_id: int,
    slots: Sequence[int],
    rng: np.random.Generator,
    palette: RenderPalette = ASCII_PALETTE,
    width: int = RECT_WIDTH,
    height: int = RECT_HEIGHT,
) -> tuple[list[TilingQAInstance], int]:
    """Questions for one masking of `config`; returns (kept, dropped count)."""
    masked = [config.placements[i] for i in slots]
    names = tuple(p.piece for p in masked)
    if len(set(names)) != len(names):
        raise ValueError("masked pieces must have distinct types")
    region = tuple(sorted(c for p in masked for c in p.covered))
    rect_text = render_rect(config, slots, palette, width, height)
    pairs = {}
    for qs, p in enumerate(masked):
        pairs[p.piece] = _pick_pair(rng, p.variant, region, names, qs)
    out, dropped = [], 0
    tag = "".join(str(s) for s in slots)
    for p in masked:
        pair, gold, ok = pairs[p.piece]
        if not ok:
            dropped += 1
            continue
        out.append(
            TilingQAInstance(
                id=f"tiling-m{len(slots)}-c{config_id}-s{tag}-q{p.piece}",
                config_id=config_id,
                mask_count=len(slots),
                masked_pieces=names,
                masked_cells={m.piece: tuple(sorted(m.covered)) for m in masked},
                rect_text=rect_text,
                query_piece=p.piece,
                offered_variants=pair,
                gold_index=gold,
                context_variants={k: v[0] for k, v in pairs.items() if k != p.piece},
                palette_id=palette.name,
                width=width,
                height=height,
            )
        )
    return out, dropped


def generate_dataset(
    seed: int,
    mask_counts: Sequence[int] = (2, 3),
    palette: RenderPalette = ASCII_PALETTE,
    configs: Optional[list[TilingConfiguration]] = None,
) -> tuple[list[TilingQAInstance], TilingStats]:
    """Every masking of every configuration, for each mask count."""
    for m in mask_counts:
        if m not in (2, 3):
            raise ValueError(f"mask count must be 2 or 3, got {m}")
    configs = generate_configurations() if configs is None else configs
    stats = TilingStats(configurations=len(configs))
    out: list[TilingQAInstance] = []
    for m in mask_counts:
        stats.masked_configurations[m] = stats.instances[m] = stats.dropped[m] = 0
        for cid, config in enumerate(configs):
            for mi, slots in enumerate(mask_choices(config, m)):
                rng = make_rng(seed, STREAM_TILING, m, cid, mi)
                qa, dropped = mask_and_emit_qa(config, cid, slots, rng, palette)
                stats.masked_configurations[m] += 1
                stats.instances[m] += len(qa)
                stats.dropped[m] += dropped
                out.extend(qa)
    return out, stats


def write_jsonl(instances: Iterable[TilingQAInstance], path, palette: RenderPalette = ASCII_PALETTE) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for inst in instances:
            fh.write(json.dumps(inst.to_json(palette), ensure_ascii=False) + "\n")
