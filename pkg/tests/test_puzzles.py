import json

import numpy as np
import pytest

from gridreason.grid import EMOJI_PALETTE, parse_glyph_rows
from gridreason.rng import make_rng
from gridreason.tiling.puzzles import (
    generate_configurations,
    generate_dataset,
    mask_and_emit_qa,
    mask_choices,
    option_label,
    render_rect,
    write_jsonl,
)
from oracles import completable_with


@pytest.fixture(scope="module")
def dataset():
    return generate_dataset(0)


def test_configuration_count():
    configs = generate_configurations()
    assert len(configs) == 32
    assert len({c.canonical() for c in configs}) == 32


def test_mask_choices_use_distinct_types():
    config = generate_configurations()[0]
    two = mask_choices(config, 2)
    three = mask_choices(config, 3)
    # {I,T}: 2*2, {I,L}: 2*1, {T,L}: 2*1 ; {I,T,L}: 2*2*1
    assert (len(two), len(three)) == (8, 4)
    for slots in two + three:
        names = [config.placements[i].piece for i in slots]
        assert len(set(names)) == len(names)


def test_dataset_sizes(dataset):
    qa, stats = dataset
    assert stats.configurations == 32
    assert stats.masked_configurations == {2: 256, 3: 128}
    assert stats.instances[2] >= 300 and stats.instances[3] >= 150
    assert stats.instances[2] + stats.dropped[2] == 2 * 256
    assert stats.instances[3] + stats.dropped[3] == 3 * 128
    assert len(qa) == stats.instances[2] + stats.instances[3]
    assert len({q.id for q in qa}) == len(qa)


def test_every_question_has_exactly_one_completable_option(dataset):
    qa, _ = dataset
    for q in qa:
        region = [c for cells in q.masked_cells.values() for c in cells]
        ok = [completable_with(region, q.masked_pieces, q.query_piece, v.cells) for v in q.offered_variants]
        assert ok == [i == q.gold_index for i in range(2)], q.id


def test_gold_is_the_true_piece(dataset):
    qa, _ = dataset
    for q in qa[:100]:
        true = sorted(q.masked_cells[q.query_piece])
        r0 = min(r for r, _ in true)
        c0 = min(c for _, c in true)
        shape = sorted((r - r0, c - c0) for r, c in true)
        assert sorted(map(tuple, q.offered_variants[q.gold_index].cells)) == shape
        assert q.gold_text == option_label(q.gold_index)


def test_gold_position_is_not_constant(dataset):
    qa, _ = dataset
    golds = [q.gold_index for q in qa]
    assert 0.3 < np.mean(golds) < 0.7


def test_rect_text_blanks_masked_cells(dataset):
    q = dataset[0][0]
    rows = parse_glyph_rows(q.rect_text)
    assert len(rows) == 4 and len(rows[0]) == 5
    blanks = {(r, c) for r, row in enumerate(rows) for c, g in enumerate(row) if g == "_"}
    assert blanks == {tuple(c) for cells in q.masked_cells.values() for c in cells}


def test_seeded_determinism(tmp_path):
    configs = generate_configurations()[:4]
    a = [q.to_json() for q in generate_dataset(5, configs=configs)[0]]
    b = [q.to_json() for q in generate_dataset(5, configs=configs)[0]]
    c = [q.to_json() for q in generate_dataset(6, configs=configs)[0]]
    assert a == b
    assert a != c


def test_rng_streams_are_independent():
    x = make_rng(1, 1, 2).integers(1 << 30, size=4)
    y = make_rng(1, 1, 3).integers(1 << 30, size=4)
    assert not np.array_equal(x, y)
    assert np.array_equal(x, make_rng(1, 1, 2).integers(1 << 30, size=4))
    with pytest.raises(ValueError):
        make_rng(-1)


def test_bad_mask_count():
    with pytest.raises(ValueError):
        generate_dataset(0, mask_counts=(4,))


def test_mask_rejects_same_type():
    config = generate_configurations()[0]
    same = [i for i, p in enumerate(config.placements) if p.piece == "I"]
    with pytest.raises(ValueError):
        mask_and_emit_qa(config, 0, same, make_rng(0))


def test_json_record_and_emoji_palette(tmp_path):
    config = generate_configurations()[3]
    slots = mask_choices(config, 3)[0]
    qa, _ = mask_and_emit_qa(config, 3, slots, make_rng(0, 9), EMOJI_PALETTE)
    path = tmp_path / "t.jsonl"
    write_jsonl(qa, path, EMOJI_PALETTE)
    rec = json.loads(path.read_text(encoding="utf-8").splitlines()[0])
    assert rec["task"] == "tiling" and rec["palette_id"] == "emoji"
    assert rec["gold"] in ("Variation 1", "Variation 2")
    assert "⬛" in rec["rect_text"]
    assert set(rec["context_variant_texts"]) == set(rec["masked_pieces"]) - {rec["query_piece"]}
    assert render_rect(config, slots, EMOJI_PALETTE, 5, 4) == rec["rect_text"]
