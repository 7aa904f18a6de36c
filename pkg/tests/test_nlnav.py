import json

import pytest
from hypothesis import given, settings, strategies as st

from gridreason.grid import ConfigError, Coord, Direction
from gridreason.nlnav import (
    LandmarkMap,
    default_vocabulary,
    execute_walk,
    generate_ring,
    generate_ring_dataset,
    generate_square_dataset,
    generate_walk,
    normalize_ring,
    ring_prompt,
    square_prompt,
    with_article,
    write_jsonl,
)
from gridreason.rng import make_rng

EXAMPLE_LANDMARKS = (
    "torch", "infant bed", "American dipper", "jay", "terrapin",
    "microwave oven", "baseball player", "harvestman", "neck brace",
)
U, D, L, R = Direction.UP, Direction.DOWN, Direction.LEFT, Direction.RIGHT
EXAMPLE_WALK = (R, R, U, U, L, D, D)

# published example prompt, verbatim
EXAMPLE_PROMPT = (
    "You have been given a 3 by 3 square grid. Starting from a vertex, you will move along the edges "
    "of the grid. Initially, you are positioned at the bottom-left corner of the grid, where you will "
    "find a torch, then you go right, where you will find an infant bed, then you go right, where you "
    "will find an American dipper. Then you go up, where you will find a jay, then you go left, where "
    "you will find a terrapin, then you go left, where you will find a microwave oven. Then you go up, "
    "where you will find a baseball player, then you go right, where you will find a harvestman, then "
    "you go right, where you will find a neck brace. Now you have all the information on the map. You "
    "start at the position where the torch is located, then you go right by one step, then you go right "
    "by one step, then you go up by one step, then you go up by one step, then you go left by one step, "
    "then you go down by one step, and then you go down by one step. What will you find?"
)


def test_example_prompt_verbatim():
    m = LandmarkMap(EXAMPLE_LANDMARKS)
    assert square_prompt(m, "torch", EXAMPLE_WALK) == EXAMPLE_PROMPT


def test_example_walk_answer():
    m = LandmarkMap(EXAMPLE_LANDMARKS)
    end = execute_walk(m.positions["torch"], EXAMPLE_WALK)
    assert m.at(end) == "infant bed"


def test_snake_layout():
    m = LandmarkMap(EXAMPLE_LANDMARKS)
    assert m.positions["torch"] == Coord(2, 0)
    assert m.positions["microwave oven"] == Coord(1, 0)
    assert m.positions["neck brace"] == Coord(0, 2)


def test_walk_off_grid_is_an_error():
    with pytest.raises(ValueError):
        execute_walk(Coord(0, 0), [U])


def test_landmark_map_validation():
    with pytest.raises(ValueError):
        LandmarkMap(("a",) * 9)


def test_articles():
    assert with_article("infant bed") == "an infant bed"
    assert with_article("jay") == "a jay"


def test_vocabulary():
    vocab = default_vocabulary()
    assert len(vocab) >= 100
    assert len(set(vocab)) == len(vocab)
    assert set(EXAMPLE_LANDMARKS) <= set(vocab)


def test_small_vocabulary_rejected():
    with pytest.raises(ConfigError):
        generate_square_dataset(1, 0, vocab=["a", "b"])


def test_square_dataset():
    data = generate_square_dataset(200, 1)
    assert len(data) == 200
    for inst in data:
        assert 4 <= len(inst.instructions) <= 10
        end = execute_walk(inst.map.positions[inst.start_object], inst.instructions)
        assert inst.map.at(end) == inst.gold_object
        assert inst.prompt_text.endswith("What will you find?")
    assert [i.to_json() for i in data[:5]] == [i.to_json() for i in generate_square_dataset(5, 1)]
    assert data[0].to_json() != generate_square_dataset(1, 2)[0].to_json()


def test_fixed_walk_length():
    m = LandmarkMap(EXAMPLE_LANDMARKS)
    assert len(generate_walk(m, make_rng(0), walk_len=7).instructions) == 7
    with pytest.raises(ValueError):
        generate_walk(m, make_rng(0), walk_len=0)


# --- ring ----------------------------------------------------------------


def test_ring_published_case():
    assert normalize_ring([("clockwise", 15), ("counterclockwise", 3)]) == 0


def test_ring_edge_cases():
    assert normalize_ring([]) == 0
    assert normalize_ring([("counterclockwise", 1)]) == 11
    assert normalize_ring([("clockwise", 12)]) == 0
    with pytest.raises(ValueError):
        normalize_ring([("sideways", 1)])


moves = st.lists(st.tuples(st.sampled_from(["clockwise", "counterclockwise"]), st.integers(0, 40)), max_size=6)


@settings(max_examples=1000)
@given(moves, st.integers(0, 40), st.integers(0, 6))
def test_ring_invariant_under_canceling_pairs(ms, n, at):
    base = normalize_ring(ms)
    at = min(at, len(ms))
    pair = [("clockwise", n), ("counterclockwise", n)]
    assert normalize_ring(ms[:at] + pair + ms[at:]) == base
    assert 0 <= base < 12


@given(moves, st.integers(2, 30))
def test_ring_matches_stepwise_simulation(ms, size):
    pos = 0
    for d, n in ms:
        for _ in range(n):
            pos = (pos + (1 if d == "clockwise" else -1)) % size
    assert normalize_ring(ms, size) == pos


def test_ring_instances(tmp_path):
    data = generate_ring_dataset(200, 1, ring_size=12)
    assert len(data) == 200
    for inst in data:
        assert inst.ring_size == 12 and 2 <= len(inst.moves) <= 4
        idx = (inst.start_index + normalize_ring(inst.moves)) % 12
        assert inst.landmarks[idx] == inst.gold_object
    path = tmp_path / "ring.jsonl"
    write_jsonl(data, path)
    rec = json.loads(path.read_text().splitlines()[0])
    assert rec["task"] == "ring" and rec["num_instructions"] == len(rec["moves"])


def test_ring_prompt_shape():
    names = [f"thing{i}" for i in range(4)]
    text = ring_prompt(names, 1, [("clockwise", 1), ("counterclockwise", 3)])
    assert "circular ring with 4 positions" in text
    assert "where the thing1 is located, then you go 1 step clockwise, and then you go 3 steps counterclockwise." in text
    inst = generate_ring(make_rng(3), vocab=[f"n{i}" for i in range(20)], ring_size=5)
    assert inst.ring_size == 5
