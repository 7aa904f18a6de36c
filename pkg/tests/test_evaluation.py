from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from gridreason.evaluation import (
    AnswerJudgment,
    ExecutionTrace,
    aggregate,
    execute_instructions,
    extract_answer,
    normalize_direction_words,
    parse_directions,
    score_answer,
    turning_indices,
)
from gridreason.grid import ASCII_PALETTE, Coord, Direction, parse_grid
from gridreason.navigation import generate_maps, gold_path

U, D, L, R = Direction.UP, Direction.DOWN, Direction.LEFT, Direction.RIGHT

# gold route: right 2, down 2, right 1, down 1 (k = 4)
K4 = parse_grid("S..#\n##.#\n##..\n###D", ASCII_PALETTE)


def test_fixture_map_turning_points():
    path = gold_path(K4)
    assert turning_indices(path) == [2, 4, 5, 6]


def test_empty_instructions():
    tr = execute_instructions(K4, [])
    assert (tr.t, tr.k, tr.reached_dest, tr.final_pos) == (0, 4, False, Coord(0, 0))


def test_gold_plan_reaches_destination():
    tr = execute_instructions(K4, [R, D, R, D])
    assert tr.t == tr.k == 4 and tr.reached_dest
    assert tr.completing_rate == 1


def test_prefix_then_obstacle():
    # hand simulation: R slides to (0,2), D slides to (2,2), L hits '#' at (2,1)
    tr = execute_instructions(K4, [R, D, L])
    assert tr.final_pos == Coord(2, 2)
    assert tr.ignored == ((2, "obstacle"),)
    assert tr.t == 2 and tr.completing_rate == Fraction(1, 2)


def test_boundary_is_ignored():
    tr = execute_instructions(K4, [U, R])
    assert tr.ignored == ((0, "boundary"),)
    assert tr.t == 1


def test_turning_back_lowers_progress():
    # U from (2,2) slides back to (0,2)
    tr = execute_instructions(K4, [R, D, U])
    assert tr.final_pos == Coord(0, 2) and tr.t == 1
    # counting moves instead would report 3
    assert execute_instructions(K4, [R, D, U], progress="moves").t == 3


def test_unit_mode():
    tr = execute_instructions(K4, [R, R, D, D, R, D], mode="unit")
    assert tr.reached_dest and tr.t == 4
    assert execute_instructions(K4, [R], mode="unit").t == 0


def test_bad_modes():
    with pytest.raises(ValueError):
        execute_instructions(K4, [], mode="teleport")
    with pytest.raises(ValueError):
        execute_instructions(K4, [], progress="vibes")


MAPS = [r.map for k in (2, 3, 4, 5) for r in generate_maps(k)]


@given(st.integers(0, len(MAPS) - 1), st.lists(st.sampled_from(list(Direction)), max_size=12))
def test_execution_invariants(i, dirs):
    m = MAPS[i]
    tr = execute_instructions(m, dirs)
    assert 0 <= tr.t <= tr.k
    for _, pos in tr.executed:
        assert m.in_bounds(pos) and m[pos].passable
    assert tr.reached_dest == (tr.final_pos == m.dest)
    assert len(tr.executed) + len(tr.ignored) == len(dirs)
    if tr.reached_dest:
        assert tr.t == tr.k


# --- answers -----------------------------------------------------------


def test_score_examples():
    assert score_answer("The object is an infant bed.", "infant bed").correct
    assert not score_answer("", "up").correct
    assert score_answer("", "up").extracted_answer == ""
    # substring semantics accept synonyms
    assert score_answer("I will move upward", "up").correct


def test_marker_rules():
    ex = extract_answer("I think left.\nThe answer is: right\nmore text")
    assert (ex.text, ex.rule) == ("right", "marker")
    ex = extract_answer("Answer: left\nFinal answer: down")
    assert ex.text == "down"
    ex = extract_answer("The answer is\n\n**Variation 2**")
    assert ex.text == "Variation 2"
    ex = extract_answer("The answer is: right,\ndown", rest=True)
    assert ex.text == "right,\ndown"


def test_keyword_and_whole_rules():
    ex = extract_answer("first up\nthen left\nok", keywords=["up", "left"])
    assert (ex.text, ex.rule) == ("then left", "keyword")
    ex = extract_answer("no idea", keywords=["up"])
    assert (ex.text, ex.rule) == ("no idea", "whole")


def test_direction_words():
    assert normalize_direction_words("Go North then ➡️") == "Go up then right"
    assert parse_directions("left, upward, → and DOWN") == [L, U, R, D]
    assert parse_directions("update the upstream") == []
    assert score_answer("answer: ⬆", "up").correct
    assert not score_answer("answer: down", "up").correct


@given(st.text(alphabet="abc \n", max_size=30), st.sampled_from(["up", "down", "left", "right"]))
def test_extraction_is_suffix_stable(noise, gold):
    raw = f"reasoning...\nThe answer is {gold}.\n"
    assert score_answer(raw, gold) == score_answer(raw + noise, gold)


# --- aggregation -------------------------------------------------------


def trace(t, k):
    return ExecutionTrace((), (), (), Coord(0, 0), t, k, t == k)


def test_two_trace_case():
    rec = aggregate([trace(4, 4), trace(2, 4)], "route_planning")
    assert rec.completing_rate == 75.00 and rec.success_rate == 50.00
    assert rec.exact == {"completing_rate": Fraction(3, 4), "success_rate": Fraction(1, 2)}


def test_accuracy_and_rounding():
    js = [AnswerJudgment("x", c) for c in (True, False, False)]
    rec = aggregate(js, "next_step")
    assert rec.accuracy == 33.33 and rec.exact["accuracy"] == Fraction(1, 3)
    assert aggregate([AnswerJudgment("", True)] * 4, "t").accuracy == 100.00


def test_aggregate_errors():
    with pytest.raises(ValueError):
        aggregate([], "x")
    with pytest.raises(TypeError):
        aggregate([trace(1, 1), AnswerJudgment("", True)], "x")


@given(st.lists(st.tuples(st.integers(0, 7), st.integers(1, 7)), min_size=1, max_size=20), st.randoms())
def test_aggregate_permutation_invariant(pairs, rnd):
    items = [trace(min(t, k), k) for t, k in pairs]
    shuffled = list(items)
    rnd.shuffle(shuffled)
    a, b = aggregate(items, "r"), aggregate(shuffled, "r")
    assert a.exact == b.exact
    assert 0 <= a.exact["success_rate"] <= a.exact["completing_rate"] <= 1
