import pytest
from hypothesis import given, strategies as st

from gridreason.grid import (
    ASCII_PALETTE,
    EMOJI_PALETTE,
    CellKind,
    ConfigError,
    Coord,
    Direction,
    GridMap,
    ParseError,
    RenderPalette,
    get_palette,
    parse_glyph_rows,
    parse_grid,
    render_grid,
    split_glyphs,
    step,
)

PALETTES = [ASCII_PALETTE, EMOJI_PALETTE]

kinds = st.sampled_from([CellKind.ROAD, CellKind.OBSTACLE])


@st.composite
def grid_maps(draw):
    h = draw(st.integers(1, 6))
    w = draw(st.integers(2, 6))
    cells = [[draw(kinds) for _ in range(w)] for _ in range(h)]
    flat = [(r, c) for r in range(h) for c in range(w)]
    s, d = draw(st.lists(st.sampled_from(flat), min_size=2, max_size=2, unique=True))
    cells[s[0]][s[1]] = CellKind.START
    cells[d[0]][d[1]] = CellKind.DESTINATION
    return GridMap.from_cells(cells)


def test_up_decreases_row():
    assert step(Coord(2, 3), Direction.UP) == Coord(1, 3)
    assert step(Coord(2, 3), Direction.DOWN) == Coord(3, 3)
    assert step(Coord(2, 3), Direction.LEFT) == Coord(2, 2)
    assert step(Coord(2, 3), Direction.RIGHT) == Coord(2, 4)
    assert step(Coord(0, 0), Direction.UP) is None
    assert step(Coord(0, 0), Direction.LEFT) is None


def test_direction_helpers():
    assert Direction.UP.opposite is Direction.DOWN
    assert Direction.LEFT.opposite is Direction.RIGHT
    assert Direction.UP.is_vertical and not Direction.RIGHT.is_vertical
    assert Direction.parse(" Left ") is Direction.LEFT
    with pytest.raises(ValueError):
        Direction.parse("sideways")


def test_render_known_map():
    m = GridMap.from_cells(
        [
            [CellKind.START, CellKind.ROAD, CellKind.OBSTACLE],
            [CellKind.OBSTACLE, CellKind.ROAD, CellKind.DESTINATION],
        ]
    )
    assert render_grid(m, ASCII_PALETTE) == "S.#\n#.D"
    assert render_grid(m, EMOJI_PALETTE) == "🏠⬜🚧\n🚧⬜🏢"
    assert m.start == Coord(0, 0) and m.dest == Coord(1, 2)


@pytest.mark.parametrize("palette", PALETTES, ids=lambda p: p.name)
@given(m=grid_maps())
def test_render_parse_round_trip(palette, m):
    assert parse_grid(render_grid(m, palette), palette) == m


def test_parse_empty_and_ragged():
    with pytest.raises(ParseError) as e:
        parse_grid("\n\n", ASCII_PALETTE)
    assert e.value.kind == "empty"
    with pytest.raises(ParseError) as e:
        parse_grid("S..\n.D", ASCII_PALETTE)
    assert e.value.kind == "ragged"


def test_unknown_glyphs_are_kept():
    m = parse_grid("S*.\n#@D", ASCII_PALETTE)
    assert m[Coord(0, 1)] is CellKind.UNKNOWN
    assert dict(m.unknown) == {Coord(0, 1): "*", Coord(1, 1): "@"}
    assert render_grid(m, ASCII_PALETTE) == "S*.\n#@D"


def test_split_glyphs_emoji_with_modifiers():
    # variation selector attaches to the arrow; spaces are ignored
    assert split_glyphs("⬆️ 🏠⬜", EMOJI_PALETTE.all_glyphs()) == ["⬆️", "🏠", "⬜"]
    assert split_glyphs("a b") == ["a", "b"]


def test_parse_glyph_rows_strips_blank_lines():
    assert parse_glyph_rows("\nab\ncd\n\n") == [["a", "b"], ["c", "d"]]


def test_palette_validation():
    with pytest.raises(ConfigError):
        RenderPalette("bad", "S", "S", ".", "#")
    with pytest.raises(ConfigError):
        RenderPalette("bad", "S", "D", " ", "#")
    with pytest.raises(ConfigError):
        get_palette("nope")
    assert ASCII_PALETTE.piece_for_glyph("T") == "T"
    assert ASCII_PALETTE.kind_for("#") is CellKind.OBSTACLE
    assert ASCII_PALETTE.kind_for("x") is None


def test_from_cells_rejects_bad_shapes():
    with pytest.raises(ValueError):
        GridMap.from_cells([])
    with pytest.raises(ValueError):
        GridMap.from_cells([[CellKind.ROAD], [CellKind.ROAD, CellKind.ROAD]])
