from hypothesis import given
from hypothesis import strategies as st
import numpy as np
import pytest

from trichomp.game import InvalidPositionError, Move, Position3, moves, options, render


@st.composite
def positions(draw, max_p=12):
    p = draw(st.integers(1, max_p))
    q = draw(st.integers(0, p))
    r = draw(st.integers(0, q))
    return Position3(p, q, r)


@pytest.mark.parametrize("rows", [(2, 1, 3), (0, 0, 0), (3, -1, -2), (1, 2, 0)])
def test_invalid_positions(rows):
    with pytest.raises(InvalidPositionError):
        Position3(*rows)


def test_numpy_and_bool_rows():
    pos = Position3(np.int64(3), np.int32(2), 0)
    assert pos == Position3(3, 2, 0)
    assert type(pos.p) is int
    with pytest.raises(InvalidPositionError):
        Position3(True, 0, 0)


@pytest.mark.parametrize(
    "literal", ["2,1,3", "2, 2, 1", "2,2", "a,b,c", "", "-1,0,0", " 2,2,1", "2,2,1\n", "\u0663,1,1"]
)
def test_parse_rejects(literal):
    with pytest.raises(InvalidPositionError):
        Position3.parse(literal)


def test_parse_and_str():
    assert Position3.parse("5,5,3") == Position3(5, 5, 3)
    assert str(Position3(2, 2, 1)) == "2,2,1"
    assert Position3.rectangle(4) == Position3(4, 4, 4)


def test_moves_terminal():
    assert moves(Position3(1, 0, 0)) == []
    assert options(Position3(1, 0, 0)) == set()


def test_moves_of_2_2_1():
    labels = [move.label for move in moves(Position3(2, 2, 1))]
    assert labels == ["1:1", "2:1", "2:0", "3:0"]
    assert options(Position3(2, 2, 1)) == {
        Position3(1, 1, 1),
        Position3(2, 1, 1),
        Position3(2, 0, 0),
        Position3(2, 2, 0),
    }


def test_moves_of_3_3_3():
    assert len(moves(Position3(3, 3, 3))) == 8
    assert Position3(1, 1, 1) in options(Position3(3, 3, 3))


def test_cut_clamps_lower_rows():
    pos = Position3(5, 4, 3)
    assert pos.cut(1, 2) == Position3(2, 2, 2)
    assert pos.cut(2, 1) == Position3(5, 1, 1)
    assert pos.cut(3, 0) == Position3(5, 4, 0)
    with pytest.raises(InvalidPositionError):
        pos.cut(1, 0)
    with pytest.raises(InvalidPositionError):
        pos.cut(3, 3)


def test_move_str():
    move = Move(3, 1, Position3(2, 2, 1))
    assert str(move) == "3:1 -> 2,2,1"


def test_render():
    assert render(Position3(3, 2, 0)) == "1 | x # #\n2 | # #\n3 | "


@given(positions())
def test_move_count(pos):
    assert len(moves(pos)) == (pos.p - 1) + pos.q + pos.r


@given(positions())
def test_options_are_smaller(pos):
    for move in moves(pos):
        assert move.result.squares < pos.squares
        assert move.result.p <= pos.p and move.result.q <= pos.q and move.result.r <= pos.r
