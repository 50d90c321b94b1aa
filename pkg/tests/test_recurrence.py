from hypothesis import given
from hypothesis import strategies as st
import numpy as np
import pytest

from trichomp.config import ResourceCeilingError
from trichomp.game import Position3
from trichomp.oracle import Outcome
from trichomp.recurrence import (
    OpeningKind,
    TableRangeError,
    TheoremViolation,
    blocked_sets,
    build_reference,
    diagonal_set,
    f_lookup,
    is_p_position,
    mex,
    opening_moves,
    row_start_set,
    unique_opening_move,
    winning_moves,
)

# f(q, r) for q <= 5, worked out by hand from the recurrence
ROWS = [[1], [2, 3], [3, 2, 4], [4, 2, 5, 6], [5, 2, 6, 7, 8], [6, 2, 7, 5, 9, 10]]
CONSTANT_CELLS = {(3, 1), (4, 1), (5, 1)}
N_MAX = len(ROWS) - 1


@pytest.fixture(scope="module")
def table():
    return build_reference(N_MAX)


@pytest.mark.parametrize(
    "values, expected",
    [([], 1), ([1, 2, 3], 4), ([2, 3], 1), ([1, 3], 2), ([0, 1, 1, 5], 2), ([4, 1, 2, 3], 5)],
)
def test_mex(values, expected):
    assert mex(values) == expected
    assert mex(np.array(values, dtype=np.int64)) == expected


@given(st.lists(st.integers(0, 50), max_size=30))
def test_mex_property(values):
    m = mex(values)
    assert m >= 1
    assert m not in values
    assert all(k in values for k in range(1, m))


def test_hand_table(table):
    for q, row in enumerate(ROWS):
        np.testing.assert_array_equal(table.row(q), row)
        for r, value in enumerate(row):
            assert f_lookup(table, q, r) == value
            assert table.is_mex_cell(q, r) == ((q, r) not in CONSTANT_CELLS)


def test_table_zero():
    table = build_reference(0)
    assert table.value(0, 0) == 1
    assert table.is_mex_cell(0, 0)


def test_blocked_sets(table):
    blocked = blocked_sets(1, 1, table)
    assert blocked.R == {1} and blocked.C == {2}
    blocked = blocked_sets(2, 1, table)
    assert blocked.R == {1, 3} and blocked.C == {3}
    assert blocked.B == {1, 3}
    blocked = blocked_sets(3, 3, table)
    assert blocked.R == {1, 3, 4} and blocked.C == {2, 4, 5}
    assert mex(blocked.B) == table.value(3, 3) == 6
    assert blocked_sets(2, 2, table).B == {1, 2, 3}
    assert blocked_sets(5, 3, table).B == {1, 2, 3, 4, 6, 7}
    assert blocked_sets(0, 0, table).B == set()


def test_columns(table):
    assert table.column_runs(1).dump() == "1;1:3,2:2"
    assert table.column_runs(3).dump() == "3;3:6,4:7,5:5"
    assert table.column_runs(3).value_at(4) == 7
    np.testing.assert_array_equal(table.column(1), [3, 2, 2, 2, 2])


def test_out_of_range(table):
    with pytest.raises(TableRangeError):
        table.value(N_MAX + 1, 0)
    with pytest.raises(TableRangeError):
        table.value(2, 3)
    with pytest.raises(IndexError):
        is_p_position(table, Position3(7, 6, 0))


def test_memory_ceiling():
    with pytest.raises(ResourceCeilingError):
        build_reference(100, memory_ceiling=1000)


def test_classification(table):
    assert is_p_position(table, Position3(1, 0, 0)) is Outcome.P
    assert is_p_position(table, Position3(2, 2, 1)) is Outcome.P
    assert is_p_position(table, Position3(2, 2, 2)) is Outcome.N
    assert is_p_position(table, Position3(10, 5, 5)) is Outcome.P


def test_winning_moves(table):
    assert [str(move) for move in winning_moves(table, Position3(2, 2, 2))] == ["3:1 -> 2,2,1"]
    assert winning_moves(table, Position3(5, 5, 3)) == []


def test_d_and_s(table):
    assert diagonal_set(table) == {1, 3, 4, 6, 8, 10}
    assert row_start_set(table) == {2: 1, 5: 3}


@pytest.mark.parametrize(
    "n, line",
    [
        (1, "n=1 kind=diagonal cut=2:0 target=1,0,0"),
        (2, "n=2 kind=rowstart cut=3:1 target=2,2,1"),
        (3, "n=3 kind=diagonal cut=2:1 target=3,1,1"),
        (4, "n=4 kind=diagonal cut=2:2 target=4,2,2"),
        (5, "n=5 kind=rowstart cut=3:3 target=5,5,3"),
    ],
)
def test_unique_opening_move(table, n, line):
    opening = unique_opening_move(table, n)
    assert str(opening) == line
    assert is_p_position(table, opening.target) is Outcome.P


def test_opening_moves(table):
    kinds = [opening.kind for opening in opening_moves(table)]
    assert kinds == [
        OpeningKind.DIAGONAL,
        OpeningKind.ROW_START,
        OpeningKind.DIAGONAL,
        OpeningKind.DIAGONAL,
        OpeningKind.ROW_START,
    ]


def test_theorem_violation(table):
    # 2 becomes a diagonal value as well as a row-start
    faulty = table.with_cell(1, 1, 2)
    with pytest.raises(TheoremViolation) as info:
        unique_opening_move(faulty, 2)
    assert info.value.dump["diagonal_witnesses"] == [1]
    assert info.value.dump["row_witnesses"] == [1]
    with pytest.raises(TableRangeError):
        unique_opening_move(table, 0)
