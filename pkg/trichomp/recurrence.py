"""
The table f(q, r) of three-row Chomp.

For r <= q, f(q, r) is the unique first-row length p > r making the encoded position a P-position:
[p, q, r] is a P-position exactly when f(q, r) = p. The table is filled by the recurrence

    f(q, r) = f(q - 1, r)      if q > r and f(q - 1, r) < q
    f(q, r) = mex B(q, r)      otherwise

where B(q, r) = R(q, r) | C(q, r) collects the values blocked by moves on the second row (R) and
on the third row (C), and mex(A) = min{k > 0 : k not in A}. Cells where the second line applies
are called mex cells.
"""

from dataclasses import dataclass
from enum import Enum
import logging
from typing import Dict, FrozenSet, List, Tuple

import numpy as np

from trichomp.config import DEFAULT_MEMORY_CEILING, UsageError, check_memory
from trichomp.game import Move, Position3, moves
from trichomp.oracle import Outcome

logger = logging.getLogger(__name__)

# int64 value plus bool mex flag per cell of the square array
DENSE_BYTES_PER_CELL = 9


class TableRangeError(UsageError, IndexError):
    """A cell or position outside the computed part of the table."""


class TheoremViolation(RuntimeError):
    """The table contradicts the unique-opening-move theorem.

    Args:
        message: human readable summary
        dump: every cell involved in the violation
    """

    def __init__(self, message, dump):
        super().__init__(message)
        self.dump = dump


def mex(values):
    """Minimum excluded value, starting at 1: min{k > 0 : k not in values}."""
    if not isinstance(values, np.ndarray):
        values = np.fromiter(values, dtype=np.int64)
    present = np.zeros(values.size + 2, dtype=bool)
    present[0] = True
    present[values[(values > 0) & (values < present.size)]] = True
    # at least one of 1..size+1 is absent
    return int(np.argmin(present))


def _blocked_from_arrays(values, q, r):
    """Values of B(q, r) read from a dense array, with repetitions."""
    return np.concatenate((values.diagonal()[:r], values[r:q, r], values[q, :r]))


@dataclass(frozen=True)
class SparseColumn:
    """
    One column of the table as runs of constant value.

    Args:
        r: the column index
        runs: (q_start, value) pairs meaning f(q, r) = value for q_start <= q < next q_start
    """

    r: int
    runs: Tuple[Tuple[int, int], ...]

    def value_at(self, q):
        starts = [start for start, _ in self.runs]
        i = int(np.searchsorted(starts, q, side="right")) - 1
        if i < 0:
            raise TableRangeError(f"row {q} precedes column {self.r}")
        return self.runs[i][1]

    def dump(self):
        """Textual form "r;q_start:value,q_start:value,..."."""
        return f"{self.r};" + ",".join(f"{start}:{value}" for start, value in self.runs)


class FTable:
    """
    The triangular table f(q, r), 0 <= r <= q <= n_max, together with the mex-cell flags.

    Subclasses decide how the values are stored.
    """

    n_max: int

    def value(self, q, r):
        """Return f(q, r)"""
        raise NotImplementedError

    def is_mex_cell(self, q, r):
        """Return True if and only if the mex line of the recurrence produced (q, r)"""
        raise NotImplementedError

    def column_runs(self, r) -> SparseColumn:
        raise NotImplementedError

    def to_dense(self) -> Tuple[np.ndarray, np.ndarray]:
        """Square (n_max + 1) arrays of values and mex flags, zero/False above the diagonal"""
        raise NotImplementedError

    def diagonal(self) -> np.ndarray:
        """The values f(a, a) for a = 0..n_max"""
        raise NotImplementedError

    def row_starts(self) -> np.ndarray:
        """For p = 0..n_max, the smallest r < p with f(p, r) = p, or -1"""
        raise NotImplementedError

    def check_cell(self, q, r):
        if not 0 <= r <= q <= self.n_max:
            raise TableRangeError(f"cell ({q},{r}) outside 0 <= r <= q <= {self.n_max}")

    def row(self, q):
        self.check_cell(q, 0)
        return np.array([self.value(q, r) for r in range(q + 1)], dtype=np.int64)

    def column(self, r):
        self.check_cell(r, r)
        return np.array([self.value(q, r) for q in range(r, self.n_max + 1)], dtype=np.int64)

    def iter_rows(self):
        """Iterate (q, values, mex flags) over the rows, each cut at r = q."""
        for q in range(self.n_max + 1):
            flags = np.array([self.is_mex_cell(q, r) for r in range(q + 1)], dtype=bool)
            yield q, self.row(q), flags

    def cells(self):
        """Iterate (q, r, f, mex_cell) in q-major, r-ascending order."""
        for q in range(self.n_max + 1):
            for r in range(q + 1):
                yield q, r, self.value(q, r), self.is_mex_cell(q, r)


class DenseFTable(FTable):
    """
    FTable stored as a square numpy array.

    Args:
        values: int64 array of shape (n_max + 1, n_max + 1), lower triangle used
        mex: bool array of the same shape
    """

    def __init__(self, values, mex):
        if values.shape != mex.shape or values.ndim != 2 or values.shape[0] != values.shape[1]:
            raise ValueError("values and mex flags must be square arrays of the same shape")
        self.values = values
        self.mex = mex
        self.n_max = values.shape[0] - 1

    def value(self, q, r):
        self.check_cell(q, r)
        return int(self.values[q, r])

    def is_mex_cell(self, q, r):
        self.check_cell(q, r)
        return bool(self.mex[q, r])

    def row(self, q):
        self.check_cell(q, 0)
        return self.values[q, : q + 1].copy()

    def column(self, r):
        self.check_cell(r, r)
        return self.values[r:, r].copy()

    def column_runs(self, r):
        self.check_cell(r, r)
        starts = r + np.flatnonzero(self.mex[r:, r])
        return SparseColumn(
            r=r, runs=tuple((int(q), int(self.values[q, r])) for q in starts)
        )

    def to_dense(self):
        return self.values, self.mex

    def iter_rows(self):
        for q in range(self.n_max + 1):
            yield q, self.values[q, : q + 1], self.mex[q, : q + 1]

    def diagonal(self):
        return self.values.diagonal().copy()

    def row_starts(self):
        p = np.arange(self.n_max + 1)
        hits = (self.values == p[:, None]) & (p[None, :] < p[:, None])
        return np.where(hits.any(axis=1), hits.argmax(axis=1), -1)

    def with_cell(self, q, r, value):
        """Copy of the table with f(q, r) overwritten; the mex flags are kept."""
        self.check_cell(q, r)
        values = self.values.copy()
        values[q, r] = value
        return DenseFTable(values, self.mex.copy())


@dataclass(frozen=True)
class BlockedSets:
    """
    Values blocked when computing f(q, r).

    Args:
        R: values blocked by reducing the second row
        C: values blocked by reducing the third row
    """

    R: FrozenSet[int]
    C: FrozenSet[int]

    @property
    def B(self):
        return self.R | self.C


def blocked_values(table: FTable, q, r):
    """Concatenation of the diagonal prefix, column history and row prefix blocking (q, r)."""
    table.check_cell(q, r)
    if isinstance(table, DenseFTable):
        return _blocked_from_arrays(table.values, q, r)
    return np.array(
        [table.value(a, a) for a in range(r)]
        + [table.value(a, r) for a in range(r, q)]
        + [table.value(q, b) for b in range(r)],
        dtype=np.int64,
    )


def blocked_sets(q, r, table: FTable) -> BlockedSets:
    """R(q, r) = {f(a, a) : a < r} | {f(a, r) : r <= a < q} and C(q, r) = {f(q, b) : b < r}."""
    values = blocked_values(table, q, r)
    # the first q values come from second-row moves, the last r from third-row moves
    return BlockedSets(
        R=frozenset(int(v) for v in values[:q]), C=frozenset(int(v) for v in values[q:])
    )


def build_reference(n_max, memory_ceiling=DEFAULT_MEMORY_CEILING) -> DenseFTable:
    """Fill the dense table cell by cell, q ascending and r ascending within q.

    Every mex cell gets a freshly materialized B(q, r).

    Args:
        n_max: largest q to compute
        memory_ceiling: maximum size of the table in bytes

    Returns:
        The DenseFTable for 0 <= r <= q <= n_max
    """
    if n_max < 0:
        raise UsageError(f"n_max must be nonnegative (got {n_max})")
    size = n_max + 1
    check_memory(size * size * DENSE_BYTES_PER_CELL, memory_ceiling, f"dense table n={n_max}")

    values = np.zeros((size, size), dtype=np.int64)
    flags = np.zeros((size, size), dtype=bool)
    step = max(1, size // 10)
    for q in range(size):
        for r in range(q + 1):
            if r < q and values[q - 1, r] < q:
                values[q, r] = values[q - 1, r]
            else:
                values[q, r] = mex(_blocked_from_arrays(values, q, r))
                flags[q, r] = True
        if q % step == 0:
            logger.info("Reference engine: row %d / %d", q, n_max)
    return DenseFTable(values, flags)


def f_lookup(table: FTable, q, r):
    return table.value(q, r)


def is_p_position(table: FTable, pos: Position3) -> Outcome:
    """P exactly when f(pos.q, pos.r) = pos.p."""
    if pos.q > table.n_max:
        raise TableRangeError(f"{pos} needs the table up to q={pos.q} (have {table.n_max})")
    return Outcome.P if table.value(pos.q, pos.r) == pos.p else Outcome.N


def winning_moves(table: FTable, pos: Position3) -> List[Move]:
    """Moves of `pos` that lead to a P-position."""
    if pos.q > table.n_max:
        raise TableRangeError(f"{pos} needs the table up to q={pos.q} (have {table.n_max})")
    return [move for move in moves(pos) if is_p_position(table, move.result) is Outcome.P]


def diagonal_set(table: FTable) -> FrozenSet[int]:
    """D restricted to the computed range: {f(a, a) : a <= n_max}."""
    return frozenset(int(v) for v in table.diagonal())


def row_start_set(table: FTable) -> Dict[int, int]:
    """S restricted to p <= n_max, mapping each row-start p to its witness r with f(p, r) = p."""
    return {p: int(r) for p, r in enumerate(table.row_starts()) if r >= 0}


class OpeningKind(Enum):
    DIAGONAL = "diagonal"
    ROW_START = "rowstart"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class OpeningMove:
    """
    The winning opening move of the rectangle [n, n, n].

    Args:
        n: size of the rectangle
        kind: DIAGONAL when n = f(a, a), ROW_START when f(n, r) = n
        parameter: the a or the r of the witness
        target: the P-position reached
        move: the move reaching it
    """

    n: int
    kind: OpeningKind
    parameter: int
    target: Position3
    move: Move

    def __str__(self):
        return f"n={self.n} kind={self.kind} cut={self.move.label} target={self.target}"


def unique_opening_move(table: FTable, n) -> OpeningMove:
    """Find the winning opening move of [n, n, n].

    Exactly one of the following must hold: n = f(a, a) for a single a < n, or f(n, r) = n for a
    single r < n. Anything else raises TheoremViolation.
    """
    if not 1 <= n <= table.n_max:
        raise TableRangeError(f"n must lie in [1, {table.n_max}] (got {n})")
    diagonal = table.diagonal()[:n]
    row = table.row(n)[:n]
    diagonal_hits = [int(a) for a in np.flatnonzero(diagonal == n)]
    row_hits = [int(r) for r in np.flatnonzero(row == n)]
    if len(diagonal_hits) + len(row_hits) != 1:
        dump = {
            "n": n,
            "diagonal_witnesses": diagonal_hits,
            "row_witnesses": row_hits,
            "diagonal": [int(v) for v in diagonal],
            "row": [int(v) for v in row],
        }
        logger.error("Theorem violation at n=%d: %s", n, dump)
        raise TheoremViolation(
            f"[{n},{n},{n}] has {len(diagonal_hits) + len(row_hits)} winning openings", dump
        )

    rectangle = Position3.rectangle(n)
    if diagonal_hits:
        a = diagonal_hits[0]
        move = Move(2, a, rectangle.cut(2, a))
        return OpeningMove(n, OpeningKind.DIAGONAL, a, move.result, move)
    r = row_hits[0]
    move = Move(3, r, rectangle.cut(3, r))
    return OpeningMove(n, OpeningKind.ROW_START, r, move.result, move)


def opening_moves(table: FTable) -> List[OpeningMove]:
    """unique_opening_move for n = 1..n_max."""
    return [unique_opening_move(table, n) for n in range(1, table.n_max + 1)]
