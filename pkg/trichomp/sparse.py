"""
Sparse engine for f(q, r).

The constant line of the recurrence makes every column piecewise constant, with a new run
starting exactly at each mex cell. The table is swept row by row with Theta(n_max) working state
per row plus one bitset per column:

- the diagonal prefix {f(a, a) : a < r} and the row prefix C(q, r) only grow while r increases
  within a row, so they share one row bitset and a pointer to its first free value;
- the column history {f(a, r) : r <= a < q} gains one value per mex cell of column r and is kept
  as one bitset per column.

A mex is the first clear bit of the row bitset OR'ed with the column bitset, searched one 64-bit
word at a time. Since |B(q, r)| <= q + r, every mex of row q is at most 2q + 1, which sizes both
bitsets.
"""

from dataclasses import dataclass
import logging

from numba import jit
import numpy as np

from trichomp.config import DEFAULT_MEMORY_CEILING, UsageError, check_memory
from trichomp.recurrence import FTable, SparseColumn

logger = logging.getLogger(__name__)

_WORD_BITS = 64
# column, start row and value while collecting, int64 each
_RUN_BYTES = 24
# flags, run starts, source rows, their running maximum and the values built by to_dense
_DENSIFY_BYTES_PER_CELL = 33

_DEBRUIJN = 0x03F79D71B4CA8B09
_DEBRUIJN_INDEX = np.zeros(_WORD_BITS, dtype=np.int64)
for _bit in range(_WORD_BITS):
    _DEBRUIJN_INDEX[((_DEBRUIJN << _bit) & 0xFFFFFFFFFFFFFFFF) >> 58] = _bit


@jit(nopython=True, cache=True)
def _set_bit(bits, value):
    bits[value >> 6] |= np.int64(1) << (value & 63)


@jit(nopython=True, cache=True)
def _lowest_clear_bit(word):
    """Index of the lowest clear bit of a word that is not all ones."""
    clear = ~word
    lsb = clear & -clear
    return _DEBRUIJN_INDEX[((lsb * _DEBRUIJN) >> 58) & 63]


@jit(nopython=True, cache=True)
def _sweep_row(q, prev, cur, diagonal, column_values, row_bits, run_cols, run_values):
    """
    Fill row q of the table into `cur`, given row q - 1 in `prev`.

    Returns the number of mex cells; their columns and values are written to run_cols and
    run_values in column order.
    """
    words = (2 * q + 2) // _WORD_BITS + 1
    row_bits[:words] = 0
    # 0 is never a mex
    row_bits[0] = 1
    low = 1
    n_runs = 0
    for r in range(q + 1):
        if r > 0:
            _set_bit(row_bits, diagonal[r - 1])
        if r < q and prev[r] < q:
            value = prev[r]
        else:
            # all values below low are in row_bits
            while (row_bits[low >> 6] >> (low & 63)) & 1:
                low += 1
            w = low >> 6
            word = row_bits[w] | column_values[r, w]
            while word == -1:
                w += 1
                word = row_bits[w] | column_values[r, w]
            value = (w << 6) + _lowest_clear_bit(word)
            _set_bit(column_values[r], value)
            run_cols[n_runs] = r
            run_values[n_runs] = value
            n_runs += 1
        cur[r] = value
        _set_bit(row_bits, value)
    return n_runs


class RowSweep:
    """
    Row-by-row evaluation of the recurrence up to n_max.

    Iterating over `rows()` yields (q, row, run_cols, run_values) after each row; the arrays are
    reused buffers and only valid until the next step.

    Args:
        n_max: largest q to compute
        memory_ceiling: maximum size of the working state in bytes
    """

    def __init__(self, n_max, memory_ceiling=DEFAULT_MEMORY_CEILING):
        if n_max < 0:
            raise UsageError(f"n_max must be nonnegative (got {n_max})")
        self.n_max = n_max
        size = n_max + 1
        words = (2 * n_max + 3) // _WORD_BITS + 1
        check_memory(8 * ((size + 1) * words + 5 * size), memory_ceiling, f"sparse sweep n={n_max}")
        self.column_values = np.zeros((size, words), dtype=np.int64)
        self.row_bits = np.zeros(words, dtype=np.int64)
        self.diagonal = np.zeros(size, dtype=np.int64)
        self.run_cols = np.zeros(size, dtype=np.int64)
        self.run_values = np.zeros(size, dtype=np.int64)
        self._prev = np.zeros(size, dtype=np.int64)
        self._cur = np.zeros(size, dtype=np.int64)

    def rows(self):
        step = max(1, (self.n_max + 1) // 10)
        for q in range(self.n_max + 1):
            n_runs = _sweep_row(
                q,
                self._prev,
                self._cur,
                self.diagonal,
                self.column_values,
                self.row_bits,
                self.run_cols,
                self.run_values,
            )
            self.diagonal[q] = self._cur[q]
            yield q, self._cur[: q + 1], self.run_cols[:n_runs], self.run_values[:n_runs]
            if q % step == 0:
                logger.info("Sparse engine: row %d / %d", q, self.n_max)
            self._prev, self._cur = self._cur, self._prev


class SparseFTable(FTable):
    """
    FTable stored as runs per column in CSR layout.

    Args:
        n_max: largest q computed
        offsets: runs of column r are run_q[offsets[r]:offsets[r + 1]]
        run_q: first row of each run
        run_value: value of each run
        diagonal_values: f(a, a) for a = 0..n_max
        row_start_witnesses: for each p, the smallest r < p with f(p, r) = p, or -1
        memory_ceiling: maximum size of a dense copy made by `to_dense`, in bytes
    """

    def __init__(
        self,
        n_max,
        offsets,
        run_q,
        run_value,
        diagonal_values,
        row_start_witnesses,
        memory_ceiling=DEFAULT_MEMORY_CEILING,
    ):
        self.n_max = n_max
        self.offsets = offsets
        self.run_q = run_q
        self.run_value = run_value
        self.diagonal_values = diagonal_values
        self.row_start_witnesses = row_start_witnesses
        self.memory_ceiling = memory_ceiling

    @classmethod
    def from_dense(cls, values, flags, memory_ceiling=DEFAULT_MEMORY_CEILING):
        """Run-length encode dense value and mex-flag arrays."""
        n_max = values.shape[0] - 1
        # transposed so that nonzero walks column by column, rows ascending
        cols, rows = np.nonzero(np.tril(flags).T)
        offsets = np.zeros(n_max + 2, dtype=np.int64)
        offsets[1:] = np.cumsum(np.bincount(cols, minlength=n_max + 1))
        p = np.arange(n_max + 1)
        hits = (values == p[:, None]) & (p[None, :] < p[:, None])
        return cls(
            n_max=n_max,
            offsets=offsets,
            run_q=rows.astype(np.int64),
            run_value=values[rows, cols].astype(np.int64),
            diagonal_values=values.diagonal().astype(np.int64),
            row_start_witnesses=np.where(hits.any(axis=1), hits.argmax(axis=1), -1),
            memory_ceiling=memory_ceiling,
        )

    @property
    def run_count(self):
        return len(self.run_q)

    def runs_per_column(self):
        """Number of mex cells in each column."""
        return np.diff(self.offsets)

    def _locate(self, q, r):
        self.check_cell(q, r)
        lo, hi = self.offsets[r], self.offsets[r + 1]
        return lo + int(np.searchsorted(self.run_q[lo:hi], q, side="right")) - 1

    def value(self, q, r):
        return int(self.run_value[self._locate(q, r)])

    def is_mex_cell(self, q, r):
        return bool(self.run_q[self._locate(q, r)] == q)

    def column_runs(self, r):
        self.check_cell(r, r)
        lo, hi = self.offsets[r], self.offsets[r + 1]
        runs = zip(self.run_q[lo:hi].tolist(), self.run_value[lo:hi].tolist())
        return SparseColumn(r=r, runs=tuple(runs))

    def to_dense(self):
        size = self.n_max + 1
        check_memory(
            size * size * _DENSIFY_BYTES_PER_CELL,
            self.memory_ceiling,
            f"dense copy of the sparse table n={self.n_max}",
        )
        cols = np.repeat(np.arange(size), np.diff(self.offsets))
        flags = np.zeros((size, size), dtype=bool)
        flags[self.run_q, cols] = True
        starts = np.zeros((size, size), dtype=np.int64)
        starts[self.run_q, cols] = self.run_value
        # carry each run start down its column
        source = np.maximum.accumulate(np.where(flags, np.arange(size)[:, None], 0), axis=0)
        values = starts[source, np.arange(size)[None, :]]
        return values, flags

    def iter_rows(self):
        # index of the run covering row q, per column
        current = self.offsets[:-1].copy()
        last = len(self.run_q) - 1
        for q in range(self.n_max + 1):
            following = np.minimum(current[:q] + 1, last)
            current[:q] += (following < self.offsets[1 : q + 1]) & (self.run_q[following] == q)
            covering = current[: q + 1]
            yield q, self.run_value[covering], self.run_q[covering] == q

    def diagonal(self):
        return self.diagonal_values.copy()

    def row_starts(self):
        return self.row_start_witnesses.copy()


def build_sparse(n_max, memory_ceiling=DEFAULT_MEMORY_CEILING) -> SparseFTable:
    """Compute the table up to n_max and keep only the run starts of every column.

    Args:
        n_max: largest q to compute
        memory_ceiling: maximum number of bytes for working state plus runs

    Returns:
        A SparseFTable with the same values and mex flags as `build_reference(n_max)`
    """
    sweep = RowSweep(n_max, memory_ceiling)
    cols, starts, values = [], [], []
    row_starts = np.full(n_max + 1, -1, dtype=np.int64)
    total = 0
    for q, row, run_cols, run_values in sweep.rows():
        cols.append(run_cols.copy())
        values.append(run_values.copy())
        starts.append(np.full(len(run_cols), q, dtype=np.int64))
        hits = np.flatnonzero(row[:q] == q)
        if hits.size:
            row_starts[q] = hits[0]
        total += len(run_cols)
        check_memory(total * _RUN_BYTES, memory_ceiling, f"runs of the sparse table n={n_max}")

    cols = np.concatenate(cols)
    # rows were appended in increasing q, a stable sort keeps them ordered inside each column
    order = np.argsort(cols, kind="stable")
    offsets = np.zeros(n_max + 2, dtype=np.int64)
    offsets[1:] = np.cumsum(np.bincount(cols, minlength=n_max + 1))
    table = SparseFTable(
        n_max=n_max,
        offsets=offsets,
        run_q=np.concatenate(starts)[order],
        run_value=np.concatenate(values)[order],
        diagonal_values=sweep.diagonal.copy(),
        row_start_witnesses=row_starts,
        memory_ceiling=memory_ceiling,
    )
    logger.info("Sparse table n=%d: %d runs", n_max, table.run_count)
    return table


@dataclass(frozen=True, eq=False)
class PartitionSummary:
    """
    What a streaming sweep keeps about the rectangles [n, n, n], n <= n_max.

    Args:
        n_max: largest q computed
        diagonal: f(a, a) for a = 0..n_max
        row_starts: smallest r < p with f(p, r) = p, or -1
        row_start_counts: number of r < p with f(p, r) = p
        max_value: largest value met anywhere in the table
    """

    n_max: int
    diagonal: np.ndarray
    row_starts: np.ndarray
    row_start_counts: np.ndarray
    max_value: int


def scan_partition(n_max, memory_ceiling=DEFAULT_MEMORY_CEILING) -> PartitionSummary:
    """Sweep the table up to n_max without storing it, recording diagonal values and row-starts."""
    sweep = RowSweep(n_max, memory_ceiling)
    row_starts = np.full(n_max + 1, -1, dtype=np.int64)
    counts = np.zeros(n_max + 1, dtype=np.int64)
    max_value = 0
    for q, row, _, _ in sweep.rows():
        hits = np.flatnonzero(row[:q] == q)
        counts[q] = hits.size
        if hits.size:
            row_starts[q] = hits[0]
        max_value = max(max_value, int(row.max()))
    return PartitionSummary(
        n_max=n_max,
        diagonal=sweep.diagonal.copy(),
        row_starts=row_starts,
        row_start_counts=counts,
        max_value=max_value,
    )
