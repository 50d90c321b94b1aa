"""
Reading and writing tables.

Text formats (all cells in q-major, r-ascending order):

- csv: header "q,r,f" followed by one line per cell;
- jsonl: one object {"q":..,"r":..,"f":..,"mex_cell":..} per cell;
- runs: one line "r;q_start:value,..." per column.

hdf5 stores the run arrays of a SparseFTable with n_max as an attribute.
"""

import csv
import json
import logging
import sys

import h5py
import numpy as np

from trichomp.config import FORMATS, UsageError
from trichomp.recurrence import DenseFTable, FTable, SparseColumn
from trichomp.sparse import SparseFTable

logger = logging.getLogger(__name__)

_HDF5_ARRAYS = ("offsets", "run_q", "run_value", "diagonal_values", "row_start_witnesses")


def derive_mex_flags(values):
    """Mex flags implied by the values: the constant line needs r < q and f(q - 1, r) < q."""
    size = values.shape[0]
    q = np.arange(size)[:, None]
    r = np.arange(size)[None, :]
    above = np.zeros_like(values)
    above[1:] = values[:-1]
    constant = (r < q) & (above < q)
    return (r <= q) & ~constant


def write_csv(table: FTable, file):
    writer = csv.writer(file, lineterminator="\n")
    writer.writerow(["q", "r", "f"])
    for q, values, _ in table.iter_rows():
        writer.writerows([q, r, f] for r, f in enumerate(values.tolist()))


def write_jsonl(table: FTable, file):
    for q, values, flags in table.iter_rows():
        for r, (f, mex_cell) in enumerate(zip(values.tolist(), flags.tolist())):
            cell = {"q": q, "r": r, "f": f, "mex_cell": mex_cell}
            file.write(json.dumps(cell, separators=(",", ":")) + "\n")


def write_runs(table: FTable, file):
    for r in range(table.n_max + 1):
        file.write(table.column_runs(r).dump() + "\n")


def _dense_from_cells(cells, with_flags):
    """Build a DenseFTable from (q, r, f, mex_cell) tuples covering the whole triangle."""
    cells = list(cells)
    n_max = max(q for q, _, _, _ in cells)
    size = n_max + 1
    expected = size * (size + 1) // 2
    if len(cells) != expected:
        raise UsageError(f"expected {expected} cells for n_max={n_max}, got {len(cells)}")
    values = np.zeros((size, size), dtype=np.int64)
    flags = np.zeros((size, size), dtype=bool)
    for q, r, f, mex_cell in cells:
        if not 0 <= r <= q:
            raise UsageError(f"cell ({q},{r}) outside the triangle")
        values[q, r] = f
        flags[q, r] = mex_cell
    return DenseFTable(values, flags if with_flags else derive_mex_flags(values))


def read_csv(file) -> DenseFTable:
    """Read a table written by `write_csv`; mex flags are derived from the values."""
    reader = csv.reader(file)
    if next(reader, None) != ["q", "r", "f"]:
        raise UsageError("missing 'q,r,f' header")
    return _dense_from_cells(((int(q), int(r), int(f), False) for q, r, f in reader), False)


def read_jsonl(file) -> DenseFTable:
    cells = (json.loads(line) for line in file if line.strip())
    return _dense_from_cells(
        ((c["q"], c["r"], c["f"], c["mex_cell"]) for c in cells), with_flags=True
    )


def parse_column(line) -> SparseColumn:
    """Inverse of SparseColumn.dump."""
    head, _, body = line.strip().partition(";")
    runs = tuple(tuple(int(x) for x in run.split(":")) for run in body.split(",") if run)
    return SparseColumn(r=int(head), runs=runs)


def read_runs(file) -> DenseFTable:
    columns = [parse_column(line) for line in file if line.strip()]
    size = len(columns)
    values = np.zeros((size, size), dtype=np.int64)
    flags = np.zeros((size, size), dtype=bool)
    for column in columns:
        bounds = [start for start, _ in column.runs[1:]] + [size]
        for (start, value), stop in zip(column.runs, bounds):
            values[start:stop, column.r] = value
            flags[start, column.r] = True
    return DenseFTable(values, flags)


def write_hdf5(table: FTable, hdf5_path):
    if not isinstance(table, SparseFTable):
        table = SparseFTable.from_dense(*table.to_dense())
    with h5py.File(hdf5_path, "w") as hdf5_file:
        hdf5_file.attrs["n_max"] = table.n_max
        for name in _HDF5_ARRAYS:
            hdf5_file.create_dataset(name, data=getattr(table, name), track_times=False)
    logger.info("Wrote %d runs to %s", table.run_count, hdf5_path)


def read_hdf5(hdf5_path) -> SparseFTable:
    with h5py.File(hdf5_path, "r") as hdf5_file:
        arrays = {name: hdf5_file[name][()] for name in _HDF5_ARRAYS}
        n_max = int(hdf5_file.attrs["n_max"])
    return SparseFTable(n_max=n_max, **arrays)


_WRITERS = {"csv": write_csv, "jsonl": write_jsonl, "runs": write_runs}


def write_table(table: FTable, format="csv", out_path=None):
    """Write `table` in `format` to `out_path`, or to standard output when it is None."""
    if format not in FORMATS:
        raise UsageError(f"unknown format {format!r}, expected one of {FORMATS}")
    if format == "hdf5":
        if out_path is None:
            raise UsageError("the hdf5 format needs an output path")
        write_hdf5(table, out_path)
        return
    if out_path is None:
        _WRITERS[format](table, sys.stdout)
        return
    with open(out_path, "w", newline="") as file:
        _WRITERS[format](table, file)
    logger.info("Wrote %s table n=%d to %s", format, table.n_max, out_path)
