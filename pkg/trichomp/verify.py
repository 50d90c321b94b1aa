"""
Machine checks of the structural facts about f(q, r).

Every check is a universally quantified statement scanned over a finite range of the table. A
failing check reports the first counterexample in scan order, with enough cells attached to
re-check it by hand. All checks recompute what they need from the stored values and never rely on
engine internals.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
import json
import logging
import math
import time
from typing import Any, Callable, Dict, List, Optional

import numpy as np
import yaml

from trichomp.config import DEFAULT_MEMORY_CEILING, UsageError, check_memory
from trichomp.game import Position3
from trichomp.oracle import OutcomeTable, solve, winning_moves_bruteforce
from trichomp.recurrence import (
    DENSE_BYTES_PER_CELL,
    DenseFTable,
    FTable,
    TableRangeError,
    TheoremViolation,
    _blocked_from_arrays,
    build_reference,
    mex,
    unique_opening_move,
    winning_moves,
)
from trichomp.sparse import PartitionSummary, build_sparse

logger = logging.getLogger(__name__)


@dataclass
class VerificationReport:
    """
    Outcome of one check.

    Args:
        check_name: short identifier of the check
        bounds: the scanned parameter ranges
        passed: whether no counterexample was found
        counterexample: the first violation in scan order, None if passed
        cells_scanned: number of cells, triples or positions examined
        elapsed: wall time in seconds
    """

    check_name: str
    bounds: Dict[str, int]
    passed: bool
    counterexample: Optional[Dict[str, Any]]
    cells_scanned: int
    elapsed: float

    def to_dict(self):
        return {
            "name": self.check_name,
            "bounds": self.bounds,
            "passed": self.passed,
            "counterexample": self.counterexample,
            "cells_scanned": self.cells_scanned,
            "elapsed_ms": round(self.elapsed * 1000, 3),
        }

    def to_json(self):
        return json.dumps(self.to_dict())


def _report(name, bounds, counterexample, cells, started):
    report = VerificationReport(
        check_name=name,
        bounds=bounds,
        passed=counterexample is None,
        counterexample=counterexample,
        cells_scanned=int(cells),
        elapsed=time.perf_counter() - started,
    )
    if report.passed:
        logger.info("%s passed (%d scanned)", name, report.cells_scanned)
    else:
        logger.warning("%s FAILED: %s", name, counterexample)
    return report


def _ints(values):
    return [int(v) for v in values]


def _num_cells(n_max):
    return (n_max + 1) * (n_max + 2) // 2


def _row_positions(values, last_row):
    """position[t, v] = b where f(t, b) = v for t <= last_row; last_row + 1 where v is absent."""
    rows, cols = np.tril_indices(last_row + 1)
    width = int(values[: last_row + 1].max()) + 1
    position = np.full((last_row + 1, width), last_row + 1, dtype=np.int64)
    # reversed so that the smallest b wins if a row repeats a value
    position[rows[::-1], values[rows, cols][::-1]] = cols[::-1]
    return position


def check_recurrence(table: FTable) -> VerificationReport:
    """Every cell equals what the recurrence gives from the stored neighbours."""
    started = time.perf_counter()
    values, flags = table.to_dense()
    for q in range(table.n_max + 1):
        for r in range(q + 1):
            if r < q and values[q - 1, r] < q:
                expected, mex_cell = int(values[q - 1, r]), False
            else:
                expected, mex_cell = mex(_blocked_from_arrays(values, q, r)), True
            if values[q, r] != expected or bool(flags[q, r]) != mex_cell:
                counterexample = {
                    "q": q,
                    "r": r,
                    "f": int(values[q, r]),
                    "mex_cell": bool(flags[q, r]),
                    "expected_f": expected,
                    "expected_mex_cell": mex_cell,
                }
                cells = _num_cells(q - 1) + r + 1
                return _report("recurrence", {"n_max": table.n_max}, counterexample, cells, started)
    return _report("recurrence", {"n_max": table.n_max}, None, _num_cells(table.n_max), started)


def check_nonattacking(table: FTable) -> VerificationReport:
    """
    (a) f(q, 0..q) are distinct for every q;
    (b) for s < t1 < t2 < p, f(t1, s) = p and f(t2, s) = p never both hold;
    (c) if f(p, r) = p then p is not in R(q, r) for any q < p.
    """
    started = time.perf_counter()
    values, _ = table.to_dense()
    n_max = table.n_max
    bounds = {"n_max": n_max}
    cells = _num_cells(n_max)

    for q in range(n_max + 1):
        row = values[q, : q + 1]
        uniq, counts = np.unique(row, return_counts=True)
        if (counts > 1).any():
            counterexample = {
                "part": "a",
                "q": q,
                "duplicates": _ints(uniq[counts > 1]),
                "row": _ints(row),
            }
            return _report("nonattacking", bounds, counterexample, cells, started)

    for s in range(n_max + 1):
        seen = {}
        for t in range(s + 1, n_max + 1):
            p = int(values[t, s])
            if p <= t:
                continue
            if p in seen:
                counterexample = {"part": "b", "s": s, "t1": seen[p], "t2": t, "p": p}
                return _report("nonattacking", bounds, counterexample, cells, started)
            seen[p] = t

    diagonal = values.diagonal()
    starts_p, starts_r = np.nonzero(
        (values == np.arange(n_max + 1)[:, None]) & np.tri(n_max + 1, k=-1, dtype=bool)
    )
    for p, r in zip(starts_p.tolist(), starts_r.tolist()):
        # R(q, r) grows with q, so q = p - 1 covers every q < p
        blocked = np.concatenate((diagonal[:r], values[r : p - 1, r]))
        if (blocked == p).any():
            counterexample = {"part": "c", "p": p, "r": r, "R": sorted(set(_ints(blocked)))}
            return _report("nonattacking", bounds, counterexample, cells, started)

    return _report("nonattacking", bounds, None, cells, started)


def check_mex_cells(table: FTable) -> VerificationReport:
    """Whenever f(q, r) > q, (q, r) is a mex cell and {1, ..., q} is contained in B(q, r)."""
    started = time.perf_counter()
    values, flags = table.to_dense()
    bounds = {"n_max": table.n_max}
    qs, rs = np.nonzero(values > np.arange(table.n_max + 1)[:, None])
    for q, r in zip(qs.tolist(), rs.tolist()):
        blocked = _blocked_from_arrays(values, q, r)
        covered = np.zeros(q + 1, dtype=bool)
        covered[blocked[blocked <= q]] = True
        missing = np.flatnonzero(~covered[1:]) + 1
        if not flags[q, r] or missing.size:
            counterexample = {
                "q": q,
                "r": r,
                "f": int(values[q, r]),
                "mex_cell": bool(flags[q, r]),
                "missing": _ints(missing),
            }
            return _report("mex_cells", bounds, counterexample, len(qs), started)
    return _report("mex_cells", bounds, None, len(qs), started)


def _hypothesis_triples(values, scan_bound):
    """
    Yield the triples r < q < p <= scan_bound with p not in C(q, r) and p in C(t, r) for every
    q < t < p, p ascending then r ascending.

    For fixed (p, r) only the largest q in (r, p) with p not in C(q, r) can qualify.
    """
    position = _row_positions(values, scan_bound)
    for p in range(2, scan_bound + 1):
        if p >= position.shape[1]:
            # p occurs in no row up to scan_bound
            where = np.full(p, scan_bound + 1)
        else:
            where = position[:p, p]
        for r in range(p - 1):
            free = np.flatnonzero(where[r + 1 : p] >= r)
            if free.size:
                yield r, r + 1 + int(free[-1]), p


def _check_scan_bound(table, scan_bound):
    if not 0 <= scan_bound <= table.n_max:
        raise TableRangeError(f"scan bound {scan_bound} outside [0, {table.n_max}]")


def check_interval_blocking(table: FTable, scan_bound) -> VerificationReport:
    """If p is not in C(q, r) but in C(t, r) for all q < t < p, then q+1..p-1 all lie in C(q, r)."""
    started = time.perf_counter()
    _check_scan_bound(table, scan_bound)
    values, _ = table.to_dense()
    bounds = {"scan_bound": scan_bound}
    cells = math.comb(scan_bound + 1, 3)
    for r, q, p in _hypothesis_triples(values, scan_bound):
        blocked = values[q, :r]
        missing = np.setdiff1d(np.arange(q + 1, p), blocked)
        if missing.size:
            counterexample = {
                "r": r,
                "q": q,
                "p": p,
                "missing": _ints(missing),
                "C": sorted(_ints(blocked)),
            }
            return _report("interval_blocking", bounds, counterexample, cells, started)
    return _report("interval_blocking", bounds, None, cells, started)


def check_rightmost_hole(table: FTable, scan_bound) -> VerificationReport:
    """Under the interval-blocking hypotheses, f(q, r) > q implies f(q, r) >= p."""
    started = time.perf_counter()
    _check_scan_bound(table, scan_bound)
    values, _ = table.to_dense()
    bounds = {"scan_bound": scan_bound}
    cells = math.comb(scan_bound + 1, 3)
    for r, q, p in _hypothesis_triples(values, scan_bound):
        f = int(values[q, r])
        if q < f < p:
            counterexample = {"r": r, "q": q, "p": p, "f": f}
            return _report("rightmost_hole", bounds, counterexample, cells, started)
    return _report("rightmost_hole", bounds, None, cells, started)


def check_diagonal_max(table: FTable) -> VerificationReport:
    """f(q, q) is the largest value of row q and exceeds q."""
    started = time.perf_counter()
    values, _ = table.to_dense()
    bounds = {"n_max": table.n_max}
    diagonal = values.diagonal()
    # above the diagonal the array holds zeros
    row_max = values.max(axis=1)
    bad = np.flatnonzero((diagonal != row_max) | (diagonal <= np.arange(table.n_max + 1)))
    counterexample = None
    if bad.size:
        q = int(bad[0])
        counterexample = {
            "q": q,
            "diagonal": int(diagonal[q]),
            "row_max": int(row_max[q]),
            "row": _ints(values[q, : q + 1]),
        }
    return _report("diagonal_max", bounds, counterexample, _num_cells(table.n_max), started)


def check_rowstart_propagation(table: FTable) -> VerificationReport:
    """If f(p, r) = p then p lies in C(q, r) = {f(q, b) : b < r} for every r < q < p."""
    started = time.perf_counter()
    values, _ = table.to_dense()
    n_max = table.n_max
    bounds = {"n_max": n_max}
    position = _row_positions(values, n_max)
    starts_p, starts_r = np.nonzero(
        (values == np.arange(n_max + 1)[:, None]) & np.tri(n_max + 1, k=-1, dtype=bool)
    )
    cells = 0
    for p, r in zip(starts_p.tolist(), starts_r.tolist()):
        qs = np.arange(r + 1, p)
        cells += qs.size
        outside = qs[position[qs, p] >= r]
        if outside.size:
            q = int(outside[0])
            counterexample = {"p": p, "r": r, "q": q, "C": sorted(_ints(values[q, :r]))}
            return _report("rowstart_propagation", bounds, counterexample, cells, started)
    return _report("rowstart_propagation", bounds, None, cells, started)


def _partition_counts(diagonal, row_start_counts, n_max):
    """Diagonal and row-start witnesses of every n <= n_max."""
    a = np.arange(len(diagonal))
    # a diagonal witness of n has a < n since f(a, a) > a
    witnesses = diagonal[(diagonal > a) & (diagonal <= n_max)]
    diagonal_counts = np.bincount(witnesses, minlength=n_max + 1)
    return diagonal_counts, row_start_counts


def _partition_report(name, diagonal, diagonal_counts, row_start_counts, n_max, started, row):
    total = diagonal_counts + row_start_counts
    bad = np.flatnonzero(total[1:] != 1) + 1
    counterexample = None
    if bad.size:
        n = int(bad[0])
        counterexample = {
            "n": n,
            "diagonal_witnesses": _ints(np.flatnonzero(diagonal[:n] == n)),
            "row_witnesses": row(n),
        }
    return _report(name, {"n_max": n_max}, counterexample, n_max, started)


def check_partition(table: FTable) -> VerificationReport:
    """Every 1 <= n <= n_max is either a diagonal value f(a, a) or a row-start f(n, r) = n."""
    started = time.perf_counter()
    values, _ = table.to_dense()
    n_max = table.n_max
    starts = (values == np.arange(n_max + 1)[:, None]) & np.tri(n_max + 1, k=-1, dtype=bool)
    diagonal = values.diagonal()
    diagonal_counts, row_start_counts = _partition_counts(diagonal, starts.sum(axis=1), n_max)
    return _partition_report(
        "partition",
        diagonal,
        diagonal_counts,
        row_start_counts,
        n_max,
        started,
        lambda n: _ints(np.flatnonzero(starts[n])),
    )


def check_partition_scan(summary: PartitionSummary) -> VerificationReport:
    """The partition check on a streaming sweep that kept only diagonal values and row-starts."""
    started = time.perf_counter()
    diagonal_counts, row_start_counts = _partition_counts(
        summary.diagonal, summary.row_start_counts, summary.n_max
    )
    first = summary.row_starts
    return _partition_report(
        "partition_scan",
        summary.diagonal,
        diagonal_counts,
        row_start_counts,
        summary.n_max,
        started,
        lambda n: [int(first[n])] if first[n] >= 0 else [],
    )


def check_opening_moves(table: FTable) -> VerificationReport:
    """The rectangle [n, n, n] has exactly one winning opening move for every n <= n_max."""
    started = time.perf_counter()
    bounds = {"n_max": table.n_max}
    for n in range(1, table.n_max + 1):
        try:
            unique_opening_move(table, n)
        except TheoremViolation as err:
            return _report("opening_moves", bounds, err.dump, n, started)
    return _report("opening_moves", bounds, None, table.n_max, started)


def _oracle_positions(bound):
    """Arrays p, q, r of every position with p <= bound, in oracle index order."""
    ps, qs, rs = [], [], []
    for p in range(1, bound + 1):
        q, r = np.tril_indices(p + 1)
        ps.append(np.full(q.size, p))
        qs.append(q)
        rs.append(r)
    return np.concatenate(ps), np.concatenate(qs), np.concatenate(rs)


def check_against_oracle(
    table: FTable, oracle_bound, oracle: Optional[OutcomeTable] = None
) -> VerificationReport:
    """Table classification equals brute force on every position with p <= oracle_bound, and the
    winning opening moves of every [n, n, n] agree and are unique."""
    started = time.perf_counter()
    if not 1 <= oracle_bound <= table.n_max:
        raise TableRangeError(f"oracle bound {oracle_bound} outside [1, {table.n_max}]")
    if oracle is None or oracle.bound != oracle_bound:
        oracle = solve(oracle_bound)
    values, _ = table.to_dense()
    bounds = {"oracle_bound": oracle_bound}
    ps, qs, rs = _oracle_positions(oracle_bound)
    cells = ps.size + oracle_bound

    predicted = values[qs, rs] == ps
    bad = np.flatnonzero(predicted != oracle.is_p)
    if bad.size:
        i = int(bad[0])
        counterexample = {
            "position": f"{ps[i]},{qs[i]},{rs[i]}",
            "table": "P" if predicted[i] else "N",
            "oracle": "P" if oracle.is_p[i] else "N",
        }
        return _report("oracle", bounds, counterexample, cells, started)

    for n in range(1, oracle_bound + 1):
        rectangle = Position3.rectangle(n)
        mine = [move.label for move in winning_moves(table, rectangle)]
        theirs = [move.label for move in winning_moves_bruteforce(rectangle, oracle)]
        if mine != theirs or len(mine) != 1:
            counterexample = {"position": str(rectangle), "table": mine, "oracle": theirs}
            return _report("oracle", bounds, counterexample, cells, started)
    return _report("oracle", bounds, None, cells, started)


def check_engines_agree(n_max, memory_ceiling=DEFAULT_MEMORY_CEILING) -> VerificationReport:
    """The reference and the sparse engine produce the same values and mex flags."""
    started = time.perf_counter()
    reference, reference_flags = build_reference(n_max, memory_ceiling).to_dense()
    sparse, sparse_flags = build_sparse(n_max, memory_ceiling).to_dense()
    lower = np.tri(n_max + 1, dtype=bool)
    differ = np.argwhere(((reference != sparse) | (reference_flags != sparse_flags)) & lower)
    counterexample = None
    if len(differ):
        q, r = (int(i) for i in differ[0])
        counterexample = {
            "q": q,
            "r": r,
            "reference": [int(reference[q, r]), bool(reference_flags[q, r])],
            "sparse": [int(sparse[q, r]), bool(sparse_flags[q, r])],
        }
    return _report("engines_agree", {"n_max": n_max}, counterexample, _num_cells(n_max), started)


def load_faults(faults_path) -> List[Dict[str, int]]:
    """Read a YAML list of cell overrides, each entry with keys q, r and f."""
    with open(faults_path, "r") as file:
        faults = yaml.safe_load(file) or []

    cells = []
    for fault in faults:
        try:
            cells.append({"q": int(fault["q"]), "r": int(fault["r"]), "f": int(fault["f"])})
        except (KeyError, TypeError, ValueError) as err:
            raise UsageError(f"malformed fault entry {fault!r} in {faults_path}") from err
    return cells


def inject_faults(table: FTable, faults) -> DenseFTable:
    """Dense copy of `table` with the listed cells overwritten."""
    faulty = DenseFTable(*(array.copy() for array in table.to_dense()))
    for fault in faults:
        faulty = faulty.with_cell(fault["q"], fault["r"], fault["f"])
        logger.info("Injected fault f(%d,%d)=%d", fault["q"], fault["r"], fault["f"])
    return faulty


def build_table(n_max, engine="sparse", memory_ceiling=DEFAULT_MEMORY_CEILING) -> FTable:
    if engine == "reference":
        return build_reference(n_max, memory_ceiling)
    if engine == "sparse":
        return build_sparse(n_max, memory_ceiling)
    raise UsageError(f"unknown engine {engine!r}")


def run_suite(
    n_max,
    oracle_bound=None,
    cubic_bound=None,
    engine="sparse",
    table: Optional[FTable] = None,
    workers=1,
    memory_ceiling=DEFAULT_MEMORY_CEILING,
    on_report: Optional[Callable[[VerificationReport], None]] = None,
) -> List[VerificationReport]:
    """Run every check and return the reports in a fixed order.

    Args:
        n_max: size of the table to build (ignored when `table` is given)
        oracle_bound: bound of the brute-force comparison, None to skip it
        cubic_bound: scan bound of the cubic-cost checks, None to skip them
        engine: engine used to build the table
        table: check this table instead of building one
        workers: number of threads running checks side by side
        memory_ceiling: maximum size of any table in bytes
        on_report: called with every report, in order, as soon as it is available

    Returns:
        List of VerificationReport; the suite passes iff all of them passed
    """
    if table is None:
        table = build_table(n_max, engine, memory_ceiling)
    # the checks all scan dense arrays, convert once
    if not isinstance(table, DenseFTable):
        size = table.n_max + 1
        check_memory(
            size * size * DENSE_BYTES_PER_CELL, memory_ceiling, f"dense checks n={table.n_max}"
        )
    dense = DenseFTable(*table.to_dense())
    for name, bound in (("oracle_bound", oracle_bound), ("cubic_bound", cubic_bound)):
        if bound is not None and not 1 <= bound <= dense.n_max:
            raise TableRangeError(f"{name}={bound} outside [1, {dense.n_max}]")

    checks = [
        lambda: check_recurrence(dense),
        lambda: check_nonattacking(dense),
        lambda: check_mex_cells(dense),
    ]
    if cubic_bound is not None:
        checks += [
            lambda: check_interval_blocking(dense, cubic_bound),
            lambda: check_rightmost_hole(dense, cubic_bound),
        ]
    checks += [
        lambda: check_diagonal_max(dense),
        lambda: check_rowstart_propagation(dense),
        lambda: check_partition(dense),
        lambda: check_opening_moves(dense),
    ]
    if oracle_bound is not None:
        checks.append(lambda: check_against_oracle(dense, oracle_bound))

    reports = []
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        futures = [pool.submit(check) for check in checks]
        for future in futures:
            reports.append(future.result())
            if on_report is not None:
                on_report(reports[-1])
    return reports
