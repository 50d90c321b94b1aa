import io
import json
import os

import numpy as np
import pytest

from trichomp.config import UsageError
from trichomp.io import (
    derive_mex_flags,
    parse_column,
    read_csv,
    read_hdf5,
    read_jsonl,
    read_runs,
    write_csv,
    write_hdf5,
    write_jsonl,
    write_runs,
    write_table,
)
from trichomp.recurrence import build_reference
from trichomp.sparse import build_sparse

N_MAX = 25
CSV_N2 = "q,r,f\n0,0,1\n1,0,2\n1,1,3\n2,0,3\n2,1,2\n2,2,4\n"


@pytest.fixture(scope="module")
def table():
    return build_reference(N_MAX)


@pytest.fixture
def hdf5_path():
    path = "test_table.h5"
    yield path
    if os.path.exists(path):
        os.remove(path)


def _write(writer, table):
    buffer = io.StringIO()
    writer(table, buffer)
    return buffer.getvalue()


def _assert_same(table, other):
    values, flags = table.to_dense()
    other_values, other_flags = other.to_dense()
    np.testing.assert_array_equal(values, other_values)
    np.testing.assert_array_equal(flags, other_flags)


def test_csv_small():
    assert _write(write_csv, build_reference(2)) == CSV_N2
    assert _write(write_csv, build_reference(0)) == "q,r,f\n0,0,1\n"


def test_jsonl_small():
    lines = _write(write_jsonl, build_reference(1)).splitlines()
    assert lines[0] == '{"q":0,"r":0,"f":1,"mex_cell":true}'
    assert [json.loads(line)["f"] for line in lines] == [1, 2, 3]


def test_runs_small():
    lines = _write(write_runs, build_reference(2)).splitlines()
    assert lines == ["0;0:1,1:2,2:3", "1;1:3,2:2", "2;2:4"]
    assert parse_column("1;1:3,2:2").runs == ((1, 3), (2, 2))


def test_csv_back_and_forth(table):
    _assert_same(table, read_csv(io.StringIO(_write(write_csv, table))))


def test_jsonl_back_and_forth(table):
    _assert_same(table, read_jsonl(io.StringIO(_write(write_jsonl, table))))


def test_runs_back_and_forth(table):
    _assert_same(table, read_runs(io.StringIO(_write(write_runs, table))))


def test_hdf5(table, hdf5_path):
    write_hdf5(table, hdf5_path)
    _assert_same(table, read_hdf5(hdf5_path))
    write_hdf5(build_sparse(N_MAX), hdf5_path)
    stored = read_hdf5(hdf5_path)
    assert stored.n_max == N_MAX
    _assert_same(table, stored)


def test_derived_flags(table):
    values, flags = table.to_dense()
    np.testing.assert_array_equal(derive_mex_flags(values), flags)


def test_engines_write_same_bytes():
    assert _write(write_csv, build_reference(N_MAX)) == _write(write_csv, build_sparse(N_MAX))
    assert _write(write_jsonl, build_reference(N_MAX)) == _write(write_jsonl, build_sparse(N_MAX))


def test_write_table_errors(table):
    with pytest.raises(UsageError):
        write_table(table, "hdf5", None)
    with pytest.raises(UsageError):
        write_table(table, "xml", "out.xml")
    with pytest.raises(UsageError):
        read_csv(io.StringIO("a,b,c\n0,0,1\n"))
