"""
Unit tests for Esri ASCII grid I/O
"""

import io

import numpy as np
import pytest

from app.core.exceptions import InputFormatError, SourceReadError
from app.geo.esri import read_ascii_grid, write_ascii_grid


def test_written_file_puts_north_row_first(tmp_path):
    data = np.array([[1.0, 2.0], [3.0, np.nan]])
    buffer = io.StringIO()
    write_ascii_grid(buffer, data, 10.0, 57.0, 0.5, 0.25)
    lines = buffer.getvalue().splitlines()
    assert lines[0] == "ncols 2"
    assert lines[4] == "cellsize 0.5 0.25"
    assert lines[6] == "3 -9999"
    assert lines[7] == "1 2"


def test_write_then_read(tmp_path):
    path = tmp_path / "grid.asc"
    data = np.array([[0.0, 1.5, 2.0], [np.nan, 4.0, 5.25]])
    write_ascii_grid(path, data, 9.0, 56.0, 0.1, 0.05)
    grid = read_ascii_grid(path)
    assert grid.nrows == 2 and grid.ncols == 3
    assert (grid.dx, grid.dy) == (0.1, 0.05)
    assert np.isnan(grid.data[1, 0])
    assert grid.data[1, 2] == 5.25


def test_read_center_registration_and_square_cells(tmp_path):
    path = tmp_path / "center.asc"
    path.write_text(
        "ncols 2\nnrows 1\nxllcenter 10.5\nyllcenter 57.5\ncellsize 1\nNODATA_value -1\n-1 7\n"
    )
    grid = read_ascii_grid(path)
    assert (grid.xllcorner, grid.yllcorner) == (10.0, 57.0)
    assert np.isnan(grid.data[0, 0]) and grid.data[0, 1] == 7.0


def test_read_missing_file(tmp_path):
    with pytest.raises(SourceReadError):
        read_ascii_grid(tmp_path / "nope.asc")


def test_read_size_mismatch(tmp_path):
    path = tmp_path / "bad.asc"
    path.write_text("ncols 3\nnrows 1\nxllcorner 0\nyllcorner 0\ncellsize 1\n1 2\n")
    with pytest.raises(InputFormatError):
        read_ascii_grid(path)
