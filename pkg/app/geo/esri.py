"""
Esri ASCII grid reading and writing

Arrays follow the numerical convention: data[0, :] is the southernmost row.
Files follow the raster convention: the first data line is the northernmost row.
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from pathlib import Path
from typing import TextIO

import numpy as np
import numpy.typing as npt

from app.core.exceptions import InputFormatError, SourceReadError

NODATA_VALUE = -9999.0

_HEADER_KEYS = {
    "ncols",
    "nrows",
    "xllcorner",
    "yllcorner",
    "xllcenter",
    "yllcenter",
    "cellsize",
    "dx",
    "dy",
    "nodata_value",
}


@dataclass(frozen=True)
class AsciiGrid:
    """
    Single-band raster

    Attributes:
        data: (nrows, ncols) array, south row first; nodata cells are NaN
        xllcorner / yllcorner: lower-left corner of the lower-left cell
        dx / dy: cell size in x (longitude) and y (latitude)
    """

    data: npt.NDArray[np.float64]
    xllcorner: float
    yllcorner: float
    dx: float
    dy: float

    @property
    def nrows(self) -> int:
        return int(self.data.shape[0])

    @property
    def ncols(self) -> int:
        return int(self.data.shape[1])


def read_ascii_grid(path: Path | str) -> AsciiGrid:
    """
    Read an Esri ASCII raster

    Accepts `cellsize` with one value or an x/y pair, or separate `dx`/`dy`
    keys, and either corner or center registration.

    Raises:
        SourceReadError: file missing or unreadable
        InputFormatError: header or body malformed
    """
    try:
        raw = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise SourceReadError(f"cannot read raster {path}: {exc}") from exc

    header: dict[str, list[str]] = {}
    body_start = 0
    for body_start, line in enumerate(raw):
        parts = line.split()
        if not parts:
            continue
        key = parts[0].lower()
        if key not in _HEADER_KEYS:
            break
        header[key] = parts[1:]
    else:
        body_start = len(raw)

    try:
        ncols = int(header["ncols"][0])
        nrows = int(header["nrows"][0])
        if "cellsize" in header:
            sizes = [float(v) for v in header["cellsize"]]
            dx, dy = (sizes[0], sizes[0]) if len(sizes) == 1 else (sizes[0], sizes[1])
        else:
            dx, dy = float(header["dx"][0]), float(header["dy"][0])
        nodata = float(header["nodata_value"][0]) if "nodata_value" in header else NODATA_VALUE
        if "xllcorner" in header:
            xll, yll = float(header["xllcorner"][0]), float(header["yllcorner"][0])
        else:
            xll = float(header["xllcenter"][0]) - dx / 2
            yll = float(header["yllcenter"][0]) - dy / 2
    except (KeyError, IndexError, ValueError) as exc:
        raise InputFormatError(f"malformed raster header in {path}: {exc}") from exc

    try:
        body = np.loadtxt(io.StringIO("\n".join(raw[body_start:])), dtype=np.float64, ndmin=2)
    except ValueError as exc:
        raise InputFormatError(f"malformed raster body in {path}: {exc}") from exc
    if body.shape != (nrows, ncols):
        raise InputFormatError(
            f"raster {path} declares {nrows}x{ncols} cells but holds {body.shape[0]}x{body.shape[1]}"
        )

    data = body[::-1, :].copy()
    data[data == nodata] = np.nan
    return AsciiGrid(data=data, xllcorner=xll, yllcorner=yll, dx=dx, dy=dy)


def write_ascii_grid(
    target: Path | str | TextIO,
    data: npt.ArrayLike,
    xllcorner: float,
    yllcorner: float,
    dx: float,
    dy: float,
    nodata_value: float = NODATA_VALUE,
) -> None:
    """Write a raster; NaN cells are written as `nodata_value`."""
    if isinstance(target, (str, Path)):
        with open(target, "w", encoding="utf-8", newline="\n") as stream:
            _write_stream(stream, data, xllcorner, yllcorner, dx, dy, nodata_value)
        return
    _write_stream(target, data, xllcorner, yllcorner, dx, dy, nodata_value)


def _write_stream(
    stream: TextIO,
    data: npt.ArrayLike,
    xllcorner: float,
    yllcorner: float,
    dx: float,
    dy: float,
    nodata_value: float,
) -> None:
    grid = np.asarray(data, dtype=np.float64)
    out = np.where(np.isnan(grid), nodata_value, grid)
    stream.write(f"ncols {grid.shape[1]}\n")
    stream.write(f"nrows {grid.shape[0]}\n")
    stream.write(f"xllcorner {xllcorner:.10g}\n")
    stream.write(f"yllcorner {yllcorner:.10g}\n")
    stream.write(f"cellsize {dx:.10g} {dy:.10g}\n")
    stream.write(f"nodata_value {nodata_value:.10g}\n")
    np.savetxt(stream, out[::-1, :], fmt="%.10g", delimiter=" ")
