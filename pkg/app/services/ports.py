"""
Port areas: segmentation of the mooring overdensities, arrivals and occupancy
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import replace
from typing import Sequence

import numpy as np
import numpy.typing as npt
from scipy import ndimage
from skimage.segmentation import watershed

from app.core.config import PortThresholds
from app.core.exceptions import CoverageError
from app.core.logging import get_logger, measure_latency
from app.geo.grid import GridSpec, cell_index
from app.ingest.areas import Box
from app.landmask.protocol import LandMaskProtocol
from app.models.journey import Journey
from app.models.port import PortArea
from app.models.record import GeoPoint

logger = get_logger(__name__)

# 8-neighbourhood for labeling, dilation and watershed basins.
EIGHT_CONNECTED = np.ones((3, 3), dtype=bool)

LabelArray = npt.NDArray[np.int32]


def _water_cells(grid: GridSpec, mask: LandMaskProtocol | None) -> npt.NDArray[np.bool_]:
    shape = grid.shape
    if mask is None:
        return np.ones(shape, dtype=bool)
    lats = grid.lat_min + (np.arange(grid.n_rows) + 0.5) * grid.dphi
    lons = grid.lon_min + (np.arange(grid.n_cols) + 0.5) * grid.dlon
    lat_grid, lon_grid = np.meshgrid(lats, lons, indexing="ij")
    try:
        land = mask.land_flags(lat_grid.ravel(), lon_grid.ravel()).reshape(shape)
    except CoverageError as exc:
        logger.warning("port_water_mask_incomplete", error=str(exc))
        return np.ones(shape, dtype=bool)
    return ~land


def _seed_markers(
    smoothed: npt.NDArray[np.float64], regions: LabelArray, n_regions: int
) -> LabelArray:
    """One marker per region at its density barycenter, or at its peak when the barycenter falls outside."""
    markers = np.zeros(regions.shape, dtype=np.int32)
    index = np.arange(1, n_regions + 1)
    centers = ndimage.center_of_mass(smoothed, regions, index)
    for label, (row, col) in zip(index, centers):
        cell = (int(round(row)), int(round(col)))
        if regions[cell] != label:
            cell = ndimage.maximum_position(smoothed, regions, label)
        markers[cell] = label
    return markers


def _dilate_small(labels: LabelArray, n_labels: int, min_cells: int) -> LabelArray:
    """Grow regions below `min_cells` one ring at a time into unlabeled cells."""
    labels = labels.copy()
    for label in range(1, n_labels + 1):
        region = labels == label
        while 0 < region.sum() < min_cells:
            grown = ndimage.binary_dilation(region, structure=EIGHT_CONNECTED) & (labels == 0)
            if not grown.any():
                break
            labels[grown] = label
            region |= grown
    return labels


def segment_ports(
    density: npt.ArrayLike,
    thresholds: PortThresholds | None = None,
    water: npt.NDArray[np.bool_] | None = None,
) -> tuple[LabelArray, npt.NDArray[np.float64]]:
    """
    Label port areas on a density raster

    Returns:
        (labels, smoothed): labels are 0 outside any port, 1..n inside;
        smoothed is the Gaussian-smoothed density the labels were cut from
    """
    t = thresholds or PortThresholds()
    values = np.nan_to_num(np.asarray(density, dtype=np.float64))
    smoothed = ndimage.gaussian_filter(values, sigma=t.sigma_cells, mode="constant")
    regions, n_regions = ndimage.label(smoothed > t.threshold, structure=EIGHT_CONNECTED)
    if n_regions == 0:
        return np.zeros(values.shape, dtype=np.int32), smoothed

    markers = _seed_markers(smoothed, regions, n_regions)
    water = np.ones(values.shape, dtype=bool) if water is None else water
    basin = ((smoothed > t.threshold / 2) & water) | (markers > 0)
    labels = watershed(-smoothed, markers, mask=basin, connectivity=2).astype(np.int32)
    return _dilate_small(labels, n_regions, t.min_cells), smoothed


@measure_latency("find_ports")
def find_ports(
    density: npt.ArrayLike,
    grid: GridSpec,
    thresholds: PortThresholds | None = None,
    mask: LandMaskProtocol | None = None,
) -> list[PortArea]:
    """
    Port areas around overdensities of the combined density map

    Empty when no smoothed cell exceeds the threshold.
    """
    t = thresholds or PortThresholds()
    values = np.nan_to_num(np.asarray(density, dtype=np.float64))
    labels, _ = segment_ports(values, t, _water_cells(grid, mask))
    row_areas = grid.row_areas_km2()

    ports: list[PortArea] = []
    for label in range(1, int(labels.max()) + 1):
        rows, cols = np.nonzero(labels == label)
        if rows.size == 0:
            continue
        barycenter = _barycenter(values[rows, cols], rows, cols, grid)
        ports.append(
            PortArea(
                id=len(ports) + 1,
                cells=tuple((int(r), int(c)) for r, c in zip(rows, cols)),
                barycenter=barycenter,
                area_km2=float(row_areas[rows].sum()),
                coast_distance_km=_coast_distance_km(barycenter, mask),
            )
        )

    coastal = [p for p in ports if p.coast_distance_km is not None]
    near = sum(1 for p in coastal if p.coast_distance_km <= t.coast_distance_km)
    logger.info(
        "ports_found",
        ports=len(ports),
        median_area_km2=float(np.median([p.area_km2 for p in ports])) if ports else 0.0,
        coastal_share=near / len(coastal) if coastal else None,
    )
    return ports


def _barycenter(
    weights: npt.NDArray[np.float64],
    rows: npt.NDArray[np.int64],
    cols: npt.NDArray[np.int64],
    grid: GridSpec,
) -> GeoPoint:
    lats = grid.lat_min + (rows + 0.5) * grid.dphi
    lons = grid.lon_min + (cols + 0.5) * grid.dlon
    w = np.clip(weights, 0.0, None)
    if w.sum() <= 0:
        w = np.ones_like(w)
    return GeoPoint(float(np.average(lats, weights=w)), float(np.average(lons, weights=w)))


def _coast_distance_km(p: GeoPoint, mask: LandMaskProtocol | None) -> float | None:
    if mask is None:
        return None
    try:
        meters = mask.distance_to_land_m(p)
    except CoverageError:
        return None
    return meters / 1000.0 if math.isfinite(meters) else None


def port_label_grid(ports: Sequence[PortArea], shape: tuple[int, int]) -> LabelArray:
    """Raster of port ids, 0 outside every port."""
    labels = np.zeros(shape, dtype=np.int32)
    for port in ports:
        rows, cols = zip(*port.cells)
        labels[list(rows), list(cols)] = port.id
    return labels


def _port_at(p: GeoPoint, grid: GridSpec, labels: LabelArray) -> int:
    if not grid.contains(p):
        return 0
    return int(labels[cell_index(p, grid)])


def port_arrivals(
    journeys: Sequence[Journey],
    ports: Sequence[PortArea],
    grid: GridSpec,
    period_days: float,
    kiel_box: Box | None = None,
) -> list[PortArea]:
    """
    Ports with arrivals per day and the most frequent destination of arriving vessels

    An arrival is a trajectory ending inside a port that did not start in that
    same port. Trajectories ending in the Kiel Canal zone enter the canal and
    never count; those starting in it may arrive anywhere, the fjord included.
    """
    if not ports:
        return []
    labels = port_label_grid(ports, grid.shape)
    arrivals: Counter[int] = Counter()
    destinations: dict[int, Counter[str]] = {port.id: Counter() for port in ports}
    for journey in journeys:
        for traj in journey.trajectories:
            end, start = traj.route.end, traj.route.start
            if kiel_box is not None and kiel_box.contains(end):
                continue
            target = _port_at(end, grid, labels)
            if target == 0:
                continue
            from_canal = kiel_box is not None and kiel_box.contains(start)
            if _port_at(start, grid, labels) == target and not from_canal:
                continue
            arrivals[target] += 1
            destination = journey.destination_at(traj.end_time)
            if destination:
                destinations[target][destination] += 1

    days = max(period_days, 1e-12)
    return [
        replace(
            port,
            arrivals_per_day=arrivals[port.id] / days,
            top_destination=_most_common(destinations[port.id]),
        )
        for port in ports
    ]


def _most_common(counter: Counter[str]) -> str | None:
    if not counter:
        return None
    # ties resolve alphabetically so the result does not depend on journey order
    best = max(counter.values())
    return min(name for name, count in counter.items() if count == best)


def port_occupancy(
    density: npt.ArrayLike, ports: Sequence[PortArea], grid: GridSpec
) -> list[PortArea]:
    """Ports with their mean number of vessels: density times cell area summed over the port."""
    values = np.nan_to_num(np.asarray(density, dtype=np.float64))
    row_areas = grid.row_areas_km2()
    result = []
    for port in ports:
        rows = np.fromiter((r for r, _ in port.cells), dtype=np.int64)
        cols = np.fromiter((c for _, c in port.cells), dtype=np.int64)
        occupancy = float(np.sum(values[rows, cols] * row_areas[rows]))
        result.append(replace(port, vessels_in_port=occupancy))
    return result
