"""
Geodesic and grid geometry primitives
"""

from app.geo.grid import GridSpec, cell_index, cell_indices, mean_segment_length
from app.geo.sphere import (
    EARTH_RADIUS_M,
    KNOT_MS,
    bearing_deg,
    distance_m,
    intermediate_point,
    midpoint,
    sample_path,
)

__all__ = [
    "EARTH_RADIUS_M",
    "KNOT_MS",
    "GridSpec",
    "bearing_deg",
    "cell_index",
    "cell_indices",
    "distance_m",
    "intermediate_point",
    "mean_segment_length",
    "midpoint",
    "sample_path",
]
