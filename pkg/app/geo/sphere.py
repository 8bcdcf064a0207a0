"""
Great-circle geometry on a spherical Earth

Scalar helpers take GeoPoints; the `*_array` variants take numpy arrays of
degrees and are used by the vectorized pipeline stages.
"""

from __future__ import annotations

import math

import numpy as np
import numpy.typing as npt

from app.core.exceptions import UndefinedBearingError
from app.models.record import GeoPoint

EARTH_RADIUS_M = 6_371_008.8
KNOT_MS = 1852.0 / 3600.0

# Sampled endpoints closer than this are merged with the target point.
SAMPLE_TOLERANCE_M = 1e-6

FloatArray = npt.NDArray[np.float64]


def distance_m(a: GeoPoint, b: GeoPoint) -> float:
    """Haversine distance in meters."""
    phi1, phi2 = math.radians(a.lat), math.radians(b.lat)
    dphi = phi2 - phi1
    dlam = math.radians(b.lon - a.lon)
    h = math.sin(dphi / 2) ** 2 + math.cos(phi1) * math.cos(phi2) * math.sin(dlam / 2) ** 2
    return 2 * EARTH_RADIUS_M * math.asin(min(1.0, math.sqrt(h)))


def distance_m_array(
    lat1: npt.ArrayLike, lon1: npt.ArrayLike, lat2: npt.ArrayLike, lon2: npt.ArrayLike
) -> FloatArray:
    phi1, phi2 = np.radians(lat1), np.radians(lat2)
    dphi = phi2 - phi1
    dlam = np.radians(np.asarray(lon2) - np.asarray(lon1))
    h = np.sin(dphi / 2) ** 2 + np.cos(phi1) * np.cos(phi2) * np.sin(dlam / 2) ** 2
    return 2 * EARTH_RADIUS_M * np.arcsin(np.minimum(1.0, np.sqrt(h)))


def bearing_deg(a: GeoPoint, b: GeoPoint) -> float:
    """
    Initial great-circle bearing from a to b, clockwise from north

    Raises:
        UndefinedBearingError: a and b are the same point
    """
    if a == b:
        raise UndefinedBearingError(f"bearing undefined for identical points {a}")
    phi1, phi2 = math.radians(a.lat), math.radians(b.lat)
    dlam = math.radians(b.lon - a.lon)
    y = math.sin(dlam) * math.cos(phi2)
    x = math.cos(phi1) * math.sin(phi2) - math.sin(phi1) * math.cos(phi2) * math.cos(dlam)
    bearing = math.degrees(math.atan2(y, x)) % 360.0
    return 0.0 if bearing >= 360.0 else bearing


def bearing_deg_array(
    lat1: npt.ArrayLike, lon1: npt.ArrayLike, lat2: npt.ArrayLike, lon2: npt.ArrayLike
) -> FloatArray:
    """Vectorized bearing; identical point pairs yield 0."""
    phi1, phi2 = np.radians(lat1), np.radians(lat2)
    dlam = np.radians(np.asarray(lon2) - np.asarray(lon1))
    y = np.sin(dlam) * np.cos(phi2)
    x = np.cos(phi1) * np.sin(phi2) - np.sin(phi1) * np.cos(phi2) * np.cos(dlam)
    bearing = np.degrees(np.arctan2(y, x)) % 360.0
    return np.where(bearing >= 360.0, 0.0, bearing)


def _to_vector(lat: npt.ArrayLike, lon: npt.ArrayLike) -> FloatArray:
    phi, lam = np.radians(lat), np.radians(lon)
    return np.stack([np.cos(phi) * np.cos(lam), np.cos(phi) * np.sin(lam), np.sin(phi)], axis=-1)


def _from_vector(vec: FloatArray) -> tuple[FloatArray, FloatArray]:
    lat = np.degrees(np.arctan2(vec[..., 2], np.hypot(vec[..., 0], vec[..., 1])))
    lon = np.degrees(np.arctan2(vec[..., 1], vec[..., 0]))
    return lat, lon


def _slerp(a: GeoPoint, b: GeoPoint, fractions: FloatArray) -> tuple[FloatArray, FloatArray]:
    va = _to_vector(a.lat, a.lon)
    vb = _to_vector(b.lat, b.lon)
    delta = distance_m(a, b) / EARTH_RADIUS_M
    if delta == 0.0:
        return np.full(fractions.shape, a.lat), np.full(fractions.shape, a.lon)
    sin_delta = math.sin(delta)
    wa = np.sin((1.0 - fractions) * delta) / sin_delta
    wb = np.sin(fractions * delta) / sin_delta
    vec = wa[:, None] * va + wb[:, None] * vb
    return _from_vector(vec)


def intermediate_point(a: GeoPoint, b: GeoPoint, fraction: float) -> GeoPoint:
    """Point at `fraction` of the great-circle arc from a to b."""
    if fraction <= 0.0:
        return a
    if fraction >= 1.0:
        return b
    lat, lon = _slerp(a, b, np.array([fraction], dtype=np.float64))
    return GeoPoint(float(lat[0]), float(lon[0]))


def intermediate_point_array(
    lat1: npt.ArrayLike,
    lon1: npt.ArrayLike,
    lat2: npt.ArrayLike,
    lon2: npt.ArrayLike,
    fractions: npt.ArrayLike,
) -> tuple[FloatArray, FloatArray]:
    """Vectorized intermediate_point over paired arcs."""
    lat1, lon1 = np.asarray(lat1, dtype=np.float64), np.asarray(lon1, dtype=np.float64)
    lat2, lon2 = np.asarray(lat2, dtype=np.float64), np.asarray(lon2, dtype=np.float64)
    f = np.clip(np.asarray(fractions, dtype=np.float64), 0.0, 1.0)
    delta = distance_m_array(lat1, lon1, lat2, lon2) / EARTH_RADIUS_M
    sin_delta = np.where(delta > 0, np.sin(delta), 1.0)
    wa = np.where(delta > 0, np.sin((1.0 - f) * delta) / sin_delta, 1.0 - f)
    wb = np.where(delta > 0, np.sin(f * delta) / sin_delta, f)
    vec = wa[..., None] * _to_vector(lat1, lon1) + wb[..., None] * _to_vector(lat2, lon2)
    lats, lons = _from_vector(vec)
    lats = np.where(f <= 0.0, lat1, np.where(f >= 1.0, lat2, lats))
    lons = np.where(f <= 0.0, lon1, np.where(f >= 1.0, lon2, lons))
    return lats, lons


def midpoint(a: GeoPoint, b: GeoPoint) -> GeoPoint:
    return intermediate_point(a, b, 0.5)


def sample_path_array(a: GeoPoint, b: GeoPoint, step: float) -> tuple[FloatArray, FloatArray]:
    """
    Sample the great circle from a to b every `step` meters

    Returns:
        (lats, lons) including both endpoints; the last interval may be shorter
    """
    if step <= 0:
        raise ValueError(f"sampling step must be positive, got {step}")
    total = distance_m(a, b)
    if total == 0.0:
        return np.array([a.lat]), np.array([a.lon])
    offsets = np.arange(0.0, total - SAMPLE_TOLERANCE_M, step)
    if offsets.size == 0:
        offsets = np.zeros(1)
    fractions = np.append(offsets / total, 1.0)
    lats, lons = _slerp(a, b, fractions)
    lats[0], lons[0] = a.lat, a.lon
    lats[-1], lons[-1] = b.lat, b.lon
    return lats, lons


def sample_path(a: GeoPoint, b: GeoPoint, step: float) -> list[GeoPoint]:
    lats, lons = sample_path_array(a, b, step)
    return [GeoPoint(float(lat), float(lon)) for lat, lon in zip(lats, lons)]


def distance_to_segment_m(p: GeoPoint, a: GeoPoint, b: GeoPoint) -> float:
    """Great-circle distance from p to the arc a-b (clamped to the endpoints)."""
    d_ab = distance_m(a, b)
    d_ap = distance_m(a, p)
    if d_ab == 0.0 or d_ap == 0.0:
        return d_ap
    delta_ap = d_ap / EARTH_RADIUS_M
    theta = math.radians(bearing_deg(a, p) - bearing_deg(a, b))
    cross = math.asin(max(-1.0, min(1.0, math.sin(delta_ap) * math.sin(theta))))
    along = math.acos(max(-1.0, min(1.0, math.cos(delta_ap) / max(math.cos(cross), 1e-15))))
    if math.cos(theta) < 0 or along * EARTH_RADIUS_M > d_ab:
        return min(d_ap, distance_m(b, p))
    return abs(cross) * EARTH_RADIUS_M
