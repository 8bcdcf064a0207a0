"""
Record builders shared by the tests
"""

from app.models.record import AisRecord, GeoPoint, RecordKind


def pos(mmsi, t, lat, lon, sog=None):
    return AisRecord(mmsi=mmsi, time=t, pos=GeoPoint(lat, lon), sog=sog)


def static(mmsi, t, lat, lon, vessel_type=None, destination=None):
    return AisRecord(
        mmsi=mmsi,
        time=t,
        pos=GeoPoint(lat, lon),
        kind=RecordKind.STATIC,
        vessel_type=vessel_type,
        destination=destination,
    )


def lon_step(meters, lat):
    """Longitude increment covering `meters` along a parallel."""
    import math

    from app.geo.sphere import EARTH_RADIUS_M

    return meters / (EARTH_RADIUS_M * math.radians(1.0) * math.cos(math.radians(lat)))


def eastbound(mmsi, t0, n, lat=57.0, lon0=10.0, step_s=60, step_m=300.0):
    """n position reports along a parallel at constant speed."""
    dlon = lon_step(step_m, lat)
    return [pos(mmsi, t0 + k * step_s, lat, lon0 + k * dlon) for k in range(n)]


def straight_trajectory(mmsi, a, b, t0, t1):
    """Constant-speed trajectory on the great circle a-b."""
    from app.geo.sphere import distance_m
    from app.models.trajectory import Route, SpeedPoint, Trajectory

    length = distance_m(a, b)
    speed = length / (t1 - t0)
    return Trajectory(
        mmsi=mmsi,
        route=Route((a, b)),
        speed_points=(SpeedPoint(0.0, 0.0, speed), SpeedPoint(length, float(t1 - t0), speed)),
        start_time=t0,
        end_time=t1,
        route_length=length,
    )
