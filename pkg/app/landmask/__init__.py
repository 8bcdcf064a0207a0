"""
Land mask: elevation lookup deciding which positions and tracklets are on land
"""

from app.landmask.base import BaseLandMask, crosses_land
from app.landmask.factory import get_land_mask
from app.landmask.mock import OpenWaterMask
from app.landmask.protocol import LandMaskProtocol
from app.landmask.raster import RasterLandMask

__all__ = [
    "BaseLandMask",
    "LandMaskProtocol",
    "OpenWaterMask",
    "RasterLandMask",
    "crosses_land",
    "get_land_mask",
]
