"""
LandMask Factory
Creates the land mask implementation based on configuration
"""

from app.core.config import Settings
from app.core.logging import get_logger
from app.landmask.mock import OpenWaterMask
from app.landmask.protocol import LandMaskProtocol
from app.landmask.raster import RasterLandMask

logger = get_logger(__name__)


def get_land_mask(config: Settings) -> LandMaskProtocol:
    """
    Get LandMask implementation based on configuration

    Args:
        config: settings carrying `land_mask_path` and the land elevation threshold

    Returns:
        RasterLandMask when a raster is configured, otherwise OpenWaterMask

    Raises:
        SourceReadError / InputFormatError: raster missing or malformed
    """
    threshold = config.metrics.land_elevation_m
    if config.land_mask_path is None:
        logger.warning("land_mask_not_configured_fallback_to_open_water")
        return OpenWaterMask(threshold_m=threshold)

    logger.info("land_mask_factory", path=str(config.land_mask_path), threshold_m=threshold)
    return RasterLandMask.from_file(config.land_mask_path, threshold_m=threshold)
