"""
Shared fixtures
"""

import numpy as np
import pytest

from app.geo.esri import AsciiGrid
from app.landmask.raster import RasterLandMask


@pytest.fixture
def island_mask():
    """
    1 x 1 degree raster over 57..58N, 10..11E in 0.1 degree cells

    Land (10 m) in the block 57.4..57.6N, 10.4..10.6E; sea (-20 m) elsewhere.
    """
    data = np.full((10, 10), -20.0)
    data[4:6, 4:6] = 10.0
    grid = AsciiGrid(data=data, xllcorner=10.0, yllcorner=57.0, dx=0.1, dy=0.1)
    return RasterLandMask(grid, threshold_m=2.0)
