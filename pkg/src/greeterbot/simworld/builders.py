"""Programmatic map construction for tests, demos, and bundled assets."""

from __future__ import annotations

import math

import numpy as np

from greeterbot.core import OccupancyGrid, Pose2D


def box_map(width_m: float, height_m: float, resolution: float = 0.05,
            origin: Pose2D = Pose2D()) -> OccupancyGrid:
    """Free rectangle enclosed by one-cell-thick walls."""
    w = round(width_m / resolution)
    h = round(height_m / resolution)
    cells = np.zeros((h, w))
    cells[0, :] = cells[-1, :] = 1.0
    cells[:, 0] = cells[:, -1] = 1.0
    return OccupancyGrid(w, h, resolution, origin, cells)


def add_rect(grid: OccupancyGrid, x: float, y: float, w: float, h: float) -> OccupancyGrid:
    """Stamp an occupied rectangle given in the map origin frame (meters)."""
    res = grid.resolution
    x0, y0 = math.floor(x / res), math.floor(y / res)
    x1, y1 = math.ceil((x + w) / res), math.ceil((y + h) / res)
    grid.cells[max(0, y0):max(0, y1), max(0, x0):max(0, x1)] = 1.0
    return grid


def desk20_map() -> OccupancyGrid:
    """20 x 20 m localization arena with asymmetric interior walls, so every
    room corner looks different to the scanner."""
    grid = box_map(20.0, 20.0, resolution=0.1)
    add_rect(grid, 4.0, 6.0, 6.0, 0.3)
    add_rect(grid, 12.0, 9.0, 0.3, 6.0)
    add_rect(grid, 15.0, 3.0, 2.0, 2.0)
    add_rect(grid, 7.0, 13.0, 1.0, 4.0)
    add_rect(grid, 2.0, 15.0, 3.0, 0.3)
    add_rect(grid, 2.0, 15.0, 0.3, 3.0)
    add_rect(grid, 16.0, 14.0, 0.3, 4.0)
    return grid


def office10_map() -> OccupancyGrid:
    """10 x 10 m demo floor: a dividing wall with a doorway and two desks."""
    grid = box_map(10.0, 10.0, resolution=0.05)
    add_rect(grid, 5.0, 0.0, 0.3, 4.0)   # divider, door gap at y in (4.0, 6.5)
    add_rect(grid, 5.0, 6.5, 0.3, 3.5)
    add_rect(grid, 2.0, 6.0, 1.5, 0.8)
    add_rect(grid, 7.5, 2.5, 0.8, 1.5)
    return grid


def grid_to_pgm_pixels(grid: OccupancyGrid):
    """Map-server-convention pixels: occupied 0, free 254, unknown 205, image
    row 0 at the top of the map."""
    import numpy as np
    from greeterbot.core import UNKNOWN

    pixels = np.full(grid.cells.shape, 205, dtype=np.uint8)
    pixels[grid.cells == 0.0] = 254
    pixels[(grid.cells != UNKNOWN) & (grid.cells > 0.5)] = 0
    return np.flipud(pixels)
