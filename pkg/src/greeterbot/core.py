"""Shared planar geometry and grid types used across perception, localization,
navigation, and the simulator."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

UNKNOWN = -1.0  # occupancy marker for cells that are neither free nor occupied


def normalize_angle(theta: float) -> float:
    """Wrap an angle to (-pi, pi]. Ties at -pi map to +pi."""
    if -math.pi < theta <= math.pi:
        return theta
    wrapped = math.fmod(theta + math.pi, 2.0 * math.pi)
    if wrapped <= 0.0:
        wrapped += 2.0 * math.pi
    return wrapped - math.pi


@dataclass(frozen=True)
class Pose2D:
    """Planar rigid-body pose: position in meters, heading in radians."""

    x: float = 0.0
    y: float = 0.0
    theta: float = 0.0

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.x, self.y, self.theta)


def compose(a: Pose2D, b: Pose2D) -> Pose2D:
    """Rigid-body composition a (+) b: b expressed in a's frame, mapped to a's parent frame."""
    c = math.cos(a.theta)
    s = math.sin(a.theta)
    return Pose2D(
        a.x + b.x * c - b.y * s,
        a.y + b.x * s + b.y * c,
        normalize_angle(a.theta + b.theta),
    )


def invert(p: Pose2D) -> Pose2D:
    """Inverse pose, so that compose(invert(p), p) is the identity."""
    c = math.cos(p.theta)
    s = math.sin(p.theta)
    return Pose2D(-p.x * c - p.y * s, p.x * s - p.y * c, normalize_angle(-p.theta))


@dataclass(frozen=True)
class VelocityCommand:
    """Holonomic base command in the robot frame; vy may be nonzero."""

    vx: float = 0.0
    vy: float = 0.0
    omega: float = 0.0


@dataclass
class OccupancyGrid:
    """2D raster map. cells is a (height, width) array of occupancy in [0, 1],
    or UNKNOWN. origin is the pose of the corner of cell (0, 0) in the map frame.
    Cell (ix, iy) covers the half-open square [ix*res, (ix+1)*res) x [iy*res, (iy+1)*res)
    in the origin frame.
    """

    width: int
    height: int
    resolution: float
    origin: Pose2D = field(default_factory=Pose2D)
    cells: np.ndarray = None  # type: ignore[assignment]

    def __post_init__(self):
        if self.resolution <= 0:
            raise ValueError("resolution must be > 0")
        if self.cells is None:
            self.cells = np.zeros((self.height, self.width), dtype=np.float64)
        self.cells = np.asarray(self.cells, dtype=np.float64)
        if self.cells.shape != (self.height, self.width):
            raise ValueError(
                f"cells shape {self.cells.shape} != (height={self.height}, width={self.width})"
            )

    def in_bounds(self, ix: int, iy: int) -> bool:
        return 0 <= ix < self.width and 0 <= iy < self.height

    def is_occupied(self, ix: int, iy: int) -> bool:
        v = self.cells[iy, ix]
        return v != UNKNOWN and v > 0.5

    def occupied_mask(self) -> np.ndarray:
        return (self.cells != UNKNOWN) & (self.cells > 0.5)

    def copy(self) -> "OccupancyGrid":
        return OccupancyGrid(
            self.width, self.height, self.resolution, self.origin, self.cells.copy()
        )


def world_to_cell(grid: OccupancyGrid, p: Pose2D) -> tuple[int, int] | None:
    """Cell index containing a world point, or None when out of bounds.

    Per-axis floor of (p - origin) / resolution; boundary points belong to the
    cell whose low edge they sit on.
    """
    q = compose(invert(grid.origin), p)
    ix = math.floor(q.x / grid.resolution)
    iy = math.floor(q.y / grid.resolution)
    if not grid.in_bounds(ix, iy):
        return None
    return (ix, iy)


def cell_center(grid: OccupancyGrid, ix: int, iy: int) -> Pose2D:
    """World-frame pose of the center of cell (ix, iy), heading 0 in the origin frame."""
    return compose(
        grid.origin,
        Pose2D((ix + 0.5) * grid.resolution, (iy + 0.5) * grid.resolution, 0.0),
    )


@dataclass
class LaserScan:
    """Planar scan. ranges[i] is the return at bearing angle_min + i*angle_increment,
    in meters; NaN marks no-return (distinct from range_max, which would mean a
    real return at the limit).
    """

    angle_min: float
    angle_max: float
    angle_increment: float
    range_min: float
    range_max: float
    ranges: np.ndarray

    def __post_init__(self):
        if self.angle_increment <= 0:
            raise ValueError("angle_increment must be > 0")
        self.ranges = np.asarray(self.ranges, dtype=np.float64)
        expected = expected_beam_count(self.angle_min, self.angle_max, self.angle_increment)
        if len(self.ranges) != expected:
            raise ValueError(f"ranges length {len(self.ranges)} != expected {expected}")
        finite = self.ranges[np.isfinite(self.ranges)]
        if finite.size and ((finite < self.range_min - 1e-9).any() or (finite > self.range_max + 1e-9).any()):
            raise ValueError("finite ranges must lie within [range_min, range_max]")

    def bearings(self) -> np.ndarray:
        return self.angle_min + np.arange(len(self.ranges)) * self.angle_increment

    def to_dict(self) -> dict:
        return {
            "angle_min": self.angle_min,
            "angle_max": self.angle_max,
            "angle_increment": self.angle_increment,
            "range_min": self.range_min,
            "range_max": self.range_max,
            "ranges": [None if not np.isfinite(r) else float(r) for r in self.ranges],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "LaserScan":
        ranges = np.array(
            [np.nan if r is None else float(r) for r in d["ranges"]], dtype=np.float64
        )
        return cls(
            d["angle_min"], d["angle_max"], d["angle_increment"],
            d["range_min"], d["range_max"], ranges,
        )


def expected_beam_count(angle_min: float, angle_max: float, increment: float) -> int:
    # tolerate float noise in (max-min)/inc just below an integer
    return int(math.floor((angle_max - angle_min) / increment + 1e-9)) + 1
