"""Depth images to 2D laser scans.

Pinhole back-projection gives camera-frame points; the sensor pose (height
above floor, downward pitch, planar offset) carries them into a floor-level
frame; a height band filters out the floor and overhangs; the survivors are
binned by bearing, each bin keeping its closest planar range.

Conventions: camera frame is z forward, x right, y down. The level frames are
x forward, y left, z up. Pitch is positive when the head is tilted down.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from greeterbot import pgm
from greeterbot.core import LaserScan, Pose2D, compose, expected_beam_count


@dataclass
class DepthImage:
    """Depth in meters, row-major; 0 or NaN marks no return."""

    width: int
    height: int
    depths: np.ndarray

    def __post_init__(self):
        self.depths = np.asarray(self.depths, dtype=np.float64)
        if self.depths.shape != (self.height, self.width):
            raise ValueError(
                f"depths shape {self.depths.shape} != (height={self.height}, width={self.width})"
            )

    @classmethod
    def from_array(cls, depths: np.ndarray) -> "DepthImage":
        depths = np.asarray(depths, dtype=np.float64)
        return cls(depths.shape[1], depths.shape[0], depths)


@dataclass(frozen=True)
class CameraIntrinsics:
    fx: float
    fy: float
    cx: float
    cy: float

    def __post_init__(self):
        if self.fx <= 0 or self.fy <= 0:
            raise ValueError("focal lengths must be > 0")


@dataclass(frozen=True)
class SensorPose:
    """Sensor mount: height above the floor, downward pitch, planar offset
    from the robot base."""

    height: float = 1.2
    pitch: float = 0.0
    offset: Pose2D = field(default_factory=Pose2D)

    def __post_init__(self):
        if self.height <= 0:
            raise ValueError("sensor height must be > 0")


@dataclass(frozen=True)
class ScanConfig:
    angle_min: float = -math.pi / 2
    angle_max: float = math.pi / 2
    angle_increment: float = math.pi / 180
    range_min: float = 0.1
    range_max: float = 8.0
    h_min: float = 0.05  # skip floor returns from the tilted head
    h_max: float = 1.5

    def __post_init__(self):
        if self.angle_increment <= 0:
            raise ValueError("angle_increment must be > 0")
        if self.h_min >= self.h_max:
            raise ValueError("h_min must be < h_max")

    @property
    def beam_count(self) -> int:
        return expected_beam_count(self.angle_min, self.angle_max, self.angle_increment)


def depth_to_points(d: DepthImage, k: CameraIntrinsics) -> np.ndarray:
    """(N, 3) camera-frame points for every pixel with a positive finite depth:
    x = (u - cx) z / fx, y = (v - cy) z / fy."""
    us, vs = np.meshgrid(np.arange(d.width), np.arange(d.height))
    z = d.depths
    keep = np.isfinite(z) & (z > 0)
    z = z[keep]
    x = (us[keep] - k.cx) * z / k.fx
    y = (vs[keep] - k.cy) * z / k.fy
    return np.column_stack([x, y, z])


def camera_axes(pitch: float) -> np.ndarray:
    """Columns are the camera x/y/z axes expressed in the level sensor frame
    (x forward, y left, z up) for a downward pitch."""
    sp, cp = math.sin(pitch), math.cos(pitch)
    x_axis = (0.0, -1.0, 0.0)         # camera right
    y_axis = (-sp, 0.0, -cp)          # camera down
    z_axis = (cp, 0.0, -sp)           # optical axis
    return np.array([x_axis, y_axis, z_axis]).T


def transform_points(cloud: np.ndarray, sp: SensorPose, base: Pose2D = Pose2D()) -> np.ndarray:
    """Camera-frame points to the map frame: (N, 3) of (x, y, floor height).

    Pitch rotation, camera-to-world axis mapping, sensor height, then the
    planar sensor offset and base pose. The third column is the height above
    the floor, exposed for band filtering.
    """
    cloud = np.asarray(cloud, dtype=np.float64).reshape(-1, 3)
    level = cloud @ camera_axes(sp.pitch).T
    level[:, 2] += sp.height

    planar = compose(base, sp.offset)
    c, s = math.cos(planar.theta), math.sin(planar.theta)
    out = np.empty_like(level)
    out[:, 0] = planar.x + level[:, 0] * c - level[:, 1] * s
    out[:, 1] = planar.y + level[:, 0] * s + level[:, 1] * c
    out[:, 2] = level[:, 2]
    return out


def points_to_scan(cloud: np.ndarray, cfg: ScanConfig = ScanConfig()) -> LaserScan:
    """Bin robot-frame points into a planar scan.

    cloud: (N, 3) of (x forward, y left, floor height). Points outside the
    height band or range limits are dropped; each bearing bin keeps the
    minimum planar range; empty bins are no-return. Bins are half-open in
    bearing, so a boundary point lands in the bin whose low edge it sits on.
    """
    cloud = np.asarray(cloud, dtype=np.float64).reshape(-1, 3)
    n_bins = cfg.beam_count
    ranges = np.full(n_bins, np.inf)

    if cloud.size:
        heights = cloud[:, 2]
        keep = (heights >= cfg.h_min) & (heights <= cfg.h_max)
        xy = cloud[keep, :2]
        r = np.hypot(xy[:, 0], xy[:, 1])
        in_range = (r >= cfg.range_min) & (r <= cfg.range_max)
        xy, r = xy[in_range], r[in_range]
        phi = np.arctan2(xy[:, 1], xy[:, 0])
        bins = np.floor((phi - cfg.angle_min) / cfg.angle_increment).astype(int)
        ok = (bins >= 0) & (bins < n_bins)
        np.minimum.at(ranges, bins[ok], r[ok])

    ranges[np.isinf(ranges)] = np.nan
    return LaserScan(cfg.angle_min, cfg.angle_max, cfg.angle_increment,
                     cfg.range_min, cfg.range_max, ranges)


def depth_to_scan(d: DepthImage, k: CameraIntrinsics, sp: SensorPose,
                  cfg: ScanConfig = ScanConfig()) -> LaserScan:
    """Full pipeline in the robot base frame."""
    points = transform_points(depth_to_points(d, k), sp, Pose2D())
    return points_to_scan(points, cfg)


# ---------------------------------------------------------------------------
# fixtures on disk: 16-bit PGM where pixel value = millimeters, plus a JSON
# sidecar with intrinsics and mount

def write_depth_fixture(pgm_path, calib_path, d: DepthImage, k: CameraIntrinsics,
                        sp: SensorPose) -> None:
    mm = np.where(np.isfinite(d.depths) & (d.depths > 0),
                  np.clip(d.depths * 1000.0, 0, 65535), 0.0)
    pgm.write_pgm(pgm_path, mm.round().astype(np.uint16), 65535)
    with open(calib_path, "w", encoding="utf-8") as f:
        json.dump({"fx": k.fx, "fy": k.fy, "cx": k.cx, "cy": k.cy,
                   "height": sp.height, "pitch": sp.pitch}, f)


def read_depth_fixture(pgm_path, calib_path) -> tuple[DepthImage, CameraIntrinsics, SensorPose]:
    mm = pgm.read_pgm(pgm_path)
    if mm.dtype != np.uint16:
        raise pgm.PgmError(f"{pgm_path}: depth fixtures must be 16-bit PGM")
    depths = mm.astype(np.float64) / 1000.0
    with open(calib_path, encoding="utf-8") as f:
        calib = json.load(f)
    k = CameraIntrinsics(calib["fx"], calib["fy"], calib["cx"], calib["cy"])
    sp = SensorPose(calib["height"], calib["pitch"])
    return DepthImage.from_array(depths), k, sp
