"""Deterministic simulated robot and world.

Map loading in the map-server YAML/PGM convention, grid-traversal raycasting,
2.5D depth rendering (obstacles are infinite-height walls on a flat floor),
velocity stepping with collision clamping and noisy odometry, and the hardware
event bus, all on a simulated clock. Same seed and command log, same world
trajectory and event stream, bit for bit.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numpy as np
import yaml

from greeterbot import pgm
from greeterbot.core import (
    UNKNOWN,
    LaserScan,
    OccupancyGrid,
    Pose2D,
    compose,
    invert,
    normalize_angle,
    world_to_cell,
)
from greeterbot.faces.image import Image
from greeterbot.localize import (
    MotionNoise,
    OdomDelta,
    ZERO_NOISE,
    apply_odom_delta,
    odom_delta_between,
    sample_noisy_delta,
)
from greeterbot.percept import CameraIntrinsics, SensorPose
from greeterbot.simworld.clock import SimClock
from greeterbot.simworld.events import EventBus, HALTED, LED_STATE, PICTURE_TAKEN

LED_PATTERN = "blink-blue-green"
LED_TOGGLE_PERIOD = 0.25  # 2 Hz blink


class MapError(Exception):
    """Map file missing or malformed."""


def load_map(yaml_path) -> OccupancyGrid:
    """Occupancy grid from a map YAML and its PGM image.

    Pixel value v becomes occupancy p = (255 - v) / 255, or v / 255 when
    negate is set; p above occupied_thresh is occupied, below free_thresh is
    free, anything between is unknown. Image row 0 is the top of the map, so
    rows are flipped into the grid's bottom-up order.
    """
    try:
        with open(yaml_path, encoding="utf-8") as f:
            meta = yaml.safe_load(f)
    except FileNotFoundError as exc:
        raise MapError(f"map yaml not found: {yaml_path}") from exc
    except yaml.YAMLError as exc:
        raise MapError(f"{yaml_path}: invalid YAML ({exc})") from exc
    if not isinstance(meta, dict):
        raise MapError(f"{yaml_path}: expected a mapping at top level")

    for required in ("image", "resolution"):
        if required not in meta:
            raise MapError(f"{yaml_path}: missing field '{required}'")
    image_path = meta["image"]
    if not os.path.isabs(image_path):
        image_path = os.path.join(os.path.dirname(os.path.abspath(yaml_path)), image_path)

    try:
        resolution = float(meta["resolution"])
        origin_vals = meta.get("origin", [0.0, 0.0, 0.0])
        origin = Pose2D(float(origin_vals[0]), float(origin_vals[1]), float(origin_vals[2]))
        negate = int(meta.get("negate", 0))
        occupied_thresh = float(meta.get("occupied_thresh", 0.65))
        free_thresh = float(meta.get("free_thresh", 0.196))
    except (TypeError, ValueError, IndexError) as exc:
        raise MapError(f"{yaml_path}: bad field value ({exc})") from exc

    try:
        pixels = pgm.read_pgm(image_path)
    except FileNotFoundError as exc:
        raise MapError(f"map image not found: {image_path}") from exc
    except pgm.PgmError as exc:
        raise MapError(f"{image_path}: {exc}") from exc
    if pixels.dtype != np.uint8:
        raise MapError(f"{image_path}: map images must be 8-bit PGM")

    v = pixels.astype(np.float64)
    p = v / 255.0 if negate else (255.0 - v) / 255.0
    cells = np.full(p.shape, UNKNOWN)
    cells[p > occupied_thresh] = 1.0
    cells[p < free_thresh] = 0.0
    cells = np.flipud(cells)  # image top row becomes the highest-y grid row
    h, w = cells.shape
    return OccupancyGrid(w, h, resolution, origin, cells)


# ---------------------------------------------------------------------------
# raycasting

def raycast_batch(grid: OccupancyGrid, xs, ys, bearings, max_range: float,
                  occupied: np.ndarray | None = None) -> np.ndarray:
    """Grid-traversal raycast for N rays at once; NaN marks no-return.

    Returns the distance to the boundary of the first occupied cell. Unknown
    cells count as free. Rays must start inside the grid; a ray that leaves
    never re-enters (the grid is convex), so it ends as no-return.
    """
    if occupied is None:
        occupied = grid.occupied_mask()
    o = invert(grid.origin)
    co, so = math.cos(o.theta), math.sin(o.theta)
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    bearings = np.asarray(bearings, dtype=np.float64)

    gx = (o.x + xs * co - ys * so) / grid.resolution
    gy = (o.y + xs * so + ys * co) / grid.resolution
    ang = bearings + o.theta
    dx, dy = np.cos(ang), np.sin(ang)

    n = len(gx)
    ix = np.floor(gx).astype(np.int64)
    iy = np.floor(gy).astype(np.int64)
    step_x = np.where(dx > 0, 1, -1)
    step_y = np.where(dy > 0, 1, -1)
    with np.errstate(divide="ignore"):
        t_delta_x = np.abs(1.0 / dx)
        t_delta_y = np.abs(1.0 / dy)
    next_x = np.where(dx > 0, ix + 1.0, ix)
    next_y = np.where(dy > 0, iy + 1.0, iy)
    with np.errstate(divide="ignore", invalid="ignore"):
        t_max_x = np.where(dx != 0, (next_x - gx) / dx, np.inf)
        t_max_y = np.where(dy != 0, (next_y - gy) / dy, np.inf)

    max_t = max_range / grid.resolution
    t_entry = np.zeros(n)
    result = np.full(n, np.nan)
    active = np.ones(n, dtype=bool)
    h, w = occupied.shape

    # a ray crosses at most one cell boundary per iteration
    for _ in range(2 * (w + h) + 4):
        if not active.any():
            break
        inside = active & (ix >= 0) & (ix < w) & (iy >= 0) & (iy < h)
        if inside.any():
            hit = np.zeros(n, dtype=bool)
            hit[inside] = occupied[iy[inside], ix[inside]]
            result[hit] = t_entry[hit] * grid.resolution
            active &= ~hit
        # leaving the grid ends the ray
        active &= (ix >= -1) & (ix <= w) & (iy >= -1) & (iy <= h)

        go_x = active & (t_max_x <= t_max_y)
        go_y = active & ~go_x
        t_entry[go_x] = t_max_x[go_x]
        t_entry[go_y] = t_max_y[go_y]
        ix[go_x] += step_x[go_x]
        iy[go_y] += step_y[go_y]
        t_max_x[go_x] += t_delta_x[go_x]
        t_max_y[go_y] += t_delta_y[go_y]
        active &= t_entry <= max_t
    return result


def raycast(grid: OccupancyGrid, origin: Pose2D, bearing: float,
            max_range: float) -> float | None:
    """Distance to the first occupied cell along a single ray; None beyond
    max_range. The origin must sit in free (or unknown) space."""
    cell = world_to_cell(grid, origin)
    if cell is not None and grid.is_occupied(*cell):
        raise ValueError(f"raycast origin {origin} is inside an occupied cell")
    r = raycast_batch(grid, [origin.x], [origin.y], [bearing], max_range)[0]
    return None if not np.isfinite(r) else float(r)


def ground_truth_scan(grid: OccupancyGrid, pose: Pose2D, angle_min: float,
                      angle_max: float, increment: float, range_min: float,
                      range_max: float,
                      occupied: np.ndarray | None = None) -> LaserScan:
    """Robot-frame scan raycast from the true pose."""
    n = int(math.floor((angle_max - angle_min) / increment + 1e-9)) + 1
    rel = angle_min + np.arange(n) * increment
    ranges = raycast_batch(
        grid,
        np.full(n, pose.x), np.full(n, pose.y),
        pose.theta + rel, range_max, occupied,
    )
    ranges[np.isfinite(ranges) & (ranges < range_min)] = np.nan
    return LaserScan(angle_min, angle_max, increment, range_min, range_max, ranges)


# ---------------------------------------------------------------------------
# depth rendering

def render_depth(grid: OccupancyGrid, base_pose: Pose2D, k: CameraIntrinsics,
                 sp: SensorPose, size: tuple[int, int] = (60, 80),
                 max_range: float = 10.0):
    """2.5D depth image: per-pixel planar rays against full-height walls and
    the floor plane. Depth is the camera-frame z of the first hit; 0 marks no
    return. Consistent with the pinhole back-projection by construction.
    """
    from greeterbot.percept import DepthImage  # local import to avoid a cycle

    rows, cols = size
    sensor = compose(base_pose, sp.offset)
    spitch, cpitch = math.sin(sp.pitch), math.cos(sp.pitch)

    a = (np.arange(cols) - k.cx) / k.fx          # camera x slope per column
    b = (np.arange(rows) - k.cy) / k.fy          # camera y slope per row
    # level-frame direction for ray (a, b, 1)
    dir_fwd = cpitch - b[:, None] * spitch + 0.0 * a[None, :]
    dir_left = np.broadcast_to(-a[None, :], (rows, cols)).copy()
    dir_up = (-b[:, None] * cpitch - spitch) + 0.0 * a[None, :]

    hyp = np.hypot(dir_fwd, dir_left)
    bearing = np.arctan2(dir_left, dir_fwd) + sensor.theta

    planar = hyp > 1e-12
    wall_r = np.full((rows, cols), np.inf)
    if planar.any():
        flat = raycast_batch(
            grid,
            np.full(planar.sum(), sensor.x), np.full(planar.sum(), sensor.y),
            bearing[planar], max_range,
        )
        flat[~np.isfinite(flat)] = np.inf
        wall_r[planar] = flat

    with np.errstate(divide="ignore", invalid="ignore"):
        t_wall = np.where(planar, wall_r / np.where(planar, hyp, 1.0), np.inf)
        t_floor = np.where(dir_up < 0, -sp.height / dir_up, np.inf)
    # the floor plane is cut off at the sensor's planar range limit
    t_floor = np.where(t_floor * hyp <= max_range, t_floor, np.inf)

    t = np.minimum(t_wall, t_floor)
    depths = np.where(np.isfinite(t), t, 0.0)
    return DepthImage.from_array(depths)


# ---------------------------------------------------------------------------
# the stepped world

@dataclass
class WorldState:
    map: OccupancyGrid
    truth_pose: Pose2D
    odom_pose: Pose2D
    clock: float


class World:
    """Single-owner simulated robot. One loop steps it; everything it emits
    goes through the event bus in clock order."""

    def __init__(self, grid: OccupancyGrid, start_pose: Pose2D, seed: int = 0,
                 clock: SimClock | None = None, bus: EventBus | None = None,
                 noise: MotionNoise = ZERO_NOISE):
        cell = world_to_cell(grid, start_pose)
        if cell is None or grid.is_occupied(*cell):
            raise ValueError(f"start pose {start_pose} is not in free map space")
        self.map = grid
        self.truth_pose = start_pose
        self.odom_pose = start_pose
        self.noise = noise
        self.clock = clock if clock is not None else SimClock()
        self.bus = bus if bus is not None else EventBus()
        self.rng = np.random.default_rng(seed)
        self.camera_subject: Image | None = None
        self._led_blinking = False
        self._led_lit = False
        self._next_toggle: float | None = None

    def state(self) -> WorldState:
        return WorldState(self.map, self.truth_pose, self.odom_pose, self.clock.now())

    # -- clock and LEDs ------------------------------------------------------

    def advance(self, dt: float) -> float:
        """Advance simulated time, materializing due LED toggles in order."""
        target = self.clock.now() + dt
        while self._led_blinking and self._next_toggle is not None and self._next_toggle <= target:
            step = self._next_toggle - self.clock.now()
            if step > 0:
                self.clock.advance(step)
            self._led_lit = not self._led_lit
            self.bus.emit(self.clock.now(), LED_STATE, pattern=LED_PATTERN, lit=self._led_lit)
            self._next_toggle += LED_TOGGLE_PERIOD
        remaining = target - self.clock.now()
        if remaining > 0:
            self.clock.advance(remaining)
        return self.clock.now()

    def set_led_blinking(self, on: bool) -> None:
        now = self.clock.now()
        if on and not self._led_blinking:
            self._led_blinking = True
            self._led_lit = True
            self.bus.emit(now, LED_STATE, pattern=LED_PATTERN, lit=True)
            self._next_toggle = now + LED_TOGGLE_PERIOD
        elif not on and self._led_blinking:
            self._led_blinking = False
            self._led_lit = False
            self._next_toggle = None
            self.bus.emit(now, LED_STATE, pattern="off", lit=False)

    # -- sensors -------------------------------------------------------------

    def take_picture(self) -> Image:
        img = self.camera_subject
        if img is None:
            img = Image.from_array(np.full((480, 640), 10, dtype=np.uint8))
        self.bus.emit(self.clock.now(), PICTURE_TAKEN,
                      width=img.width, height=img.height)
        return img

    def scan(self, angle_min=-math.pi / 2, angle_max=math.pi / 2,
             increment=math.pi / 90, range_min=0.1, range_max=8.0) -> LaserScan:
        return ground_truth_scan(self.map, self.truth_pose, angle_min, angle_max,
                                 increment, range_min, range_max)

    def render_depth(self, k: CameraIntrinsics, sp: SensorPose,
                     size=(60, 80), max_range=10.0):
        return render_depth(self.map, self.truth_pose, k, sp, size, max_range)

    # -- motion --------------------------------------------------------------

    def step(self, cmd, dt: float, noise: MotionNoise | None = None) -> OdomDelta:
        """Integrate a velocity command for dt; collisions clamp motion and
        emit Halted. Returns the odometry reading (true motion corrupted by
        the odometry noise model). The clock advances dt."""
        if dt <= 0:
            raise ValueError("dt must be > 0")
        noise = self.noise if noise is None else noise
        prev = self.truth_pose

        mid = prev.theta + cmd.omega * dt / 2.0
        c, s = math.cos(mid), math.sin(mid)
        disp_x = (cmd.vx * c - cmd.vy * s) * dt
        disp_y = (cmd.vx * s + cmd.vy * c) * dt

        # sub-step at half-cell resolution so walls cannot be tunneled through
        dist = math.hypot(disp_x, disp_y)
        subs = max(1, math.ceil(dist / (self.map.resolution / 2.0)))
        x, y = prev.x, prev.y
        moved = subs
        for i in range(1, subs + 1):
            nx = prev.x + disp_x * i / subs
            ny = prev.y + disp_y * i / subs
            cell = world_to_cell(self.map, Pose2D(nx, ny, 0.0))
            if cell is None or self.map.is_occupied(*cell):
                moved = i - 1
                self.bus.emit(self.clock.now(), HALTED, x=x, y=y)
                break
            x, y = nx, ny

        self.truth_pose = Pose2D(x, y, normalize_angle(
            prev.theta + cmd.omega * dt * (moved / subs if dist > 0 else 1.0)
        ))
        true_delta = odom_delta_between(prev, self.truth_pose)
        reading = sample_noisy_delta(true_delta, noise, self.rng)
        self.odom_pose = apply_odom_delta(self.odom_pose, reading)
        self.advance(dt)
        return reading

    def insert_obstacle(self, x: float, y: float, w: float, h: float) -> None:
        """Stamp a world-frame axis-aligned rectangle of occupied cells (in the
        map origin frame)."""
        grid = self.map
        res = grid.resolution
        x0 = math.floor((x - grid.origin.x) / res)
        y0 = math.floor((y - grid.origin.y) / res)
        x1 = math.ceil((x + w - grid.origin.x) / res)
        y1 = math.ceil((y + h - grid.origin.y) / res)
        grid.cells[max(0, y0):max(0, y1), max(0, x0):max(0, x1)] = 1.0
