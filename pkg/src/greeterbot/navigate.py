"""Costmap inflation, grid planning, and velocity command generation.

Dijkstra is the reference planner: its optimality makes the cost oracle
unambiguous. Edge weights prefer clearance by scaling move length with the
mean inflated cost of the endpoints. The controller is pure pursuit adapted
to a holonomic base, so it can translate sideways while correcting heading.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from greeterbot.core import (
    LaserScan,
    OccupancyGrid,
    Pose2D,
    VelocityCommand,
    cell_center,
    normalize_angle,
    world_to_cell,
)

LETHAL = 255
MAX_INFLATED = 253

# deterministic expansion order: E, N, W, S, NE, NW, SW, SE
NEIGHBORS_8 = ((1, 0), (0, 1), (-1, 0), (0, -1), (1, 1), (-1, 1), (-1, -1), (1, -1))
NEIGHBORS_4 = ((1, 0), (0, 1), (-1, 0), (0, -1))


class PlanningError(Exception):
    pass


class InvalidEndpointError(PlanningError):
    """Start or goal is lethal or outside the map."""


class UnreachableError(PlanningError):
    """No route connects start and goal."""


@dataclass
class Costmap:
    width: int
    height: int
    resolution: float
    origin: Pose2D
    costs: np.ndarray  # (height, width), 0..253 inflated, 255 lethal

    def __post_init__(self):
        self.costs = np.asarray(self.costs)
        if self.costs.shape != (self.height, self.width):
            raise ValueError("costs shape disagrees with dimensions")

    def cell_of(self, p: Pose2D) -> tuple[int, int] | None:
        return world_to_cell(self._grid_view(), p)

    def center_of(self, ix: int, iy: int) -> Pose2D:
        return cell_center(self._grid_view(), ix, iy)

    def _grid_view(self) -> OccupancyGrid:
        return OccupancyGrid(self.width, self.height, self.resolution, self.origin,
                             np.zeros((self.height, self.width)))

    def is_lethal(self, ix: int, iy: int) -> bool:
        return self.costs[iy, ix] >= LETHAL


def inflate(grid: OccupancyGrid, inflation_radius: float, decay: float = 5.0) -> Costmap:
    """Occupied cells are lethal; free cells within the radius take
    round(253 * exp(-decay * d)) with d the distance to the nearest obstacle,
    and cost 0 beyond. Distances come from the same exact transform the
    localizer uses."""
    if inflation_radius < 0:
        raise ValueError("inflation_radius must be >= 0")
    occupied = grid.occupied_mask()
    costs = np.zeros(occupied.shape, dtype=np.int64)
    if occupied.any():
        d = ndimage.distance_transform_edt(~occupied) * grid.resolution
        within = (~occupied) & (d <= inflation_radius)
        costs[within] = np.round(MAX_INFLATED * np.exp(-decay * d[within])).astype(np.int64)
    costs[occupied] = LETHAL
    return Costmap(grid.width, grid.height, grid.resolution, grid.origin, costs)


@dataclass
class Path:
    """Waypoints at cell centers; each theta points at the next waypoint and
    the last repeats the previous one."""

    waypoints: list[Pose2D]
    total_cost: float
    cells: list[tuple[int, int]] = field(default_factory=list)

    def goal(self) -> Pose2D:
        return self.waypoints[-1]


def edge_weight(length_cells: float, cost_a: float, cost_b: float, penalty: float) -> float:
    return length_cells * (1.0 + (cost_a + cost_b) / 2.0 / MAX_INFLATED * penalty)


def plan(costmap: Costmap, start: Pose2D, goal: Pose2D, penalty: float = 5.0,
         connectivity: int = 8) -> Path:
    """Minimum-weight 8-connected path by Dijkstra; deterministic tie-breaking
    by the fixed neighbor enumeration order and strict relaxation."""
    start_cell = costmap.cell_of(start)
    goal_cell = costmap.cell_of(goal)
    for name, cell in (("start", start_cell), ("goal", goal_cell)):
        if cell is None:
            raise InvalidEndpointError(f"{name} is outside the map")
        if costmap.is_lethal(*cell):
            raise InvalidEndpointError(f"{name} cell {cell} is lethal")

    neighbors = NEIGHBORS_8 if connectivity == 8 else NEIGHBORS_4
    costs = costmap.costs
    w, h = costmap.width, costmap.height

    dist = {start_cell: 0.0}
    parent: dict[tuple[int, int], tuple[int, int]] = {}
    heap = [(0.0, 0, start_cell)]
    counter = 0
    done = set()
    while heap:
        d, _, cell = heapq.heappop(heap)
        if cell in done:
            continue
        if cell == goal_cell:
            break
        done.add(cell)
        x, y = cell
        c_here = float(costs[y, x])
        for dx, dy in neighbors:
            nx, ny = x + dx, y + dy
            if not (0 <= nx < w and 0 <= ny < h) or costs[ny, nx] >= LETHAL:
                continue
            length = math.sqrt(2.0) if dx and dy else 1.0
            nd = d + edge_weight(length, c_here, float(costs[ny, nx]), penalty)
            if nd < dist.get((nx, ny), math.inf):
                dist[(nx, ny)] = nd
                parent[(nx, ny)] = cell
                counter += 1
                heapq.heappush(heap, (nd, counter, (nx, ny)))
    if goal_cell not in dist:
        raise UnreachableError(f"no route from {start_cell} to {goal_cell}")

    cells = [goal_cell]
    while cells[-1] != start_cell:
        cells.append(parent[cells[-1]])
    cells.reverse()

    centers = [costmap.center_of(*c) for c in cells]
    waypoints = []
    for i, c in enumerate(centers):
        if i + 1 < len(centers):
            theta = math.atan2(centers[i + 1].y - c.y, centers[i + 1].x - c.x)
        elif waypoints:
            theta = waypoints[-1].theta
        else:
            theta = 0.0
        waypoints.append(Pose2D(c.x, c.y, theta))
    return Path(waypoints, dist[goal_cell], cells)


# ---------------------------------------------------------------------------
# path following

@dataclass(frozen=True)
class ControllerConfig:
    lookahead: float = 0.5
    v_max: float = 0.5
    omega_max: float = 1.5
    goal_tolerance_xy: float = 0.15
    goal_tolerance_theta: float = 0.3
    stop_distance: float = 0.3
    heading_gain: float = 1.5
    approach_gain: float = 1.5  # slows translation near the goal

    def __post_init__(self):
        if min(self.lookahead, self.v_max, self.omega_max, self.goal_tolerance_xy,
               self.goal_tolerance_theta, self.stop_distance) <= 0:
            raise ValueError("controller parameters must be > 0")


def _closest_on_polyline(points: list[Pose2D], x: float, y: float) -> tuple[int, float, float]:
    """(segment index, parameter along segment, arc length up to that point)."""
    best = (0, 0.0, 0.0)
    best_d2 = math.inf
    arc = 0.0
    for i in range(len(points) - 1):
        ax, ay = points[i].x, points[i].y
        bx, by = points[i + 1].x, points[i + 1].y
        dx, dy = bx - ax, by - ay
        L2 = dx * dx + dy * dy
        t = 0.0 if L2 == 0 else max(0.0, min(1.0, ((x - ax) * dx + (y - ay) * dy) / L2))
        px, py = ax + t * dx, ay + t * dy
        d2 = (x - px) ** 2 + (y - py) ** 2
        if d2 < best_d2:
            best_d2 = d2
            best = (i, t, arc + t * math.sqrt(L2))
        arc += math.sqrt(L2)
    return best


def _point_at_arc(points: list[Pose2D], s: float) -> tuple[float, float, float]:
    """Position and path heading at arc length s (clamped to the path end)."""
    remaining = s
    for i in range(len(points) - 1):
        ax, ay = points[i].x, points[i].y
        bx, by = points[i + 1].x, points[i + 1].y
        L = math.hypot(bx - ax, by - ay)
        if remaining <= L or i == len(points) - 2:
            t = 1.0 if L == 0 else min(1.0, remaining / L)
            return ax + t * (bx - ax), ay + t * (by - ay), points[i].theta
        remaining -= L
    last = points[-1]
    return last.x, last.y, last.theta


def next_command(path: Path, pose: Pose2D,
                 cfg: ControllerConfig = ControllerConfig()) -> VelocityCommand | None:
    """Pure pursuit toward the first path point one lookahead past the closest
    point; None signals arrival within both goal tolerances."""
    if not path.waypoints:
        raise ValueError("path must be non-empty")
    goal = path.goal()
    dist_goal = math.hypot(goal.x - pose.x, goal.y - pose.y)
    heading_err_goal = normalize_angle(goal.theta - pose.theta)
    if dist_goal <= cfg.goal_tolerance_xy and abs(heading_err_goal) <= cfg.goal_tolerance_theta:
        return None

    if dist_goal <= cfg.goal_tolerance_xy:
        # in position: rotate in place onto the goal heading
        omega = max(-cfg.omega_max, min(cfg.omega_max, cfg.heading_gain * heading_err_goal))
        return VelocityCommand(0.0, 0.0, omega)

    if len(path.waypoints) == 1:
        tx, ty, t_theta = goal.x, goal.y, goal.theta
    else:
        _, _, arc = _closest_on_polyline(path.waypoints, pose.x, pose.y)
        tx, ty, t_theta = _point_at_arc(path.waypoints, arc + cfg.lookahead)

    wx, wy = tx - pose.x, ty - pose.y
    c, s = math.cos(-pose.theta), math.sin(-pose.theta)
    rx = wx * c - wy * s
    ry = wx * s + wy * c
    norm = math.hypot(rx, ry)
    speed = min(cfg.v_max, cfg.approach_gain * dist_goal)
    if norm > 1e-12:
        vx, vy = speed * rx / norm, speed * ry / norm
    else:
        vx = vy = 0.0
    heading_err = normalize_angle(t_theta - pose.theta)
    omega = max(-cfg.omega_max, min(cfg.omega_max, cfg.heading_gain * heading_err))
    return VelocityCommand(vx, vy, omega)


# ---------------------------------------------------------------------------
# reactive safety

def check_collision(scan: LaserScan, cmd: VelocityCommand, dt: float,
                    footprint_radius: float = 0.3, stop_distance: float = 0.3) -> bool:
    """True (blocked) when any finite return lies within footprint_radius +
    stop_distance of the straight-line swept position over [0, dt]. Scan and
    command share the robot frame."""
    if dt <= 0:
        raise ValueError("dt must be > 0")
    finite = np.isfinite(scan.ranges)
    if not finite.any():
        return False
    r = scan.ranges[finite]
    phi = scan.bearings()[finite]
    px = r * np.cos(phi)
    py = r * np.sin(phi)

    ex, ey = cmd.vx * dt, cmd.vy * dt
    L2 = ex * ex + ey * ey
    if L2 < 1e-18:
        d = np.hypot(px, py)
    else:
        t = np.clip((px * ex + py * ey) / L2, 0.0, 1.0)
        d = np.hypot(px - t * ex, py - t * ey)
    return bool((d <= footprint_radius + stop_distance).any())


def stamp_obstacles(costmap: Costmap, grid: OccupancyGrid, scan: LaserScan,
                    pose: Pose2D, inflation_radius: float,
                    decay: float = 5.0) -> tuple[Costmap, OccupancyGrid]:
    """Mark scan returns as occupied in a copy of the static map and re-inflate.
    Used when a new obstacle blocks the route: halt, stamp, replan."""
    stamped = grid.copy()
    finite = np.isfinite(scan.ranges)
    r = scan.ranges[finite]
    phi = scan.bearings()[finite] + pose.theta
    exs = pose.x + r * np.cos(phi)
    eys = pose.y + r * np.sin(phi)
    for x, y in zip(exs, eys):
        cell = world_to_cell(stamped, Pose2D(float(x), float(y), 0.0))
        if cell is not None:
            stamped.cells[cell[1], cell[0]] = 1.0
    return inflate(stamped, inflation_radius, decay), stamped


# ---------------------------------------------------------------------------
# text rendering

def ascii_render(costmap: Costmap, path: Path | None = None,
                 start: Pose2D | None = None, goal: Pose2D | None = None) -> str:
    """Map as text: '#' obstacles, '+' inflation, '*' path, '.' free."""
    chars = np.full((costmap.height, costmap.width), ".", dtype="<U1")
    chars[costmap.costs > 0] = "+"
    chars[costmap.costs >= LETHAL] = "#"
    if path is not None:
        for ix, iy in path.cells:
            chars[iy, ix] = "*"
    for mark, p in (("S", start), ("G", goal)):
        if p is not None:
            cell = costmap.cell_of(p)
            if cell is not None:
                chars[cell[1], cell[0]] = mark
    rows = ["".join(row) for row in chars[::-1]]  # highest y on top
    return "\n".join(rows)
