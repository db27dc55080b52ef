"""Closed-loop navigation: sense, check, step, localize, replan on blockage.

The planner works on a snapshot of the map taken when the goal arrives; new
obstacles only reach it through the scan, by stamping their cells into a local
copy and replanning. The live world map may keep changing underneath (that is
the point of the exercise).
"""

from __future__ import annotations

from dataclasses import dataclass, field

from greeterbot.core import Pose2D
from greeterbot.localize import MclConfig, MclFilter
from greeterbot.navigate import (
    ControllerConfig,
    Costmap,
    Path,
    PlanningError,
    check_collision,
    inflate,
    next_command,
    plan,
    stamp_obstacles,
)
from greeterbot.percept import CameraIntrinsics, ScanConfig, SensorPose, depth_to_scan
from greeterbot.simworld.events import HALTED, NAV_GOAL
from greeterbot.simworld.world import World

ARRIVED = "arrived"
ABORTED = "aborted"


@dataclass(frozen=True)
class NavConfig:
    camera: CameraIntrinsics = CameraIntrinsics(60.0, 60.0, 39.5, 29.5)
    sensor: SensorPose = SensorPose(height=1.2, pitch=0.45)
    scan: ScanConfig = ScanConfig(angle_min=-0.7, angle_max=0.7,
                                  angle_increment=0.02, range_min=0.15, range_max=6.0)
    controller: ControllerConfig = ControllerConfig(stop_distance=0.12)
    depth_size: tuple[int, int] = (60, 80)
    # the safety bubble (footprint + stop distance) must stay inside the
    # inflation radius, or following an optimal path would trigger halts
    inflation_radius: float = 0.5
    inflation_decay: float = 2.5
    plan_penalty: float = 8.0
    footprint_radius: float = 0.25
    dt: float = 0.15
    max_cycles: int = 800
    localizer: MclConfig = field(default_factory=lambda: MclConfig(particles=300))


@dataclass
class NavResult:
    status: str
    reason: str = ""
    cycles: int = 0
    replans: int = 0
    path: Path | None = None
    costmap: Costmap | None = None
    estimate: Pose2D | None = None
    replan_records: list[dict] = field(default_factory=list)


def navigation_loop(world: World, goal: Pose2D, cfg: NavConfig = NavConfig(),
                    seed: int = 0, on_cycle=None) -> NavResult:
    """Drive the simulated robot to the goal. Emits NavGoal at the start and
    Halted whenever a blockage forces a replan. on_cycle(world, cycle), when
    given, runs before each cycle (used to script mid-route changes)."""
    static_map = world.map.copy()
    costmap = inflate(static_map, cfg.inflation_radius, cfg.inflation_decay)
    stamped_grid = static_map
    mcl = MclFilter(static_map, world.truth_pose, seed=seed, config=cfg.localizer)
    estimate, _ = mcl.estimate()

    world.bus.emit(world.clock.now(), NAV_GOAL, x=goal.x, y=goal.y, theta=goal.theta)
    try:
        path = plan(costmap, estimate, goal, cfg.plan_penalty)
    except PlanningError as exc:
        return NavResult(ABORTED, reason=str(exc), costmap=costmap)

    result = NavResult(ARRIVED, path=path, costmap=costmap)

    def sense():
        depth = world.render_depth(cfg.camera, cfg.sensor, cfg.depth_size,
                                   max_range=cfg.scan.range_max + 2.0)
        return depth_to_scan(depth, cfg.camera, cfg.sensor, cfg.scan)

    scan = sense()
    for cycle in range(cfg.max_cycles):
        result.cycles = cycle + 1
        if on_cycle is not None:
            on_cycle(world, cycle)
        cmd = next_command(path, estimate, cfg.controller)
        if cmd is None:
            result.path = path
            result.estimate = estimate
            return result

        if check_collision(scan, cmd, cfg.dt, cfg.footprint_radius,
                           cfg.controller.stop_distance):
            world.bus.emit(world.clock.now(), HALTED,
                           x=estimate.x, y=estimate.y, reason="obstacle")
            costmap, stamped_grid = stamp_obstacles(
                costmap, stamped_grid, scan, estimate,
                cfg.inflation_radius, cfg.inflation_decay,
            )
            result.replans += 1
            result.costmap = costmap
            try:
                path = plan(costmap, estimate, goal, cfg.plan_penalty)
            except PlanningError as exc:
                return NavResult(ABORTED, reason=str(exc), cycles=result.cycles,
                                 replans=result.replans, costmap=costmap,
                                 replan_records=result.replan_records)
            result.replan_records.append(
                {"start": estimate, "cost": path.total_cost, "costmap": costmap}
            )
            # fresh look before moving again
            scan = sense()
            continue

        delta = world.step(cmd, cfg.dt)
        scan = sense()
        estimate, _ = mcl.step(delta, scan)

    return NavResult(ABORTED, reason="cycle limit", cycles=cfg.max_cycles,
                     replans=result.replans, path=path, costmap=costmap,
                     estimate=estimate, replan_records=result.replan_records)
