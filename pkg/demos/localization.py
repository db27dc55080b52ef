"""Particle-filter localization on the bundled 20 x 20 m map.

The robot drives a weaving loop with noisy odometry; the filter tracks it from
360-degree scans. Watch the error and the particle spread shrink.
"""

import math

from greeterbot.assets import map_path
from greeterbot.core import Pose2D, VelocityCommand, normalize_angle
from greeterbot.localize import MclConfig, MclFilter, MotionNoise
from greeterbot.simworld import World, ground_truth_scan, load_map

grid = load_map(map_path("desk20"))
noise = MotionNoise(0.01, 0.01, 0.02, 0.01)
start = Pose2D(10.0, 4.0, 0.0)

world = World(grid, start, seed=8, noise=noise)
filt = MclFilter(grid, start, seed=9, config=MclConfig(particles=500, noise=noise))

print("cycle  err_xy   err_deg  spread(trace of cov)")
for cycle in range(30):
    omega = 0.35 if cycle % 3 else -0.2
    delta = world.step(VelocityCommand(vx=0.5, omega=omega), 0.3)
    scan = ground_truth_scan(grid, world.truth_pose, -math.pi, math.pi,
                             math.pi / 60, 0.1, 8.0)
    estimate, cov = filt.step(delta, scan)
    truth = world.truth_pose
    err_xy = math.hypot(estimate.x - truth.x, estimate.y - truth.y)
    err_th = abs(normalize_angle(estimate.theta - truth.theta))
    print(f"{cycle + 1:>5}  {err_xy:6.3f} m {math.degrees(err_th):7.2f}  "
          f"{cov.trace():.5f}")

print(f"\ntruth    ({truth.x:.2f}, {truth.y:.2f}, {truth.theta:.2f})")
print(f"estimate ({estimate.x:.2f}, {estimate.y:.2f}, {estimate.theta:.2f})")
