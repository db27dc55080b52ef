"""Depth camera to 2D scan, compared against direct raycasts.

Renders a depth image from a pitched head in a simulated room, runs the
back-projection / height-band / binning pipeline, and checks a few bearings
against ground-truth rays.
"""

import math

import numpy as np

from greeterbot.core import Pose2D
from greeterbot.percept import CameraIntrinsics, ScanConfig, SensorPose, depth_to_scan
from greeterbot.simworld import raycast, render_depth
from greeterbot.simworld.builders import add_rect, box_map

grid = box_map(10.0, 10.0, 0.05)
add_rect(grid, 6.0, 2.0, 0.5, 6.0)
add_rect(grid, 2.0, 7.0, 3.0, 0.4)

pose = Pose2D(3.0, 4.0, 0.3)
camera = CameraIntrinsics(fx=60.0, fy=60.0, cx=39.5, cy=29.5)
mount = SensorPose(height=1.2, pitch=0.35)

depth = render_depth(grid, pose, camera, mount, size=(60, 80))
returns = np.isfinite(depth.depths) & (depth.depths > 0)
print(f"depth image 80x60, {returns.sum()} pixels with returns, "
      f"nearest {depth.depths[returns].min():.2f} m")

cfg = ScanConfig(angle_min=-0.6, angle_max=0.6, angle_increment=0.05)
scan = depth_to_scan(depth, camera, mount, cfg)

print("\nbearing   scan    raycast")
for bearing, r in zip(scan.bearings(), scan.ranges):
    truth = raycast(grid, pose, pose.theta + bearing, 10.0)
    scan_s = f"{r:6.2f}" if np.isfinite(r) else "  none"
    truth_s = f"{truth:6.2f}" if truth is not None else "  none"
    print(f"{math.degrees(bearing):7.1f}  {scan_s}  {truth_s}")
