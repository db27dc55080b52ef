"""Costmap, optimal path, and a closed-loop run with a surprise obstacle.

Prints the inflated map with the planned route, then drives it while a wall
drops mid-route, forcing a halt and a replanned detour.
"""

from greeterbot.core import Pose2D
from greeterbot.navigate import ascii_render, inflate, plan
from greeterbot.orchestrator import NavConfig, navigation_loop
from greeterbot.simworld import World
from greeterbot.simworld.builders import add_rect, box_map


def room():
    grid = box_map(8.0, 8.0, 0.1)
    add_rect(grid, 3.0, 0.0, 0.3, 3.0)
    return grid


start, goal = Pose2D(1.0, 4.0, 0.0), Pose2D(7.0, 4.0, 0.0)

costmap = inflate(room(), 0.5, decay=2.5)
path = plan(costmap, start, goal, penalty=8.0)
print(f"planned route: {len(path.waypoints)} waypoints, cost {path.total_cost:.2f}")
print(ascii_render(costmap, path, start, goal))

print("\nnow driving it; a wall drops once the robot passes x = 2.5")
world = World(room(), start, seed=21)
dropped = []


def drop_wall(w, cycle):
    if not dropped and w.truth_pose.x > 2.5:
        w.insert_obstacle(4.5, 2.8, 0.3, 2.4)
        dropped.append(cycle)
        print(f"  cycle {cycle}: obstacle dropped in the corridor")


cfg = NavConfig(depth_size=(30, 40), dt=0.2, max_cycles=500)
result = navigation_loop(world, goal, cfg, seed=21, on_cycle=drop_wall)

print(f"\noutcome: {result.status} after {result.cycles} cycles, "
      f"{result.replans} replan(s)")
halts = world.bus.of_kind("Halted")
print(f"halts emitted: {len(halts)}")
print("\nthe detour on the stamped costmap:")
print(ascii_render(result.costmap, result.path, world.truth_pose, goal))
