"""greeterbot: a desk-scale service-robot stack.

Voice endpointing, streaming speech transcription with a latency model,
face-gallery recognition, depth-image perception, Monte Carlo localization,
costmap planning, a tablet bridge, and a session orchestrator, all runnable
against a deterministic simulated robot and world.
"""

from greeterbot.core import (
    LaserScan,
    OccupancyGrid,
    Pose2D,
    VelocityCommand,
    cell_center,
    compose,
    invert,
    normalize_angle,
    world_to_cell,
)

__all__ = [
    "LaserScan",
    "OccupancyGrid",
    "Pose2D",
    "VelocityCommand",
    "cell_center",
    "compose",
    "invert",
    "normalize_angle",
    "world_to_cell",
]

__version__ = "0.1.0"
