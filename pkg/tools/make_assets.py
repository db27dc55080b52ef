#!/usr/bin/env python3
"""Regenerate the bundled map assets from their builders."""

import pathlib

import yaml

from greeterbot import pgm
from greeterbot.simworld.builders import desk20_map, grid_to_pgm_pixels, office10_map

MAPS = pathlib.Path(__file__).resolve().parent.parent / "src/greeterbot/data/maps"


def write(name, grid):
    MAPS.mkdir(parents=True, exist_ok=True)
    pgm.write_pgm(MAPS / f"{name}.pgm", grid_to_pgm_pixels(grid), 255)
    meta = {
        "image": f"{name}.pgm",
        "resolution": grid.resolution,
        "origin": [grid.origin.x, grid.origin.y, grid.origin.theta],
        "negate": 0,
        "occupied_thresh": 0.65,
        "free_thresh": 0.196,
    }
    (MAPS / f"{name}.yaml").write_text(yaml.safe_dump(meta, sort_keys=False))
    print(f"wrote {name}: {grid.width}x{grid.height} @ {grid.resolution} m")


if __name__ == "__main__":
    write("desk20", desk20_map())
    write("office10", office10_map())
