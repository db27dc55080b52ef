"""Paths to bundled maps and scenarios."""

from pathlib import Path

DATA_DIR = Path(__file__).parent / "data"


def map_path(name: str) -> Path:
    return DATA_DIR / "maps" / f"{name}.yaml"


def scenario_path(name: str) -> Path:
    return DATA_DIR / "scenarios" / name
