"""Regenerate the golden files under tests/golden from the sample configs.

Run from the repository root after an intentional output change, then
review the diff before committing.
"""

import shutil
import sys
from pathlib import Path

from collapse_sim.cli import main

ROOT = Path(__file__).resolve().parents[1]
GOLDEN = ROOT / "tests" / "golden"

# (golden directory, command line relative to the repo root)
CASES = [
    ("transform_identity", ["transform", "--config", "configs/transform_identity.json"]),
    ("transform_three_fifths", ["transform", "--config", "configs/transform_three_fifths.json"]),
    ("transform_walking_pace", ["transform", "--config", "configs/transform_walking_pace.json"]),
    ("transform_inverse", ["transform", "--config", "configs/transform_inverse.json"]),
    ("transform_translation", ["transform", "--config", "configs/transform_translation.json"]),
    ("plan_toy", ["plan", "--config", "configs/plan_toy.json"]),
    ("plan_realistic", ["plan", "--config", "configs/plan_realistic.json"]),
    ("plan_at_rest", ["plan", "--config", "configs/plan_at_rest.json"]),
    ("plan_sweep", ["plan", "--sweep", "--config", "configs/plan_realistic.json"]),
    ("simulate_small", ["simulate", "--config", "configs/simulate_small.json"]),
    ("simulate_compare", ["simulate", "--compare", "--seed", "3", "--config",
                          "configs/simulate_small.json"]),
    ("fig1a", ["diagram", "--config", "configs/fig1a.json"]),
    ("fig1b", ["diagram", "--config", "configs/fig1b.json"]),
    ("fig2", ["diagram", "--config", "configs/fig2.json"]),
    ("fig3", ["diagram", "--config", "configs/fig3.json"]),
    ("regions_backward_cone", ["regions", "--config", "configs/regions_backward_cone.json"]),
]


def regenerate() -> None:
    for name, argv in CASES:
        out = GOLDEN / name
        if out.exists():
            shutil.rmtree(out)
        if main([*argv, "--out", str(out)]) != 0:
            sys.exit(f"{name}: command failed")


if __name__ == "__main__":
    import os

    os.chdir(ROOT)
    regenerate()
