"""
Spacetime figures from JSON configs
===================================

The ``collapse-sim`` command renders diagrams from a config file. Here the
same entry point is called in-process and the CSV layers are inspected.
"""

import csv
import tempfile
from collections import Counter
from pathlib import Path

from collapse_sim.cli import main

CONFIGS = Path(__file__).resolve().parents[1] / "configs"
out = Path(tempfile.mkdtemp(prefix="collapse-sim-"))

# %%
# Render the four figures: lab-frame collapse, moving-frame window, both
# detectors in the moving frame, and the full experiment layout.
for name in ("fig1a", "fig1b", "fig2", "fig3"):
    main(["diagram", "--config", str(CONFIGS / f"{name}.json"), "--out", str(out / name)])
    regions = Counter(r["region"] for r in csv.DictReader(open(out / name / "regions.csv")))
    print(f"{name}: {dict(regions) or 'no region layer'}; svg at {out / name / 'diagram.svg'}")

# %%
# Plans and simulations use the same entry point.
main(["plan", "--config", str(CONFIGS / "plan_realistic.json"), "--out", str(out / "plan")])
print((out / "plan" / "plan.txt").read_text())
