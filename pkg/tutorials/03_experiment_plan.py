"""
Planning a double measurement on one uncollapsed pair
=====================================================

D1 rests in the lab, D2 moves along x = v t + x0. The planner finds where
D2 must detect, where the source goes, and whether the window is long
enough to resolve and store a result.
"""

import numpy as np

from collapse_sim import ExperimentParams, feasibility, plan
from collapse_sim.planner import sweep
from collapse_sim.spacetime import C

# %%
# A desk-size geometry with beta = 0.6, in ct units.
toy = plan(ExperimentParams.from_ct_units(0.6, x0=-20.0, cT1=10.0, c_epsilon=0.125))
print("point A         ", toy.A)
print("D2 detection    ", toy.detection2)
print("source          ", toy.source)
print("c * window      ", C * toy.window_rest)
print("X1' (moving)    ", toy.X1_prime)
print("max residual    ", max(abs(r) for r in toy.residuals.values()))

# %%
# A realistic detector moving at 100 m/s. The window is about 0.1 ns only
# when the detectors are some 90 km apart.
real = plan(ExperimentParams(v=100.0, x0=-(9e4 + 10.0), T1=0.1))
print(f"window {real.window_rest:.6e} s, feasible: {real.feasible}")
print(f"required separation at 100 m/s: {real.required_separation:.6e} m")
print(f"first-order window is off by {real.first_order_discrepancy:.3e} (relative)")

# %%
# Required separation falls as 1/v.
for v in (10.0, 100.0, 1000.0, 1e4):
    print(f"v = {v:8.0f} m/s -> {feasibility(ExperimentParams(v, -1e5, 0.1)).required_separation:.4e} m")

# %%
# A small sweep: where along x0 does the 100 m/s plan become feasible?
plans = sweep(ExperimentParams(100.0, -9e4, 0.1), {"x0": (-9.2e4, -8.8e4, 9)})
for p in plans:
    print(f"x0 = {p.params.x0:9.0f} m  window {p.window_rest:.4e} s  "
          f"{'ok' if p.feasible else ','.join(p.infeasibility_reasons)}")
