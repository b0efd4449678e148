"""
Lorentz boosts in (ct, x) coordinates
=====================================

Events carry ``ct`` and ``x`` in meters. A boost maps them into a frame
moving at ``beta`` and can add a spacetime translation.
"""

import numpy as np

from collapse_sim import Boost, Event, boost_event, interval, inverse_boost, stable_gamma_quantities
from collapse_sim.spacetime import C

# %%
# A textbook boost: beta = 3/5 gives gamma = 5/4, and (5, 3) lands on the
# time axis of the moving frame.
b = Boost(0.6)
e = Event(5.0, 3.0)
e_moving = boost_event(e, b)
print("boosted:", e_moving)
print("back again:", inverse_boost(e_moving, b))
print("interval before/after:", interval(Event(0, 0), e).s2, interval(Event(0, 0), e_moving).s2)

# %%
# Walking pace. At v = 100 m/s, gamma - 1 is about 5.6e-14, far below
# double precision of gamma itself, so it is computed directly.
beta = 100.0 / C
g, g_m1, g2_m1 = stable_gamma_quantities(beta)
print(f"gamma - 1 = {g_m1:.6e}, naive = {1 / np.sqrt(1 - beta ** 2) - 1:.6e}")

# A detection 0.1 s after t = 0 moves by about -10 m in the walking frame.
e = boost_event(Event(3e7, 0.0), Boost(beta))
print(f"x' = {e.x:.10f} m, ct' - ct = {e.ct - 3e7:.3e} m")

# %%
# Light stays light: the worldline x = ct keeps slope 1 in every frame.
for beta in (-0.9, 0.3, 0.99):
    p, q = boost_event(Event(0, 0), Boost(beta)), boost_event(Event(7.0, 7.0), Boost(beta))
    print(f"beta {beta:+.2f}: slope {(q.x - p.x) / (q.ct - p.ct):.15f}")
