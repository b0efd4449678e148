"""
Where has the state collapsed?
==============================

A measurement collapses the pair state along the simultaneity line of the
detector's rest frame. Seen from another frame the line tilts, and a window
opens in which a second detector still meets the uncollapsed state.
"""

import numpy as np

from collapse_sim import (BackwardLightCone, Bounds, Event, MeasurementSpec, classify_point,
                          collapse_line, collapse_speed, region_map, second_measurement_allowed,
                          window_duration)

# %%
# D1 detects at (ct', x') = (-2.5, 17.5) in the frame of a second detector,
# and that frame moves at beta = 0.6 as seen from D1. The collapse line has
# slope -beta and sweeps through the frame faster than light.
d1 = MeasurementSpec(Event(-2.5, 17.5), 0.6, "D1")
line = collapse_line(d1)
print(f"collapse line: ct' = {line.slope} x' + {line.ct_at(0.0)}")
print(f"apparent collapse speed: {collapse_speed(line):.4e} m/s")

# %%
# The window: how long after D1's detection (in this frame) a detector at
# x' may still measure the uncollapsed pair. It closes at D1's position.
xs = np.array([0.0, 10.0, 17.5, 25.0])
print("window (m of ct'):", window_duration(xs, d1))
print("(-2.45, 0) allowed:", second_measurement_allowed(Event(-2.45, 0.0), d1))

# %%
# Two detectors. D2 rests in this frame and detects at (-2.4, 0); D1's
# collapse has not reached it yet, so the plane splits into four regions.
d2 = MeasurementSpec(Event(-2.4, 0.0), 0.0, "D2")
rm = region_map(Bounds(-12.0, 20.0, -10.0, 30.0), (16, 20), [d1, d2])
codes, counts = np.unique(rm.codes, return_counts=True)
labels = rm.labels().ravel()
for c, n in zip(codes, counts):
    print(f"{labels[np.argmax(rm.codes.ravel() == c)]:14s} {n} cells")

# %%
# Under the backward-light-cone model only the inside of the past cone stays
# uncollapsed, and that set is the same in every frame.
model = BackwardLightCone()
for p in (Event(-5.0, 18.0), Event(-5.0, 30.0)):
    print(p, classify_point(p, [d1], model).label)
