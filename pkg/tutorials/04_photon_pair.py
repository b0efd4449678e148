"""
The entangled photon pair
=========================

Polarization: (|V>|H> + |H>|V>) / sqrt 2. Frequency: a Gaussian joint
amplitude whose sum frequency is pinned near the pump.
"""

import numpy as np

from collapse_sim import (Polarization, TwoPhotonAmplitude, density_correlated,
                          density_factorized, entangled_pair_state, project_polarization)
from collapse_sim.two_photon import DensityKind, energy_residual_sd, final_state

H, V = Polarization.H, Polarization.V

# %%
# Measuring V on photon 1 leaves photon 2 in H, with probability 1/2.
out = project_polarization(entangled_pair_state(), 1, V)
print(out.post_state.label, "p =", out.probability)

# %%
# After two measurements on the uncollapsed state the final state is not
# fixed by anything; each rule gives a different answer for (V, V).
for rule in ("outcomes", "d1-priority", "d2-priority"):
    print(f"{rule:12s}", final_state(V, V, rule).state.label)

# %%
# Correlated vs. factorized frequency densities share their marginals but
# not their sum-frequency width.
a = TwoPhotonAmplitude()
ws = np.linspace(a.mean_signal - 6 * a.marginal_sd, a.mean_signal + 6 * a.marginal_sd, 801)
wi = np.linspace(a.mean_idler - 6 * a.marginal_sd, a.mean_idler + 6 * a.marginal_sd, 801)
S, I = np.meshgrid(ws, wi, indexing="ij")
for name, fn in (("correlated", density_correlated), ("factorized", density_factorized)):
    m_s = np.sum(fn(a, S, I), axis=1) * (wi[1] - wi[0])
    print(f"{name}: marginal peak {m_s.max():.6e}, mean ws {np.sum(ws * m_s) * (ws[1] - ws[0]):.6e}")
for kind in DensityKind:
    print(f"sd(ws + wi), {kind.value}: {energy_residual_sd(a, kind):.4e} rad/s")
