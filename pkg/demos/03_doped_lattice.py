"""
A detuned sublattice
====================

Every second cavity gets an atom detuned by one coupling unit. The lattice
then behaves like a doped semiconductor: extra lobes open where the two
sublattices prefer different fillings.
"""

# %%
import numpy as np

import jch
from jch.phase_map import minimal_excitation, pattern_label

tuned = jch.SiteParams.from_detuning(0.0)
detuned = jch.SiteParams.from_detuning(1.0)

# %%
mu = np.linspace(-2.0, -0.27, 346)
kappa = np.array([0.0, 0.02, 0.05])
grid = jch.gap_map((tuned, detuned), kappa, mu)

for i, k in enumerate(kappa):
    lobes = ", ".join(f"{lab} [{lo:+.3f},{hi:+.3f}]" for lo, hi, lab in grid.intervals[i])
    print(f"kappa={k:.2f}: {lobes}")

# %% [markdown]
# Inside a lobe with unequal fillings, either adding a particle or removing
# one is the cheaper excitation. That is the analogue of n- and p-type
# doping.

# %%
kind = minimal_excitation(grid)
for j in range(0, mu.size, 40):
    pattern = grid.fillings[j]
    print(f"mu={mu[j]:+.3f} {pattern_label(pattern):>8}  cheapest: {kind[1, j] or '-'}")
