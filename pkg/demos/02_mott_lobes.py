"""
Mott lobes three ways
=====================

The same lobe boundary from the one-polariton band edge, from single-site
mean field and from exact diagonalization of short open chains.
"""

# %%
import numpy as np

import jch
from jch.exact_diag import plateau_boundaries
from jch.phase_map import lobe_edges

site = jch.SiteParams.from_detuning(0.0)

# %% [markdown]
# The one-polariton edges are linear in mu, so a lobe boundary at fixed
# hopping costs just two band minima. The tip is where the two edges meet.

# %%
for n in (1, 2, 3):
    print(f"lobe {n}: tip at kappa = {jch.lobe_tip((n,), (site,)):.6f}")

kappas = np.linspace(0.0, 0.14, 8)
for kappa in kappas:
    lo, hi = lobe_edges((1,), (site,), kappa)
    print(f"kappa={kappa:.3f}  mu in [{lo:+.4f}, {hi:+.4f}]")

# %% [markdown]
# Mean field replaces the neighbours by a coherent field. Its critical
# hopping at mu - omega = -0.5 comes out at 1/36, which is what second-order
# perturbation theory in the drive predicts.

# %%
print("mean-field kappa_c at mu=-0.5:", jch.mf_critical_kappa(site, -0.5))

# %% [markdown]
# Short chains bracket the infinite-lattice answer. With open ends the
# plateau of one excitation per cavity shrinks towards the one-polariton
# window as cavities are added.

# %%
for M in (2, 3, 4):
    lo, hi = plateau_boundaries(M, site, [0.02], target=1, bc="open")
    print(f"M={M}: [{lo[0]:+.5f}, {hi[0]:+.5f}]")
print("one-polariton:", lobe_edges((1,), (site,), 0.02))
