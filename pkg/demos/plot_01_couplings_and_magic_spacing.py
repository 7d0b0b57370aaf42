"""
Pair couplings and the magic spacing
====================================

Two atoms exchange photons, which both shifts their levels (``g``) and opens
a shared decay channel (``gamma``).  Where the shift vanishes while the shared
decay stays finite, a driven atom can hand its excitation to a neighbour
without being pushed off the sideband resonance.
"""

import numpy as np

from ddicool.geometry import find_magic_spacings, magic_spacing, shift_and_decay

# %%
# Couplings for dipoles perpendicular to the pair axis, in units of Gamma.
s = np.linspace(0.1, 1.5, 15)
g, gamma = shift_and_decay(s, cos_theta=0.0)
print("  s/lambda     g/Gamma   gamma/Gamma")
for row in zip(s, g, gamma):
    print("  %8.3f  %10.4f  %10.4f" % row)

# %%
# The first zero of the shift beyond half a wavelength is the magic spacing.
s_m = magic_spacing()
g_m, gamma_m = shift_and_decay(s_m, 0.0)
print(f"\nmagic spacing s_m = {s_m:.6f} lambda, g = {g_m:.1e}, gamma = {gamma_m:.3f} Gamma")

# %%
# At the magic angle the near-field terms drop out and the zeros sit at
# quarter-wavelength steps.
theta = np.arccos(1 / np.sqrt(3))
print("magic-angle roots:", np.round(find_magic_spacings(theta, (0.1, 2.0)), 9))
