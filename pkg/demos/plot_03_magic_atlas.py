"""
Magic spacings for tilted dipoles
=================================

Tilting the dipole relative to the pair axis moves the zeros of the shift.
Each magic spacing carries its own shared decay rate, and the cooling gain is
largest where that rate is sizable but well short of the Dicke limit.
"""

import math

import numpy as np

from ddicool.experiments import run_magic_atlas

rec = run_magic_atlas(theta_points=31)
theta = rec.column("sweep_value") / math.pi
spacing = rec.column("spacing")
gamma12 = rec.column("gamma12") / 0.1
ratio = rec.column("ratio")

# %%
# The first few branches at a handful of angles.
for t in np.unique(theta)[::6]:
    sel = theta == t
    pairs = ", ".join(f"s={s:.3f} g12/G={g:+.2f} r={r:.3f}" for s, g, r in
                      zip(spacing[sel][:3], gamma12[sel][:3], ratio[sel][:3]))
    print(f"theta = {t:.2f} pi: {pairs}")

# %%
k = int(np.argmin(ratio))
print(f"\nbest: ratio {ratio[k]:.4f} at theta = {theta[k]:.3f} pi, s = {spacing[k]:.4f}, "
      f"gamma12/Gamma = {gamma12[k]:.3f}")
