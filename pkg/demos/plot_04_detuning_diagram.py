"""
Detuning and spacing together
=============================

Away from the magic spacing the exchange shift moves the sideband resonance.
Retuning the laser can compensate, and a second cooling region appears at
short spacing.  The reference atom stays at the usual sideband detuning.
"""

import numpy as np

from ddicool.experiments import run_detuning_diagram

# a 30 x 30 grid; the full 100 x 100 diagram takes about two minutes
rec = run_detuning_diagram((0.1, 1.0), (-1.5, 1.0), (30, 30))
s = rec.column("sweep_value")
offset = (rec.column("delta") + 1.0) / 0.1
ratio = rec.column("ratio")

# %%
k = int(np.argmin(ratio))
print(f"global minimum {ratio[k]:.4f} at s = {s[k]:.3f}, (Delta+nu)/Gamma = {offset[k]:.3f}")
inner = np.where(s < 0.5, ratio, np.inf)
k = int(np.argmin(inner))
print(f"short-spacing minimum {ratio[k]:.4f} at s = {s[k]:.3f}, (Delta+nu)/Gamma = {offset[k]:.3f}")

# %%
# Best detuning along each spacing column.
for sv in np.unique(s)[::3]:
    sel = s == sv
    j = int(np.argmin(ratio[sel]))
    print(f"  s = {sv:.3f}: best offset {offset[sel][j]:+.3f}, ratio {ratio[sel][j]:.4f}")
