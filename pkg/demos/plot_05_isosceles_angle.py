"""
Opening the triangle
====================

Two spectators sit one magic spacing from the target.  Changing the apex
angle changes only the spectator-spectator coupling, which sets how well the
spectators carry heat away.
"""

import math

from ddicool.experiments import run_isosceles_sweep

rec = run_isosceles_sweep((math.pi / 18, math.pi), 18)
for phi, r in zip(rec.column("sweep_value"), rec.column("ratio")):
    print(f"  phi = {phi / math.pi:.3f} pi  ratio = {r:.4f}")
