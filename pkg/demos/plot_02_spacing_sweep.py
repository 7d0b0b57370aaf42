"""
Cooling against spacing: line and triangle
==========================================

Only the first atom is driven on its red sideband.  Undriven neighbours act
as refrigerants through the dipole-dipole exchange, and the ratio below
compares the driven atom's steady-state phonon number with an isolated atom.
"""

from ddicool import magic_spacing
from ddicool.experiments import GeometrySpec, Scenario, evaluate_point, run_spacing_sweep

s_m = magic_spacing()

# %%
# A coarse sweep keeps this quick; the CLI runs the full grid.
for kind in ("line", "triangle"):
    rec = run_spacing_sweep(kind, (0.3, 1.0), points=15)
    s, ratio = rec.column("sweep_value"), rec.column("ratio")
    print(f"\n{kind}:")
    for a, b in zip(s, ratio):
        print(f"  s = {a:.3f}  ratio = {b:.4f}")
    # the dip around s_m is narrow, so evaluate it directly
    exact = evaluate_point(Scenario(geometry=GeometrySpec(kind), spacing=s_m))["ratio"]
    print(f"  at the magic spacing: {exact:.4f}")
