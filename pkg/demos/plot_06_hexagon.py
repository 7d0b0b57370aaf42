"""
Target at the center of a hexagon
=================================

Every vertex is one magic spacing from the center, so the target sees no
exchange shift however many spectators surround it.  Spectators still shift
each other, which limits the gain as more are added.
"""

from ddicool.experiments import HEXAGON_SUBSETS, run_hexagon_suite

rec = run_hexagon_suite(HEXAGON_SUBSETS)
for row in rec.rows:
    print(f"  {int(row['sweep_value'])} atoms, vertices {row['vertices']:>8}: ratio {row['ratio']:.4f}")

# %%
# Filling all six vertices reaches 64 phonon-free spin states times two
# phonon levels; that run takes minutes and is left to the CLI:
#
#   ddicool hexagon --vertices 0,1,2,3,4,5
