"""
A moving frame on a sloped mesh
===============================

For the group x -> f(x), y -> e = f'(x) y + g(x), u -> u + e_x / f'(x)
the frame is built on meshes whose lines x = const carry evenly spaced y
values with a slope that may vary from line to line.  The frame sends the
base point to the origin with u = u_y = u_xy = 0 and u_yy = 1; what remains
of the third derivatives are the invariants.
"""
import numpy as np

from invscheme import GeneralMesh, suites
from invscheme.frames import invariants_g3, normalize_g3
from invscheme.grid import discrete_derivatives_general

xs = 0.5 + 0.05 * np.arange(4)
mesh = GeneralMesh(xs, 0.05 * (1 + 0.2 * xs), 0.8 + 0.1 * (xs - xs[0]), 4)
field = mesh.sample(suites.g3_poly)

normal = normalize_g3(field, 0, 0)
d = discrete_derivatives_general(normal, 0, 0)
print(f"base point: x={normal.mesh.xs[0]:.1e} y={normal.mesh.y_grid()[0, 0]:.1e} u={normal.values[0, 0]:.1e}")
print(f"normalized jet: uy={d.uy:.1e} uxy={d.uxy:.1e} uyy={d.uyy:.12f}")

inv = invariants_g3(field, 0, 0)
print(f"I03 = {inv.I03d:.6f}, I12 = {inv.I12d:.6f}")

# Halving the step shows first-order convergence to the continuous values.
for row in suites.run_convergence_suite():
    if row.name.startswith("G3"):
        print(f"{row.name}: orders " + ", ".join(f"{o:.3f}" for o in row.orders))
