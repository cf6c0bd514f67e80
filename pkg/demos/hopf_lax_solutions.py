"""The macroscopic limit in closed form and on a grid.

The limiting interface solves a Hamilton-Jacobi equation through the
Hopf-Lax formula with shape g(x) = c (x1...xd)^(1/(d+1)) and velocity
f(rho) = kappa / (rho1...rhod).  Flat data translates, two-slope data
makes shocks or rarefaction fans, and initial sets are carried forward
through the maximizer sets W and X.
"""

import numpy as np

from poisson_growth.core import GridSpec, region_from_predicate
from poisson_growth.macroscopic import (
    FlatMacro,
    RarefactionMacro,
    ShockMacro,
    closed_form_u,
    forward_W,
    hopf_lax_solve,
    interface_X,
    shape_g,
    velocity,
)

c = 2.0  # exact chain constant for one space dimension
kappa, f, grad = velocity(np.array([1.0]), c)
print(f"d=1, rho=1: kappa={kappa}, f={f}, grad f={grad}")
print(f"shape g(1) = {shape_g(np.array([1.0]), c)}  (so g drives u = 2 sqrt(x t))")

flat = FlatMacro(np.array([1.0]))
grid = GridSpec(np.array([-4.0]), np.array([3.0]), np.array([700]))
u_grid, _ = hopf_lax_solve(flat, np.array([1.0]), 1.0, c, grid)
u_exact, arg = closed_form_u(flat, np.array([1.0]), 1.0, c)
print(f"\nflat u(1, 1): grid {u_grid:.4f} vs closed {u_exact:.4f}; "
      f"maximizer {arg.points.ravel()}")

shock = ShockMacro(np.array([1.0]), np.array([2.0]))
print("\nshock lam=1, rho=2: the discontinuity rides x = t/2")
for x in (0.45, 0.5, 0.55):
    u, arg = closed_form_u(shock, np.array([x]), 1.0, c)
    tag = "shock point" if arg.shock else f"maximizer {arg.points.ravel()}"
    print(f"  u({x:.2f}, 1) = {u:.4f}   {tag}")

raref = RarefactionMacro(np.array([1.0]), np.array([2.0]))
print("\nrarefaction fan between t/4 and t: u = 2 sqrt(x t) inside")
for x in (0.3, 0.6, 0.9):
    u, _ = closed_form_u(raref, np.array([x]), 1.0, c)
    print(f"  u({x:.2f}, 1) = {u:.4f}  vs 2 sqrt(x) = {2 * np.sqrt(x):.4f}")

eval_grid = GridSpec(np.array([-2.0]), np.array([3.0]), np.array([200]))
B = region_from_predicate(eval_grid, lambda y: y[0] >= 0)
centers = eval_grid.centers().ravel()
W = forward_W(flat, B, 1.0, c, eval_grid)
X_flat = interface_X(flat, B, 1.0, c, eval_grid)
X_fan = interface_X(raref, B, 1.0, c, eval_grid)
print(f"\nforward set of B=[0,inf) under flat data: [{centers[W.membership.ravel()].min():.3f}, ...)")
print(f"flat interface X: {centers[X_flat.membership.ravel()]}")
print(f"rarefaction interface strip: [{centers[X_fan.membership.ravel()].min():.3f},"
      f" {centers[X_fan.membership.ravel()].max():.3f}]  (theory: [0.25, 1.0])")
