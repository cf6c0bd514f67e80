"""The one-dimensional particle system behind the two-dimensional fields.

Particles jump left onto cloud points; Poisson configurations are
invariant; particles cross a fixed location at rate tau/mu.  Reading the
space-time picture as two spatial coordinates turns counting functions
into random initial height fields with prescribed slopes, including a
coupled pair whose defect region hugs one side of a line.
"""

import numpy as np

from poisson_growth.hammersley import (
    build_coupled_shock_pair,
    build_flat_field_2d,
    build_shock_field_2d,
    equilibrium_init,
    flux_past,
    padding_for,
    simulate,
    stopping_line_slope,
)
from poisson_growth.poisson import mix64

mu, tau, T = 1.0, 1.0, 50.0
pad = padding_for(mu, tau, T)
fluxes = []
for r in range(40):
    init = equilibrium_init(mu, (-pad - 10, pad), mix64(1, r))
    traj = simulate(init, tau, T, mix64(2, r))
    fluxes.append(flux_past(traj, 0.0, T))
print(f"flux past the origin over (0, {T:.0f}]: mean {np.mean(fluxes):.2f}, "
      f"variance {np.var(fluxes):.2f} (theory: both {tau / mu * T:.0f})")

window = ((-2.0, -2.0), (2.0, 2.0))
flat = build_flat_field_2d(np.array([2.0, 1.0]), window, seed=11)
pts = np.array([[1.0, 1.0], [-1.0, -1.0], [1.5, -0.5]])
print("\nflat factory, slope (2, 1): field vs rho.x at a few points:")
for p, v in zip(pts, flat.value_many(pts)):
    print(f"  sigma({p}) = {v:4.0f}   rho.x = {p @ np.array([2.0, 1.0]):5.1f}")

lam, rho = np.array([2.0, 1.0]), np.array([3.0, 2.0])
a = stopping_line_slope(lam, rho)
shock = build_shock_field_2d(lam, rho, window, seed=12)
print(f"\nshock factory, lam={lam}, rho={rho}: slopes change across x2 = -{a:.0f} x1")
print(f"  staircase of {shock.field.values.shape} cells, monotone: "
      f"{shock.field.is_monotone()}")

sigma0, zeta0, a0 = build_coupled_shock_pair(lam, rho, window, seed=13)
cen = a0.grid.centers()
diff = zeta0.value_many(cen) - sigma0.value_many(cen)
above = cen[:, 1] > -a * cen[:, 0]
print(f"\ncoupled pair: zeta - sigma takes values {sorted(set(diff.tolist()))}")
print(f"  defect cells: {int(a0.membership.sum())}, all above the line: "
      f"{bool(np.all(diff[~above] == 0))}")
