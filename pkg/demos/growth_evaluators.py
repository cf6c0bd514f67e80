"""Three routes to the same interface heights.

One Poisson cloud drives a growing surface started from the basic wedge.
The variational last-passage recursion, the tagged-corner candidate
oracle, and the event-driven graphical dynamics must agree point for
point, per realization; the wedge heights also equal the raw box chain
heights.
"""

import numpy as np

from poisson_growth import chain_height, corner_at, sample
from poisson_growth.growth import (
    WedgeProfile,
    evaluate_lpp,
    evaluate_oracle,
    final_field,
    generator_apply,
    jump_region,
    simulate_event_driven,
    wedge_field,
)

d = 2
hi = np.array([1.5, 1.5])
cloud = sample((np.array([0, 0, 0.0]), np.append(hi, 1.0)), 20.0, seed=42)
print(f"cloud: {cloud.n} space-time points over {hi} x (0, 1]")

profile = WedgeProfile(np.zeros(d))
box = (corner_at(np.zeros(d)), hi)
queries = [(hi, 1.0), (np.array([1.0, 0.7]), 1.0), (np.array([0.5, 1.2]), 1.0)]

lpp = evaluate_lpp(profile, cloud, queries, box)
oracle = evaluate_oracle(profile, cloud, queries, box)
snaps = simulate_event_driven(profile, cloud, (np.zeros(d), hi), 1.0)
fld = final_field(snaps)

print("\n x            recursion  oracle  event-driven  box-chain")
for (x, t), a, b in zip(queries, lpp.values, oracle.values):
    c = fld.value_at(x)
    h = chain_height(cloud, corner_at(np.zeros(d)), (x, t))
    print(f" {np.round(x, 2)!s:12} {a:9.0f} {b:7.0f} {c:12.0f} {h:10d}")

print(f"\n{len(snaps) - 1} growth events; the surface clock ticks on the cloud")

x0 = np.array([1.0, 1.0])
base = wedge_field(np.zeros(d), hi)
boxes, vol = jump_region(base, x0)
print(f"initial jump region below {x0}: volume {vol} over {len(boxes)} cells")
print(f"generator on the event 'height(x0) >= 1': {generator_apply(base, x0, 1)}")
