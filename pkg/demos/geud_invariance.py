"""
Swapping objectives for order-equivalent ones
=============================================

Replacing an objective by a strictly increasing transform of itself keeps
every dominance verdict.  The beam deflection divided by l^2 is such a
transform.  The power-mean gEUD and the plain mean dose are not.
"""

import numpy as np

from paretoshells.invariance import (
    dominance_agreement,
    geud_linear,
    geud_pair,
    geud_power,
    same_linear_order_probe,
    time_geud,
)
from paretoshells.problems import beam_deflection_replacement, load_bundled

beam = load_bundled("beam")
cheap = beam.with_objective(1, beam_deflection_replacement(), sense="min")
print(dominance_agreement(beam, cheap, trials=10_000).agreement)

# %%
# Two dose vectors with the same mean but different power means.
u, w = np.array([0.5, 0.5]), np.array([0.0, 1.0])
print("mean:", geud_linear(u), geud_linear(w))
print("gEUD a=3:", geud_power(u, 3), geud_power(w, 3))

# %%
for repl in ("linear", "moment"):
    v = same_linear_order_probe(geud_pair(v=100, a=3, replacement=repl), trials=10_000)
    print(v.name, "agreement", round(v.agreement, 4))

# %%
# Timing is hardware dependent and only reported.
print(time_geud(evaluations=5000))
