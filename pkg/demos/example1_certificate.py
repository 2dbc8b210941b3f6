"""
A problem without an upper shell
================================

Two concave paraboloids on the box [1, 5]^2 peak at (3, 4) and (4, 1),
both inside the box.  Every point outside the box is then beaten by some
efficient point or sits below the nadir, so no upper shell exists.  This
script collects the grid evidence for that.
"""

import numpy as np

from paretoshells.oracle import grid_enumerate, no_upper_shell_certificate
from paretoshells.problem import RelaxationDescriptor, evaluate
from paretoshells.problems import load_bundled

p = load_bundled("example1")

# %%
# The two maximizers map to the extreme points of the front.
print("f(3, 4) =", evaluate(p, [3, 4]).fx)
print("f(4, 1) =", evaluate(p, [4, 1]).fx)

# %%
# Enumerate the box on a lattice.  The grid efficient set hugs the segment
# between the maximizers.
oracle = grid_enumerate(p, 0.05)
print(len(oracle.front), "grid efficient points, nadir", oracle.nadir, "ideal", oracle.ideal)
print("grid slack tau per objective:", oracle.tau)

# %%
# Relax the box to [0, 6]^2 and test every lattice point outside [1, 5]^2.
r = RelaxationDescriptor(box=((0.0, 6.0),))
for h in (0.1, 0.05):
    cert = no_upper_shell_certificate(p, r, h)
    print(
        f"h={h}: {cert.outside_points} outside points, "
        f"{cert.fail_us4} dominated by the front, {cert.fail_us5} not above the nadir, "
        f"granted={cert.granted}"
    )

# %%
# The trade-off region {nadir <= f(x) <= ideal} is not contained in the box
# on this lattice, yet every outside point in it is dominated by its
# projection onto the segment, which is why the certificate still holds.
print("trade-off region points outside the box:", cert.region_outside, "of", cert.region_points)

# %%
# Same verdict without any grid slack.
X = np.array([[0.5, 3.0], [5.5, 2.5], [3.5, 5.8]])
for x in X:
    c = evaluate(p, x)
    beaten = np.any(np.all(c.fx <= oracle.front, axis=1) & np.any(c.fx < oracle.front, axis=1))
    print(x, "->", c.fx.round(3), "dominated by the grid front:", bool(beaten))
