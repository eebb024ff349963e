# Approximation triples (f, theta, psi), their order, and the almost inverse.

# %%
import numpy as np

from egh import (ApproxTriple, almost_inverse, inverse_certificate, isometry_group,
                 theta_as_approximation)
from egh.fixtures import rectangle

# %% identity maps between a fat and a thin rectangle
GX = isometry_group(rectangle(0.4, 1.0))
GY = isometry_group(rectangle(0.2, 1.0))
ident = np.arange(4)
t = ApproxTriple(GX, GY, ident, ident, ident)
print("components", {k: float(v) for k, v in t.components.items()})
print("order", float(t.order))

# %% almost inverse and its certificate
inv = almost_inverse(t)
rep = inverse_certificate(t, inv)
for c in rep.checks:
    print(f"{c.name:20s} {float(c.measured):.3f} <= {float(c.ceiling):.3f}  {c.passed}")

# %% theta read as an approximation between the groups themselves
for c in theta_as_approximation(t).checks:
    print(f"{c.name:20s} {float(c.measured):.3f} <= {float(c.ceiling):.3f}")

# %% a deliberately bad theta: everything to the identity
t_bad = t.with_theta(np.zeros(4, dtype=int))
print("order with a constant theta", float(t_bad.order))
