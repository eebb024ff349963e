# Finite metric spaces, their isometry groups and the uniform metric.

# %%
import numpy as np

from egh import FiniteMetricSpace, isometry_group, validate_space
from egh.fixtures import rectangle, square

# %% a table that breaks the triangle inequality
bad = FiniteMetricSpace.from_table([[0, 1, 3], [1, 0, 1], [3, 1, 0]])
rep = validate_space(bad)
print("valid:", rep.valid)
for v in rep.violations:
    print("  ", v.axiom, v.indices, "by", v.amount)

# %% the square has the dihedral group of order 8
G = isometry_group(square())
print("order", len(G))
print(G.perms)

# %% uniform metric: largest displacement between two isometries
np.set_printoptions(precision=3, suppress=True)
print(G.uniform)

# %% a thin rectangle: the short flip moves every point by the short side
R = isometry_group(rectangle(0.2, 1.0))
for a, p in enumerate(R.perms):
    print(p, "distance to identity", R.uniform[a, R.identity])
