# Exact equivariant distance by branch and bound, with rational arithmetic.

# %%
from egh import FiniteMetricSpace, SearchConfig, egh_distance, isometry_group, trivial_group
from egh.fixtures import rectangle, square, two_point

# %% the same space under two different groups
X = two_point()
cert = egh_distance(isometry_group(X), trivial_group(X))
print("full vs trivial group on two points:", cert.value, "optimal:", cert.optimal)

# %% exact mode keeps fractions
A = isometry_group(FiniteMetricSpace.from_table([["0", "1"], ["1", "0"]], exact=True))
B = isometry_group(FiniteMetricSpace.from_table([["0", "4/3"], ["4/3", "0"]], exact=True))
print("two points, 1 vs 4/3:", egh_distance(A, B).value)

# %% square vs a nearly square rectangle
S, R = isometry_group(square()), isometry_group(rectangle(0.9, 1.1))
cert = egh_distance(S, R)
print("d =", cert.value, "nodes", cert.nodes)
print("forward witness f", cert.witness_forward.f, "theta", cert.witness_forward.theta)

# %% with a tiny budget the answer is only an upper bound
cheap = egh_distance(S, R, SearchConfig(max_nodes=2))
print("budget 2:", cheap.value, "optimal:", cheap.optimal)
