# Orbit and coset quotients, then a generated sequence converging to a rectangle.

# %%
from egh import ConvergenceScenario, coset_space, isometry_group, orbit_space, run_scenario
from egh.fixtures import rectangle

G = isometry_group(rectangle(0.2, 1.0))
long_flip = G.index_of([3, 2, 1, 0])

# %%
print("orbits", orbit_space(G).classes)
Q = coset_space(G, [G.identity, long_flip])
print("cosets", Q.classes, "gap", Q.gap)

# %% shrink the perturbation and watch the verdict cross the gap
sc = ConvergenceScenario(G, [0.6, 0.4, 0.25, 0.15, 0.08, 0.04, 0.02], seed=0,
                         subgroup=[long_flip])
rep = run_scenario(sc)
for row in rep.csv_rows():
    print(*row, sep="\t")
print("converges:", rep.converges)

# %% recomputing the full group of each perturbed space loses the symmetry
rep = run_scenario(ConvergenceScenario(G, [0.3, 0.1], seed=0, group_mode="recompute"))
print(rep.events)
