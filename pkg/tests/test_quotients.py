import itertools

import numpy as np
import pytest

from egh.fixtures import rectangle, rotation_group, square, two_point
from egh.metric import (FiniteMetricSpace, IsometryGroup, StructuralError, closure_indices,
                        isometry_group, trivial_group, validate_space)
from egh.quotients import (ConvergenceScenario, coset_space, floyd_closure, induced_coset_map,
                           orbit_space, perturb_space, run_scenario, spread_theta)
from egh.triples import ApproxTriple

from corpus import random_pair, random_triple


def brute_quotient(d, classes):
    return [[0 if i == j else min(d[a][b] for a in ci for b in cj)
             for j, cj in enumerate(classes)] for i, ci in enumerate(classes)]


# -- orbit spaces -------------------------------------------------------------

def test_orbit_space_trivial_group_is_the_space():
    X = rectangle()
    Q = orbit_space(trivial_group(X))
    assert Q.classes == ((0,), (1,), (2,), (3,))
    assert np.array_equal(Q.dist, X.dist)


def test_orbit_space_two_point_collapses():
    Q = orbit_space(isometry_group(two_point()))
    assert Q.classes == ((0, 1),) and Q.gap == float("inf")


def test_orbit_space_half_turn_of_square():
    X = square()
    G = IsometryGroup(X, [[0, 1, 2, 3], [2, 3, 0, 1]])
    Q = orbit_space(G)
    assert Q.classes == ((0, 2), (1, 3))
    assert Q.dist.tolist() == brute_quotient(X.dist.tolist(), Q.classes)
    assert Q.dist[0, 1] == 1


def test_orbit_quotients_are_metrics():
    rng = np.random.default_rng(3)
    for _ in range(40):
        G = random_pair(rng)
        Q = orbit_space(G)
        assert validate_space(Q.as_space()).valid
        assert Q.dist.tolist() == brute_quotient(G.space.dist.tolist(), Q.classes)


# -- coset spaces ---------------------------------------------------------------

def test_coset_space_whole_group():
    G = isometry_group(square())
    Q = coset_space(G, range(len(G)))
    assert len(Q.classes) == 1 and Q.gap == float("inf")


def test_coset_space_trivial_subgroup_of_order_two():
    G = isometry_group(two_point())
    Q = coset_space(G, [G.identity])
    assert len(Q.classes) == 2 and Q.gap == 1


def test_coset_space_rotations_mod_half_turn():
    X = square()
    G = rotation_group(X)
    H = [0, 2]
    Q = coset_space(G, H)
    assert Q.classes == ((0, 2), (1, 3))
    assert Q.dist.tolist() == brute_quotient(G.uniform.tolist(), Q.classes)
    assert Q.gap == 1


def test_coset_space_rejects_non_subgroup():
    G = rotation_group(square())
    with pytest.raises(StructuralError):
        coset_space(G, [0, 1])


# -- induced coset maps --------------------------------------------------------

def test_induced_map_of_isomorphism_is_bijective():
    G = isometry_group(square())
    H = closure_indices(G, [G.index_of([2, 3, 0, 1])])
    mapping, rep = induced_coset_map(np.arange(len(G)), G, H, G, H)
    assert sorted(mapping) == list(range(len(G) // len(H)))
    assert rep.well_defined and rep.injective and rep.surjective and rep.guaranteed


def test_induced_map_reports_splitting():
    G = isometry_group(two_point())
    swap = G.index_of([1, 0])
    # H_k is everything, H is trivial: the single source coset lands in both
    _, rep = induced_coset_map([G.identity, swap], G, [0, 1], G, [G.identity])
    assert not rep.well_defined
    assert rep.splitting == [{"coset": 0, "lands_in": [0, 1]}]


def test_small_order_below_gap_does_not_force_surjectivity():
    # apex over a base of length 1.5; the order of the triple is 1 but theta
    # never reaches the coset of the base swap
    X = two_point(1.0)
    Y = FiniteMetricSpace.from_table([[0, 1.5, 1], [1.5, 0, 1], [1, 1, 0]])
    GX = isometry_group(X)
    GY = isometry_group(Y)
    t = ApproxTriple(GX, GY, [2, 2], [GY.identity, GY.identity], [0, 0])
    assert t.order == 1
    gap = coset_space(GY, [GY.identity]).gap
    assert gap == 1.5
    _, rep = induced_coset_map(t.theta, GX, [GX.identity], GY, [GY.identity], epsilon=t.order)
    assert t.order < gap and not rep.surjective
    assert rep.theta_covering >= gap and not rep.guaranteed


def test_covering_below_gap_forces_surjectivity():
    rng = np.random.default_rng(17)
    checked = 0
    for _ in range(300):
        GX = random_pair(rng, max_n=4, max_order=4, full=True)
        GY = random_pair(rng, max_n=4, max_order=4, full=True)
        theta = rng.integers(0, len(GY), size=len(GX))
        for h in range(len(GY)):
            H = closure_indices(GY, [h])
            _, rep = induced_coset_map(theta, GX, [GX.identity], GY, H)
            if rep.guaranteed:
                checked += 1
                assert rep.surjective
    assert checked > 50


def test_spread_theta_breaks_a_tie_toward_the_missing_coset():
    X = FiniteMetricSpace.from_table([[0, 1.6486, 1.8824, 1.1906], [1.6486, 0, 1.6486, 1.1442],
                                      [1.8824, 1.6486, 0, 1.1906], [1.1906, 1.1442, 1.1906, 0]])
    G = IsometryGroup(X, [[0, 1, 2, 3], [2, 1, 0, 3]])
    Xk, _ = perturb_space(X, 0.9, seed=(65, 0), group=G)
    Gk = IsometryGroup(Xk, G.perms)
    t = ApproxTriple(Gk, G, [0, 3, 3, 1], [0, 0], [0, 1])
    # both entries of row 1 cost exactly the order
    assert t.costs[1, 0] == t.costs[1, 1] == t.order
    spread = spread_theta(t, [G.identity])
    assert spread.theta.tolist() == [0, 1] and spread.order == t.order
    _, rep = induced_coset_map(t.theta, Gk, [0], G, [0])
    assert t.order < rep.gap and not rep.surjective
    _, rep = induced_coset_map(spread.theta, Gk, [0], G, [0])
    assert rep.surjective


def test_spread_theta_never_raises_order():
    rng = np.random.default_rng(21)
    for _ in range(100):
        GX, GY = random_pair(rng), random_pair(rng)
        t = random_triple(rng, GX, GY)
        H = closure_indices(GY, [int(rng.integers(len(GY)))])
        s = spread_theta(t, H)
        assert s.order <= t.order
        hit = lambda th: {coset_space(GY, H).class_of(int(b)) for b in th}
        assert len(hit(s.theta)) >= len(hit(t.theta))


# -- perturbation ------------------------------------------------------------------

def brute_closure(d):
    n = len(d)
    best = [row[:] for row in d]
    for i, j in itertools.product(range(n), repeat=2):
        for k in range(n - 1):
            for mid in itertools.permutations([v for v in range(n) if v not in (i, j)], k):
                path = (i, *mid, j)
                best[i][j] = min(best[i][j], sum(d[a][b] for a, b in zip(path, path[1:])))
    return best


def test_floyd_closure_matches_all_paths():
    rng = np.random.default_rng(0)
    for _ in range(10):
        d = rng.uniform(0.5, 3, size=(5, 5))
        d = (d + d.T) / 2
        np.fill_diagonal(d, 0)
        assert np.allclose(floyd_closure(d), brute_closure(d.tolist()))


def test_perturb_zero_is_identity():
    X = rectangle()
    Y, info = perturb_space(X, 0.0, seed=1)
    assert np.array_equal(Y.dist, X.dist) and info["max_change"] == 0


def test_perturb_three_points_fixed_seed():
    X = FiniteMetricSpace.from_table([[0, 1, 1.9], [1, 0, 1], [1.9, 1, 0]])
    Y, info = perturb_space(X, 0.1, seed=5)
    rng = np.random.default_rng(5)
    raw = X.dist.copy()
    for (i, j), u in zip([(0, 1), (0, 2), (1, 2)], rng.uniform(-0.1, 0.1, size=3)):
        raw[i, j] = raw[j, i] = raw[i, j] * (1 + u)
    assert np.allclose(Y.dist, brute_closure(raw.tolist()))
    assert validate_space(Y).valid
    assert info["max_change"] <= info["multiplicative_bound"] + 1e-12


def test_perturb_outputs_are_metrics_and_stay_equivariant():
    rng = np.random.default_rng(6)
    for i in range(40):
        G = random_pair(rng)
        delta = float(rng.uniform(0, 0.9))
        Y, info = perturb_space(G.space, delta, seed=i, group=G)
        assert validate_space(Y).valid
        IsometryGroup(Y, G.perms)         # raises if some element stopped being an isometry
        assert np.all(np.abs(Y.dist - G.space.dist) <= delta * G.space.dist + 1e-12)


@pytest.mark.parametrize("delta", [-0.1, 1.0])
def test_perturb_rejects_bad_delta(delta):
    with pytest.raises(ValueError):
        perturb_space(two_point(), delta, seed=0)


# -- scenarios ---------------------------------------------------------------------

def test_scenario_schedule_validation():
    G = isometry_group(two_point())
    with pytest.raises(ValueError):
        ConvergenceScenario(G, [0.1, 0.2])
    with pytest.raises(ValueError):
        ConvergenceScenario(G, [0.1], group_mode="nope")
    ConvergenceScenario(G, [0, 0, 0])


def test_scenario_zero_schedule():
    rep = run_scenario(ConvergenceScenario(isometry_group(square()), [0, 0, 0]))
    assert [s["eps"] for s in rep.steps] == [0, 0, 0]
    assert rep.converges and all(s["gap_verdict"] == "stable" for s in rep.steps)


def test_scenario_two_points():
    sched = [1 / k for k in range(2, 8)]
    rep = run_scenario(ConvergenceScenario(isometry_group(two_point()), sched, seed=0))
    assert rep.converges
    assert all(s["eps"] <= s["delta"] + 1e-12 for s in rep.steps)


def test_scenario_flip_on_rectangle():
    X = rectangle(0.2, 1.0)
    G = isometry_group(X)
    # H flips the long sides, so its cosets sit a short side apart
    long_flip = G.index_of([3, 2, 1, 0])
    s = ConvergenceScenario(G, [0.6, 0.4, 0.25, 0.15, 0.08, 0.04, 0.02], seed=0,
                            subgroup=[long_flip])
    rep = run_scenario(s)
    verdicts = [st["gap_verdict"] for st in rep.steps]
    assert rep.gap == pytest.approx(0.2)
    assert verdicts[0] == "unstable" and verdicts[-1] == "stable"
    flip = verdicts.index("stable")
    assert all(v == "stable" for v in verdicts[flip:])
    assert all(st["surjective"] for st in rep.steps[flip:])
    assert rep.converges


def test_scenario_recompute_mode_logs_collapse():
    G = isometry_group(rectangle(0.2, 1.0))
    rep = run_scenario(ConvergenceScenario(G, [0.3, 0.1], seed=0, group_mode="recompute"))
    assert any(e["event"] == "group_collapse" for e in rep.events)
    assert rep.steps[0]["order_Gk"] < len(G)


def test_scenario_csv_rows():
    rep = run_scenario(ConvergenceScenario(isometry_group(two_point()), [0.2, 0.1], seed=0))
    rows = list(rep.csv_rows())
    assert rows[0][0] == "k" and len(rows) == 3
