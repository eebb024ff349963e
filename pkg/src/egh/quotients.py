"""Orbit and coset quotients, and generated convergence sequences."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .metric import (FiniteMetricSpace, IsometryGroup, StructuralError, closure_indices,
                     is_subgroup, isometry_group, validate_space)
from .solver import SearchConfig, egh_distance
from .triples import (ApproxTriple, CeilingViolation, map_order, theta_as_approximation,
                      theta_defects)

log = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class QuotientSpace:
    """Classes of points or group elements with the min-over-members metric."""

    classes: tuple
    dist: np.ndarray
    gap: object = float("inf")

    def as_space(self) -> FiniteMetricSpace:
        return FiniteMetricSpace(self.dist)

    def class_of(self, member: int) -> int:
        for i, c in enumerate(self.classes):
            if member in c:
                return i
        raise KeyError(member)


def _partition_metric(d: np.ndarray, classes) -> np.ndarray:
    k = len(classes)
    out = np.zeros((k, k), dtype=d.dtype)
    for i, a in enumerate(classes):
        for j, b in enumerate(classes):
            if i != j:
                out[i, j] = d[np.ix_(list(a), list(b))].min()
    return out


def _gap(table):
    k = len(table)
    if k < 2:
        return float("inf")
    return table[~np.eye(k, dtype=bool)].min()


def _check_metric(table, what):
    if len(table) and not validate_space(FiniteMetricSpace(table)).valid:
        raise CeilingViolation(f"{what} quotient table is not a metric")


def orbit_space(G: IsometryGroup) -> QuotientSpace:
    """Orbits of ``G`` on its space; classes are sorted point indices."""
    n = G.space.n
    seen, classes = set(), []
    for x in range(n):
        if x not in seen:
            orbit = tuple(sorted(set(G.perms[:, x].tolist())))
            seen.update(orbit)
            classes.append(orbit)
    table = _partition_metric(G.space.dist, classes)
    _check_metric(table, "orbit")
    return QuotientSpace(tuple(classes), table, _gap(table))


def coset_space(G: IsometryGroup, H: Sequence[int]) -> QuotientSpace:
    """Left cosets ``gH`` under the uniform metric of ``G``.

    ``gap`` is the least distance between distinct cosets (``inf`` for one coset).
    """
    H = sorted(int(h) for h in H)
    if not is_subgroup(G, H):
        raise StructuralError(f"{H} is not a subgroup")
    seen, classes = set(), []
    for g in range(len(G)):
        if g not in seen:
            coset = tuple(sorted(int(G.mul[g, h]) for h in H))
            seen.update(coset)
            classes.append(coset)
    table = _partition_metric(G.uniform, classes)
    _check_metric(table, "coset")
    return QuotientSpace(tuple(classes), table, _gap(table))


@dataclass
class CosetMapReport:
    mapping: list
    well_defined: bool
    injective: bool
    surjective: bool
    gap: object
    splitting: list = field(default_factory=list)
    epsilon: object = None
    theta_covering: object = None
    guaranteed: bool | None = None

    def to_dict(self):
        from .io import jsonable
        return jsonable(self.__dict__)


def induced_coset_map(theta, Gk: IsometryGroup, Hk: Sequence[int], G: IsometryGroup,
                      H: Sequence[int], epsilon=None) -> tuple[list, CosetMapReport]:
    """Map ``g_k H_k -> theta(g_k) H`` and report its properties.

    A coset of ``H_k`` whose members land in several ``H``-cosets is listed in
    ``splitting`` and mapped through its lowest member. ``surjective`` asks
    whether every ``H``-coset contains some ``theta(g_k)``.

    Whenever the covering defect of ``theta`` is below the inter-coset gap,
    surjectivity is forced; a failure there raises :class:`CeilingViolation`.
    ``guaranteed`` records whether that hypothesis held.
    """
    theta = np.asarray(theta, dtype=np.intp)
    src = coset_space(Gk, Hk)
    dst = coset_space(G, H)
    mapping, splitting = [], []
    for i, coset in enumerate(src.classes):
        images = sorted({dst.class_of(int(theta[g])) for g in coset})
        if len(images) > 1:
            splitting.append({"coset": i, "lands_in": images})
        mapping.append(dst.class_of(int(theta[coset[0]])))
    hit = {dst.class_of(int(theta[g])) for g in range(len(Gk))}
    surjective = len(hit) == len(dst.classes)
    covering = theta_defects(theta, Gk, G)["covering"]
    guaranteed = bool(covering < dst.gap)
    report = CosetMapReport(
        mapping=mapping, well_defined=not splitting,
        injective=len(set(mapping)) == len(mapping), surjective=surjective,
        gap=dst.gap, splitting=splitting, epsilon=epsilon,
        theta_covering=covering, guaranteed=guaranteed)
    if guaranteed and not surjective:
        raise CeilingViolation(
            f"theta covers within {covering} < gap {dst.gap} but misses a coset")
    return mapping, report


def spread_theta(t: ApproxTriple, H: Sequence[int]) -> ApproxTriple:
    """Re-pick ``theta`` among entries within the triple's order so that it
    meets as many left cosets of ``H`` as possible.

    The order of the triple never goes up: only entries whose cost is at most
    the current order are allowed. Cosets are matched to source elements by
    augmenting paths; unmatched elements keep their entry.
    """
    eps = t.order
    C = t.costs
    allowed = C <= eps + t.Y.tol
    cosets = coset_space(t.target, H).classes
    owner = {}                       # source element -> coset index

    def augment(c, seen):
        for a in np.flatnonzero(allowed[:, list(cosets[c])].any(axis=1)):
            a = int(a)
            if a in seen:
                continue
            seen.add(a)
            if a not in owner or augment(owner[a], seen):
                owner[a] = c
                return True
        return False

    for c in range(len(cosets)):
        augment(c, set())
    theta = t.theta.copy()
    for a, c in owner.items():
        ok = [m for m in cosets[c] if allowed[a, m]]
        theta[a] = min(ok, key=lambda m: (C[a, m], m))
    return t.with_theta(theta)


# -- generated sequences ------------------------------------------------------

def floyd_closure(d: np.ndarray) -> np.ndarray:
    """Shortest-path closure; the result satisfies the triangle inequality."""
    d = d.copy()
    for k in range(len(d)):
        d = np.minimum(d, d[:, k, None] + d[None, k, :])
    return d


def _pair_orbits(G: IsometryGroup):
    n = G.space.n
    label = -np.ones((n, n), dtype=np.intp)
    count = 0
    for i in range(n):
        for j in range(i + 1, n):
            if label[i, j] < 0:
                for p in G.perms:
                    a, b = p[i], p[j]
                    label[a, b] = label[b, a] = count
                count += 1
    return label, count


def perturb_space(X: FiniteMetricSpace, delta, seed, group: IsometryGroup | None = None):
    """Multiply off-diagonal distances by factors in ``[1-delta, 1+delta]`` and repair.

    With ``group`` the factor is shared along each orbit of point pairs, so the
    group still acts isometrically afterwards. Returns ``(space, info)`` where
    ``info`` holds the raw multiplicative bound ``delta * diam`` and the drift
    caused by the metric repair.
    """
    if delta < 0:
        raise ValueError("delta must be nonnegative")
    if delta >= 1 and X.n > 1:
        raise ValueError("delta >= 1 can produce nonpositive distances")
    rng = np.random.default_rng(seed)
    n = X.n
    d = X.dist.astype(float)
    if group is not None:
        label, count = _pair_orbits(group)
        factors = 1 + rng.uniform(-delta, delta, size=max(count, 1))
        scale = np.where(label >= 0, factors[np.maximum(label, 0)], 1.0)
    else:
        scale = np.ones((n, n))
        iu = np.triu_indices(n, 1)
        scale[iu] = 1 + rng.uniform(-delta, delta, size=len(iu[0]))
        scale = np.triu(scale, 1) + np.triu(scale, 1).T + np.eye(n)
    raw = d * scale
    repaired = floyd_closure(raw)
    info = {"multiplicative_bound": float(delta * d.max()) if n else 0.0,
            "repair_drift": float(np.abs(repaired - raw).max()) if n else 0.0,
            "max_change": float(np.abs(repaired - d).max()) if n else 0.0}
    return FiniteMetricSpace(repaired, X.labels), info


@dataclass
class ConvergenceScenario:
    """Sequence ``(X_k, G_k)`` generated around a limit pair.

    ``group_mode`` is ``"transport"`` (perturb equivariantly and keep the
    limit's permutations) or ``"recompute"`` (perturb freely, then take the
    full isometry group of each ``X_k``).
    """

    limit: IsometryGroup
    schedule: Sequence[float]
    seed: int = 0
    subgroup: Sequence[int] = ()
    group_mode: str = "transport"
    budget: int = 200_000

    def __post_init__(self):
        s = [float(v) for v in self.schedule]
        if any(b >= a for a, b in zip(s, s[1:])) and any(v != 0 for v in s):
            raise ValueError("schedule must be strictly decreasing")
        if any(v < 0 for v in s):
            raise ValueError("schedule entries must be nonnegative")
        if self.group_mode not in ("transport", "recompute"):
            raise ValueError(f"unknown group_mode {self.group_mode!r}")


@dataclass
class ScenarioReport:
    steps: list
    events: list
    converges: bool
    gap: object

    def to_dict(self):
        from .io import jsonable
        return jsonable(self.__dict__)

    def csv_rows(self):
        yield ["k", "delta", "eps", "theta_defect", "gap_verdict", "surjective"]
        for s in self.steps:
            yield [s["k"], s["delta"], s["eps"], s["theta_defect"], s["gap_verdict"],
                   s["surjective"]]


def _orbit_map_order(f, Gk: IsometryGroup, G: IsometryGroup):
    Qk, Q = orbit_space(Gk), orbit_space(G)
    fq = [Q.class_of(int(f[c[0]])) for c in Qk.classes]
    return max(map_order(fq, Qk.as_space(), Q.as_space()))


def run_scenario(s: ConvergenceScenario) -> ScenarioReport:
    """Generate each ``(X_k, G_k)``, solve for a witness, and replay the checks.

    Per step: the optimal triple and its order ``eps_k``, the uniform-metric
    defects of ``theta_k``, the coset-map verdict against the gap of the
    designated subgroup, and the order of the induced orbit-space map.
    ``converges`` holds when for every ``j`` all later ``eps_k`` stay below
    ``delta_j * diam(X)``.
    """
    X, G = s.limit.space, s.limit
    H = closure_indices(G, s.subgroup) if s.subgroup else [G.identity]
    gap = coset_space(G, H).gap
    diam = float(X.diameter)
    cfg = SearchConfig(max_nodes=s.budget)
    steps, events = [], []
    for k, delta in enumerate(s.schedule):
        seed = None if s.seed is None else (s.seed, k)
        if s.group_mode == "transport":
            Xk, info = perturb_space(X, delta, seed, group=G)
            Gk = IsometryGroup(Xk, G.perms)
            Hk = H
        else:
            Xk, info = perturb_space(X, delta, seed)
            Gk = isometry_group(Xk)
            if len(Gk) < len(G):
                events.append({"k": k, "event": "group_collapse",
                               "order": len(Gk), "limit_order": len(G)})
            Hk = [Gk.identity]
        cert = egh_distance(Gk, G, cfg)
        t = spread_theta(cert.witness_forward, H)
        eps = t.order
        theta_rep = theta_as_approximation(t)
        theta_rep.raise_on_failure()
        _, coset_rep = induced_coset_map(t.theta, Gk, Hk, G, H, epsilon=eps)
        steps.append({
            "k": k, "delta": float(delta), "eps": eps, "d_egh": cert.value,
            "optimal": cert.optimal, "order_Gk": len(Gk),
            "theta_defect": max(c.measured for c in theta_rep.checks),
            "theta_report": theta_rep.to_dict(),
            "gap_verdict": "stable" if eps < gap else "unstable",
            "surjective": coset_rep.surjective,
            "coset_report": coset_rep.to_dict(),
            "orbit_defect": _orbit_map_order(t.f, Gk, G),
            "perturbation": info,
        })
    eps_list = [float(st["eps"]) for st in steps]
    converges = all(max(eps_list[j:]) <= float(s.schedule[j]) * diam + 1e-9
                    for j in range(len(eps_list)))
    return ScenarioReport(steps, events, converges, gap)
