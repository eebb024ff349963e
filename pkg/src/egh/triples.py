"""Approximation triples ``(f, theta, psi)`` and their certificates.

A triple goes from ``(X, G_X)`` to ``(Y, G_Y)``: ``f: X -> Y`` is a point map,
``theta: G_X -> G_Y`` and ``psi: G_Y -> G_X`` are maps between element
indices. None of them need be homomorphisms. Every epsilon here is computed
as the least value for which the corresponding inequality holds.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .metric import FiniteMetricSpace, IsometryGroup, StructuralError


class PreconditionError(ValueError):
    """A documented precondition failed; ``measured`` carries the offending value."""

    def __init__(self, message, measured=None):
        super().__init__(message)
        self.measured = measured


class CeilingViolation(AssertionError):
    """A proved bound was exceeded. On valid input this indicates a bug."""


def _index_map(values, size: int, name: str) -> np.ndarray:
    arr = np.asarray(values, dtype=np.intp).reshape(-1)
    if arr.size and (arr.min() < 0 or arr.max() >= size):
        raise StructuralError(f"{name} has entries outside 0..{size - 1}")
    return arr


def _max(arr):
    return arr.max() if arr.size else 0


# -- elementary defects -----------------------------------------------------

@dataclass(frozen=True)
class DiagramSpec:
    """Square ``X -f-> Y``, ``X -k-> X``, ``Y -g-> Y``, ``X -h-> Y``."""

    f: np.ndarray
    k: np.ndarray
    g: np.ndarray
    h: np.ndarray
    X: FiniteMetricSpace
    Y: FiniteMetricSpace


def diagram_defect(spec: DiagramSpec):
    """Least eps with ``d_Y(g f x, h k x) <= eps`` for every ``x``."""
    nX, nY = spec.X.n, spec.Y.n
    f = _index_map(spec.f, nY, "f")
    k = _index_map(spec.k, nX, "k")
    g = _index_map(spec.g, nY, "g")
    h = _index_map(spec.h, nY, "h")
    if not (len(f) == len(k) == len(h) == nX and len(g) == nY):
        raise StructuralError("diagram maps do not match the domains")
    return _max(spec.Y.dist[g[f], h[k]])


def distortion(f, X: FiniteMetricSpace, Y: FiniteMetricSpace):
    f = np.asarray(f, dtype=np.intp)
    return _max(np.abs(Y.dist[np.ix_(f, f)] - X.dist))


def covering_radius(f, Y: FiniteMetricSpace):
    """``max_y min_x d_Y(f x, y)``."""
    f = np.asarray(f, dtype=np.intp)
    return _max(Y.dist[f, :].min(axis=0))


def map_order(f, X: FiniteMetricSpace, Y: FiniteMetricSpace):
    """Return ``(distortion, covering)`` of ``f``; its order is their max."""
    f = _index_map(f, Y.n, "f")
    if len(f) != X.n:
        raise StructuralError(f"f has {len(f)} entries for {X.n} points")
    return distortion(f, X, Y), covering_radius(f, Y)


def equivariance_costs(f, GX: IsometryGroup, GY: IsometryGroup) -> np.ndarray:
    """``C[a, b] = max_x d_Y(b.f(x), f(a.x))`` for ``a`` in G_X, ``b`` in G_Y.

    The defect of ``theta`` is ``max_a C[a, theta[a]]`` and the defect of
    ``psi`` is ``max_b C[psi[b], b]``; both compare the same pair of points.
    """
    f = np.asarray(f, dtype=np.intp)
    left = GY.perms[:, f]        # (mY, nX): b.f(x)
    right = f[GX.perms]          # (mX, nX): f(a.x)
    return GY.space.dist[left[None, :, :], right[:, None, :]].max(axis=-1)


# -- triples ----------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ApproxTriple:
    source: IsometryGroup
    target: IsometryGroup
    f: np.ndarray
    theta: np.ndarray
    psi: np.ndarray

    def __post_init__(self):
        X, Y = self.source.space, self.target.space
        f = _index_map(self.f, Y.n, "f")
        theta = _index_map(self.theta, len(self.target), "theta")
        psi = _index_map(self.psi, len(self.source), "psi")
        if len(f) != X.n:
            raise StructuralError(f"f has {len(f)} entries for {X.n} points")
        if len(theta) != len(self.source):
            raise StructuralError("theta must be defined on every element of the source group")
        if len(psi) != len(self.target):
            raise StructuralError("psi must be defined on every element of the target group")
        for name, arr in (("f", f), ("theta", theta), ("psi", psi)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def X(self):
        return self.source.space

    @property
    def Y(self):
        return self.target.space

    @cached_property
    def costs(self) -> np.ndarray:
        return equivariance_costs(self.f, self.source, self.target)

    @cached_property
    def components(self) -> dict:
        dist, cov = map_order(self.f, self.X, self.Y)
        C = self.costs
        return {
            "distortion": dist,
            "covering": cov,
            "theta_defect": _max(C[np.arange(len(self.source)), self.theta]),
            "psi_defect": _max(C[self.psi, np.arange(len(self.target))]),
        }

    @property
    def order(self):
        return triple_order(self)

    def with_theta(self, theta) -> "ApproxTriple":
        return ApproxTriple(self.source, self.target, self.f, theta, self.psi)


def triple_order(t: ApproxTriple):
    """Least eps for which ``t`` is an eps-equivariant approximation."""
    return max(t.components.values())


def identity_triple(group: IsometryGroup) -> ApproxTriple:
    ident = np.arange(len(group))
    return ApproxTriple(group, group, np.arange(group.space.n), ident, ident)


# -- certificate reports ------------------------------------------------------

@dataclass
class Check:
    name: str
    measured: object
    ceiling: object
    passed: bool


@dataclass
class CertificateReport:
    """Measured quantities next to their proved ceilings."""

    kind: str
    epsilon: object
    checks: list = field(default_factory=list)
    extra: dict = field(default_factory=dict)

    def add(self, name, measured, ceiling, tol):
        self.checks.append(Check(name, measured, ceiling, bool(measured <= ceiling + tol)))

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def __getitem__(self, name) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def raise_on_failure(self):
        bad = [c for c in self.checks if not c.passed]
        if bad:
            lines = ", ".join(f"{c.name}: {c.measured} > {c.ceiling}" for c in bad)
            raise CeilingViolation(f"{self.kind}: {lines}")

    def to_dict(self) -> dict:
        from .io import num_out, jsonable
        return {
            "kind": self.kind,
            "epsilon": num_out(self.epsilon),
            "passed": self.passed,
            "checks": [
                {"name": c.name, "measured": num_out(c.measured),
                 "ceiling": num_out(c.ceiling), "passed": c.passed}
                for c in self.checks
            ],
            **{k: jsonable(v) for k, v in self.extra.items()},
        }


def order_report(t: ApproxTriple) -> CertificateReport:
    rep = CertificateReport("triple_order", t.order)
    rep.extra.update(t.components)
    return rep


# -- almost inverse ---------------------------------------------------------

def almost_inverse(t: ApproxTriple) -> ApproxTriple:
    """Reverse triple ``(f~, psi, theta)`` with ``f~(y)`` the first nearest preimage."""
    f_inv = t.Y.dist[t.f, :].argmin(axis=0)
    return ApproxTriple(t.target, t.source, f_inv, t.psi, t.theta)


def inverse_certificate(t: ApproxTriple, inv: ApproxTriple | None = None) -> CertificateReport:
    """Check the reverse triple's order (<= 4 eps) and both round trips (<= 3 eps)."""
    inv = almost_inverse(t) if inv is None else inv
    eps, tol = t.order, t.Y.tol
    rep = CertificateReport("almost_inverse", eps)
    rep.add("inverse_order", inv.order, 4 * eps, tol)
    rep.add("inverse_map_order", max(map_order(inv.f, t.Y, t.X)), 3 * eps, tol)
    rep.add("round_trip_target", _max(t.Y.dist[t.f[inv.f], np.arange(t.Y.n)]), 3 * eps, tol)
    rep.add("round_trip_source", _max(t.X.dist[inv.f[t.f], np.arange(t.X.n)]), 3 * eps, tol)
    rep.extra["inverse_f"] = inv.f.tolist()
    return rep


# -- theta as an approximation of the groups ---------------------------------

def theta_defects(theta, GX: IsometryGroup, GY: IsometryGroup) -> dict:
    """Covering and two-sided distortion of ``theta`` under the uniform metrics."""
    theta = np.asarray(theta, dtype=np.intp)
    dX, dY = GX.uniform, GY.uniform
    image = dY[np.ix_(theta, theta)]
    return {
        "covering": _max(dY[:, theta].min(axis=1)),
        "upper_distortion": _max(image - dX),
        "lower_distortion": _max(dX - image),
    }


def theta_as_approximation(t: ApproxTriple) -> CertificateReport:
    """Measure how far ``theta`` is from an isometry of the groups.

    Ceilings: covering 4 eps, expansion beyond ``d_{G_X}`` 5 eps, contraction
    below ``d_{G_X}`` 5 eps.
    """
    eps, tol = t.order, t.Y.tol
    d = theta_defects(t.theta, t.source, t.target)
    rep = CertificateReport("theta_approximation", eps)
    rep.add("covering", d["covering"], 4 * eps, tol)
    rep.add("upper_distortion", d["upper_distortion"], 5 * eps, tol)
    rep.add("lower_distortion", d["lower_distortion"], 5 * eps, tol)
    return rep


def group_map_distance(theta, theta2, G: IsometryGroup):
    """``max_g d_G(theta(g), theta2(g))`` in the uniform metric of ``G``."""
    return _max(G.uniform[np.asarray(theta, dtype=np.intp), np.asarray(theta2, dtype=np.intp)])


def perturb_theta(t: ApproxTriple, theta2) -> CertificateReport:
    """Certify ``(f, theta2, psi)`` when ``theta2`` is eps-close to ``theta``.

    Raises :class:`PreconditionError` if the uniform distance between the two
    group maps exceeds the triple's order.
    """
    eps, tol = t.order, t.Y.tol
    theta2 = _index_map(theta2, len(t.target), "theta2")
    gap = group_map_distance(t.theta, theta2, t.target)
    if gap > eps + tol:
        raise PreconditionError(
            f"theta2 is {gap} from theta in the uniform metric, more than eps={eps}", gap)
    t2 = t.with_theta(theta2)
    rep = CertificateReport("perturbed_theta", eps)
    rep.extra["theta_distance"] = gap
    rep.add("triple_order", t2.order, 2 * eps, tol)
    for name, value in theta_defects(theta2, t.source, t.target).items():
        rep.add(name, value, 10 * eps, tol)
    return rep


# -- composition ------------------------------------------------------------

def compose_triples(t1: ApproxTriple, t2: ApproxTriple) -> ApproxTriple:
    """``(f2 o f1, theta2 o theta1, psi1 o psi2)``; order at most ``eps1 + 2 eps2``."""
    if t1.target is not t2.source and not (
            t1.target.space.n == t2.source.space.n
            and np.array_equal(t1.target.perms, t2.source.perms)
            and np.array_equal(t1.target.space.dist, t2.source.space.dist)):
        raise StructuralError("t1 must end where t2 starts")
    return ApproxTriple(t1.source, t2.target, t2.f[t1.f], t2.theta[t1.theta], t1.psi[t2.psi])


def composition_certificate(t1: ApproxTriple, t2: ApproxTriple) -> CertificateReport:
    c = compose_triples(t1, t2)
    rep = CertificateReport("composition", c.order)
    rep.extra.update(eps1=t1.order, eps2=t2.order)
    rep.add("order", c.order, t1.order + 2 * t2.order, t1.Y.tol)
    return rep
