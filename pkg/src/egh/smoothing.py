"""Replace a discrete group map by a locally averaged one.

Each source element ``g`` is sent to a weighted Euclidean average of the
embedded images of nearby net points, then snapped back to the nearest
embedded target element.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from .metric import IsometryGroup
from .triples import ApproxTriple, CertificateReport, PreconditionError, group_map_distance, perturb_theta


@dataclass(frozen=True, eq=False)
class EmbeddedGroup:
    """A group with one Euclidean vector per element.

    ``lipschitz = (low, up)`` are the sharp constants with
    ``low * d_unif <= |phi(a) - phi(b)| <= up * d_unif`` over distinct pairs.
    """

    group: IsometryGroup
    coords: np.ndarray
    lipschitz: tuple

    @classmethod
    def from_coords(cls, group: IsometryGroup, coords) -> "EmbeddedGroup":
        coords = np.asarray(coords, dtype=float)
        if coords.ndim != 2 or len(coords) != len(group):
            raise ValueError("need one coordinate row per group element")
        m = len(group)
        euclid = np.linalg.norm(coords[:, None, :] - coords[None, :, :], axis=-1)
        off = ~np.eye(m, dtype=bool)
        if m > 1 and np.any(euclid[off] == 0):
            a, b = np.argwhere((euclid == 0) & off)[0]
            raise ValueError(f"elements {a} and {b} share coordinates")
        if m == 1:
            lip = (1.0, 1.0)
        else:
            ratio = euclid[off] / group.uniform.astype(float)[off]
            lip = (float(ratio.min()), float(ratio.max()))
        coords.setflags(write=False)
        return cls(group, coords, lip)

    def nearest(self, point) -> int:
        """Index of the nearest embedded element, lowest index on ties."""
        return int(np.argmin(np.linalg.norm(self.coords - point, axis=1)))


def default_embedding(group: IsometryGroup) -> EmbeddedGroup:
    """Displacement profile ``(d(g x_i, x_i))_i`` followed by a one-hot element tag."""
    d = group.space.dist.astype(float)
    n = group.space.n
    disp = d[group.perms, np.arange(n)[None, :]]
    return EmbeddedGroup.from_coords(group, np.hstack([disp, np.eye(len(group))]))


@dataclass(frozen=True)
class NetSpec:
    centers: tuple
    radius: float


def greedy_net(group: IsometryGroup, radius) -> NetSpec:
    """Farthest-point net: start at element 0, add the worst-covered element
    until every element is within ``radius`` of a center."""
    if not radius > 0:
        raise ValueError("radius must be positive")
    D = group.uniform
    centers = [0]
    reach = D[0].copy()
    while reach.max() > radius:
        far = int(np.argmax(reach))
        centers.append(far)
        reach = np.minimum(reach, D[far])
    assert np.all(D[:, centers].min(axis=1) <= radius)
    return NetSpec(tuple(centers), radius)


def full_net(group: IsometryGroup) -> NetSpec:
    return NetSpec(tuple(range(len(group))), 0.0)


@dataclass(frozen=True)
class BumpSpec:
    cutoff: float
    profile: Literal["tent", "indicator"] = "tent"

    def __post_init__(self):
        if not self.cutoff > 0:
            raise ValueError("cutoff must be positive")
        if self.profile not in ("tent", "indicator"):
            raise ValueError(f"unknown profile {self.profile!r}")

    def __call__(self, s):
        s = np.asarray(s, dtype=float)
        if self.profile == "indicator":
            return (s < self.cutoff).astype(float)
        return np.clip(1.0 - s / self.cutoff, 0.0, None)


def smooth_theta(t: ApproxTriple, emb: EmbeddedGroup, net: NetSpec, bump: BumpSpec):
    """Average ``theta`` over net points in the embedding and retract.

    Returns ``(theta2, report)``. The report carries the uniform distance
    between ``theta2`` and ``theta``, the ceiling
    ``up/low * 2 * (cutoff + 5 eps)``, and, when the distance is at most
    eps, the re-certification of ``(f, theta2, psi)``.
    """
    if emb.group is not t.target and not np.array_equal(emb.group.perms, t.target.perms):
        raise ValueError("embedding must be of the triple's target group")
    if net.radius > bump.cutoff / 2:
        raise PreconditionError(
            f"net radius {net.radius} exceeds half the cutoff {bump.cutoff}", net.radius)
    Dk = t.source.uniform.astype(float)
    centers = np.asarray(net.centers, dtype=np.intp)
    W = bump(Dk[:, centers])                     # (|G_k|, |net|)
    denom = W.sum(axis=1)
    if np.any(denom <= 0):
        g = int(np.flatnonzero(denom <= 0)[0])
        raise PreconditionError(f"element {g} has no net point inside the cutoff", g)
    targets = emb.coords[t.theta[centers]]      # (|net|, q)
    averaged = (W @ targets) / denom[:, None]
    theta2 = np.array([emb.nearest(p) for p in averaged], dtype=np.intp)

    eps = t.order
    low, up = emb.lipschitz
    moved = group_map_distance(t.theta, theta2, t.target)
    rep = CertificateReport("smoothing", eps)
    rep.add("theta_distance", moved, up / low * 2 * (bump.cutoff + 5 * float(eps)), 1e-9)
    rep.extra["theta2"] = theta2.tolist()
    rep.extra["recertified"] = None
    if moved <= eps + t.Y.tol:
        sub = perturb_theta(t, theta2)
        rep.extra["recertified"] = sub.passed
        rep.checks.extend(sub.checks)
    return theta2, rep
