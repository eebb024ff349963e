"""Equivariant Gromov-Hausdorff distance between finite pairs.

The distance is searched over point maps ``f`` only: once ``f`` is fixed the
best ``theta`` and ``psi`` are chosen one group element at a time, because
both equivariance defects are maxima of independent per-element terms.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .metric import FiniteMetricSpace, IsometryGroup, StructuralError
from .triples import (ApproxTriple, CertificateReport, PreconditionError, _index_map,
                      covering_radius, equivariance_costs, map_order)

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SearchConfig:
    max_nodes: int = 2_000_000
    prune_margin: float = 0.0
    symmetry_reduction: bool = True
    mode: Literal["exact", "upper_bound"] = "exact"

    def __post_init__(self):
        if self.max_nodes < 1:
            raise ValueError("max_nodes must be at least 1")
        if self.mode not in ("exact", "upper_bound"):
            raise ValueError(f"unknown mode {self.mode!r}")


@dataclass
class DistanceCertificate:
    value: object
    witness_forward: ApproxTriple
    witness_backward: ApproxTriple
    optimal: bool
    nodes: int = 0

    def to_dict(self) -> dict:
        from .io import num_out, triple_to_dict
        return {
            "value": num_out(self.value),
            "optimal": self.optimal,
            "nodes": self.nodes,
            "forward": {"order": num_out(self.witness_forward.order),
                        **triple_to_dict(self.witness_forward, inline=False)},
            "backward": {"order": num_out(self.witness_backward.order),
                         **triple_to_dict(self.witness_backward, inline=False)},
        }


def best_theta_for_f(f, GX: IsometryGroup, GY: IsometryGroup) -> np.ndarray:
    """Element-wise optimal ``theta``; ties go to the lowest index."""
    return equivariance_costs(f, GX, GY).argmin(axis=1)


def best_psi_for_f(f, GX: IsometryGroup, GY: IsometryGroup) -> np.ndarray:
    return equivariance_costs(f, GX, GY).argmin(axis=0)


def best_triple_for_f(f, GX: IsometryGroup, GY: IsometryGroup) -> ApproxTriple:
    C = equivariance_costs(f, GX, GY)
    return ApproxTriple(GX, GY, f, C.argmin(axis=1), C.argmin(axis=0))


def _orbit_reps(G: IsometryGroup) -> list[int]:
    return sorted({int(G.perms[:, y].min()) for y in range(G.space.n)})


class _Search:
    """Depth-first branch and bound over point maps ``X -> Y``."""

    def __init__(self, GX: IsometryGroup, GY: IsometryGroup, cfg: SearchConfig):
        self.GX, self.GY, self.cfg = GX, GY, cfg
        self.dX, self.dY = GX.space.dist, GY.space.dist
        self.n, self.p = GX.space.n, GY.space.n
        self.mX, self.mY = len(GX), len(GY)
        ecc = self.dX.max(axis=1)
        # high eccentricity first, index breaks ties
        self.order = sorted(range(self.n), key=lambda x: (-ecc[x], x))
        self.nodes = 0
        self.exhausted = False
        self.best_value = None
        self.best_f = None

    def score(self, f):
        dist, cov = map_order(f, self.GX.space, self.GY.space)
        C = equivariance_costs(f, self.GX, self.GY)
        return max(dist, cov, C.min(axis=1).max(), C.min(axis=0).max())

    def greedy(self) -> np.ndarray:
        f = np.full(self.n, -1, dtype=np.intp)
        done = []
        for x in self.order:
            best, best_y = None, 0
            for y in range(self.p):
                worst = max((abs(self.dY[y, f[s]] - self.dX[x, s]) for s in done), default=0)
                if best is None or worst < best:
                    best, best_y = worst, y
            f[x] = best_y
            done.append(x)
        return f

    def local_descent(self, f: np.ndarray, value):
        improved = True
        while improved and self.nodes < self.cfg.max_nodes:
            improved = False
            for x in self.order:
                for y in range(self.p):
                    if y == f[x]:
                        continue
                    self.nodes += 1
                    g = f.copy()
                    g[x] = y
                    v = self.score(g)
                    if v < value:
                        f, value, improved = g, v, True
        return f, value

    def run(self):
        f0 = self.greedy()
        self.best_f, self.best_value = f0, self.score(f0)
        if self.cfg.mode == "upper_bound":
            self.best_f, self.best_value = self.local_descent(f0, self.best_value)
            self.exhausted = self.best_value == 0
            return
        if self.best_value == 0:
            self.exhausted = True
            return
        f = np.full(self.n, -1, dtype=np.intp)
        assigned = np.zeros(self.n, dtype=bool)
        C = np.full((self.mX, self.mY), 0, dtype=self.dY.dtype)
        self.exhausted = self._descend(0, f, assigned, C, 0)

    def _bound(self, C, dist):
        return max(dist, C.min(axis=1).max(), C.min(axis=0).max())

    def _update_costs(self, C, f, assigned, x):
        # new (a, x') pairs: both x' and a.x' assigned and one of them is x
        PX, PY, dY = self.GX.perms, self.GY.perms, self.dY
        C = C.copy()
        for a in range(self.mX):
            ax = PX[a, x]
            if assigned[ax]:
                np.maximum(C[a], dY[PY[:, f[x]], f[ax]], out=C[a])
            pre = int(np.flatnonzero(PX[a] == x)[0])
            if pre != x and assigned[pre]:
                np.maximum(C[a], dY[PY[:, f[pre]], f[x]], out=C[a])
        return C

    def _descend(self, depth, f, assigned, C, dist) -> bool:
        """Return True if the subtree was fully explored."""
        if depth == self.n:
            value = max(dist, covering_radius(f, self.GY.space),
                        C.min(axis=1).max(), C.min(axis=0).max())
            if value < self.best_value:
                self.best_value, self.best_f = value, f.copy()
            return True
        x = self.order[depth]
        placed = self.order[:depth]
        candidates = range(self.p)
        if depth == 0 and self.cfg.symmetry_reduction:
            candidates = _orbit_reps(self.GY)
        complete = True
        for y in candidates:
            if self.nodes >= self.cfg.max_nodes:
                return False
            self.nodes += 1
            if placed:
                d_new = max(dist, np.abs(self.dY[y, f[placed]] - self.dX[x, placed]).max())
            else:
                d_new = dist
            if d_new >= self.best_value - self.cfg.prune_margin:
                continue
            f[x] = y
            assigned[x] = True
            C2 = self._update_costs(C, f, assigned, x)
            if self._bound(C2, d_new) < self.best_value - self.cfg.prune_margin:
                complete &= self._descend(depth + 1, f, assigned, C2, d_new)
            assigned[x] = False
            f[x] = -1
            if not complete:
                return False
        return complete


def one_way_distance(GX: IsometryGroup, GY: IsometryGroup, cfg: SearchConfig | None = None):
    """Best triple from ``(X, G_X)`` to ``(Y, G_Y)``.

    Returns ``(triple, optimal, nodes)``.
    """
    cfg = cfg or SearchConfig()
    s = _Search(GX, GY, cfg)
    s.run()
    if not s.exhausted and cfg.mode == "exact":
        log.warning("node budget %d exhausted; returning an upper bound", cfg.max_nodes)
    return best_triple_for_f(s.best_f, GX, GY), s.exhausted, s.nodes


def egh_distance(A: IsometryGroup, B: IsometryGroup,
                 cfg: SearchConfig | None = None) -> DistanceCertificate:
    """Least eps with eps-triples both from ``A`` to ``B`` and back.

    ``A`` and ``B`` are groups carrying their spaces, i.e. pairs ``(X, G)``.
    """
    fwd, ok1, n1 = one_way_distance(A, B, cfg)
    bwd, ok2, n2 = one_way_distance(B, A, cfg)
    return DistanceCertificate(max(fwd.order, bwd.order), fwd, bwd, ok1 and ok2, n1 + n2)


# -- base-point repair ---------------------------------------------------------

def basepoint_repair(f, Xk: FiniteMetricSpace, X: FiniteMetricSpace,
                     target_pre: int, target: int):
    """Redirect ``f`` so that ``target_pre`` lands exactly on ``target``.

    Returns ``(f_repaired, report)``. The report checks the repaired map's
    order against ``2 eps`` and records the sharp one-sided excesses
    ``max d_X(f~ x', f~ x'') - d(x', x'')`` and its reverse.
    """
    f = _index_map(f, X.n, "f")
    if len(f) != Xk.n:
        raise StructuralError(f"f has {len(f)} entries for {Xk.n} points")
    dist, cov = map_order(f, Xk, X)
    eps = max(dist, cov)
    gap = X.dist[f[target_pre], target]
    if gap > eps + X.tol:
        raise PreconditionError(
            f"f({target_pre}) is {gap} from the target, more than eps={eps}", gap)
    g = f.copy()
    g[target_pre] = target
    img = X.dist[np.ix_(g, g)]
    dist2, cov2 = map_order(g, Xk, X)
    rep = CertificateReport("basepoint_repair", eps)
    rep.extra.update(
        original_distortion=dist, original_covering=cov,
        expansion=(img - Xk.dist).max(), contraction=(Xk.dist - img).max(),
        repaired_order=max(dist2, cov2))
    rep.add("repaired_order", max(dist2, cov2), 2 * eps, X.tol)
    rep.add("expansion", (img - Xk.dist).max(), 2 * eps, X.tol)
    rep.add("contraction", (Xk.dist - img).max(), 2 * eps, X.tol)
    return g, rep


# -- pulled-back action --------------------------------------------------------

def pullback_action(G: IsometryGroup, theta_inv, Gk: IsometryGroup) -> IsometryGroup:
    """Let ``G`` act on the space of ``Gk`` by ``g * x = theta_inv(g)(x)``.

    The returned group lists ``Gk``'s permutations in the order of ``G``'s
    elements, so index ``a`` in the result stands for ``g_a``.
    """
    theta_inv = _index_map(theta_inv, len(Gk), "theta_inv")
    if len(theta_inv) != len(G):
        raise StructuralError("theta_inv must be defined on every element of G")
    if len(set(theta_inv.tolist())) != len(Gk):
        raise PreconditionError("theta_inv is not a bijection onto Gk")
    for a in range(len(G)):
        for b in range(len(G)):
            lhs = theta_inv[G.mul[a, b]]
            rhs = Gk.mul[theta_inv[a], theta_inv[b]]
            if lhs != rhs:
                raise PreconditionError(
                    f"theta_inv(g{a} g{b}) != theta_inv(g{a}) theta_inv(g{b})", (a, b))
    return IsometryGroup(Gk.space, Gk.perms[theta_inv])
