"""Ready-made spaces, groups and triples used by the demos and tests."""

from __future__ import annotations

import numpy as np

from .metric import FiniteMetricSpace, IsometryGroup
from .smoothing import EmbeddedGroup
from .triples import ApproxTriple


def two_point(d=1.0, exact=False) -> FiniteMetricSpace:
    return FiniteMetricSpace.from_table([[0, d], [d, 0]], exact=exact)


def cycle_space(n: int, circumference=1.0) -> FiniteMetricSpace:
    """``n`` equally spaced points on a circle, arc-length metric."""
    i = np.arange(n)
    steps = np.abs(i[:, None] - i[None, :])
    return FiniteMetricSpace(np.minimum(steps, n - steps) * (circumference / n))


def square() -> FiniteMetricSpace:
    """Path metric of the 4-cycle with unit edges."""
    return cycle_space(4, 4.0)


def rotation_group(X: FiniteMetricSpace, step: int = 1) -> IsometryGroup:
    """Rotations of a cycle space by multiples of ``step``; element ``a`` is ``a*step``."""
    n = X.n
    shifts = range(0, n, step)
    return IsometryGroup(X, [[(x + s) % n for x in range(n)] for s in shifts])


def rectangle(short=0.2, long=1.0) -> FiniteMetricSpace:
    """Corners 0-1-2-3 of a rectangle; 0-1 and 2-3 are the short sides."""
    diag = float(np.hypot(short, long))
    return FiniteMetricSpace(np.array([
        [0, short, diag, long],
        [short, 0, long, diag],
        [diag, long, 0, short],
        [long, diag, short, 0],
    ]))


def circle_embedding(G: IsometryGroup) -> EmbeddedGroup:
    """Rotation by ``a`` steps of an ``N``-cycle goes to ``exp(2 pi i a / N)``."""
    N = G.space.n
    shift = G.perms[:, 0].astype(float)
    ang = 2 * np.pi * shift / N
    return EmbeddedGroup.from_coords(G, np.column_stack([np.cos(ang), np.sin(ang)]))


def circle_triple(n: int, N: int, jitter: int = 0, seed=0) -> ApproxTriple:
    """Triple from the ``n``-cycle to the ``N``-cycle (``n`` divides ``N``), both
    under their full rotation groups.

    ``theta`` sends rotation ``j`` to rotation ``j*N/n`` plus a seeded offset of
    at most ``jitter`` steps of the fine cycle.
    """
    if N % n:
        raise ValueError("n must divide N")
    Xk, X = cycle_space(n), cycle_space(N)
    Gk, G = rotation_group(Xk), rotation_group(X)
    r = N // n
    rng = np.random.default_rng(seed)
    offsets = rng.integers(-jitter, jitter + 1, size=n) if jitter else np.zeros(n, dtype=int)
    f = np.arange(n) * r
    theta = (np.arange(n) * r + offsets) % N
    psi = np.rint(np.arange(N) / r).astype(int) % n
    return ApproxTriple(Gk, G, f, theta, psi)
