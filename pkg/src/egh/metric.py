"""Finite metric spaces, their isometry groups and the uniform metric.

Distances live in a numpy array. Float tables use ``float64`` and compare
with slack ``TOL``; exact tables use ``object`` dtype holding
:class:`fractions.Fraction` and compare with zero slack.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

TOL = 1e-9


class StructuralError(ValueError):
    """Input tables have the wrong shape or do not fit together."""


def tol_for(arr: np.ndarray) -> float:
    return 0 if arr.dtype == object else TOL


def as_table(dist, exact: bool = False) -> np.ndarray:
    """Coerce a nested sequence into a float64 or Fraction table."""
    if exact:
        rows = [[Fraction(str(v)) if isinstance(v, float) else Fraction(v) for v in row]
                for row in dist]
        out = np.empty((len(rows), len(rows[0]) if rows else 0), dtype=object)
        for i, row in enumerate(rows):
            if len(row) != out.shape[1]:
                raise StructuralError("ragged distance table")
            out[i, :] = row
        return out
    try:
        rows = [[float(Fraction(v)) if isinstance(v, str) else float(v) for v in row]
                for row in dist]
        arr = np.array(rows, dtype=float)
    except ValueError as exc:
        raise StructuralError(f"cannot read distance table: {exc}") from None
    if arr.size == 0:
        arr = arr.reshape(0, 0)
    return arr


@dataclass(frozen=True, eq=False)
class FiniteMetricSpace:
    """Labelled points with a square distance table.

    Construction only checks structure; use :func:`validate_space` for the
    metric axioms.
    """

    dist: np.ndarray
    labels: tuple = ()

    def __post_init__(self):
        dist = self.dist
        if not isinstance(dist, np.ndarray):
            dist = as_table(dist)
        if dist.ndim != 2 or dist.shape[0] != dist.shape[1]:
            raise StructuralError(f"distance table must be square, got shape {dist.shape}")
        labels = tuple(self.labels) if self.labels else tuple(range(dist.shape[0]))
        if len(labels) != dist.shape[0]:
            raise StructuralError(
                f"{len(labels)} labels for a {dist.shape[0]}x{dist.shape[0]} table")
        dist = dist.copy()
        dist.setflags(write=False)
        object.__setattr__(self, "dist", dist)
        object.__setattr__(self, "labels", labels)

    @classmethod
    def from_table(cls, dist, labels: Sequence | None = None, exact: bool = False):
        return cls(as_table(dist, exact=exact), tuple(labels) if labels else ())

    @property
    def n(self) -> int:
        return self.dist.shape[0]

    def __len__(self):
        return self.n

    @property
    def exact(self) -> bool:
        return self.dist.dtype == object

    @property
    def tol(self) -> float:
        return tol_for(self.dist)

    @property
    def diameter(self):
        return self.dist.max() if self.n else 0

    def __repr__(self):
        return f"FiniteMetricSpace(n={self.n}, exact={self.exact})"


@dataclass(frozen=True)
class Violation:
    axiom: str
    indices: tuple
    amount: object


@dataclass
class ValidationReport:
    violations: list = field(default_factory=list)

    @property
    def valid(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.valid

    def to_dict(self) -> dict:
        from .io import num_out
        return {
            "valid": self.valid,
            "violations": [
                {"axiom": v.axiom, "indices": list(v.indices), "amount": num_out(v.amount)}
                for v in self.violations
            ],
        }


def validate_space(space: FiniteMetricSpace) -> ValidationReport:
    """Check every metric axiom and list all witnesses of failure.

    Triangle witnesses are ``(i, k, j)`` meaning ``d[i,k] > d[i,j] + d[j,k]``.
    """
    d, tol, n = space.dist, space.tol, space.n
    report = ValidationReport()
    for i in range(n):
        if d[i, i] != 0 and abs(d[i, i]) > tol:
            report.violations.append(Violation("zero_diagonal", (i,), d[i, i]))
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            if abs(d[i, j] - d[j, i]) > tol:
                report.violations.append(Violation("symmetry", (i, j), d[i, j] - d[j, i]))
            if not d[i, j] > tol:
                report.violations.append(Violation("positivity", (i, j), d[i, j]))
    for i in range(n):
        for k in range(n):
            for j in range(n):
                excess = d[i, k] - d[i, j] - d[j, k]
                if excess > tol:
                    report.violations.append(Violation("triangle", (i, k, j), excess))
    return report


def is_isometry(space: FiniteMetricSpace, perm: Sequence[int]) -> bool:
    p = np.asarray(perm, dtype=np.intp)
    if sorted(p.tolist()) != list(range(space.n)):
        return False
    diff = space.dist[np.ix_(p, p)] - space.dist
    return bool(np.all(np.abs(diff) <= space.tol)) if space.n else True


class IsometryGroup:
    """A finite group of isometries of ``space``, stored as permutations.

    Element ``a`` acts by ``x -> perms[a, x]``. The product ``mul[a, b]`` is the
    composite ``a o b`` (apply ``b`` first). Element order is whatever was
    passed in; :func:`isometry_group` produces lexicographic order.
    """

    def __init__(self, space: FiniteMetricSpace, perms: Iterable[Sequence[int]]):
        self.space = space
        perms = np.array([list(p) for p in perms], dtype=np.intp).reshape(-1, space.n)
        if len(perms) == 0:
            raise StructuralError("a group needs at least the identity")
        for a, p in enumerate(perms):
            if not is_isometry(space, p):
                raise StructuralError(f"element {a} ({p.tolist()}) is not an isometry")
        index = {tuple(p): a for a, p in enumerate(perms.tolist())}
        if len(index) != len(perms):
            raise StructuralError("repeated group element")
        m = len(perms)
        mul = np.empty((m, m), dtype=np.intp)
        for a in range(m):
            for b in range(m):
                prod = tuple(perms[a][perms[b]].tolist())
                if prod not in index:
                    raise StructuralError(f"not closed: {a} * {b} is outside the set")
                mul[a, b] = index[prod]
        ident = tuple(range(space.n))
        if ident not in index:
            raise StructuralError("identity missing")
        self.perms = perms
        self.perms.setflags(write=False)
        self.mul = mul
        self.identity = index[ident]
        self.inv = np.array([int(np.flatnonzero(mul[a] == self.identity)[0]) for a in range(m)],
                            dtype=np.intp)
        self._index = index
        self._uniform = None

    def __len__(self):
        return len(self.perms)

    @property
    def order(self) -> int:
        return len(self.perms)

    def index_of(self, perm: Sequence[int]) -> int:
        return self._index[tuple(int(v) for v in perm)]

    def act(self, a: int, x):
        return self.perms[a][x]

    @property
    def uniform(self) -> np.ndarray:
        """Cached uniform metric table."""
        if self._uniform is None:
            self._uniform = uniform_metric(self, self.space)
            self._uniform.setflags(write=False)
        return self._uniform

    def check_axioms(self) -> list[str]:
        """Exhaustively check closure, associativity, identity and inverses."""
        problems = []
        m, mul, e = len(self), self.mul, self.identity
        for a in range(m):
            if mul[a, e] != a or mul[e, a] != a:
                problems.append(f"identity fails at {a}")
            if mul[a, self.inv[a]] != e or mul[self.inv[a], a] != e:
                problems.append(f"inverse fails at {a}")
        # mul[mul[a,b],c] == mul[a,mul[b,c]] for all triples
        left = mul[mul, :]                      # [a,b,c] -> (ab)c
        right = mul[np.arange(m)[:, None, None], mul[None, :, :]]  # [a,b,c] -> a(bc)
        for a, b, c in np.argwhere(left != right):
            problems.append(f"associativity fails at {(int(a), int(b), int(c))}")
        for a, p in enumerate(self.perms):
            if not is_isometry(self.space, p):
                problems.append(f"element {a} is not an isometry")
        return problems

    def __repr__(self):
        return f"IsometryGroup(order={len(self)}, n={self.space.n})"


def isometry_group(space: FiniteMetricSpace) -> IsometryGroup:
    """All distance-preserving permutations of ``space``, in lexicographic order."""
    if not validate_space(space).valid:
        raise ValueError("isometry_group needs a valid metric space")
    n, d, tol = space.n, space.dist, space.tol
    if n == 0:
        raise StructuralError("empty space")
    # rows must match as multisets; cheap necessary condition
    sig = [np.sort(d[i]) for i in range(n)]
    compatible = [[j for j in range(n) if np.all(np.abs(sig[i] - sig[j]) <= tol)]
                  for i in range(n)]
    found = []
    img = [-1] * n
    used = [False] * n

    def extend(i):
        if i == n:
            found.append(tuple(img))
            return
        for j in compatible[i]:
            if used[j]:
                continue
            if all(abs(d[img[s], j] - d[s, i]) <= tol for s in range(i)):
                img[i] = j
                used[j] = True
                extend(i + 1)
                used[j] = False
        img[i] = -1

    extend(0)
    return IsometryGroup(space, found)


def trivial_group(space: FiniteMetricSpace) -> IsometryGroup:
    return IsometryGroup(space, [list(range(space.n))])


def uniform_metric(group: IsometryGroup, space: FiniteMetricSpace | None = None) -> np.ndarray:
    """``table[a, b] = max_x d(a.x, b.x)`` over all points ``x``."""
    space = group.space if space is None else space
    if space.n != group.perms.shape[1]:
        raise StructuralError(
            f"group acts on {group.perms.shape[1]} points, space has {space.n}")
    for a, p in enumerate(group.perms):
        if not is_isometry(space, p):
            raise StructuralError(f"element {a} does not act isometrically on this space")
    P = group.perms
    return space.dist[P[:, None, :], P[None, :, :]].max(axis=-1)


def closure_indices(group: IsometryGroup, generators: Iterable[int]) -> list[int]:
    """Indices (sorted) of the subgroup generated by ``generators``."""
    gens = [int(g) for g in generators]
    for g in gens:
        if not 0 <= g < len(group):
            raise IndexError(f"generator index {g} out of range")
    members = {group.identity}
    frontier = [group.identity]
    while frontier:
        nxt = []
        for a in frontier:
            for g in gens:
                c = int(group.mul[a, g])
                if c not in members:
                    members.add(c)
                    nxt.append(c)
        frontier = nxt
    return sorted(members)


def subgroup_closure(group: IsometryGroup, generators: Iterable[int]) -> IsometryGroup:
    """Smallest subgroup containing the generators (ordered as in ``group``)."""
    idx = closure_indices(group, generators)
    return IsometryGroup(group.space, group.perms[idx])


def is_subgroup(group: IsometryGroup, indices: Iterable[int]) -> bool:
    s = set(int(i) for i in indices)
    if group.identity not in s:
        return False
    return all(int(group.mul[a, b]) in s for a in s for b in s) and \
        all(int(group.inv[a]) in s for a in s)
