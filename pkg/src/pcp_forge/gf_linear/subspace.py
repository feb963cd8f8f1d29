"""Linear subspaces of F_q^n in canonical reduced row-echelon form."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property

from .field import Field, get_field


@dataclass
class Limits:
    enum_budget: int = 10**7
    retry_cap: int = 1000


LIMITS = Limits()


class BudgetExceeded(RuntimeError):
    def __init__(self, what: str, required: int, budget: int):
        super().__init__(f"{what}: requires {required} items, budget is {budget}")
        self.required = required
        self.budget = budget


class RetryCapExceeded(RuntimeError):
    pass


class DimensionMismatch(ValueError):
    pass


def check_budget(what: str, required: int, budget: int | None = None) -> None:
    b = LIMITS.enum_budget if budget is None else budget
    if required > b:
        raise BudgetExceeded(what, required, b)


def rref(rows, F: Field, ncols: int) -> tuple[tuple[tuple[int, ...], ...], tuple[int, ...]]:
    """Row-reduce ``rows``; return the nonzero reduced rows and their pivot columns."""
    rows = [list(r) for r in rows]
    pivots = []
    r = 0
    nrows = len(rows)
    for c in range(ncols):
        if r == nrows:
            break
        p = r
        while p < nrows and rows[p][c] == 0:
            p += 1
        if p == nrows:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        lead = rows[r][c]
        if lead != 1:
            inv = F.inv(lead)
            rows[r] = [F.mul(inv, x) for x in rows[r]]
        pr = rows[r]
        for i in range(nrows):
            if i != r:
                f = rows[i][c]
                if f:
                    rows[i] = F.axpy(rows[i], F.neg(f), pr)
        pivots.append(c)
        r += 1
    return tuple(tuple(x) for x in rows[:r]), tuple(pivots)


def rank(rows, F: Field, ncols: int) -> int:
    return len(rref(rows, F, ncols)[1])


@dataclass(frozen=True)
class Subspace:
    """A subspace of F_q^ambient_dim stored by its RREF basis.

    Two subspaces are equal iff their canonical bases are equal, so instances
    work directly as dict keys. Build instances with :func:`span` or the
    classmethods; the raw constructor trusts its input to be canonical.
    """

    q: int
    ambient_dim: int
    basis: tuple[tuple[int, ...], ...]

    @classmethod
    def span(cls, vectors, ambient_dim: int, q: int) -> "Subspace":
        F = get_field(q)
        vecs = [tuple(v) for v in vectors]
        for v in vecs:
            if len(v) != ambient_dim:
                raise DimensionMismatch(f"vector of length {len(v)} in ambient dimension {ambient_dim}")
        basis, _ = rref(vecs, F, ambient_dim)
        return cls(q, ambient_dim, basis)

    @classmethod
    def zero(cls, ambient_dim: int, q: int) -> "Subspace":
        return cls(q, ambient_dim, ())

    @classmethod
    def full(cls, ambient_dim: int, q: int) -> "Subspace":
        basis = tuple(tuple(1 if j == i else 0 for j in range(ambient_dim)) for i in range(ambient_dim))
        return cls(q, ambient_dim, basis)

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def field(self) -> Field:
        return get_field(self.q)

    @cached_property
    def pivots(self) -> tuple[int, ...]:
        out = []
        for row in self.basis:
            for j, x in enumerate(row):
                if x:
                    out.append(j)
                    break
        return tuple(out)

    def __repr__(self):
        return f"Subspace(q={self.q}, n={self.ambient_dim}, basis={list(map(list, self.basis))})"

    def _same_ambient(self, other: "Subspace") -> None:
        if self.q != other.q or self.ambient_dim != other.ambient_dim:
            raise DimensionMismatch("subspaces live in different ambient spaces")

    def coords(self, v) -> tuple[int, ...]:
        """Coefficients of v in the canonical basis (v must lie in the subspace)."""
        return tuple(v[p] for p in self.pivots)

    def from_coords(self, coeffs) -> tuple[int, ...]:
        return self.field.combine(coeffs, self.basis, self.ambient_dim)

    def contains(self, v) -> bool:
        v = tuple(v)
        if len(v) != self.ambient_dim:
            raise DimensionMismatch("vector length does not match ambient dimension")
        return self.from_coords(self.coords(v)) == v

    def contains_subspace(self, other: "Subspace") -> bool:
        self._same_ambient(other)
        return all(self.contains(b) for b in other.basis)

    def index_of(self, v) -> int:
        """Position of v in :meth:`points` order (v must lie in the subspace)."""
        idx = 0
        q = self.q
        for p in self.pivots:
            idx = idx * q + v[p]
        return idx

    def points(self, budget: int | None = None) -> tuple[tuple[int, ...], ...]:
        """All q^dim points, zero first, lexicographic in basis coefficients."""
        return self._points(budget)

    def _points(self, budget=None):
        cached = self.__dict__.get("_point_cache")
        if cached is not None:
            return cached
        check_budget("enumerate_points", self.q ** self.dim, budget)
        F = self.field
        n = self.ambient_dim
        pts = [tuple([0] * n)]
        # build lexicographically: first coefficient most significant
        for row in reversed(self.basis):
            new = []
            for c in range(self.q):
                if c == 0:
                    new.extend(pts)
                    continue
                scaled = F.vscale(c, row)
                new.extend(F.vadd(scaled, p) for p in pts)
            pts = new
        pts = tuple(pts)
        self.__dict__["_point_cache"] = pts
        return pts

    def __add__(self, other: "Subspace") -> "Subspace":
        return subspace_sum(self, other)

    def to_json(self) -> dict:
        return {"ambient_dim": self.ambient_dim, "q": self.q, "basis": [list(r) for r in self.basis]}

    @classmethod
    def from_json(cls, obj: dict) -> "Subspace":
        return cls.span(obj["basis"], obj["ambient_dim"], obj["q"])

    def is_canonical(self) -> bool:
        return Subspace.span(self.basis, self.ambient_dim, self.q) == self


def span(vectors, ambient_dim: int, q: int = 2) -> Subspace:
    return Subspace.span(vectors, ambient_dim, q)


def enumerate_points(S: Subspace, budget: int | None = None):
    yield from S.points(budget)


def subspace_sum(S1: Subspace, S2: Subspace) -> Subspace:
    S1._same_ambient(S2)
    return Subspace.span(S1.basis + S2.basis, S1.ambient_dim, S1.q)


def subspace_intersect(S1: Subspace, S2: Subspace) -> Subspace:
    """Zassenhaus: reduce [[S1 | S1], [S2 | 0]]; rows with zero left half span the intersection."""
    S1._same_ambient(S2)
    n = S1.ambient_dim
    F = S1.field
    rows = [tuple(b) + tuple(b) for b in S1.basis] + [tuple(b) + (0,) * n for b in S2.basis]
    red, piv = rref(rows, F, 2 * n)
    inter = [row[n:] for row, p in zip(red, piv) if p >= n]
    return Subspace.span(inter, n, S1.q)


def is_disjoint(S1: Subspace, S2: Subspace) -> bool:
    S1._same_ambient(S2)
    return S1.dim + S2.dim == subspace_sum(S1, S2).dim


def gaussian_binomial(n: int, d: int, q: int) -> int:
    if d < 0 or d > n:
        return 0
    num = 1
    den = 1
    for i in range(d):
        num *= q ** (n - i) - 1
        den *= q ** (i + 1) - 1
    return num // den


def count_subspaces(d: int, ambient_dim: int, q: int) -> int:
    if not 0 <= d <= ambient_dim:
        raise ValueError("need 0 <= d <= ambient_dim")
    return gaussian_binomial(ambient_dim, d, q)


def _rref_matrices(d: int, n: int, q: int):
    """Every d x n RREF matrix of rank d over GF(q), pivots in lexicographic order."""
    for piv in itertools.combinations(range(n), d):
        free = [(r, c) for r in range(d) for c in range(piv[r] + 1, n) if c not in piv]
        for vals in itertools.product(range(q), repeat=len(free)):
            rows = [[0] * n for _ in range(d)]
            for r, p in enumerate(piv):
                rows[r][p] = 1
            for (r, c), x in zip(free, vals):
                rows[r][c] = x
            yield tuple(tuple(r) for r in rows)


def enumerate_subspaces(d: int, ambient: Subspace, budget: int | None = None):
    """Yield every d-subspace of ``ambient`` once, in a fixed canonical order."""
    k = ambient.dim
    if not 0 <= d <= k:
        raise ValueError("need 0 <= d <= dim ambient")
    check_budget("enumerate_subspaces", count_subspaces(d, k, ambient.q), budget)
    F = ambient.field
    n = ambient.ambient_dim
    full = k == n and ambient == Subspace.full(n, ambient.q)
    for mat in _rref_matrices(d, k, ambient.q):
        if full:
            yield Subspace(ambient.q, n, mat)
        else:
            vecs = [F.combine(row, ambient.basis, n) for row in mat]
            yield Subspace.span(vecs, n, ambient.q)


def complement_basis(W: Subspace, ambient: Subspace) -> list[tuple[int, ...]]:
    """Vectors of ``ambient``'s basis extending W's basis to a basis of ``ambient``."""
    F = W.field
    n = W.ambient_dim
    out = []
    cur = list(W.basis)
    r = len(cur)
    for b in ambient.basis:
        if rank(cur + [b], F, n) > r:
            cur.append(b)
            out.append(b)
            r += 1
    return out


def enumerate_subspaces_containing(d: int, W0: Subspace, ambient: Subspace, budget: int | None = None):
    """d-subspaces X with W0 <= X <= ambient, via X = W0 + (X meet a fixed complement)."""
    if not ambient.contains_subspace(W0):
        raise ValueError("W0 is not inside ambient")
    comp = complement_basis(W0, ambient)
    n = W0.ambient_dim
    C = Subspace.span(comp, n, W0.q)
    for U in enumerate_subspaces(d - W0.dim, C, budget):
        yield subspace_sum(W0, U)


@dataclass(frozen=True)
class EdgeSpaceView:
    """A subspace of F^{2m} read as a set of edges (left | right)."""

    subspace: Subspace
    m: int

    def __post_init__(self):
        if self.subspace.ambient_dim != 2 * self.m:
            raise DimensionMismatch("edge subspace must live in F^{2m}")

    def left(self) -> Subspace:
        return project_side(self, "left")

    def right(self) -> Subspace:
        return project_side(self, "right")


def left_of(e) -> tuple:
    return tuple(e[: len(e) // 2])


def right_of(e) -> tuple:
    return tuple(e[len(e) // 2:])


def project_side(E_sub: EdgeSpaceView, side: str) -> Subspace:
    m = E_sub.m
    S = E_sub.subspace
    if side == "left":
        vecs = [row[:m] for row in S.basis]
    elif side == "right":
        vecs = [row[m:] for row in S.basis]
    else:
        raise ValueError("side must be 'left' or 'right'")
    return Subspace.span(vecs, m, S.q)
