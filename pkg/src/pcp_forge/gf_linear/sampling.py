"""Uniform random subspaces.

Every sampler takes an explicit ``numpy.random.Generator``; nothing reads
global random state.
"""

from __future__ import annotations

import numpy as np

from ..rng import make_rng
from .subspace import LIMITS, RetryCapExceeded, Subspace, rank, rref, subspace_sum


def random_coeffs(rng: np.random.Generator, q: int, rows: int, cols: int) -> list[list[int]]:
    return rng.integers(0, q, size=(rows, cols)).tolist()


def random_vector(rng: np.random.Generator, q: int, n: int) -> tuple[int, ...]:
    return tuple(rng.integers(0, q, size=n).tolist())


def random_point_in(S: Subspace, rng: np.random.Generator) -> tuple[int, ...]:
    return S.from_coords(random_coeffs(rng, S.q, 1, S.dim)[0] if S.dim else ())


def draw_vectors(d: int, ambient: Subspace, rng: np.random.Generator) -> list[tuple[int, ...]]:
    """d independent uniform vectors of ``ambient`` (no rank conditioning)."""
    if d == 0:
        return []
    F = ambient.field
    n = ambient.ambient_dim
    coeffs = random_coeffs(rng, ambient.q, d, ambient.dim)
    if ambient.dim == n and ambient.pivots == tuple(range(n)):
        return [tuple(c) for c in coeffs]
    return [F.combine(c, ambient.basis, n) for c in coeffs]


def sample_subspace(d: int, ambient: Subspace, rng: np.random.Generator, retry_cap: int | None = None) -> Subspace:
    """Uniform d-subspace of ``ambient``.

    Draws d uniform vectors and retries while they are dependent; conditioned
    on independence their span is uniform.
    """
    if not 0 <= d <= ambient.dim:
        raise ValueError("need 0 <= d <= dim ambient")
    if d == ambient.dim:
        return ambient
    if d == 0:
        return Subspace.zero(ambient.ambient_dim, ambient.q)
    F = ambient.field
    n = ambient.ambient_dim
    cap = LIMITS.retry_cap if retry_cap is None else retry_cap
    for _ in range(cap):
        vecs = draw_vectors(d, ambient, rng)
        basis, piv = rref(vecs, F, n)
        if len(piv) == d:
            return Subspace(ambient.q, n, basis)
    raise RetryCapExceeded(f"sample_subspace: {cap} rank-deficient draws in a row")


def sample_subspace_containing(
    d: int, W0: Subspace, ambient: Subspace, rng: np.random.Generator, retry_cap: int | None = None
) -> Subspace:
    """Uniform d-subspace X with W0 <= X <= ambient (extend W0 by uniform vectors)."""
    if not W0.dim <= d <= ambient.dim:
        raise ValueError("need dim W0 <= d <= dim ambient")
    if d == W0.dim:
        return W0
    if d == ambient.dim:
        return ambient
    F = ambient.field
    n = ambient.ambient_dim
    cap = LIMITS.retry_cap if retry_cap is None else retry_cap
    base = list(W0.basis)
    for _ in range(cap):
        vecs = base + draw_vectors(d - W0.dim, ambient, rng)
        basis, piv = rref(vecs, F, n)
        if len(piv) == d:
            return Subspace(ambient.q, n, basis)
    raise RetryCapExceeded(f"sample_subspace_containing: {cap} rank-deficient draws in a row")


def first_draw_full_rank(d: int, ambient: Subspace, rng: np.random.Generator) -> bool:
    """One raw draw of d vectors; True iff they are independent."""
    vecs = draw_vectors(d, ambient, rng)
    return rank(vecs, ambient.field, ambient.ambient_dim) == d


__all__ = [
    "make_rng",
    "random_coeffs",
    "random_vector",
    "random_point_in",
    "draw_vectors",
    "sample_subspace",
    "sample_subspace_containing",
    "first_draw_full_rank",
    "subspace_sum",
]
