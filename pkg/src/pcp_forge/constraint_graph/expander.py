"""Seeded regular expanders built from random cyclic permutations."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ..gf_linear.sampling import make_rng

DEFAULT_DEGREE = 8
DEFAULT_THRESHOLD = 0.9
EXPANDER_SEED = 20240501


class ExpanderRetryError(RuntimeError):
    pass


@dataclass(frozen=True)
class ExpanderSpec:
    n: int
    degree: int
    lambda2: float
    threshold: float
    seed: int
    base_seed: int
    attempts: int

    @property
    def cheeger_h(self) -> float:
        """Lower bound on edge expansion implied by the spectral gap."""
        return (1 - self.lambda2) / 2

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "degree": self.degree,
            "lambda2": self.lambda2,
            "threshold": self.threshold,
            "seed": self.seed,
            "base_seed": self.base_seed,
            "attempts": self.attempts,
            "cheeger_h": self.cheeger_h,
        }


@dataclass(frozen=True)
class Expander:
    spec: ExpanderSpec
    pairs: tuple  # undirected edges {i, sigma(i)}, one per permutation and i

    def directed_edges(self) -> list[tuple[int, int]]:
        """Each undirected pair in both directions: in- and out-degree equal ``degree``."""
        out = []
        for a, b in self.pairs:
            out.append((a, b))
            out.append((b, a))
        return out


def _random_cycle(n: int, rng) -> list[int]:
    """Sattolo's algorithm: a uniform permutation with a single n-cycle."""
    perm = list(range(n))
    for i in range(n - 1, 0, -1):
        j = int(rng.integers(0, i))
        perm[i], perm[j] = perm[j], perm[i]
    return perm


def adjacency(n: int, pairs) -> np.ndarray:
    A = np.zeros((n, n))
    for a, b in pairs:
        A[a, b] += 1
        A[b, a] += 1
    return A


def second_eigenvalue(A: np.ndarray, degree: int, rng=None, iters: int = 20000, tol: float = 1e-13) -> float:
    """Signed second eigenvalue of A/degree by power iteration on the lazy walk.

    The lazy walk (I + A/degree)/2 has spectrum in [0, 1], so its top
    eigenvalue orthogonal to the all-ones vector is (1 + lambda2)/2.
    """
    n = A.shape[0]
    if n == 1:
        return 0.0
    W = 0.5 * (np.eye(n) + A / degree)
    rng = rng if rng is not None else np.random.default_rng(0)
    x = rng.standard_normal(n)
    x -= x.mean()
    x /= np.linalg.norm(x)
    mu = 0.0
    for _ in range(iters):
        y = W @ x
        y -= y.mean()
        new_mu = float(x @ y)
        norm = np.linalg.norm(y)
        if norm == 0:
            return -1.0
        x = y / norm
        if abs(new_mu - mu) < tol:
            mu = new_mu
            break
        mu = new_mu
    return 2 * mu - 1


@lru_cache(maxsize=4096)
def build_expander(
    n: int,
    seed: int = EXPANDER_SEED,
    degree: int = DEFAULT_DEGREE,
    threshold: float = DEFAULT_THRESHOLD,
    retry_cap: int = 200,
) -> Expander:
    """A ``degree``-regular multigraph on n vertices: the union of degree/2 random n-cycles.

    Retries with seed + 1, seed + 2, ... until the second eigenvalue is at
    most ``threshold``. A 2-regular graph is a cycle at best, so for degree 2
    the threshold is raised to cos(2*pi/n).
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if degree < 2 or degree % 2:
        raise ValueError("degree must be even and >= 2")
    thr = threshold
    if degree == 2 and n > 2:
        thr = max(threshold, math.cos(2 * math.pi / n) + 1e-9)
    for attempt in range(retry_cap):
        s = seed + attempt
        rng = make_rng(s, n, degree)
        pairs = []
        for _ in range(degree // 2):
            perm = _random_cycle(n, rng)
            pairs.extend((i, perm[i]) for i in range(n))
        lam = second_eigenvalue(adjacency(n, pairs), degree, np.random.default_rng(s))
        if lam <= thr + 1e-9:
            spec = ExpanderSpec(n, degree, lam, thr, s, seed, attempt + 1)
            return Expander(spec, tuple(pairs))
    raise ExpanderRetryError(f"no expander with lambda2 <= {thr} on {n} vertices after {retry_cap} seeds")
