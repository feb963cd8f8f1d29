"""Monte Carlo and exact checks of the random-subspace facts the tests rely on."""

from __future__ import annotations

from collections import defaultdict
from fractions import Fraction
from typing import Callable

from ..experiment import ExperimentReport, estimate
from .sampling import first_draw_full_rank, sample_subspace, sample_subspace_containing
from .subspace import (
    Subspace,
    count_subspaces,
    enumerate_subspaces,
    enumerate_subspaces_containing,
    is_disjoint,
    subspace_sum,
)


def _coordinate_subspace(k: int, n: int, q: int) -> Subspace:
    return Subspace(q, n, tuple(tuple(1 if j == i else 0 for j in range(n)) for i in range(k)))


def exact_intersection_probability(q: int, d_prime: int, d: int) -> Fraction:
    """Pr[W1 meets a fixed d'-subspace W2 nontrivially], W1 uniform, by enumeration."""
    V = Subspace.full(d, q)
    W2 = _coordinate_subspace(d_prime, d, q)
    bad = total = 0
    for W1 in enumerate_subspaces(d_prime, V):
        total += 1
        if not is_disjoint(W1, W2):
            bad += 1
    return Fraction(bad, total)


def mc_check_disjointness(q: int, d_prime: int, d: int, trials: int, seed: int, workers: int = 1, exact: bool = True) -> ExperimentReport:
    """Failure frequency of W1 ∩ W2 = {0} against the bound 2d'/q^(d-2d')."""
    if d <= 2 * d_prime:
        raise ValueError("need d > 2 d'")
    V = Subspace.full(d, q)
    W2 = _coordinate_subspace(d_prime, d, q)

    def trial(rng):
        return not is_disjoint(sample_subspace(d_prime, V, rng), W2)

    bound = 2 * d_prime / q ** (d - 2 * d_prime)
    ex = None
    if exact and count_subspaces(d_prime, d, q) <= 10**5:
        ex = float(exact_intersection_probability(q, d_prime, d))
    rep = estimate("disjointness", trial, trials, seed, {"q": q, "d_prime": d_prime, "d": d}, workers, bound=bound, exact=ex)
    rep.passed = rep.estimate <= bound + 3 * rep.stderr
    return rep


def mc_check_full_dimension(q: int, d_prime: int, d: int, trials: int, seed: int, workers: int = 1) -> ExperimentReport:
    """Rank-deficiency frequency of d' uniform vectors in F^d against d'/q^(d-d')."""
    V = Subspace.full(d, q)

    def trial(rng):
        return not first_draw_full_rank(d_prime, V, rng)

    bound = d_prime / q ** (d - d_prime)
    # exact: 1 - prod_{i<d'} (1 - q^(i-d))
    p_ok = Fraction(1)
    for i in range(d_prime):
        p_ok *= 1 - Fraction(1, q ** (d - i))
    rep = estimate("full_dimension", trial, trials, seed, {"q": q, "d_prime": d_prime, "d": d}, workers, bound=bound, exact=float(1 - p_ok))
    rep.passed = rep.estimate <= bound + 3 * rep.stderr
    return rep


def _mean_over(S: Subspace, f) -> float:
    pts = S.points()
    return sum(f(p) for p in pts) / len(pts)


def sampler_bound(q: int, d_prime: int, d: int, tau: float) -> tuple[float, float]:
    """(deviation threshold, violation bound) of the subspace-point sampler."""
    return tau + q ** -(d - d_prime), 1.0 / (q ** (d - d_prime - 2) * tau * tau)


def mc_check_sampler(
    q: int,
    d_prime: int,
    d: int,
    V_dim: int,
    tau: float,
    f: Callable,
    trials: int,
    seed: int,
    workers: int = 1,
    exact: bool = False,
) -> ExperimentReport:
    """Fraction of d-subspaces X ⊇ W whose f-average strays from the global one."""
    if not d_prime < d <= V_dim:
        raise ValueError("need d' < d <= V_dim")
    V = Subspace.full(V_dim, q)
    W = _coordinate_subspace(d_prime, V_dim, q)
    global_mean = _mean_over(V, f)
    thresh, bound = sampler_bound(q, d_prime, d, tau)

    def violates(X):
        return abs(_mean_over(X, f) - global_mean) > thresh

    def trial(rng):
        return violates(sample_subspace_containing(d, W, V, rng))

    ex = None
    if exact:
        bad = total = 0
        for X in enumerate_subspaces_containing(d, W, V):
            total += 1
            bad += violates(X)
        ex = bad / total
    params = {"q": q, "d_prime": d_prime, "d": d, "V_dim": V_dim, "tau": tau}
    rep = estimate("subspace_sampler", trial, trials, seed, params, workers, bound=bound, exact=ex)
    rep.passed = rep.estimate <= bound + 3 * rep.stderr and (ex is None or ex <= bound)
    rep.extra["threshold"] = thresh
    return rep


def _disjoint_pairs(d0: int, space: Subspace):
    subs = list(enumerate_subspaces(d0, space))
    return [(a, b) for a in subs for b in subs if is_disjoint(a, b)]


def check_triplet_equivalence(d0: int, d1: int, V_dim: int, q: int = 2) -> Fraction:
    """Exact total-variation distance between the two ways of drawing (A1, A2, B).

    Route 1 picks B, then an ordered disjoint pair A1, A2 inside B. Route 2
    picks the disjoint pair in V first, then B containing A1 + A2.
    """
    if not d0 < d1 < V_dim:
        raise ValueError("need d0 < d1 < V_dim")
    if 2 * d0 > d1:
        raise ValueError("disjoint d0-subspaces of a d1-subspace need 2 d0 <= d1")
    V = Subspace.full(V_dim, q)
    p1: dict = defaultdict(Fraction)
    Bs = list(enumerate_subspaces(d1, V))
    for B in Bs:
        pairs = _disjoint_pairs(d0, B)
        w = Fraction(1, len(Bs) * len(pairs))
        for a1, a2 in pairs:
            p1[(a1, a2, B)] += w
    p2: dict = defaultdict(Fraction)
    pairs_v = _disjoint_pairs(d0, V)
    for a1, a2 in pairs_v:
        S = subspace_sum(a1, a2)
        sups = list(enumerate_subspaces_containing(d1, S, V))
        w = Fraction(1, len(pairs_v) * len(sups))
        for B in sups:
            p2[(a1, a2, B)] += w
    keys = set(p1) | set(p2)
    return sum((abs(p1.get(k, 0) - p2.get(k, 0)) for k in keys), Fraction(0)) / 2
