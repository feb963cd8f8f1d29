from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pcp_forge.dp_tests import (
    REFUSE,
    BlockReplace,
    DPAssignment,
    MalformedAnswer,
    PointNoise,
    SplitWorld,
    constant_oracle,
    corrupt,
    disagreement,
    encode_p,
    encode_p2,
    encode_s,
    estimate_acceptance,
    exact_acceptance,
    plurality_decode,
    random_assignment,
    restrict,
    run_p2_test,
    run_p_test,
    uniform_random_table,
)
from pcp_forge.gf_linear.subspace import Subspace, enumerate_subspaces
from pcp_forge.rng import make_rng

Q, M, D0, D1 = 2, 4, 1, 2
PARAMS = {"d0": D0, "d1": D1, "m": M}


@pytest.fixture(scope="module")
def pi():
    return random_assignment(M, Q, 2, make_rng(100))


@pytest.fixture(scope="module")
def pi_other():
    return random_assignment(M, Q, 2, make_rng(101))


def _flip(pi, x):
    out = dict(pi)
    out[x] = 1 - out[x]
    return out


# ------------------------------------------------------------------ honest

@pytest.mark.parametrize("test", ["P", "S", "P2"])
def test_honest_accepts_always(test, pi, pi_other):
    Pi = {"P": encode_p(pi, D0, D1, M), "S": encode_s(pi, D0, D1, M), "P2": encode_p2(pi, pi_other, D0, D1, M)}[test]
    rep = estimate_acceptance(test, Pi, PARAMS, 10_000, seed=1)
    assert rep.successes == rep.trials == 10_000
    assert exact_acceptance(test, Pi, D0, D1, M) == 1


# ---------------------------------------------------------- exact vs formula

def test_single_point_corruption_matches_formula(pi):
    """Big subspaces read pi, small ones read pi with x0 flipped.

    The test rejects exactly when x0 lies in A, and A is a uniform d0-subspace
    of F^m, so acceptance is 1 - (q^d0 - 1)/(q^m - 1).
    """
    x0 = (1, 0, 1, 1)
    bad = _flip(pi, x0)
    Pi = DPAssignment("P", Q, M, D0, D1, 2, lambda S: restrict(pi if S.dim == D1 else bad, S))
    expected = 1 - Fraction(Q**D0 - 1, Q**M - 1)
    assert expected == Fraction(14, 15)
    assert exact_acceptance("P", Pi, D0, D1, M) == expected
    rep = estimate_acceptance("P", Pi, PARAMS, 10_000, seed=2)
    assert rep.within_sigma(float(expected), 4.0)


def test_uniform_random_table_near_quarter():
    # an independent uniform answer on a 1-subspace of F_2^4 (2 points) agrees w.p. 1/4
    Pi = uniform_random_table("P", D0, D1, M, Q, 2, seed=3)
    ex = exact_acceptance("P", Pi, D0, D1, M)
    assert abs(float(ex) - 0.25) < 0.1
    rep = estimate_acceptance("P", Pi, PARAMS, 10_000, seed=4)
    assert rep.within_sigma(float(ex), 4.0)


def test_s_split_world_matches_enumeration(pi, pi_other):
    Pi = corrupt(encode_s(pi, D0, D1, M), SplitWorld(pi, pi_other), seed=5)
    ex = exact_acceptance("S", Pi, D0, D1, M)
    assert 0 < ex < 1
    rep = estimate_acceptance("S", Pi, PARAMS, 10_000, seed=6)
    assert rep.within_sigma(float(ex), 4.0)


def test_p2_with_random_second_half(pi):
    rand = uniform_random_table("P", D0, D1, M, Q, 2, seed=7)

    def oracle(key):
        X1, X2 = key
        return restrict(pi, X1), rand.query(X2)

    Pi = DPAssignment("P2", Q, M, D0, D1, 2, oracle, mode="table")
    ex = exact_acceptance("P2", Pi, D0, D1, M)
    # the second half behaves like the uniform P table, the first never fails
    assert ex == exact_acceptance("P", rand, D0, D1, M)
    rep = estimate_acceptance("P2", Pi, PARAMS, 10_000, seed=8)
    assert rep.within_sigma(float(ex), 4.0)


def test_s_impossible_without_room(pi):
    with pytest.raises(ValueError, match="no admissible pairs"):
        exact_acceptance("S", encode_s(pi, 1, 2, 3), 1, 2, 3)
    with pytest.raises(ValueError):
        estimate_acceptance("S", encode_s(pi, 1, 2, 3), {"d0": 1, "d1": 2, "m": 3}, 10, seed=0)


def test_full_dimension_big_subspace(pi):
    Pi = encode_p(pi, 1, M, M)
    rng = make_rng(9)
    for _ in range(20):
        out = run_p_test(Pi, 1, M, M, rng)
        assert out.accepted and out.transcript["B"] == Subspace.full(M, Q)


@pytest.mark.parametrize("test", ["P", "S", "P2"])
def test_refuse_everywhere(test):
    Pi = constant_oracle(test, REFUSE, D0, D1, M)
    assert exact_acceptance(test, Pi, D0, D1, M) == 0
    assert estimate_acceptance(test, Pi, PARAMS, 500, seed=10).successes == 0


def test_malformed_answer():
    Pi = DPAssignment("P", Q, M, D0, D1, 2, lambda S: {})
    with pytest.raises(MalformedAnswer):
        run_p_test(Pi, D0, D1, M, make_rng(11))


def test_workers_do_not_change_counts(pi):
    Pi = corrupt(encode_p(pi, D0, D1, M), PointNoise(0.2), seed=12)
    a = estimate_acceptance("P", Pi, PARAMS, 3000, seed=13, workers=1)
    b = estimate_acceptance("P", Pi, PARAMS, 3000, seed=13, workers=3)
    assert (a.successes, a.trials) == (b.successes, b.trials)


# ---------------------------------------------------------------- corruption

def test_zero_noise_is_identity(pi):
    honest = encode_p(pi, D0, D1, M)
    Pi = corrupt(honest, PointNoise(0.0), seed=14)
    for B in enumerate_subspaces(D1, Subspace.full(M, Q)):
        assert Pi.query(B) == honest.query(B)


def test_point_noise_rate(pi):
    p = 0.2
    honest = encode_p(pi, D0, 3, M)
    Pi = corrupt(honest, PointNoise(p), seed=15)
    flipped = total = 0
    for B in enumerate_subspaces(3, Subspace.full(M, Q)):
        f, g = Pi.query(B), honest.query(B)
        flipped += sum(f[x] != g[x] for x in B.points())
        total += len(f)
    sigma = (p * (1 - p) / total) ** 0.5
    assert abs(flipped / total - p) < 4 * sigma


def test_block_replace_extremes(pi):
    honest = encode_p(pi, D0, D1, M)
    assert exact_acceptance("P", corrupt(honest, BlockReplace(0.0), seed=16), D0, D1, M) == 1
    full = exact_acceptance("P", corrupt(honest, BlockReplace(1.0), seed=16), D0, D1, M)
    assert abs(float(full) - 0.25) < 0.1


def test_acceptance_falls_with_noise(pi):
    honest = encode_p(pi, D0, D1, M)
    vals = [exact_acceptance("P", corrupt(honest, PointNoise(p), seed=17), D0, D1, M) for p in (0.0, 0.1, 0.3)]
    assert vals[0] == 1 and vals[0] > vals[1] > vals[2]


def test_split_world_strictly_inside(pi, pi_other):
    Pi = corrupt(encode_p(pi, D0, D1, M), SplitWorld(pi, pi_other), seed=18)
    ex = exact_acceptance("P", Pi, D0, D1, M)
    assert 0 < ex < 1
    same = corrupt(encode_p(pi, D0, D1, M), SplitWorld(pi, pi), seed=18)
    assert exact_acceptance("P", same, D0, D1, M) == 1


def test_corrupt_rejects_unknown_model(pi):
    with pytest.raises(ValueError):
        corrupt(encode_p(pi, D0, D1, M), object(), seed=0)


# ---------------------------------------------------------------- distances

def test_disagreement_examples():
    dom = [0, 1, 2, 3]
    f = {0: 0, 1: 1, 2: 0, 3: 1}
    g = {0: 0, 1: 0, 2: 0, 3: 0}
    assert disagreement(f, g, dom) == Fraction(1, 2)
    assert disagreement(f, f, dom) == 0
    assert disagreement(f, g, []) == 0
    with pytest.raises(ValueError):
        disagreement(f, {0: 0}, dom)


fn6 = st.lists(st.integers(0, 2), min_size=6, max_size=6).map(lambda v: dict(enumerate(v)))


@settings(max_examples=100, deadline=None)
@given(fn6, fn6, fn6)
def test_disagreement_is_pseudometric(f, g, h):
    dom = range(6)
    assert disagreement(f, g, dom) == disagreement(g, f, dom)
    assert disagreement(f, h, dom) <= disagreement(f, g, dom) + disagreement(g, h, dom)


# ------------------------------------------------------------------ decoding

def test_plurality_decode_recovers_noisy_assignment():
    m, d1 = 6, 4
    pi = random_assignment(m, Q, 2, make_rng(19))
    Pi = corrupt(encode_p(pi, 2, d1, m), PointNoise(0.1), seed=20)
    dec = plurality_decode(Pi, d1, m, 300, make_rng(21))
    pts = Subspace.full(m, Q).points()
    assert disagreement(dec, pi, pts) <= Fraction(1, 20)


def test_plurality_decode_refuse_defaults_to_zero():
    Pi = constant_oracle("P", REFUSE, 1, 2, 3)
    dec = plurality_decode(Pi, 2, 3, 20, make_rng(22))
    assert set(dec.values()) == {0} and len(dec) == 8


# ------------------------------------------------------------ more examples

def test_constant_assignment_gives_constant_answers():
    pi = {p: 1 for p in Subspace.full(M, Q).points()}
    Pi = encode_p(pi, D0, D1, M)
    for B in enumerate_subspaces(D1, Subspace.full(M, Q)):
        assert set(Pi.query(B).values()) == {1}


def test_p_encoding_composes_under_restriction(pi):
    Pi = encode_p(pi, D0, D1, M)
    for B in enumerate_subspaces(D1, Subspace.full(M, Q)):
        fB = Pi.query(B)
        for A in enumerate_subspaces(D0, B):
            assert {p: fB[p] for p in A.points()} == Pi.query(A)


def test_s_encoding_pairs_are_pointwise(pi):
    Pi = encode_s(pi, D0, D1, M)
    B1, B2 = list(enumerate_subspaces(D1, Subspace.full(M, Q)))[:2]
    f1, f2 = Pi.query((B1, B2))
    assert all(f1[p] == pi[p] for p in B1.points()) and all(f2[p] == pi[p] for p in B2.points())


def test_one_fixed_small_subspace_corrupted(pi):
    """Rejects exactly when the corrupted A is the one drawn: 1 of [4 choose 1]_2 = 15."""
    V = Subspace.full(M, Q)
    A0 = next(iter(enumerate_subspaces(D0, V)))
    x0 = next(p for p in A0.points() if any(p))

    def oracle(S):
        f = restrict(pi, S)
        if S == A0:
            f[x0] = 1 - f[x0]
        return f

    Pi = DPAssignment("P", Q, M, D0, D1, 2, oracle)
    assert exact_acceptance("P", Pi, D0, D1, M) == Fraction(14, 15)
    rep = estimate_acceptance("P", Pi, PARAMS, 10_000, seed=30)
    assert rep.within_sigma(14 / 15, 3.0)


def test_s_with_zero_dimensional_checks_always_accepts(pi, pi_other):
    Pi = corrupt(encode_s(pi, 0, D1, M), SplitWorld(pi, pi_other), seed=31)
    assert estimate_acceptance("S", Pi, {"d0": 0, "d1": D1, "m": M}, 500, seed=32).estimate == 1.0


def test_p2_with_full_big_subspaces(pi, pi_other):
    """m = d1 forces B1 = B2 = F^m; acceptance is the product of two P-test checks."""
    m = 3
    p1 = random_assignment(m, Q, 2, make_rng(33))
    p2 = random_assignment(m, Q, 2, make_rng(34))
    a = uniform_random_table("P", 1, m, m, Q, 2, seed=35)
    b = uniform_random_table("P", 1, m, m, Q, 2, seed=36)
    Pi = DPAssignment("P2", Q, m, 1, m, 2, lambda key: (a.query(key[0]), b.query(key[1])), mode="table")
    rng = make_rng(37)
    for _ in range(10):
        out = run_p2_test(Pi, 1, m, m, rng)
        assert out.transcript["B1"] == out.transcript["B2"] == Subspace.full(m, Q)
    assert exact_acceptance("P2", Pi, 1, m, m) == exact_acceptance("P", a, 1, m, m) * exact_acceptance("P", b, 1, m, m)
    assert p1 != p2


def test_disagreement_one_in_sixteen():
    f = {i: 0 for i in range(16)}
    g = dict(f)
    g[5] = 1
    assert disagreement(f, g, range(16)) == Fraction(1, 16)


def test_random_pair_disagrees_half_the_time():
    rng = make_rng(38)
    n = 2**10
    f = dict(enumerate(rng.integers(0, 2, size=n).tolist()))
    g = dict(enumerate(rng.integers(0, 2, size=n).tolist()))
    assert abs(float(disagreement(f, g, range(n))) - 0.5) <= 3 * (0.25 / n) ** 0.5


def test_honest_estimate_has_zero_stderr(pi):
    rep = estimate_acceptance("P", encode_p(pi, D0, D1, M), PARAMS, 200, seed=39)
    assert rep.estimate == 1.0 and rep.stderr == 0


def test_noise_monotone_with_disjoint_seeds():
    """Binary point noise leaves a point agreeing w.p. (1-p)^2 + p^2, falling on [0, 1/2].

    Each p gets its own corrupted table, so m is large enough (about 32k
    (B, A) pairs) that one table's acceptance sits close to the mean.
    """
    m = 8
    pi8 = random_assignment(m, Q, 2, make_rng(49))
    honest = encode_p(pi8, 1, 2, m)
    params = {"d0": 1, "d1": 2, "m": m}
    reps = [
        estimate_acceptance("P", corrupt(honest, PointNoise(p), seed=50 + i), params, 10_000, seed=60 + i)
        for i, p in enumerate((0.0, 0.1, 0.2, 0.3, 0.4, 0.5))
    ]
    for a, b in zip(reps, reps[1:]):
        assert b.estimate <= a.estimate + 2 * max(a.stderr, b.stderr)


def test_exact_inside_ci_at_m3(pi):
    pi3 = random_assignment(3, Q, 2, make_rng(40))
    Pi = corrupt(encode_p(pi3, 1, 2, 3), PointNoise(0.2), seed=41)
    ex = exact_acceptance("P", Pi, 1, 2, 3)
    rep = estimate_acceptance("P", Pi, {"d0": 1, "d1": 2, "m": 3}, 5000, seed=42)
    assert rep.ci_contains(float(ex))
