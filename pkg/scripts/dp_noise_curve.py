"""Acceptance of the P, S and P2 tests as point noise grows.

Each noise level uses its own corruption seed, so the curve mixes estimator
noise with table-realization noise; m=8 keeps the latter small.
"""
import argparse

from _out import write_table

from pcp_forge.dp_tests import PointNoise, corrupt, encode_p, encode_p2, encode_s, estimate_acceptance, random_assignment
from pcp_forge.rng import make_rng


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--m", type=int, default=8)
    ap.add_argument("--d0", type=int, default=1)
    ap.add_argument("--d1", type=int, default=2)
    ap.add_argument("--trials", type=int, default=4000)
    ap.add_argument("--seed", type=int, required=True)
    ap.add_argument("--noise", default="0,0.05,0.1,0.2,0.3,0.5")
    ap.add_argument("--out", default="results/dp_noise_curve.csv")
    a = ap.parse_args()

    levels = [float(s) for s in a.noise.split(",")]
    pi = random_assignment(a.m, 2, 2, make_rng(a.seed, 0))
    pi2 = random_assignment(a.m, 2, 2, make_rng(a.seed, 1))
    encoders = {
        "P": lambda: encode_p(pi, a.d0, a.d1, a.m),
        "S": lambda: encode_s(pi, a.d0, a.d1, a.m),
        "P2": lambda: encode_p2(pi, pi2, a.d0, a.d1, a.m),
    }
    params = {"d0": a.d0, "d1": a.d1, "m": a.m}
    rows = []
    for test, enc in encoders.items():
        honest = enc()
        for i, p in enumerate(levels):
            Pi = corrupt(honest, PointNoise(p), seed=a.seed + 1000 * (i + 1))
            rep = estimate_acceptance(test, Pi, params, a.trials, seed=a.seed + i)
            rows.append({"noise": p, **rep.row()})
            print(f"{test:>2} p={p:<5} accept={rep.estimate:.4f} +- {rep.stderr:.4f}")
    write_table(a.out, rows, {**params, "noise": levels, "trials": a.trials}, a.seed)


if __name__ == "__main__":
    main()
