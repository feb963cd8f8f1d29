"""Total-variation distance between sampled and exact F-marginals of the E-decoder sampler."""
import argparse

from _out import write_table

from pcp_forge.decoding import exact_F_marginal, sampled_F_marginal, synthetic_linear_decoding_graph, total_variation
from pcp_forge.rng import make_rng


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--m", type=int, default=4)
    ap.add_argument("--edges", type=int, default=4, help="conditioning edges to examine")
    ap.add_argument("--samples", default="1000,5000,20000")
    ap.add_argument("--modes", default="weighted,naive")
    ap.add_argument("--seed", type=int, required=True)
    ap.add_argument("--out", default="results/edecoder_sampler_tv.csv")
    a = ap.parse_args()

    x = ((1, 0), (0, 1), (1, 1))
    LG, _ = synthetic_linear_decoding_graph(2, a.m, len(x), x, make_rng(a.seed))
    edges = [e for e in LG.linear.constraints if any(e[: a.m])][: a.edges]
    rows = []
    for j, e in enumerate(edges):
        exact = exact_F_marginal(LG.linear, 2, e)
        for mode in a.modes.split(","):
            for n in (int(s) for s in a.samples.split(",")):
                counts = sampled_F_marginal(LG.linear, e, 1, 2, n, seed=a.seed + 7919 * j + n, mode=mode)
                tv = total_variation(exact, counts)
                rows.append({"edge": "".join(map(str, e)), "mode": mode, "samples": n, "support": len(exact), "tv": f"{tv:.6g}"})
                print(rows[-1])
    write_table(a.out, rows, {"m": a.m, "d0": 1, "d1": 2}, a.seed)


if __name__ == "__main__":
    main()
