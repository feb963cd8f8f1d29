"""Per-stage sizes and honest decoding error of the decoding pipeline over random circuits."""
import argparse

from _out import write_table

from pcp_forge.decoding import random_satisfiable_circuit, run_pipeline
from pcp_forge.rng import make_rng


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--circuits", type=int, default=10)
    ap.add_argument("--t", type=int, default=2)
    ap.add_argument("--u", type=int, default=1)
    ap.add_argument("--gates", type=int, default=6)
    ap.add_argument("--lambda", dest="Lambda", type=int, default=16)
    ap.add_argument("--seed", type=int, required=True)
    ap.add_argument("--out", default="results/pipeline_table.csv")
    a = ap.parse_args()

    rng = make_rng(a.seed)
    rows = []
    ok = 0
    for i in range(a.circuits):
        phi, x = random_satisfiable_circuit(a.t, a.u, a.gates, rng)
        res = run_pipeline(phi, x, a.Lambda)
        ok += res.ok
        rows += [{"circuit": i, "m": res.m, **r.row()} for r in res.reports]
        print(f"circuit {i}: m={res.m} final size={res.reports[-1].size} ok={res.ok}")
    params = {"t": a.t, "u": a.u, "gates": a.gates, "lambda": a.Lambda, "circuits": a.circuits}
    write_table(a.out, rows, params, a.seed, {"all_ok": ok == a.circuits})


if __name__ == "__main__":
    main()
