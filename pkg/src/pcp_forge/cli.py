"""Command-line driver: ``pcp-forge <gen|embed|derand|dp|decode-pipeline|verify|replay>``.

Tables go to CSV and structures to JSON. Each report gets a sidecar
``<report>.manifest.json`` holding the RunManifest; JSON reports also embed
the reproducible part of it (everything except timestamps), so two runs from
the same manifest produce byte-identical report files.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path

from . import __version__
from .constraint_graph.graph import (
    assignment_from_json,
    assignment_to_json,
    cycle_graph,
    eval_sat,
    graph_from_json,
    graph_to_json,
    planted_graph,
    random_graph,
    sat_exact,
)
from .gf_linear.subspace import LIMITS, BudgetExceeded
from .rng import make_rng

EXIT_OK, EXIT_USAGE, EXIT_PRECONDITION, EXIT_BUDGET, EXIT_VERIFY = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


class VerificationFailure(Exception):
    pass


class PreconditionError(ValueError):
    pass


@dataclass
class RunManifest:
    command: str
    argv: list
    params: dict
    seed: int | None
    version: str = __version__
    input_hashes: dict = field(default_factory=dict)
    started: str = ""
    finished: str = ""
    results: dict = field(default_factory=dict)

    def reproducible(self) -> dict:
        d = asdict(self)
        for k in ("started", "finished"):
            d.pop(k)
        return d


def _now() -> str:
    return time.strftime("%Y-%m-%dT%H:%M:%S%z")


def _sha256(path: str) -> str | None:
    # a missing input is reported by the command that reads it
    try:
        return hashlib.sha256(Path(path).read_bytes()).hexdigest()
    except OSError:
        return None


def _jsonable(x):
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return x


def _dump(obj) -> str:
    return json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n"


def _read_json(path: str):
    try:
        return json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise ValueError(f"file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ValueError(f"malformed JSON in {path}: {exc}") from None


def _require_seed(args):
    if args.seed is None:
        raise UsageError(f"{args.command} is randomized and requires --seed")


class _Run:
    """Collects the manifest while a command runs and writes reports with it."""

    def __init__(self, args, argv):
        params = {k: v for k, v in vars(args).items() if k not in ("func",)}
        self.manifest = RunManifest(args.command, list(argv), params, getattr(args, "seed", None), started=_now())
        for flag in ("graph", "circuit", "assignment_file"):
            p = getattr(args, flag, None)
            if p:
                self.manifest.input_hashes[flag] = _sha256(p)

    def write_json(self, path, payload: dict):
        self.manifest.finished = _now()
        body = dict(payload)
        body["manifest"] = self.manifest.reproducible()
        Path(path).write_text(_dump(body))
        self._sidecar(path)

    def write_text(self, path, text: str):
        self.manifest.finished = _now()
        Path(path).write_text(text)
        self._sidecar(path)

    def _sidecar(self, path):
        Path(str(path) + ".manifest.json").write_text(_dump(asdict(self.manifest)))


# ---------------------------------------------------------------- commands

def cmd_gen(args, run: _Run) -> int:
    if args.kind in ("planted", "random", "linear"):
        _require_seed(args)
    rng = make_rng(args.seed if args.seed is not None else 0, 0)
    pi = None
    if args.kind == "cycle":
        G = cycle_graph(args.n, args.sigma)
    elif args.kind == "planted":
        G, pi = planted_graph(args.n, args.edges, args.sigma, rng, args.density)
    elif args.kind == "random":
        G = random_graph(args.n, args.edges, args.sigma, rng, args.density)
    else:
        from .derand_rep import planted_debruijn_graph

        lin, pi = planted_debruijn_graph(args.q, args.m, args.sigma, rng, args.density)
        G = lin.graph
    out = args.out or "graph.json"
    Path(out).write_text(_dump(graph_to_json(G)))
    results = {"vertices": len(G.vertices), "edges": len(G.edges), "alphabet_size": G.alphabet_size}
    if pi is not None:
        Path(out + ".assignment.json").write_text(_dump(assignment_to_json(pi)))
        results["planted_sat"] = eval_sat(G, pi)
    run.manifest.results = _jsonable(results)
    run.write_json(args.report or out + ".report.json", {"kind": args.kind, "results": results})
    return EXIT_OK


def _load_graph(args):
    if not args.graph:
        raise UsageError("--graph is required")
    return graph_from_json(_read_json(args.graph))


def _load_assignment(spec: str):
    path = spec.split(":", 1)[1] if ":" in spec else spec
    return assignment_from_json(_read_json(path)), path


def cmd_embed(args, run: _Run) -> int:
    from .debruijn.embedding import embed, embedding_satisfiable

    G = _load_graph(args)
    emb = embed(G, args.Lambda, args.m)
    Gp = emb.graph
    results = {
        "size": len(Gp.edges),
        "expected_size": args.Lambda ** (args.m + 1),
        "vertices": len(Gp.vertices),
        "label_shape": list(emb.label_shape),
        "input_vertices": len(G.vertices),
        "input_edges": len(G.edges),
    }
    if args.assignment:
        pi, path = _load_assignment(args.assignment)
        run.manifest.input_hashes["assignment"] = _sha256(path)
        results["input_sat"] = eval_sat(G, pi)
        results["lifted_sat"] = eval_sat(Gp, emb.lift(pi))
    if args.exact:
        ok, _ = embedding_satisfiable(emb)
        results["embedded_satisfiable"] = ok
        if G.alphabet_size ** len(G.vertices) <= LIMITS.enum_budget:
            results["input_sat_exact"] = sat_exact(G)[0]
    if args.out:
        Path(args.out).write_text(_dump(graph_to_json(Gp)))
    run.manifest.results = _jsonable(results)
    run.write_json(args.report or "embed_report.json", {"results": results})
    return EXIT_OK


def _linear_from_args(args):
    from .derand_rep import LinearGraph

    G = _load_graph(args)
    v0 = G.vertices[0] if G.vertices else None
    if not args.m and not isinstance(v0, tuple):
        raise PreconditionError("graph vertices are not vectors of F_q^m; pass a linear graph (gen --kind linear)")
    m = args.m or len(v0)
    return LinearGraph.from_constraint_graph(G, args.q, m)


def cmd_derand(args, run: _Run) -> int:
    from .derand_rep import (
        estimate_product_sat,
        exact_product_sat,
        lift_assignment,
        params_check,
        random_product_assignment,
        refuse_everywhere,
    )
    from .experiment import reports_to_csv

    _require_seed(args)
    LG = _linear_from_args(args)
    spec = args.assignment or "refuse"
    if spec.startswith("honest"):
        pi, path = _load_assignment(spec)
        run.manifest.input_hashes["assignment"] = _sha256(path)
        Pi = lift_assignment(pi, LG.m)
    elif spec == "random":
        Pi = random_product_assignment(LG.m, LG.graph.alphabet_size, args.seed)
    elif spec == "refuse":
        Pi = refuse_everywhere(LG.m)
    else:
        raise UsageError(f"unknown --assignment {spec!r}; use honest:FILE, random or refuse")
    rep = estimate_product_sat(LG, args.d0, args.d1, Pi, args.trials, args.seed, args.workers)
    if args.exact:
        rep.exact = float(exact_product_sat(LG, args.d0, args.d1, Pi))
    rep.params["assignment"] = spec.split(":")[0]
    diag = params_check(LG.q, LG.m, LG.dim_E, args.d0, args.d1, rep.estimate, args.h_config)
    run.manifest.results = _jsonable({"estimate": rep.estimate, "params_check": diag})
    run.write_text(args.report or "derand.csv", reports_to_csv([rep]))
    return EXIT_OK


def cmd_dp(args, run: _Run) -> int:
    from .dp_tests import (
        BlockReplace,
        PointNoise,
        corrupt,
        encode_p,
        encode_p2,
        encode_s,
        estimate_acceptance,
        exact_acceptance,
        random_assignment,
        uniform_random_table,
    )
    from .experiment import reports_to_csv

    _require_seed(args)
    kind = args.test
    rng = make_rng(args.seed, 1)
    pi = random_assignment(args.m, args.q, args.sigma, rng)
    if kind == "P2":
        honest = encode_p2(pi, pi, args.d0, args.d1, args.m, args.q, args.sigma)
    else:
        honest = {"P": encode_p, "S": encode_s}[kind](pi, args.d0, args.d1, args.m, args.q, args.sigma)
    spec = args.assignment or "honest"
    if spec == "honest":
        Pi = honest
    elif spec == "random":
        Pi = uniform_random_table(kind, args.d0, args.d1, args.m, args.q, args.sigma, args.seed)
    elif spec.startswith("noise:"):
        Pi = corrupt(honest, PointNoise(float(spec.split(":")[1])), args.seed)
    elif spec.startswith("block:"):
        Pi = corrupt(honest, BlockReplace(float(spec.split(":")[1])), args.seed)
    else:
        raise UsageError(f"unknown --assignment {spec!r}; use honest, random, noise:P or block:F")
    params = {"q": args.q, "m": args.m, "d0": args.d0, "d1": args.d1}
    rep = estimate_acceptance(kind, Pi, params, args.trials, args.seed, args.workers)
    rep.params["assignment"] = spec
    if args.exact:
        rep.exact = float(exact_acceptance(kind, Pi, args.d0, args.d1, args.m))
        rep.passed = rep.ci_contains(rep.exact)
    run.manifest.results = _jsonable({"estimate": rep.estimate, "exact": rep.exact})
    run.write_text(args.report or "dp.csv", reports_to_csv([rep]))
    return EXIT_OK


def cmd_decode(args, run: _Run) -> int:
    import csv
    import io

    from .decoding.circuit import circuit_from_json, satisfying_assignments
    from .decoding.pipeline import run_pipeline

    if not args.circuit:
        raise UsageError("--circuit is required")
    phi = circuit_from_json(_read_json(args.circuit))
    sat = satisfying_assignments(phi)
    if not sat:
        raise ValueError("circuit is unsatisfiable")
    x = sat[0]
    res = run_pipeline(phi, x, args.Lambda, args.m)
    rows = [r.row() for r in res.reports]
    edec = None
    if args.trials:
        _require_seed(args)
        edec = _edecoder_stage(res, args)
        rows.append(edec)
    buf = io.StringIO()
    cols = list(rows[0].keys()) + ["estimate", "trials", "note"]
    w = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n", restval="")
    w.writeheader()
    for r in rows:
        w.writerow(r)
    run.manifest.results = _jsonable({"m": res.m, "x": x, "ok": res.ok, "size": res.reports[-1].size})
    run.write_text(args.report or "decode.csv", buf.getvalue())
    if not res.ok:
        raise VerificationFailure("honest lift failed a pipeline stage")
    return EXIT_OK


def _edecoder_stage(res, args) -> dict:
    """E-decoder on the embedded graph, whose vertex set F^m is linear when |Λ| is a field size."""
    from .decoding.edecoder import LinearDecodingGraph, estimate_decoding
    from .decoding.transforms import lift_through
    from .derand_rep import lift_assignment
    from .gf_linear.field import FieldError, get_field

    row = {"stage": "e_decoder", "trials": args.trials}
    final = res.stages[-1]
    try:
        get_field(res.Lambda_size)
    except FieldError:
        row["note"] = f"skipped: |Λ| = {res.Lambda_size} is not a field size"
        return row
    if not (args.d0 < args.d1 and 2 * args.d1 <= res.m):
        row["note"] = f"skipped: need d0 < d1 and 2·d1 <= m = {res.m}"
        return row
    LG = LinearDecodingGraph.from_decoding_graph(final.graph, res.Lambda_size, res.m)
    pi = lift_through(res.stages, _honest_proof(res))
    rep = estimate_decoding(LG, lift_assignment(pi, res.m), res.x, args.d0, args.d1, args.trials, args.seed, args.workers)
    row["estimate"] = f"{rep.estimate:.10g}"
    return row


def _honest_proof(res):
    from .decoding.pcpp import honest_proof, toy_pcpp

    return honest_proof(toy_pcpp(res.phi), res.x)


def cmd_verify(args, run: _Run) -> int:
    from .acceptance import CRITERIA, run_criteria
    from .experiment import reports_to_csv  # noqa: F401  (keeps report helpers importable)

    selected = [int(c) for c in args.criteria.split(",")] if args.criteria else sorted(CRITERIA)
    results = run_criteria(selected, workers=args.workers)
    lines = [r.line() for r in results]
    for ln in lines:
        print(ln)
    payload = {"criteria": [r.to_dict() for r in results]}
    run.manifest.results = {"passed": all(r.passed for r in results)}
    run.write_json(args.report or "verify_report.json", payload)
    if not all(r.passed for r in results):
        raise VerificationFailure("; ".join(r.name for r in results if not r.passed))
    return EXIT_OK


def cmd_replay(args, run: _Run) -> int:
    m = _read_json(args.manifest)
    argv = list(m["argv"])
    if args.report:
        if "--report" in argv:
            argv[argv.index("--report") + 1] = args.report
        else:
            argv += ["--report", args.report]
    return main(argv)


# ------------------------------------------------------------------ parser

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="pcp-forge", description="Derandomized parallel repetition and decoding-graph toolkit.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    def common(sp, seed=True):
        sp.add_argument("--seed", type=int)
        sp.add_argument("--workers", type=int, default=1)
        sp.add_argument("--budget", type=int, help="enumeration budget")
        sp.add_argument("--out")
        sp.add_argument("--report")

    g = sub.add_parser("gen", help="write a constraint graph")
    g.add_argument("--kind", choices=["planted", "cycle", "random", "linear"], default="planted")
    g.add_argument("--n", type=int, default=8)
    g.add_argument("--edges", type=int, default=12)
    g.add_argument("--sigma", type=int, default=2)
    g.add_argument("--density", type=float, default=0.3)
    g.add_argument("--q", type=int, default=2)
    g.add_argument("--m", type=int, default=4)
    common(g)
    g.set_defaults(func=cmd_gen)

    e = sub.add_parser("embed", help="embed a graph on a de Bruijn graph")
    e.add_argument("--graph")
    e.add_argument("--lambda", dest="Lambda", type=int, default=2)
    e.add_argument("--m", type=int, required=True)
    e.add_argument("--assignment", help="honest:FILE or FILE")
    e.add_argument("--exact", action="store_true")
    common(e)
    e.set_defaults(func=cmd_embed)

    d = sub.add_parser("derand", help="estimate E-test acceptance on a linear graph")
    d.add_argument("--graph")
    d.add_argument("--q", type=int, default=2)
    d.add_argument("--m", type=int)
    d.add_argument("--d0", type=int, default=1)
    d.add_argument("--d1", type=int, default=2)
    d.add_argument("--trials", type=int, default=10000)
    d.add_argument("--assignment", help="honest:FILE, random or refuse")
    d.add_argument("--h-config", dest="h_config", type=float, default=1.0)
    d.add_argument("--exact", action="store_true")
    common(d)
    d.set_defaults(func=cmd_derand)

    t = sub.add_parser("dp", help="estimate direct-product test acceptance")
    t.add_argument("--test", choices=["P", "S", "P2"], default="P")
    t.add_argument("--q", type=int, default=2)
    t.add_argument("--m", type=int, default=4)
    t.add_argument("--d0", type=int, default=1)
    t.add_argument("--d1", type=int, default=2)
    t.add_argument("--sigma", type=int, default=2)
    t.add_argument("--trials", type=int, default=10000)
    t.add_argument("--assignment", help="honest, random, noise:P or block:F")
    t.add_argument("--exact", action="store_true")
    common(t)
    t.set_defaults(func=cmd_dp)

    c = sub.add_parser("decode-pipeline", help="run the decoding chain on a circuit")
    c.add_argument("--circuit")
    c.add_argument("--lambda", dest="Lambda", type=int, default=16)
    c.add_argument("--m", type=int)
    c.add_argument("--d0", type=int, default=1)
    c.add_argument("--d1", type=int, default=2)
    c.add_argument("--trials", type=int, default=0)
    common(c)
    c.set_defaults(func=cmd_decode)

    v = sub.add_parser("verify", help="run the acceptance criteria")
    v.add_argument("--criteria", help="comma-separated criterion numbers")
    common(v)
    v.set_defaults(func=cmd_verify)

    r = sub.add_parser("replay", help="re-run a command from its manifest")
    r.add_argument("--manifest", required=True)
    r.add_argument("--report")
    r.set_defaults(func=cmd_replay)
    return p


def _fail(code: int, kind: str, message: str) -> int:
    print(json.dumps({"error": kind, "exit": code, "message": " ".join(str(message).split())}), file=sys.stderr)
    return code


def main(argv=None) -> int:
    from .debruijn.embedding import CapacityError
    from .debruijn.graph import LinearStructureError
    from .decoding.circuit import CircuitError
    from .decoding.graph import DecodingGraphError
    from .derand_rep import NotLinearError
    from .gf_linear.subspace import RetryCapExceeded

    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    saved_budget = LIMITS.enum_budget
    try:
        args = parser.parse_args(argv)
        if not args.command:
            raise UsageError("a subcommand is required")
        if getattr(args, "budget", None):
            LIMITS.enum_budget = args.budget
        if getattr(args, "workers", 1) < 1:
            raise UsageError("--workers must be >= 1")
        if args.command == "replay":
            return args.func(args, None)
        return args.func(args, _Run(args, argv))
    except UsageError as exc:
        return _fail(EXIT_USAGE, "usage", exc)
    except BudgetExceeded as exc:
        return _fail(EXIT_BUDGET, "budget", exc)
    except VerificationFailure as exc:
        return _fail(EXIT_VERIFY, "verification", exc)
    except (
        CapacityError,
        LinearStructureError,
        NotLinearError,
        CircuitError,
        DecodingGraphError,
        RetryCapExceeded,
        ValueError,
        KeyError,
        TypeError,
    ) as exc:
        return _fail(EXIT_PRECONDITION, "precondition", f"{type(exc).__name__}: {exc}")
    finally:
        LIMITS.enum_budget = saved_budget


if __name__ == "__main__":
    sys.exit(main())
