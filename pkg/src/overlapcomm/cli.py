"""``overlapcomm`` command-line interface."""
from __future__ import annotations

import argparse
import json
import logging
import sys

from . import io, oracle
from .detector import ALGORITHMS
from .errors import InvalidInputError, OverlapCommError
from .evaluation import InstanceSpec, match_communities, recovery_rate, render_table
from .generator import AMBIENTS, MODELS, AmbientSpec, generate
from .validator import validate

EXIT_OK, EXIT_USAGE, EXIT_IO = 0, 2, 3


def _out(text: str, path) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        io._write(path, text)


def cmd_generate(args) -> int:
    cfg = io.read_config(args.config)
    mp = io.model_params(cfg)
    ambient = AmbientSpec(args.ambient, q=mp.ambient_q, stress_nodes=mp.stress_nodes)
    g, truth, record = generate(mp, args.model, ambient, args.seed)
    io.write_graph(g, args.out_graph)
    io.write_truth(truth, args.out_truth)
    text = io.dump_json(record)
    if args.out_params:
        io._write(args.out_params, text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_detect(args) -> int:
    g = io.read_graph(args.graph)
    params = io.detector_params(io.read_config(args.config))
    res = ALGORITHMS[args.algo](g, params, args.seed, args.threads)
    _out(io.dump_json(res.to_json_dict()), args.out)
    return EXIT_OK


def cmd_validate(args) -> int:
    g = io.read_graph(args.graph)
    mp = io.model_params(io.read_config(args.config))
    if mp.n == 0:
        mp = mp.replace(n=g.n)
    truth = io.truth_from_file(args.truth, args.model)
    report = validate(g, truth, mp, audit=args.audit)
    _out(io.dump_json(report.to_json_dict()), args.out)
    return EXIT_OK


def cmd_evaluate(args) -> int:
    found = io.read_found(args.found)
    truth, _ = io.read_communities(args.truth)
    g = io.read_graph(args.graph) if args.graph else None
    rep = match_communities(found, truth, args.threshold, g, args.epsilon)
    _out(io.dump_json(rep.to_json_dict()), args.out)
    return EXIT_OK


def cmd_oracle(args) -> int:
    g = io.read_graph(args.graph)
    if args.mode == "cliques":
        sets = oracle.enumerate_maximal_cliques(g, args.min_size)
        text = io.format_communities(sets)
    elif args.mode == "alpha-sets":
        if args.alpha is None or args.alpha_out is None:
            raise InvalidInputError("alpha-sets mode needs --alpha and --alpha-out")
        sets = oracle.enumerate_alpha_epsilon_sets(g, args.alpha, args.alpha_out, args.min_size)
        text = io.format_communities(sets)
    else:
        mat = oracle.count_length2_paths_matrix(g)
        text = "".join(" ".join(str(int(x)) for x in row) + "\n" for row in mat)
    _out(text, args.out)
    return EXIT_OK


def cmd_bench(args) -> int:
    try:
        spec_dict = json.loads(io._read(args.spec))
    except ValueError as exc:
        raise io.FormatError(f"{args.spec}: {exc}") from None
    spec = InstanceSpec.from_dict(spec_dict)
    result = recovery_rate(spec, args.algo, args.trials, args.seed, args.threads)
    if args.out:
        io._write(args.out, io.dump_json(result))
    sys.stdout.write(render_table(result))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="overlapcomm",
                                description="Planted overlapping communities: generate, detect, check.")
    p.add_argument("-v", "--verbose", action="store_true", help="log detector statistics")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="generate a planted instance")
    g.add_argument("--model", required=True, choices=MODELS)
    g.add_argument("--config", required=True)
    g.add_argument("--seed", required=True, type=int)
    g.add_argument("--out-graph", required=True)
    g.add_argument("--out-truth", required=True)
    g.add_argument("--ambient", default="none", choices=AMBIENTS)
    g.add_argument("--out-params", help="write the parameter record here instead of stdout")
    g.set_defaults(func=cmd_generate)

    d = sub.add_parser("detect", help="run a detector")
    d.add_argument("--algo", required=True, choices=sorted(ALGORITHMS))
    d.add_argument("--graph", required=True)
    d.add_argument("--config", required=True)
    d.add_argument("--seed", required=True, type=int)
    d.add_argument("--out", required=True)
    d.add_argument("--threads", type=int, default=1)
    d.set_defaults(func=cmd_detect)

    v = sub.add_parser("validate", help="check model assumptions")
    v.add_argument("--graph", required=True)
    v.add_argument("--truth", required=True)
    v.add_argument("--config", required=True)
    v.add_argument("--model", default="clique", choices=MODELS,
                   help="model whose size band applies")
    v.add_argument("--audit", action="store_true", help="also run the tiny-graph completeness audit")
    v.add_argument("--out")
    v.set_defaults(func=cmd_validate)

    e = sub.add_parser("evaluate", help="score found communities against the truth")
    e.add_argument("--found", required=True)
    e.add_argument("--truth", required=True)
    e.add_argument("--graph")
    e.add_argument("--epsilon", type=float)
    e.add_argument("--threshold", type=float, default=0.95)
    e.add_argument("--out")
    e.set_defaults(func=cmd_evaluate)

    o = sub.add_parser("oracle", help="brute-force reference answers")
    o.add_argument("--graph", required=True)
    o.add_argument("--mode", required=True, choices=("cliques", "alpha-sets", "paths2"))
    o.add_argument("--alpha", type=float)
    o.add_argument("--alpha-out", type=float)
    o.add_argument("--min-size", type=int, default=1)
    o.add_argument("--out")
    o.set_defaults(func=cmd_oracle)

    b = sub.add_parser("bench", help="recovery rates over seeded trials")
    b.add_argument("--spec", required=True)
    b.add_argument("--algo", required=True, choices=sorted(ALGORITHMS))
    b.add_argument("--trials", required=True, type=int)
    b.add_argument("--seed", required=True, type=int)
    b.add_argument("--threads", type=int, default=1)
    b.add_argument("--out")
    b.set_defaults(func=cmd_bench)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if getattr(args, "model", None) == "sparse" and getattr(args, "ambient", "none") != "none":
        parser.error("the sparse model has no ambient edges; use --ambient none")
    try:
        return args.func(args)
    except OverlapCommError as exc:
        print(f"overlapcomm: error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"overlapcomm: file error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
