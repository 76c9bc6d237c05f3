"""Command line entry point ``forge``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import serialize
from .degseq import graphic_violation, realize_graphic
from .errors import ForgeError
from .fintest import coarsest_equitable_graph, fractionally_isomorphic
from .pipeline import run


def _cmd_run(args) -> int:
    config = serialize.read_config(args.config)
    if args.seed is not None:
        config.seed = args.seed
    if args.mode is not None:
        config.mode = args.mode
    if args.strict:
        config.param_mode = "strict"
        config.strict = True
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    result = run(config)
    for m in result.members:
        serialize.write_edges(m.graph.graph, out / f"member_{m.index}.edges")
        serialize.write_parts(m.graph.labels, out / f"member_{m.index}.parts")
    serialize.write_json(serialize.certificate_to_dict(result.certificate), out / "certificate.json")
    serialize.write_json(result.to_dict(), out / "report.json")
    print(f"{len(result.members)} graphs on {config.n} vertices; all fractionally isomorphic: {result.success}")
    return 0 if result.success else 1


def _cmd_fi(args) -> int:
    G, H = serialize.read_edges(args.first), serialize.read_edges(args.second)
    same = fractionally_isomorphic(G, H)
    if args.verbose:
        for name, X in (("first", G), ("second", H)):
            _, cert = coarsest_equitable_graph(X)
            print(name, json.dumps(serialize.certificate_to_dict(cert)))
    print("fractionally isomorphic" if same else "not fractionally isomorphic")
    return 0 if same else 1


def _read_sequence(text: str) -> list[int]:
    return [int(x) for x in text.replace(",", " ").split()]


def _cmd_degseq(args) -> int:
    d = _read_sequence(args.sequence)
    if args.action == "check":
        viol = graphic_violation(d)
        print("graphic" if viol is None else f"not graphic: {viol[0]} fails at k={viol[1]}")
        return 0 if viol is None else 1
    G = realize_graphic(d)
    if args.out:
        serialize.write_edges(G, args.out)
    else:
        for u, v in G.edges():
            print(u, v)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="forge", description="Build fractionally isomorphic graphs from step graphons.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run the construction on a config file")
    r.add_argument("--config", required=True)
    r.add_argument("--out", required=True)
    r.add_argument("--strict", action="store_true", help="use the proof's constants and fail if the Setup is infeasible")
    r.add_argument("--mode", choices=["general", "regular"])
    r.add_argument("--seed", type=int)
    r.set_defaults(func=_cmd_run)

    f = sub.add_parser("fi", help="fractional isomorphism of two edge-list graphs")
    f.add_argument("action", choices=["check"])
    f.add_argument("first")
    f.add_argument("second")
    f.set_defaults(func=_cmd_fi)

    d = sub.add_parser("degseq", help="test or realize a degree sequence")
    d.add_argument("action", choices=["check", "realize"])
    d.add_argument("sequence", help="comma or space separated degrees")
    d.add_argument("--out")
    d.set_defaults(func=_cmd_degseq)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except ForgeError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
