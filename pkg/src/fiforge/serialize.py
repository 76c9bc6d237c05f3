"""Text formats: graphon and config JSON, edge lists, partition files, certificates.

Decimals in JSON are read as exact fractions (``0.3`` is 3/10) and strings
such as ``"1/3"`` are accepted anywhere a number is.  Edge lists start with a
``n m`` header followed by one ``u v`` pair per line.
"""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path
from typing import Iterable

import numpy as np

from .errors import UsageError
from .fintest import FICertificate
from .kernelcore import FiniteGraph, PartitionedGraph, StepGraphon, to_fraction


def _num(x: Fraction):
    x = Fraction(x)
    if x.denominator == 1:
        return x.numerator
    f = float(x)
    return f if Fraction(repr(f)) == x else f"{x.numerator}/{x.denominator}"


def loads_exact(text: str):
    return json.loads(text, parse_float=Fraction)


def graphon_to_dict(W: StepGraphon) -> dict:
    return {"weights": [_num(w) for w in W.weights], "densities": [[_num(x) for x in row] for row in W.densities]}


def graphon_from_dict(obj) -> StepGraphon:
    try:
        return StepGraphon([to_fraction(w) for w in obj["weights"]], [[to_fraction(x) for x in r] for r in obj["densities"]])
    except (KeyError, TypeError) as e:
        raise UsageError(f"graphon needs 'weights' and 'densities': {e}") from None


def read_graphon(path) -> StepGraphon:
    return graphon_from_dict(loads_exact(Path(path).read_text()))


def write_graphon(W: StepGraphon, path) -> None:
    Path(path).write_text(json.dumps(graphon_to_dict(W), indent=1) + "\n")


def write_edges(G: FiniteGraph, path) -> None:
    edges = G.edges()
    lines = [f"{G.n} {len(edges)}"] + [f"{u} {v}" for u, v in edges]
    Path(path).write_text("\n".join(lines) + "\n")


def read_edges(path) -> FiniteGraph:
    rows = [ln.split() for ln in Path(path).read_text().splitlines() if ln.strip() and not ln.startswith("#")]
    if not rows or len(rows[0]) != 2:
        raise UsageError(f"{path}: first line must be 'n m'")
    n, m = map(int, rows[0])
    edges = [(int(u), int(v)) for u, v in rows[1:]]
    if len(edges) != m:
        raise UsageError(f"{path}: header says {m} edges, found {len(edges)}")
    return FiniteGraph.from_edges(n, edges)


def write_parts(labels: Iterable[int], path) -> None:
    Path(path).write_text("".join(f"{int(x)}\n" for x in labels))


def read_parts(path) -> np.ndarray:
    return np.array([int(x) for x in Path(path).read_text().split()], dtype=np.int64)


def read_partitioned(edges_path, parts_path) -> PartitionedGraph:
    return PartitionedGraph(read_edges(edges_path), read_parts(parts_path))


def certificate_to_dict(cert: FICertificate) -> dict:
    return {"part_sizes": list(cert.part_sizes), "degree_matrix": [list(r) for r in cert.degree_matrix]}


def certificate_from_dict(obj) -> FICertificate:
    return FICertificate(tuple(obj["part_sizes"]), tuple(tuple(r) for r in obj["degree_matrix"]), obj.get("ordering", "layout"))


def write_json(obj, path) -> None:
    Path(path).write_text(json.dumps(obj, indent=1, default=_json_default) + "\n")


def _json_default(x):
    if isinstance(x, Fraction):
        return _num(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.floating):
        return float(x)
    if isinstance(x, np.ndarray):
        return x.tolist()
    raise TypeError(f"cannot serialize {type(x).__name__}")


def config_from_dict(obj):
    """RunConfig from its JSON document (family, epsilon, n, mode, seed, budgets, ...)."""
    from .pipeline import RunConfig

    if "family" not in obj or "epsilon" not in obj:
        raise UsageError("config needs 'family' and 'epsilon'")
    budgets = obj.get("budgets", {})
    return RunConfig(
        family=[graphon_from_dict(W) for W in obj["family"]],
        epsilon=to_fraction(obj["epsilon"]),
        n=obj.get("n", "auto"),
        mode=obj.get("mode", "general"),
        seed=int(obj.get("seed", 0)),
        param_mode=obj.get("param_mode", "practical"),
        strict=bool(obj.get("strict", False)),
        params_override=obj.get("params_override"),
        sampler_budget=int(budgets.get("sampler", 100)),
        family_budget=int(budgets.get("family", 5)),
        even_diagonal=bool(obj.get("even_diagonal", False)),
        recipe=obj.get("recipe", "calibrated"),
    )


def read_config(path):
    return config_from_dict(loads_exact(Path(path).read_text()))
