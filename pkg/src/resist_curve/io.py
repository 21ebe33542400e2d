"""Graph file formats and deterministic CSV/JSON writers.

Edge-list text: one ``i j c_ij`` triple per line, ``#`` starts a comment,
blank lines are ignored. A missing weight defaults to 1.

JSON: ``{"n": int, "links": [[i, j, c], ...]}`` with an optional
``"geometry"`` object (positions, boundary distances, ERG parameters).
"""
from __future__ import annotations

import csv
import io as _io
import json
from pathlib import Path

import numpy as np

from .errors import GraphError, GraphParseError
from .graph import WeightedGraph, build_graph


def fmt(x) -> str:
    """17 significant digits; round-trips doubles exactly."""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if np.isnan(x):
        return "nan"
    if np.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".17g")


def parse_edge_list(text: str) -> WeightedGraph:
    edges = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.replace(",", " ").split()
        if len(parts) not in (2, 3):
            raise GraphParseError(f"expected 'i j [c]', got {raw!r}", line=lineno)
        try:
            i, j = int(parts[0]), int(parts[1])
            c = float(parts[2]) if len(parts) == 3 else 1.0
        except ValueError:
            raise GraphParseError(f"cannot parse {raw!r}", line=lineno) from None
        edges.append((lineno, i, j, c))
    try:
        return build_graph([(i, j, c) for _, i, j, c in edges])
    except GraphError as exc:
        # locate the first offending line for the message
        for k in range(1, len(edges) + 1):
            try:
                build_graph([(i, j, c) for _, i, j, c in edges[:k]])
            except GraphError:
                raise GraphParseError(str(exc), line=edges[k - 1][0]) from exc
        raise


def graph_from_json(obj: dict) -> WeightedGraph:
    try:
        n = int(obj["n"])
        links = obj["links"]
    except (KeyError, TypeError, ValueError) as exc:
        raise GraphParseError(f"bad graph JSON: {exc}") from None
    edges = []
    for k, item in enumerate(links):
        if len(item) == 2:
            item = (*item, 1.0)
        if len(item) != 3:
            raise GraphParseError(f"link #{k} should be [i, j, c]")
        edges.append(item)
    return build_graph(edges, n=n)


def graph_to_json(g: WeightedGraph, geometry: dict | None = None) -> dict:
    obj = {"n": g.n, "links": [[i, j, c] for i, j, c in g.edge_list()]}
    if geometry is not None:
        obj["geometry"] = geometry
    return obj


def read_graph(path) -> WeightedGraph:
    """Read a graph from ``.json`` or edge-list text, by file suffix."""
    path = Path(path)
    text = path.read_text()
    if path.suffix.lower() == ".json":
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise GraphParseError(exc.msg, line=exc.lineno) from None
        return graph_from_json(obj)
    return parse_edge_list(text)


def write_edge_list(g: WeightedGraph, path) -> None:
    lines = [f"# n={g.n} m={g.m}"]
    lines += [f"{i} {j} {fmt(c)}" for i, j, c in g.edge_list()]
    Path(path).write_text("\n".join(lines) + "\n")


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, (np.bool_, bool)):
        return bool(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if np.isfinite(x) else None
    return x


def dumps_json(obj) -> str:
    """Deterministic JSON text (sorted keys, repr floats, non-finite -> null)."""
    return json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n"


def write_json(obj, path) -> None:
    Path(path).write_text(dumps_json(obj))


def csv_text(header, rows) -> str:
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) if not isinstance(v, str) else v for v in row])
    return buf.getvalue()


def write_csv(path, header, rows) -> None:
    Path(path).write_text(csv_text(header, rows))
