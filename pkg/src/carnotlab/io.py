"""File formats: group/Lie specs (JSON), CSV tables with a JSON header line, graph files.

Every CSV written here starts with one ``#``-prefixed JSON line holding the
producing configuration, followed by a column-name line and the rows.  Floats
are written with ``repr`` so files round-trip exactly.
"""

from __future__ import annotations

import json
import os

import numpy as np

from . import classify as cl
from .errors import ParseError, ValidationError
from .graphs import SampledGraph
from .grid import Grid
from .group import GroupSpec, make_group_spec
from .ilip import SampleSet
from .splitting import Splitting, make_splitting


def _load_json(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"syntax error: {exc.msg}", exc.lineno, exc.colno) from None


def parse_group_spec(text: str) -> GroupSpec:
    """Group spec: ``{"name", "m1", "m2", "B": [[[...]]], "eps2"?}``."""
    data = _load_json(text)
    if not isinstance(data, dict):
        raise ParseError("group spec must be a JSON object")
    for key in ("m1", "m2", "B"):
        if key not in data:
            raise ParseError(f"group spec is missing field {key!r}")
    try:
        B = np.array(data["B"], dtype=float)
    except (TypeError, ValueError):
        raise ParseError("field 'B' must be a nested array of numbers") from None
    return make_group_spec(int(data["m1"]), int(data["m2"]), B, eps2=data.get("eps2"),
                           name=str(data.get("name", "")))


def group_to_json(spec: GroupSpec) -> str:
    return json.dumps(spec.to_dict(), sort_keys=True)


def load_group(source: str) -> GroupSpec:
    """A builtin catalog name, a group-spec file, or a Lie-spec file (with ``brackets``)."""
    if not os.path.exists(source):
        return cl.builtin(source)
    with open(source, encoding="utf-8") as fh:
        text = fh.read()
    data = _load_json(text)
    if isinstance(data, dict) and "brackets" in data:
        return cl.to_group_spec(cl.parse_lie_spec(text), eps2=data.get("eps2"))
    return parse_group_spec(text)


def check_writable(path: str, force: bool) -> None:
    if path and os.path.exists(path) and not force:
        raise ValidationError(f"{path} exists; pass --force to overwrite")


def _fmt(x) -> str:
    return repr(float(x))


def write_csv(path: str, header: dict, columns: list, rows, force: bool = False) -> str:
    """Write (or, with ``path=None``, just return) a headed CSV document."""
    lines = ["# " + json.dumps(header, sort_keys=True), ",".join(columns)]
    for row in rows:
        lines.append(",".join(v if isinstance(v, str) else _fmt(v) for v in row))
    text = "\n".join(lines) + "\n"
    if path:
        check_writable(path, force)
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    return text


def read_csv(path: str):
    """Return ``(header dict, column names, float array)``; the header line is optional."""
    with open(path, encoding="utf-8") as fh:
        lines = [ln.rstrip("\n") for ln in fh]
    header = {}
    pos = 0
    if lines and lines[0].startswith("#"):
        header = _load_json(lines[0][1:])
        pos = 1
    while pos < len(lines) and not lines[pos].strip():
        pos += 1
    if pos >= len(lines):
        raise ParseError("CSV has no column line", pos + 1, 1)
    names = [c.strip() for c in lines[pos].split(",")]
    try:
        [float(c) for c in names]
        names = [f"c{i}" for i in range(len(names))]  # no column line: data starts here
    except ValueError:
        pos += 1
    rows = []
    for lineno in range(pos, len(lines)):
        ln = lines[lineno]
        if not ln.strip() or ln.startswith("#"):
            continue
        cells = ln.split(",")
        if len(cells) != len(names):
            raise ParseError(f"expected {len(names)} columns, got {len(cells)}", lineno + 1, 1)
        try:
            rows.append([float(c) for c in cells])
        except ValueError as exc:
            raise ParseError(f"bad number: {exc}", lineno + 1, 1) from None
    return header, names, np.array(rows, dtype=float).reshape(-1, len(names))


def read_samples(path: str, split: Splitting) -> SampleSet:
    _, names, data = read_csv(path)
    if data.shape[1] != split.wdim + 1:
        raise ValidationError(
            f"sample file needs {split.wdim} coordinate columns plus one value column")
    return SampleSet(split, data[:, :-1], data[:, -1])


def write_samples(path: str, samples: SampleSet, header: dict, force: bool = False) -> str:
    cols = [f"w{i + 1}" for i in range(samples.split.wdim)] + ["phi"]
    rows = np.column_stack([samples.w, samples.values])
    return write_csv(path, header, cols, rows, force=force)


def graph_header(graph: SampledGraph, extra: dict | None = None) -> dict:
    h = {
        "kind": "graph",
        "group": graph.split.spec.to_dict(),
        "nu": graph.split.nu.tolist(),
        "grid": graph.grid.to_dict(),
    }
    if extra:
        h.update(extra)
    return h


def write_graph(path: str, graph: SampledGraph, extra: dict | None = None,
                force: bool = False) -> str:
    nodes = graph.grid.nodes()
    cols = [f"w{i + 1}" for i in range(graph.grid.dim)] + ["phi"]
    rows = np.column_stack([nodes, graph.values.reshape(-1)])
    return write_csv(path, graph_header(graph, extra), cols, rows, force=force)


def read_graph(path: str) -> SampledGraph:
    header, _, data = read_csv(path)
    if header.get("kind") != "graph":
        raise ParseError("not a graph file (header kind != 'graph')", 1, 1)
    g = header["group"]
    spec = make_group_spec(int(g["m1"]), int(g["m2"]), np.array(g["B"], dtype=float),
                           name=g.get("name", ""))
    if g.get("eps2") is not None and float(g["eps2"]) != spec.eps2:
        spec = make_group_spec(int(g["m1"]), int(g["m2"]), np.array(g["B"], dtype=float),
                               eps2=float(g["eps2"]), name=g.get("name", ""))
    split = make_splitting(spec, header["nu"])
    gd = header["grid"]
    grid = Grid(gd["lo"], gd["hi"], tuple(gd["shape"]))
    if data.shape != (grid.size, grid.dim + 1):
        raise ParseError(f"graph table must have {grid.size} rows of {grid.dim + 1} columns",
                         2, 1)
    return SampledGraph(split, grid, data[:, -1].reshape(grid.shape))
