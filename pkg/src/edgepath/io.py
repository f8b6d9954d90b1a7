"""Readers and writers for edge lists, trail sets and JSON drawings.

Edge-list text::

    undirected            # or: directed
    v <label> <x> <y>
    e <source-label> <target-label>

Trail-set text: one polyline per line, ``x0 y0 x1 y1 ... xn yn``. Trail
endpoints closer than ``1e-6`` of the bounding-box diagonal share a vertex.

JSON drawing::

    {"directed": bool, "vertices": [[x, y], ...],
     "edges": [{"s": int, "t": int, "polyline": [[x, y], ...],
                "bundled": bool, "control_points": [[x, y], ...]}, ...]}

``bundled`` and ``control_points`` are optional on input.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from .drawing import Drawing
from .graph import Graph, Layout

GraphFormat = Literal["edge-list", "trail-set"]


class GraphFormatError(ValueError):
    """A graph or drawing file failed to parse; ``lineno`` is 1-based when known."""

    def __init__(self, message: str, lineno: int | None = None, path: str | None = None):
        self.lineno = lineno
        self.path = path
        where = ""
        if path is not None:
            where = f"{path}:"
        if lineno is not None:
            where += f"{lineno}:"
        super().__init__(f"{where} {message}" if where else message)


@dataclass
class LoadReport:
    self_loops_dropped: int = 0
    duplicates_dropped: int = 0
    notes: list[str] = field(default_factory=list)


def _dedup_edges(raw, directed, report):
    seen = set()
    out = []
    kept_index = []
    for i, (s, t) in enumerate(raw):
        if s == t:
            report.self_loops_dropped += 1
            continue
        key = (s, t) if directed else (min(s, t), max(s, t))
        if key in seen:
            report.duplicates_dropped += 1
            continue
        seen.add(key)
        out.append((s, t))
        kept_index.append(i)
    return out, kept_index


def _float(tok, lineno, path):
    try:
        x = float(tok)
    except ValueError:
        raise GraphFormatError(f"not a number: {tok!r}", lineno, path) from None
    if not math.isfinite(x):
        raise GraphFormatError(f"non-finite coordinate {tok!r}", lineno, path)
    return x


def _content_lines(path):
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if line:
                yield lineno, line


def read_edge_list(path, report: LoadReport | None = None) -> tuple[Graph, Layout]:
    report = report if report is not None else LoadReport()
    path = os.fspath(path)
    directed = None
    labels: dict[str, int] = {}
    coords: list[tuple[float, float]] = []
    raw_edges: list[tuple[str, str, int]] = []
    for lineno, line in _content_lines(path):
        tok = line.split()
        if directed is None:
            if tok != ["directed"] and tok != ["undirected"]:
                raise GraphFormatError("first line must be 'directed' or 'undirected'", lineno, path)
            directed = tok[0] == "directed"
            continue
        if tok[0] == "v":
            if len(tok) != 4:
                raise GraphFormatError("expected 'v <id> <x> <y>'", lineno, path)
            if tok[1] in labels:
                raise GraphFormatError(f"vertex {tok[1]!r} defined twice", lineno, path)
            labels[tok[1]] = len(coords)
            coords.append((_float(tok[2], lineno, path), _float(tok[3], lineno, path)))
        elif tok[0] == "e":
            if len(tok) != 3:
                raise GraphFormatError("expected 'e <source> <target>'", lineno, path)
            raw_edges.append((tok[1], tok[2], lineno))
        else:
            raise GraphFormatError(f"unknown record type {tok[0]!r}", lineno, path)
    if directed is None:
        raise GraphFormatError("empty file: missing 'directed'/'undirected' header", None, path)
    ids = []
    for a, b, lineno in raw_edges:
        for lab in (a, b):
            if lab not in labels:
                raise GraphFormatError(f"edge references vertex {lab!r} without coordinates", lineno, path)
        ids.append((labels[a], labels[b]))
    edges, _ = _dedup_edges(ids, directed, report)
    g = Graph(len(coords), tuple(edges), directed, labels=tuple(labels))
    return g, Layout(np.array(coords, dtype=np.float64).reshape(-1, 2))


def read_trails(path) -> list[np.ndarray]:
    path = os.fspath(path)
    trails = []
    for lineno, line in _content_lines(path):
        vals = [_float(t, lineno, path) for t in line.split()]
        if len(vals) < 4 or len(vals) % 2:
            raise GraphFormatError("a trail needs an even number (>= 4) of coordinates", lineno, path)
        trails.append(np.array(vals).reshape(-1, 2))
    if not trails:
        raise GraphFormatError("no trails found", None, path)
    return trails


def trails_to_drawing(trails, directed: bool = False, report: LoadReport | None = None, rel_tol: float = 1e-6) -> Drawing:
    """Merge trail endpoints into vertices and keep each trail as its edge's polyline."""
    report = report if report is not None else LoadReport()
    ends = np.array([[t[0], t[-1]] for t in trails]).reshape(-1, 2)
    span = ends.max(axis=0) - ends.min(axis=0)
    tol = rel_tol * float(np.hypot(*span))
    vertex_of = _merge_points(ends, tol)
    uniq, dense = np.unique(vertex_of, return_inverse=True)
    positions = ends[uniq]
    raw = [(int(dense[2 * i]), int(dense[2 * i + 1])) for i in range(len(trails))]
    edges, kept = _dedup_edges(raw, directed, report)
    g = Graph(len(positions), tuple(edges), directed)
    layout = Layout(positions)
    polylines = []
    for (s, t), i in zip(edges, kept):
        pl = np.array(trails[i], dtype=np.float64)
        pl[0], pl[-1] = positions[s], positions[t]
        polylines.append(pl)
    return Drawing(g, layout, tuple(polylines))


def _merge_points(points: np.ndarray, tol: float) -> np.ndarray:
    """Representative index per point; points within ``tol`` of an earlier one join it."""
    rep = np.arange(len(points))
    if tol <= 0:
        _, first = np.unique(points, axis=0, return_index=True)
        lookup = {tuple(points[i]): i for i in sorted(first)}
        return np.array([lookup[tuple(p)] for p in points])
    from scipy.spatial import cKDTree

    tree = cKDTree(points)
    for i, j in sorted(tree.query_pairs(tol)):
        # union toward the smallest index so merging is order independent
        ri, rj = _find(rep, i), _find(rep, j)
        if ri != rj:
            rep[max(ri, rj)] = min(ri, rj)
    return np.array([_find(rep, i) for i in range(len(points))])


def _find(rep, i):
    while rep[i] != i:
        rep[i] = rep[rep[i]]
        i = rep[i]
    return i


def load_graph(path, format: GraphFormat = "edge-list", *, directed: bool | None = None,
               report: LoadReport | None = None) -> tuple[Graph, Layout]:
    """Load a graph and its layout.

    ``directed`` overrides the edge-list header; trail sets default to
    undirected. Dropped self-loops and duplicates are counted in ``report``.
    """
    report = report if report is not None else LoadReport()
    if format == "edge-list":
        g, layout = read_edge_list(path, report)
        if directed is not None and directed != g.directed:
            g = _redirect(g, directed, report)
        return g, layout
    if format == "trail-set":
        d = trails_to_drawing(read_trails(path), bool(directed), report)
        return d.graph, d.layout
    raise ValueError(f"unknown graph format {format!r}")


def load_trail_drawing(path, directed: bool = False, report: LoadReport | None = None) -> Drawing:
    return trails_to_drawing(read_trails(path), directed, report)


def _redirect(g: Graph, directed: bool, report: LoadReport) -> Graph:
    edges, _ = _dedup_edges(g.edges, directed, report)
    return Graph(g.vertex_count, tuple(edges), directed, labels=g.labels)


def write_edge_list(path, g: Graph, layout: Layout) -> None:
    lines = ["directed" if g.directed else "undirected"]
    labels = g.labels or tuple(str(i) for i in range(g.vertex_count))
    for lab, (x, y) in zip(labels, layout.positions):
        lines.append(f"v {lab} {float(x)!r} {float(y)!r}")
    for s, t in g.edges:
        lines.append(f"e {labels[s]} {labels[t]}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def drawing_to_dict(drawing: Drawing) -> dict:
    g = drawing.graph
    bundled = getattr(drawing, "bundled", None)
    control = getattr(drawing, "control_points", ())
    paths = getattr(drawing, "paths", ())
    edges = []
    for i, (s, t) in enumerate(g.edges):
        rec = {"s": s, "t": t, "polyline": drawing.polylines[i].tolist()}
        if bundled is not None:
            rec["bundled"] = bool(bundled[i])
            rec["control_points"] = control[i].tolist()
            if paths and paths[i] is not None:
                rec["path"] = list(paths[i])
        edges.append(rec)
    out = {"directed": g.directed, "vertices": drawing.layout.positions.tolist(), "edges": edges}
    if bundled is not None:
        out["locked"] = [int(i) for i in np.flatnonzero(drawing.locked)]
    return out


def dump_drawing(drawing: Drawing, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(drawing_to_dict(drawing), fh, separators=(",", ":"))
        fh.write("\n")


def drawing_from_dict(data: dict, source: str | None = None) -> Drawing:
    from .bundling import BundledDrawing

    try:
        directed = bool(data["directed"])
        vertices = np.array(data["vertices"], dtype=np.float64).reshape(-1, 2)
        recs = data["edges"]
        edges = [(int(r["s"]), int(r["t"])) for r in recs]
        polylines = [np.array(r["polyline"], dtype=np.float64) for r in recs]
    except (KeyError, TypeError, ValueError) as exc:
        raise GraphFormatError(f"malformed drawing JSON: {exc}", None, source) from None
    try:
        g = Graph(len(vertices), tuple(edges), directed)
        layout = Layout(vertices)
    except ValueError as exc:
        raise GraphFormatError(str(exc), None, source) from None
    if all("bundled" in r for r in recs) and recs:
        locked = np.zeros(len(recs), dtype=bool)
        locked[np.array(data.get("locked", []), dtype=np.int64)] = True
        return BundledDrawing(
            g, layout, tuple(polylines),
            control_points=tuple(np.array(r["control_points"], dtype=np.float64).reshape(-1, 2) for r in recs),
            bundled=np.array([bool(r["bundled"]) for r in recs]),
            locked=locked,
            paths=tuple(r.get("path") for r in recs),
        )
    return Drawing(g, layout, tuple(polylines))


def load_drawing(path) -> Drawing:
    path = os.fspath(path)
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise GraphFormatError(f"invalid JSON: {exc.msg}", exc.lineno, path) from None
    return drawing_from_dict(data, path)
