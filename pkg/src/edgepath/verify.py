"""Post-hoc checks of Edge-Path output against its defining guarantees."""

from __future__ import annotations

import numpy as np

from .bundling import BundledDrawing
from .drawing import polyline_length
from .graph import connected_components, euclidean_length


class InvariantViolation(AssertionError):
    pass


def path_violations(drawing: BundledDrawing) -> list[str]:
    """Bundled edges whose route is not a path of the graph between their endpoints."""
    g = drawing.graph
    out = []
    for e, route in enumerate(drawing.paths):
        if route is None:
            continue
        s, t = g.edges[e]
        if route[0] != s or route[-1] != t:
            out.append(f"edge {e}: route runs {route[0]}->{route[-1]}, expected {s}->{t}")
            continue
        for u, v in zip(route[:-1], route[1:]):
            if not g.has_arc(u, v):
                out.append(f"edge {e}: step {u}->{v} is not an edge of the graph")
                break
    return out


def distortion_violations(drawing: BundledDrawing, rel_tol: float = 1e-9) -> list[str]:
    """Bundled edges whose vertex route is longer than ``k`` times the straight edge."""
    k = drawing.params.max_distortion_k
    pos = drawing.layout.positions
    out = []
    for e, route in enumerate(drawing.paths):
        if route is None:
            continue
        straight = euclidean_length(drawing.layout, drawing.graph.edges[e])
        length = polyline_length(pos[route])
        if length > k * straight * (1 + rel_tol):
            out.append(f"edge {e}: route length {length:.6g} exceeds {k} x {straight:.6g}")
    return out


def component_violations(drawing: BundledDrawing) -> list[str]:
    comp = connected_components(drawing.graph)
    out = []
    for e, route in enumerate(drawing.paths):
        if route is None:
            continue
        c = comp[drawing.graph.edges[e][0]]
        if np.any(comp[route] != c):
            out.append(f"edge {e}: route leaves component {c}")
    return out


def state_violations(drawing: BundledDrawing) -> list[str]:
    out = []
    both = np.flatnonzero(np.asarray(drawing.bundled) & np.asarray(drawing.locked))
    if len(both):
        out.append(f"edges both bundled and locked: {both.tolist()[:10]}")
    for e, route in enumerate(drawing.paths):
        if route is None and len(drawing.control_points[e]) != 2:
            out.append(f"edge {e}: unbundled but has {len(drawing.control_points[e])} control points")
    return out


def check_bundled_drawing(drawing: BundledDrawing) -> None:
    problems = path_violations(drawing) + distortion_violations(drawing) + state_violations(drawing)
    if problems:
        raise InvariantViolation("; ".join(problems[:5]) + (f" (+{len(problems) - 5} more)" if len(problems) > 5 else ""))
