"""Drawings: a graph, its layout and one polyline per edge."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import Graph, Layout


@dataclass(frozen=True, eq=False)
class Drawing:
    """Any edge drawing of a laid-out graph.

    ``polylines[i]`` is an ``(m, 2)`` array tracing edge ``i`` from its source
    to its target. Straight-line drawings, Edge-Path output and third-party
    bundler output all share this shape.
    """

    graph: Graph
    layout: Layout
    polylines: tuple[np.ndarray, ...]

    def __post_init__(self):
        self.layout.check_covers(self.graph)
        if len(self.polylines) != self.graph.edge_count:
            raise ValueError(f"{len(self.polylines)} polylines for {self.graph.edge_count} edges")
        lines = []
        for i, pl in enumerate(self.polylines):
            a = np.array(pl, dtype=np.float64).reshape(-1, 2)
            if len(a) < 2:
                raise ValueError(f"edge {i} polyline has fewer than 2 points")
            if not np.all(np.isfinite(a)):
                raise ValueError(f"edge {i} polyline has non-finite coordinates")
            a.setflags(write=False)
            lines.append(a)
        object.__setattr__(self, "polylines", tuple(lines))

    def all_points(self) -> np.ndarray:
        parts = [self.layout.positions] + list(self.polylines)
        return np.concatenate(parts) if parts else np.zeros((0, 2))


def straight_drawing(g: Graph, layout: Layout) -> Drawing:
    pos = layout.positions
    return Drawing(g, layout, tuple(pos[[s, t]] for s, t in g.edges))


def polyline_length(points: np.ndarray) -> float:
    d = np.diff(points, axis=0)
    return float(np.hypot(d[:, 0], d[:, 1]).sum())
