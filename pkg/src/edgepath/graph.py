"""Graph and layout data model shared by bundling, metrics and rendering."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

UNREACHABLE = -1


@dataclass(frozen=True)
class Edge:
    id: int
    source: int
    target: int

    def __post_init__(self):
        if self.source == self.target:
            raise ValueError(f"edge {self.id} is a self-loop at vertex {self.source}")


@dataclass(frozen=True, eq=False)
class Graph:
    """Abstract topology: ``vertex_count`` vertices and an ordered edge list.

    Edge ids are list indices. Instances are treated as immutable; the
    adjacency structures are built lazily and cached.
    """

    vertex_count: int
    edges: tuple[tuple[int, int], ...]
    directed: bool = False
    labels: tuple[str, ...] | None = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "edges", tuple((int(s), int(t)) for s, t in self.edges))
        if self.vertex_count < 0:
            raise ValueError("vertex_count must be non-negative")
        for i, (s, t) in enumerate(self.edges):
            if not (0 <= s < self.vertex_count and 0 <= t < self.vertex_count):
                raise ValueError(f"edge {i} ({s}, {t}) references a vertex outside 0..{self.vertex_count - 1}")
            if s == t:
                raise ValueError(f"edge {i} is a self-loop on vertex {s}")

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def edge(self, eid: int) -> Edge:
        s, t = self.edges[eid]
        return Edge(eid, s, t)

    @cached_property
    def edge_array(self) -> np.ndarray:
        return np.asarray(self.edges, dtype=np.int64).reshape(-1, 2)

    @cached_property
    def out_adjacency(self) -> list[list[tuple[int, int]]]:
        """``out_adjacency[u]`` lists ``(v, edge_id)`` for each traversable step u -> v."""
        adj: list[list[tuple[int, int]]] = [[] for _ in range(self.vertex_count)]
        for eid, (s, t) in enumerate(self.edges):
            adj[s].append((t, eid))
            if not self.directed:
                adj[t].append((s, eid))
        return adj

    @cached_property
    def in_adjacency(self) -> list[list[tuple[int, int]]]:
        if not self.directed:
            return self.out_adjacency
        adj: list[list[tuple[int, int]]] = [[] for _ in range(self.vertex_count)]
        for eid, (s, t) in enumerate(self.edges):
            adj[t].append((s, eid))
        return adj

    @cached_property
    def undirected_adjacency(self) -> list[list[int]]:
        adj: list[list[int]] = [[] for _ in range(self.vertex_count)]
        for s, t in self.edges:
            adj[s].append(t)
            adj[t].append(s)
        return adj

    @cached_property
    def out_neighbors(self) -> list[list[int]]:
        return [[v for v, _ in row] for row in self.out_adjacency]

    @cached_property
    def in_neighbors(self) -> list[list[int]]:
        return [[v for v, _ in row] for row in self.in_adjacency]

    @cached_property
    def arc_set(self) -> frozenset[tuple[int, int]]:
        """All traversable (u, v) steps; both orientations for undirected graphs."""
        arcs = set(self.edges)
        if not self.directed:
            arcs.update((t, s) for s, t in self.edges)
        return frozenset(arcs)

    def has_arc(self, u: int, v: int) -> bool:
        return (u, v) in self.arc_set


@dataclass(frozen=True, eq=False)
class Layout:
    """Vertex positions of the input drawing, an ``(n, 2)`` float64 array."""

    positions: np.ndarray

    def __post_init__(self):
        pos = np.array(self.positions, dtype=np.float64, copy=True).reshape(-1, 2)
        if not np.all(np.isfinite(pos)):
            raise ValueError("layout contains NaN or infinite coordinates")
        pos.setflags(write=False)
        object.__setattr__(self, "positions", pos)

    def __len__(self) -> int:
        return len(self.positions)

    def __getitem__(self, v: int) -> np.ndarray:
        return self.positions[v]

    def check_covers(self, g: Graph) -> None:
        if len(self) != g.vertex_count:
            raise ValueError(f"layout has {len(self)} positions for {g.vertex_count} vertices")


def euclidean_length(layout: Layout, e: Edge | tuple[int, int]) -> float:
    if isinstance(e, Edge):
        s, t = e.source, e.target
    else:
        s, t = e
    p, q = layout.positions[s], layout.positions[t]
    return float(np.hypot(q[0] - p[0], q[1] - p[1]))


def edge_lengths(g: Graph, layout: Layout) -> np.ndarray:
    if g.edge_count == 0:
        return np.zeros(0)
    ea = g.edge_array
    d = layout.positions[ea[:, 1]] - layout.positions[ea[:, 0]]
    return np.hypot(d[:, 0], d[:, 1])


def bfs_hops(g: Graph, s: int, cap: int, *, reverse: bool = False, ignore_direction: bool = False) -> dict[int, int]:
    """Hop distances from ``s`` to every vertex within ``cap`` hops.

    ``reverse`` follows edges backwards (distances *to* ``s`` in a directed graph).
    """
    if ignore_direction or not g.directed:
        adj = g.undirected_adjacency
    else:
        adj = g.in_neighbors if reverse else g.out_neighbors
    dist = {s: 0}
    frontier = deque([s])
    while frontier:
        u = frontier.popleft()
        du = dist[u]
        if du >= cap:
            continue
        for v in adj[u]:
            if v not in dist:
                dist[v] = du + 1
                frontier.append(v)
    return dist


def hop_distance(g: Graph, s: int, v: int, cap: int) -> int:
    """Unweighted shortest-path length from ``s`` to ``v``, or ``UNREACHABLE``.

    Respects edge direction when ``g.directed``. Returns ``UNREACHABLE`` if
    ``v`` is farther than ``cap`` hops or in another component.
    """
    if s == v:
        return 0
    return bfs_hops(g, s, cap).get(v, UNREACHABLE)


def connected_components(g: Graph) -> np.ndarray:
    """Weakly connected component id per vertex, dense from 0 in vertex order."""
    comp = np.full(g.vertex_count, -1, dtype=np.int64)
    adj = g.undirected_adjacency
    next_id = 0
    for root in range(g.vertex_count):
        if comp[root] >= 0:
            continue
        comp[root] = next_id
        stack = [root]
        while stack:
            u = stack.pop()
            for v in adj[u]:
                if comp[v] < 0:
                    comp[v] = next_id
                    stack.append(v)
        next_id += 1
    return comp


def component_count(g: Graph) -> int:
    comp = connected_components(g)
    return int(comp.max()) + 1 if len(comp) else 0


def diameter_hops(g: Graph) -> int:
    """Largest finite hop distance, direction ignored."""
    best = 0
    for s in range(g.vertex_count):
        d = bfs_hops(g, s, g.vertex_count, ignore_direction=True)
        best = max(best, max(d.values()))
    return best
