"""Seeded synthetic benchmarks: Cubes 1R-4R, Noise, random geometric graphs.

Every generator draws from a PCG64 stream derived from ``SeedSequence(seed)``
with a fixed spawn key per purpose, so adding draws for one purpose never
reshuffles another:

==========  =========================
spawn key   purpose
==========  =========================
0           vertex placement
1           spanning trees
2           extra intra-square edges
3           inter-component edges
4           edge orientation
==========  =========================
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import Graph, Layout

PLACEMENT, TREE, EXTRA, INTER, ORIENT = range(5)

CUBES_VARIANTS = ("1R", "2R", "3R", "4R")


def stream(seed: int, purpose: int) -> np.random.Generator:
    ss = np.random.SeedSequence(int(seed) & 0xFFFFFFFFFFFFFFFF, spawn_key=(purpose,))
    return np.random.Generator(np.random.PCG64(ss))


@dataclass(frozen=True)
class CubesSpec:
    variant: str = "2R"
    total_vertices: int = 100
    side_s: float = 1.0
    directed: bool = False
    seed: int = 0
    extra_edges_per_square: int | None = None

    def __post_init__(self):
        if self.variant not in CUBES_VARIANTS:
            raise ValueError(f"unknown Cubes variant {self.variant!r}; expected one of {CUBES_VARIANTS}")
        if self.total_vertices <= 0 or self.total_vertices % 4:
            raise ValueError(f"total_vertices must be a positive multiple of 4, got {self.total_vertices}")
        if self.side_s <= 0:
            raise ValueError("side_s must be positive")

    @property
    def delta_gap(self) -> float:
        s = self.side_s
        return {"1R": s / 10, "4R": s / 10, "2R": 0.0, "3R": -s / 5}[self.variant]

    @property
    def square_size(self) -> int:
        return self.total_vertices // 4

    @property
    def extra_edges(self) -> int:
        if self.extra_edges_per_square is not None:
            return self.extra_edges_per_square
        return self.square_size // 8

    def square_origins(self) -> list[tuple[float, float]]:
        """Lower-left corners of the top-left, top-right, bottom-left, bottom-right squares."""
        s = self.side_s
        top = s + self.delta_gap
        return [(0.0, top), (3 * s, top), (0.0, 0.0), (3 * s, 0.0)]

    def pairings(self) -> list[tuple[int, int]]:
        """(left square, right square) index pairs joined by inter-component edges."""
        if self.variant == "4R":
            return [(0, 3), (2, 1)]
        return [(0, 1), (2, 3)]


@dataclass(frozen=True)
class NoiseSpec:
    total_vertices: int = 1000
    seed: int = 0

    def __post_init__(self):
        if self.total_vertices <= 0 or self.total_vertices % 2:
            raise ValueError(f"total_vertices must be positive and even, got {self.total_vertices}")


def random_spanning_tree(vertex_ids, rng: np.random.Generator) -> list[tuple[int, int]]:
    """Spanning tree of the complete graph on ``vertex_ids`` by Aldous-Broder random walk.

    Edges are returned as (earlier-visited, newly-visited) pairs.
    """
    ids = list(vertex_ids)
    n = len(ids)
    if n == 0:
        raise ValueError("need at least one vertex")
    visited = np.zeros(n, dtype=bool)
    cur = int(rng.integers(n))
    visited[cur] = True
    remaining = n - 1
    edges = []
    while remaining:
        nxt = int(rng.integers(n - 1))
        if nxt >= cur:
            nxt += 1
        if not visited[nxt]:
            visited[nxt] = True
            remaining -= 1
            edges.append((ids[cur], ids[nxt]))
        cur = nxt
    return edges


def _random_new_pairs(rng, left, right, count, taken, max_tries=100_000):
    out = []
    tries = 0
    while len(out) < count:
        tries += 1
        if tries > max_tries:
            raise ValueError("not enough distinct vertex pairs for the requested edge count")
        u = int(left[rng.integers(len(left))])
        v = int(right[rng.integers(len(right))])
        key = (min(u, v), max(u, v))
        if u == v or key in taken:
            continue
        taken.add(key)
        out.append((u, v))
    return out


def generate_cubes(spec: CubesSpec) -> tuple[Graph, Layout]:
    """Four squares of ``|V|/4`` vertices each, joined pairwise left to right.

    Squares are ordered top-left, top-right, bottom-left, bottom-right and
    occupy consecutive vertex id blocks in that order.
    """
    n4 = spec.square_size
    s = spec.side_s
    place = stream(spec.seed, PLACEMENT)
    pos = np.empty((spec.total_vertices, 2))
    blocks = []
    for q, (x0, y0) in enumerate(spec.square_origins()):
        ids = np.arange(q * n4, (q + 1) * n4)
        pos[ids] = place.uniform(0.0, s, size=(n4, 2)) + (x0, y0)
        blocks.append(ids)

    tree_rng = stream(spec.seed, TREE)
    extra_rng = stream(spec.seed, EXTRA)
    orient = stream(spec.seed, ORIENT)
    taken: set[tuple[int, int]] = set()
    edges: list[tuple[int, int]] = []
    for ids in blocks:
        tree = random_spanning_tree(ids, tree_rng)
        taken.update((min(u, v), max(u, v)) for u, v in tree)
        extra = _random_new_pairs(extra_rng, ids, ids, min(spec.extra_edges, n4 * (n4 - 1) // 2 - (n4 - 1)), taken)
        intra = tree + extra
        if spec.directed:
            flips = orient.random(len(intra)) < 0.5
            intra = [(v, u) if f else (u, v) for (u, v), f in zip(intra, flips)]
        edges.extend(intra)

    inter_rng = stream(spec.seed, INTER)
    per_pair = spec.total_vertices // 2 // 2
    for li, ri in spec.pairings():
        pairs = _random_new_pairs(inter_rng, blocks[li], blocks[ri], per_pair, taken)
        if spec.directed:
            half = len(pairs) // 2
            pairs = pairs[:half] + [(v, u) for u, v in pairs[half:]]
        edges.extend(pairs)

    return Graph(spec.total_vertices, tuple(edges), spec.directed), Layout(pos)


def generate_noise(spec: NoiseSpec) -> tuple[Graph, Layout]:
    """Uniform points in the unit square joined by a random perfect matching."""
    n = spec.total_vertices
    pos = stream(spec.seed, PLACEMENT).uniform(0.0, 1.0, size=(n, 2))
    perm = stream(spec.seed, INTER).permutation(n)
    edges = tuple((int(perm[2 * i]), int(perm[2 * i + 1])) for i in range(n // 2))
    return Graph(n, edges, False), Layout(pos)


def random_geometric_graph(n: int, m: int, seed: int = 0, directed: bool = False) -> tuple[Graph, Layout]:
    """``n`` uniform points in the unit square joined by their ``m`` closest pairs.

    Used as a desk-scale stand-in for real flow datasets of similar size.
    """
    from scipy.spatial import cKDTree

    pos = stream(seed, PLACEMENT).uniform(0.0, 1.0, size=(n, 2))
    tree = cKDTree(pos)
    r = np.sqrt(2.5 * m / (np.pi * n * n / 2))
    while True:
        pairs = tree.query_pairs(r, output_type="ndarray")
        if len(pairs) >= m:
            break
        r *= 1.3
    d = np.hypot(*(pos[pairs[:, 0]] - pos[pairs[:, 1]]).T)
    order = np.lexsort((pairs[:, 1], pairs[:, 0], d))[:m]
    chosen = pairs[np.sort(order)]
    if directed:
        flips = stream(seed, ORIENT).random(len(chosen)) < 0.5
        chosen[flips] = chosen[flips][:, ::-1]
    return Graph(n, tuple(map(tuple, chosen.tolist())), directed), Layout(pos)
