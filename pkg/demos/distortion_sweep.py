"""
Trading distortion for bundling strength
========================================

The budget ``k`` caps how much longer a detour may be than the edge it
replaces. Raising it lets more edges find a path, which saves ink and costs
distortion. We sweep it on a random geometric graph.
"""

import time

from edgepath import BundlingParams, edge_path_bundle, evaluate, random_geometric_graph, straight_drawing
from edgepath.metrics import AmbiguityConfig

g, layout = random_geometric_graph(600, 2200, seed=3)
straight = straight_drawing(g, layout)

print("   k  bundled   ink  dist   amb1  seconds")
for k in (1.1, 1.5, 2.0, 3.0, 5.0):
    t0 = time.perf_counter()
    d = edge_path_bundle(g, layout, BundlingParams(max_distortion_k=k))
    took = time.perf_counter() - t0
    r = evaluate(d, straight, g, AmbiguityConfig(delta_range=(1,)))
    print(f"{k:4.1f}  {d.bundled_count:7d}  {r.ink_ratio:.2f}  {r.distortion_mean:.2f}  {r.amb[1]:.2f}   {took:.2f}")

# the exponent d decides which edges are handled first; at d = 0 every edge
# weighs the same and ties fall back to edge order
for d_exp in (0.0, 1.0, 2.0, 4.0):
    d = edge_path_bundle(g, layout, BundlingParams(edge_weight_exponent_d=d_exp))
    print(f"d={d_exp}: {d.bundled_count} bundled")
