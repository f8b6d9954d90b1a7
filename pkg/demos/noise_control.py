"""
A graph with nothing to bundle
==============================

A perfect matching on random points has no paths between its edges'
endpoints other than the edges themselves, so Edge-Path bundling must
leave it untouched. This is the negative control.
"""

from edgepath import NoiseSpec, edge_path_bundle, evaluate, generate_noise, straight_drawing

g, layout = generate_noise(NoiseSpec(1000, seed=0))
bundled = edge_path_bundle(g, layout)
report = evaluate(bundled, straight_drawing(g, layout), g)

print("bundled edges:", bundled.bundled_count)
print("ink ratio:    ", report.ink_ratio)
print("distortion:   ", report.distortion_mean, report.distortion_median)

# every edge is its own component, so no hop distance is ever finite
# beyond one and the ambiguity score does not depend on delta
print("ambiguity:    ", sorted(set(report.amb.values())))
