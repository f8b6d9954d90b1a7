"""
Bundling the Cubes graph
========================

Four squares of 25 vertices, each wired by a random spanning tree, joined
left to right in two separate pairs. A bundler should pull each pair's 25
crossing edges together and never mix the two pairs.

Run from the repository root; pictures land in ``demo_out/``.
"""

from pathlib import Path

import numpy as np

from edgepath import (
    CubesSpec,
    RenderStyle,
    connected_components,
    edge_path_bundle,
    evaluate,
    generate_cubes,
    render_svg,
    straight_drawing,
)
from edgepath.raster import fit_view

out = Path("demo_out")
out.mkdir(exist_ok=True)

# 2R joins the two top squares and the two bottom squares
g, layout = generate_cubes(CubesSpec("2R", seed=0))
print(g.vertex_count, "vertices,", g.edge_count, "edges")

straight = straight_drawing(g, layout)
bundled = edge_path_bundle(g, layout)
print(bundled.bundled_count, "edges rerouted along paths")

# every rerouted edge stays in its own component
comp = connected_components(g)
for path in bundled.paths:
    if path is not None:
        assert len({comp[v] for v in path}) == 1

# The metrics share one pixel grid so the two drawings compare fairly
report = evaluate(bundled, straight, g)
print(f"ink ratio       {report.ink_ratio:.2f}")
print(f"distortion      {report.distortion_mean:.2f} mean, {report.distortion_median:.2f} median")
print("ambiguity       " + "  ".join(f"{d}:{a:.2f}" for d, a in report.amb.items()))

view = fit_view(straight, bundled)
style = RenderStyle(mode="angle-colormap")
(out / "cubes_straight.svg").write_text(render_svg(straight, style, transform=view))
(out / "cubes_bundled.svg").write_text(render_svg(bundled, style, transform=view))

# which edges did the work? the long, heavy ones are processed first
lengths = np.array([np.hypot(*np.subtract(*layout.positions[list(e)])) for e in g.edges])
print("mean length, bundled edges:", lengths[bundled.bundled].mean().round(3))
print("mean length, the rest:     ", lengths[~bundled.bundled].mean().round(3))
