"""
Centered data ellipses
======================

Moving every group's ellipse to the origin removes location differences, so
what remains to compare is size and shape alone.  The pooled ellipse is
drawn last and shaded.
"""

import sys
from pathlib import Path

import numpy as np

from covhomog import builtin_dataset, summarize
from covhomog.geometry import centered_pairwise_ellipses, coverage_radius
from covhomog.render import render_ellipse_matrix

out = Path(sys.argv[1] if len(sys.argv) > 1 else "demo_output")
out.mkdir(exist_ok=True)

print(f"68% coverage radius: c = {coverage_radius(0.68):.4f}")

iris = builtin_dataset("iris")
cs = summarize(iris)
panels = centered_pairwise_ellipses(cs)

# sepal length vs width: setosa is the narrow, strongly tilted one
for e in panels[0].ellipses:
    S = e.shape
    r = S[0, 1] / np.sqrt(S[0, 0] * S[1, 1])
    print(f"{e.label:>10}  var(SL) = {S[0, 0]:.3f}  r = {r:+.3f}  area = {e.area:.3f}")

(out / "iris_ellipses.svg").write_text(render_ellipse_matrix(panels))

# for the skulls the group ellipses nearly coincide with the pooled one
skulls = summarize(builtin_dataset("skulls"))
(out / "skulls_ellipses.svg").write_text(render_ellipse_matrix(centered_pairwise_ellipses(skulls)))
