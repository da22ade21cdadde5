"""
Principal-component views
=========================

The first two components carry nearly all the variance of the iris data,
but the small last components are where covariance differences between
groups can hide.
"""

import sys
from pathlib import Path

import numpy as np

from covhomog import builtin_dataset
from covhomog.geometry import group_cov_in_component_space, pairwise_ellipses, pca
from covhomog.render import render_ellipse_matrix

out = Path(sys.argv[1] if len(sys.argv) > 1 else "demo_output")
out.mkdir(exist_ok=True)

iris = builtin_dataset("iris")
proj = pca(iris)
print("variance proportions:", np.round(proj.variance_proportions, 4))
print("cumulative:          ", np.round(np.cumsum(proj.variance_proportions), 4))

for comps in [(0, 1), (2, 3)]:
    cs = group_cov_in_component_space(iris, proj, comps)
    label = "-".join(cs.variable_names)
    for gr in cs.groups:
        S = gr.cov
        print(f"{label} {gr.name:>10}  r = {S[0, 1] / np.sqrt(S[0, 0] * S[1, 1]):+.3f}")
    panels = pairwise_ellipses(cs, centered=False)
    (out / f"iris_{label}.svg").write_text(render_ellipse_matrix(panels))
