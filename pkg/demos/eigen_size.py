"""
Eigenvalue summaries of size
============================

The determinant is only one way to measure the size of a covariance matrix.
The trace, the harmonic-mean precision and the largest root weigh the
eigenvalues differently; the scree profiles show where groups diverge.
"""

import sys
from pathlib import Path

from covhomog import builtin_dataset, summarize
from covhomog.covstats import eig_stats, eig_stats_to_text, scree_data
from covhomog.render import render_eigstats_grid, render_scree

out = Path(sys.argv[1] if len(sys.argv) > 1 else "demo_output")
out.mkdir(exist_ok=True)

wine = builtin_dataset("wine")
cs = summarize(wine)

stats = eig_stats(cs)
print(eig_stats_to_text(stats))

pooled = stats[-1].log_product
closest = min(stats[:-1], key=lambda s: abs(s.log_product - pooled))
print(f"closest to pooled in log product: {closest.label}")

(out / "wine_eigstats.svg").write_text(render_eigstats_grid(stats))

# 13 dimensions: two panels keep the small eigenvalues readable
series = scree_data(cs)
(out / "wine_scree.svg").write_text(render_scree(series, panel_split=6))
