"""A cone is minimal exactly when its slice of the unit sphere is.

The rank-one symmetric 2x2 matrices form a cone whose slice is a small
circle; it is the standard example of a determinantal variety that is not
minimal.
"""

import numpy as np

from mmm.charts import (
    RankChartSpec,
    great_circle_chart,
    latitude_circle_chart,
    rank1_sym_circle_chart,
    rank_chart,
    sphere_graph_chart,
    sphere_slice_chart,
)
from mmm.curvature import cone_chart, cone_sphere_check, mean_curvature

print("S^2 in R^3: |H| =", mean_curvature(sphere_graph_chart(), method="fd").h_norm)

rank = rank_chart(RankChartSpec(2, 3, 1, (1.0,)))
charts = {
    "great circle": great_circle_chart(),
    "latitude 45 deg": latitude_circle_chart(np.pi / 4),
    "rank-1 sym 2x2": rank1_sym_circle_chart(0.3),
    "unit M_2,3,1": sphere_slice_chart(rank, rank.dim_params - 1),
}
for name, ch in charts.items():
    hc, hs, diff = cone_sphere_check(ch)
    print(f"{name:<16} |H_cone| {hc:.6f}  |H_sphere| {hs:.6f}  diff {diff:.1e}")

# the counterexample at a few unit-norm points
for theta in np.linspace(0, np.pi, 4):
    res = mean_curvature(cone_chart(rank1_sym_circle_chart(theta)), method="fd")
    print(f"theta = {theta:.3f}: |H| = {res.h_norm:.6f}")
