"""Rank-r matrices are minimal: build a chart, look at its frame, compute H."""

import numpy as np

from mmm.charts import RankChartSpec, rank_chart, rank_normal_frame, rank_tangent_frame
from mmm.curvature import analytic_gram_rank, mean_curvature

np.set_printoptions(precision=4, suppress=True)

# 2x3 matrices of rank 1 form a 4-dimensional submanifold
spec = RankChartSpec(m=2, n=3, r=1, sigma=(1.5,))
chart = rank_chart(spec)
print(chart.label, "has", chart.dim_params, "parameters:", chart.param_labels)
print("base point Sigma =\n", chart.base)

# tangent vectors at Sigma and the normal directions E_pq, p, q > r
for label, v in zip(rank_tangent_frame(spec).labels, rank_tangent_frame(spec).vectors):
    print(f"d/d{label} A(0) =\n{v}")
print("normal frame:", rank_normal_frame(spec).labels)

# a larger case with two singular values
spec = RankChartSpec(m=3, n=4, r=2, sigma=(2.0, 1.0))
chart = rank_chart(spec)
print("Gram matrix of", chart.label, "\n", analytic_gram_rank(spec).g)

closed = mean_curvature(chart, method="closed")
fd = mean_curvature(chart, method="fd")
print(f"|H| closed form  {closed.h_norm:.3e}")
print(f"|H| finite diff. {fd.h_norm:.3e}")

# move off the base point: the chart stays on the rank-2 stratum
u = np.random.default_rng(0).uniform(-chart.box, chart.box, chart.dim_params)
print("singular values at a nearby point:", np.linalg.svd(chart(u), compute_uv=False))
