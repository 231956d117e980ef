"""Skew-symmetric matrices of fixed rank 2r."""

import numpy as np

from mmm.charts import SkewChartSpec, skew_chart, skew_normal_frame
from mmm.curvature import analytic_gram_inverse_skew, analytic_gram_skew, mean_curvature
from mmm.linalg import random_orthogonal, skew_normal_form

np.set_printoptions(precision=4, suppress=True)

spec = SkewChartSpec(n=5, r=2, omega=(2.0, 1.0))
chart = skew_chart(spec)
print(chart.label, "dimension", chart.dim_params)
print("Omega =\n", chart.base)
print("normal directions:", skew_normal_frame(spec).labels)

# the (1,2)-group block of the metric and of its inverse
print(analytic_gram_skew(spec).g[:4, :4])
print(18 * analytic_gram_inverse_skew(spec).g[:4, :4], "/ 18")

print(f"|H| closed {mean_curvature(chart, method='closed').h_norm:.2e}, "
      f"fd {mean_curvature(chart, method='fd').h_norm:.2e}")

# any skew matrix of rank 4 is conjugate to such an Omega
rng = np.random.default_rng(1)
v = random_orthogonal(5, rng)
a = v.T @ chart.base @ v
nf = skew_normal_form(a)
print("recovered omega:", nf.omega, "rank", nf.rank2r)
