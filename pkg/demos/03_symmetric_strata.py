"""Symmetric matrices with prescribed eigenvalue multiplicities."""

import numpy as np

from mmm.charts import SymChartSpec, manifold_dim, sym_chart
from mmm.curvature import mean_curvature
from mmm.strata import MultiplicityPattern, detect_pattern, patterns, sample_stratum, stabilizer, stabilizer_check

# kappa = (1, 1): one simple and one double eigenvalue, n = 3
pat = MultiplicityPattern.parse("1,1")
print("pattern", pat, "n =", pat.n, "stabilizer dim", stabilizer(pat).dim)

for a in sample_stratum(pat, rng_seed=3, count=3):
    print(np.round(np.linalg.eigvalsh(a.entries), 6), detect_pattern(a),
          "stabilizer ok:", stabilizer_check(a, pat).ok)

# every stratum for n <= 4 is minimal
for n in range(1, 5):
    for p in patterns(n):
        lam = np.linspace(2, -2, p.num_distinct)
        ch = sym_chart(SymChartSpec(p, tuple(lam)))
        h = mean_curvature(ch, method="fd").h_norm
        print(f"n={n} kappa={str(p):<12} dim {manifold_dim('sym', pattern=p):>2}  |H| = {h:.1e}")
