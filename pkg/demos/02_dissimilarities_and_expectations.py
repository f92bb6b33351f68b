"""Category dissimilarity matrices and their expected values under equal probabilities."""

import numpy as np

from mixdist import catdissim as cd
from mixdist.expected import NoClosedForm, eta_limits, normal_mean, skew_profile, table3, uniform_mean

p = np.array([0.5, 0.3, 0.2])
print("matching:\n", cd.matching(3))
print("occurrence frequency:\n", cd.of_dissim(p).round(3))
print("inverse occurrence frequency (n=100):\n", cd.iof_dissim(p, 100).round(3))

print("\nexpected pair distance, q = 5, n = 160")
for row in table3(5):
    print(f"  {row['dissimilarity']:<16} {row['expected']:8.4f}")

print("\nHennig-Liao factor limits for q = 3:", eta_limits(3))
for kind in ("sd", "range", "robust_range"):
    try:
        normal = f"{normal_mean(kind):.6f}"
    except NoClosedForm:
        normal = "no closed form"
    print(f"numeric {kind:<12} uniform {uniform_mean(kind):.6f}  normal {normal}")

print("\nOF expectation as category 1 grows dominant (q=3):")
print(np.round(skew_profile(3, "of"), 4))
