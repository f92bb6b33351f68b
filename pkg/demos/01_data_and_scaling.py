"""Build a mixed dataset, scale its numeric block four ways, discretize a column."""

import numpy as np

from mixdist.data import CategoricalColumn, MixedDataset, NumericColumn, discretize, proportions
from mixdist.scaling import pc_scale, scale_block

rng = np.random.default_rng(0)
n = 200
height = rng.normal(170, 10, n)
weight = 0.9 * height + rng.normal(0, 8, n)
colour = rng.integers(0, 3, n)

ds = MixedDataset([
    NumericColumn("height", height),
    NumericColumn("weight", weight),
    CategoricalColumn("colour", colour, ("red", "green", "blue")),
])
print(ds.names, "rows:", ds.n_rows)
print("colour proportions:", proportions(ds["colour"]).round(3))

X = np.column_stack([height, weight])
for kind in ("sd", "range", "robust_range"):
    block = scale_block(X, kind, names=("height", "weight"))
    print(f"{kind:>12}: column sd after scaling = {block.matrix.std(axis=0).round(3)}")

pc = pc_scale(X, names=("height", "weight"))
print("pc scaling, covariance of scores:\n", np.cov(pc.matrix.T, bias=True).round(6))

binned = discretize(ds["height"], 4)
print("height in 4 equal-width bins:", binned.levels, np.bincount(binned.codes))
