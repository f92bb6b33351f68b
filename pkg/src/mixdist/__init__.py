"""Additive, commensurable distances for mixed numeric and categorical data."""

from .analysis import (
    Configuration,
    ImportanceReport,
    alienation,
    classical_mds,
    configuration_alienation,
    loo_distance_importance,
    loo_importance,
    loo_mds_importance,
)
from .data import (
    CategoricalColumn,
    DataError,
    MixedDataset,
    NumericColumn,
    discretize,
    indicator,
    load_csv,
    proportions,
)
from .distance import (
    VARIANTS,
    DistanceConfig,
    DistanceMatrix,
    commensurable_weights,
    compute_variant,
    gower_distance,
    hl_additive,
    hl_euclidean,
    mean_pair_distance,
    mixed_distance,
    naive_euclidean,
)

__version__ = "0.1.0"
