"""Assembly of mixed-type distance matrices.

Additive distances are sums of weighted per-variable contribution matrices:
``|f_j(x_i) - f_j(x_l)|`` for numeric variables and ``Z_j Delta_j Z_j^T``
for categorical ones. Weights either are fixed, or equalize the mean pair
distance of every variable (``weight_mode="empirical"``) or its expected
value under a declared distribution (``weight_mode="theoretical"``).

Two Euclidean benchmarks (``naive_euclidean``, ``hl_euclidean``) are also
provided; they are not additive and carry no contribution ledger.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Mapping

import numpy as np

from . import catdissim as cd
from . import expected
from .data import DataError, MixedDataset, appearance_order, indicator, proportions
from .scaling import SCALINGS, scale_block, sd_scale

__all__ = [
    "WEIGHT_MODES",
    "VARIANTS",
    "VARIANT_ALIASES",
    "DistanceConfig",
    "DistanceMatrix",
    "numeric_contrib",
    "categorical_contrib",
    "category_dissimilarity",
    "variable_contributions",
    "commensurable_weights",
    "mixed_distance",
    "gower_distance",
    "naive_euclidean",
    "hl_euclidean",
    "hl_additive",
    "mean_pair_distance",
    "preset_config",
    "compute_variant",
    "read_distance_csv",
]

WEIGHT_MODES = ("none", "empirical", "theoretical")

VARIANTS = (
    "numerical",
    "naive",
    "hennig_liao",
    "hennig_liao_additive",
    "gower",
    "unbiased_independent",
    "unbiased_standardized",
    "unbiased_dependent",
)
VARIANT_ALIASES = {
    "num": "numerical",
    "hl": "hennig_liao",
    "hla": "hennig_liao_additive",
    "g": "gower",
    "uind": "unbiased_independent",
    "ustd": "unbiased_standardized",
    "udep": "unbiased_dependent",
}


@dataclass(frozen=True)
class DistanceConfig:
    """How each variable enters an additive mixed distance.

    ``scaling`` and ``dissimilarity`` are either a single kind applied to every
    numeric/categorical variable, or a mapping from column name to kind
    (unlisted columns get the default ``"sd"``/``"matching"``).
    ``distributions`` names the assumed distribution (``"uniform"`` or
    ``"normal"``) of numeric variables for theoretical weights; key ``"*"``
    applies to all.
    """

    scaling: str | Mapping[str, str] = "sd"
    dissimilarity: str | Mapping[str, str] = "matching"
    weight_mode: str = "none"
    weights: Mapping[str, float] | None = None
    phi: float = 0.5
    kl_epsilon: float = cd.KL_EPSILON
    distributions: Mapping[str, str] | None = None

    def __post_init__(self):
        if self.weight_mode not in WEIGHT_MODES:
            raise ValueError(f"unknown weight mode {self.weight_mode!r}; choose from {WEIGHT_MODES}")
        if self.weights is not None and self.weight_mode != "none":
            raise ValueError("fixed weights and a weight mode are mutually exclusive")
        kinds = [self.scaling] if isinstance(self.scaling, str) else list(self.scaling.values())
        for k in kinds:
            if k not in SCALINGS:
                raise ValueError(f"unknown scaling {k!r}; choose from {SCALINGS}")
        kinds = (
            [self.dissimilarity]
            if isinstance(self.dissimilarity, str)
            else list(self.dissimilarity.values())
        )
        for k in kinds:
            if k not in cd.DISSIMILARITIES:
                raise ValueError(f"unknown dissimilarity {k!r}; choose from {cd.DISSIMILARITIES}")

    def scaling_for(self, name):
        if isinstance(self.scaling, str):
            return self.scaling
        return self.scaling.get(name, "sd")

    def dissimilarity_for(self, name):
        if isinstance(self.dissimilarity, str):
            return self.dissimilarity
        return self.dissimilarity.get(name, "matching")

    @property
    def dependent(self) -> bool:
        """True when a variable's term depends on other variables."""
        scal = [self.scaling] if isinstance(self.scaling, str) else self.scaling.values()
        dis = (
            [self.dissimilarity]
            if isinstance(self.dissimilarity, str)
            else self.dissimilarity.values()
        )
        return "pc" in scal or any(k in cd.ASSOCIATION for k in dis)


@dataclass
class DistanceMatrix:
    """Square distance matrix with an optional per-term ledger.

    ``contributions`` maps each term (a column name, or ``PC1``... for
    principal component scaling) to its unweighted pairwise matrix, and
    ``weights`` to the weight it received.
    """

    values: np.ndarray
    weights: dict = field(default_factory=dict)
    contributions: dict | None = None
    additive: bool = True
    variant: str | None = None
    info: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    def weighted(self, name) -> np.ndarray:
        return self.weights[name] * self.contributions[name]

    def summary(self) -> dict:
        """Per-term weight and mean pair distance (raw and weighted)."""
        out = {}
        if not self.contributions:
            return out
        for name, C in self.contributions.items():
            raw = mean_pair_distance(C)
            out[name] = {
                "weight": float(self.weights[name]),
                "mean_pair_distance": float(self.weights[name] * raw),
                "raw_mean_pair_distance": float(raw),
            }
        return out

    def to_csv(self, path, condensed=False, fmt="%.12g"):
        """Write as a square matrix (header row of indices) or, with
        ``condensed``, as the row-major upper triangle preceded by ``n``."""
        path = Path(path)
        n = self.n
        with path.open("w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            if condensed:
                w.writerow(["n", n])
                iu = np.triu_indices(n, k=1)
                for v in self.values[iu]:
                    w.writerow([fmt % v])
            else:
                w.writerow(range(n))
                for row in self.values:
                    w.writerow([fmt % v for v in row])
        return path


def read_distance_csv(path) -> np.ndarray:
    """Read a matrix written by :meth:`DistanceMatrix.to_csv`, either layout."""
    with Path(path).open(newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if rows and rows[0] and rows[0][0] == "n":
        n = int(rows[0][1])
        vals = np.array([float(r[0]) for r in rows[1:]])
        if vals.size != n * (n - 1) // 2:
            raise ValueError("condensed file has the wrong number of entries")
        D = np.zeros((n, n))
        D[np.triu_indices(n, k=1)] = vals
        return D + D.T
    return np.array([[float(v) for v in r] for r in rows[1:]])


def mean_pair_distance(D) -> float:
    """Mean over ordered pairs ``i != l``."""
    D = np.asarray(D, dtype=float)
    n = D.shape[0]
    if n < 2:
        raise ValueError("need at least two observations")
    return float((D.sum() - np.trace(D)) / (n * (n - 1)))


def numeric_contrib(f) -> np.ndarray:
    f = np.asarray(f, dtype=float)
    return np.abs(f[:, None] - f[None, :])


def categorical_contrib(Z, delta) -> np.ndarray:
    Z = np.asarray(Z, dtype=float)
    delta = np.asarray(delta, dtype=float)
    if Z.shape[1] != delta.shape[0]:
        raise ValueError("indicator columns and dissimilarity order differ")
    return Z @ delta @ Z.T


def category_dissimilarity(dataset: MixedDataset, name, kind, phi=0.5, epsilon=cd.KL_EPSILON):
    """Build the dissimilarity matrix of kind ``kind`` for categorical column ``name``."""
    col = dataset[name]
    q = col.q
    n = len(col)
    if kind == "matching":
        return cd.matching(q)
    if kind == "eskin":
        return cd.eskin(q)
    if kind == "indicator_plain":
        return cd.indicator_plain(q)
    if kind == "indicator_hl":
        return cd.indicator_hl(q, cd.hl_factor(col.counts(), phi))
    if kind == "kl_assoc":
        return cd.aggregate_assoc(dataset, name, "kl", epsilon)
    if kind == "tvd_assoc":
        return cd.aggregate_assoc(dataset, name, "tvd", epsilon)
    p = proportions(col)
    if kind == "of":
        return cd.of_dissim(p)
    if kind == "iof":
        return cd.iof_dissim(p, n)
    if kind == "indicator_sd":
        return cd.indicator_sd(p)
    if kind == "indicator_cds":
        return cd.indicator_cds(p)
    raise ValueError(f"unknown dissimilarity {kind!r}")


def variable_contributions(dataset: MixedDataset, config: DistanceConfig):
    """Unweighted contribution matrix of every term, in column order.

    Returns ``(contributions, terms)`` where ``terms[name]`` records the term
    type and what is needed for theoretical weights.
    """
    contribs: dict[str, np.ndarray] = {}
    terms: dict[str, dict] = {}
    num = dataset.numeric
    if num:
        kinds = [config.scaling_for(c.name) for c in num]
        block = scale_block(dataset.numeric_matrix(), kinds, [c.name for c in num])
        for j, name in enumerate(block.names):
            contribs[name] = numeric_contrib(block.matrix[:, j])
            terms[name] = {"type": "numeric", "kind": "pc" if block.kind == "pc" else kinds[j]}
    for col in dataset.categorical:
        kind = config.dissimilarity_for(col.name)
        delta = category_dissimilarity(dataset, col.name, kind, config.phi, config.kl_epsilon)
        contribs[col.name] = categorical_contrib(indicator(col), delta)
        terms[col.name] = {
            "type": "categorical",
            "kind": kind,
            "delta": delta,
            "p": proportions(col, strict=False),
        }
    # dataset column order; principal components follow at the end
    order = [c.name for c in dataset.columns if c.name in contribs]
    order += [k for k in contribs if k not in order]
    return {k: contribs[k] for k in order}, {k: terms[k] for k in order}


def _theoretical_numeric_mean(name, kind, distributions):
    dist = None
    if distributions:
        dist = distributions.get(name, distributions.get("*"))
    if dist is None:
        raise ValueError(
            f"theoretical weights need a declared distribution for numeric term {name!r}"
        )
    if kind == "pc":
        kind = "sd"
    if dist == "uniform":
        return expected.uniform_mean(kind)
    if dist == "normal":
        return expected.normal_mean(kind)
    raise ValueError(f"unknown distribution {dist!r} for {name!r}")


def commensurable_weights(dataset: MixedDataset, config: DistanceConfig, contributions=None, terms=None):
    """Per-term weights according to ``config``.

    ``empirical``: one over the observed mean pair distance of the term.
    ``theoretical``: one over ``p' Delta p`` for categorical terms and over the
    closed-form expected distance for numeric ones.
    """
    if contributions is None or terms is None:
        contributions, terms = variable_contributions(dataset, config)
    mode = config.weight_mode
    weights = {}
    for name, C in contributions.items():
        if mode == "none":
            w = 1.0
            if config.weights is not None:
                w = float(config.weights.get(name, 1.0))
        else:
            t = terms[name]
            if mode == "empirical":
                m = mean_pair_distance(C)
            elif t["type"] == "categorical":
                m = expected.cat_expected(t["p"], t["delta"])
            else:
                m = _theoretical_numeric_mean(name, t["kind"], config.distributions)
            if not m > 0:
                raise DataError(f"term {name!r} has zero mean distance; cannot weight it")
            w = 1.0 / m
        weights[name] = w
    if config.weights is not None:
        unknown = set(config.weights) - set(contributions)
        if unknown:
            raise ValueError(f"fixed weights given for unknown terms {sorted(unknown)}")
    return weights


def mixed_distance(dataset: MixedDataset, config: DistanceConfig | None = None, keep_contributions=True, variant=None) -> DistanceMatrix:
    config = config or DistanceConfig()
    contribs, terms = variable_contributions(dataset, config)
    weights = commensurable_weights(dataset, config, contribs, terms)
    n = dataset.n_rows
    D = np.zeros((n, n))
    for name, C in contribs.items():
        D += weights[name] * C
    return DistanceMatrix(
        D,
        weights,
        contribs if keep_contributions else None,
        True,
        variant,
        {"config": config, "terms": {k: t["kind"] for k, t in terms.items()}},
    )


def gower_distance(dataset: MixedDataset, keep_contributions=True) -> DistanceMatrix:
    """Range-scaled numeric and simple matching categorical terms, unit
    weights, not divided by the number of variables."""
    cfg = DistanceConfig(scaling="range", dissimilarity="matching")
    return mixed_distance(dataset, cfg, keep_contributions, variant="gower")


def hl_additive(dataset: MixedDataset, phi=0.5, keep_contributions=True) -> DistanceMatrix:
    cfg = DistanceConfig(scaling="sd", dissimilarity="indicator_hl", phi=phi)
    return mixed_distance(dataset, cfg, keep_contributions, variant="hennig_liao_additive")


def _euclidean(X):
    D2 = np.zeros((X.shape[0], X.shape[0]))
    for j in range(X.shape[1]):
        D2 += (X[:, j, None] - X[None, :, j]) ** 2
    return np.sqrt(D2)


def _one_hot_observed(col):
    # first-appearance column order makes the Euclidean sum label invariant
    Z = indicator(col)[:, appearance_order(col)]
    return Z[:, Z.sum(axis=0) > 0]


def naive_euclidean(dataset: MixedDataset) -> DistanceMatrix:
    """Euclidean distance on the fully standardized matrix: numeric columns and
    one-hot indicator columns are all z-scored."""
    blocks = []
    for col in dataset.columns:
        if col.kind == "numeric":
            blocks.append(col.values[:, None])
        else:
            blocks.append(_one_hot_observed(col))
    X = np.hstack(blocks)
    Xs = np.column_stack([sd_scale(X[:, j])[0] for j in range(X.shape[1])])
    return DistanceMatrix(_euclidean(Xs), additive=False, variant="naive")


def hl_euclidean(dataset: MixedDataset, phi=0.5) -> DistanceMatrix:
    """Euclidean distance with z-scored numeric columns and indicator blocks
    multiplied by their Hennig-Liao factor."""
    blocks = []
    etas = {}
    for col in dataset.columns:
        if col.kind == "numeric":
            blocks.append(sd_scale(col.values)[0][:, None])
        else:
            etas[col.name] = cd.hl_factor(col.counts(), phi)
            blocks.append(etas[col.name] * indicator(col))
    X = np.hstack(blocks)
    return DistanceMatrix(_euclidean(X), additive=False, variant="hennig_liao", info={"eta": etas})


def _resolve_variant(name):
    key = name.lower().replace("-", "_")
    key = VARIANT_ALIASES.get(key, key)
    if key not in VARIANTS:
        raise ValueError(f"unknown variant {name!r}; choose from {', '.join(VARIANTS)}")
    return key


def preset_config(variant, phi=0.5) -> DistanceConfig | None:
    """Additive configuration behind a named variant (``None`` for the
    Euclidean benchmarks)."""
    variant = _resolve_variant(variant)
    return {
        "numerical": DistanceConfig("sd", "matching", "empirical"),
        "hennig_liao_additive": DistanceConfig("sd", "indicator_hl", phi=phi),
        "gower": DistanceConfig("range", "matching"),
        "unbiased_independent": DistanceConfig("sd", "matching", "empirical"),
        "unbiased_standardized": DistanceConfig("sd", "indicator_cds", "empirical"),
        "unbiased_dependent": DistanceConfig("pc", "tvd_assoc", "empirical"),
    }.get(variant)


def compute_variant(dataset: MixedDataset, variant, phi=0.5, weight_mode=None, keep_contributions=True) -> DistanceMatrix:
    """Distance matrix for one of the named variants in :data:`VARIANTS`.

    ``weight_mode`` overrides the preset's weighting (additive variants only).
    """
    variant = _resolve_variant(variant)
    if variant == "numerical" and dataset.categorical:
        raise DataError("the numerical variant needs an all-numeric dataset")
    cfg = preset_config(variant, phi)
    if cfg is None:
        if weight_mode is not None:
            raise ValueError(f"variant {variant!r} is not additive; weights cannot be overridden")
        if variant == "naive":
            return naive_euclidean(dataset)
        return hl_euclidean(dataset, phi)
    if weight_mode is not None:
        cfg = replace(cfg, weight_mode=weight_mode)
    return mixed_distance(dataset, cfg, keep_contributions, variant=variant)
