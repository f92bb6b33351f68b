"""Classical scaling, configuration agreement and leave-one-variable-out
importance."""

from __future__ import annotations

import csv
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .data import DataError, MixedDataset
from .distance import DistanceConfig, DistanceMatrix, compute_variant, mean_pair_distance, mixed_distance
from .scaling import sym_eig

__all__ = [
    "Configuration",
    "ImportanceReport",
    "classical_mds",
    "euclidean_distances",
    "alienation",
    "configuration_alienation",
    "loo_distance_importance",
    "loo_mds_importance",
    "loo_importance",
]


@dataclass
class Configuration:
    """Low-dimensional coordinates recovered by classical scaling.

    ``eigenvalues`` is the full spectrum of the double-centered matrix in
    non-increasing order; ``negative_mass`` sums the magnitudes of its
    negative eigenvalues (zero for Euclidean input). ``padded`` is set when
    fewer than ``k`` positive eigenvalues exist and zero columns were added.
    """

    coords: np.ndarray
    eigenvalues: np.ndarray
    n_positive: int
    negative_mass: float
    padded: bool = False

    @property
    def k(self) -> int:
        return self.coords.shape[1]


def _values(D):
    if isinstance(D, DistanceMatrix):
        D = D.values
    return np.asarray(D, dtype=float)


def classical_mds(D, k: int = 2) -> Configuration:
    D = _values(D)
    n = D.shape[0]
    if D.ndim != 2 or D.shape[1] != n:
        raise ValueError("distance matrix must be square")
    if k < 1:
        raise ValueError("target dimension must be >= 1")
    scale = max(np.abs(D).max(), 1.0)
    if np.abs(D - D.T).max() > 1e-10 * scale:
        raise ValueError("distance matrix is not symmetric")
    A = -0.5 * D**2
    # double centering without forming J
    B = A - A.mean(axis=0) - A.mean(axis=1)[:, None] + A.mean()
    evals, V = sym_eig((B + B.T) / 2)
    tol = 1e-10 * max(abs(evals[0]), abs(evals[-1]), np.finfo(float).tiny)
    positive = evals > tol
    n_pos = int(positive.sum())
    use = min(k, n_pos)
    coords = np.zeros((n, k))
    coords[:, :use] = V[:, :use] * np.sqrt(evals[:use])
    coords -= coords.mean(axis=0)
    neg = evals[evals < -tol]
    return Configuration(coords, evals, n_pos, float(-neg.sum()), padded=use < k)


def euclidean_distances(Y) -> np.ndarray:
    Y = np.asarray(Y, dtype=float)
    if Y.ndim == 1:
        Y = Y[:, None]
    D2 = np.zeros((Y.shape[0], Y.shape[0]))
    for j in range(Y.shape[1]):
        D2 += (Y[:, j, None] - Y[None, :, j]) ** 2
    return np.sqrt(D2)


def alienation(A, B) -> float:
    """Alienation ``sqrt(1 - c^2)`` of two distance matrices, with ``c`` the
    congruence of their upper triangles.

    Computed as the sine of the angle between the two unit-normalized
    triangles, which stays accurate when they are nearly proportional.
    """
    A, B = _values(A), _values(B)
    if A.shape != B.shape:
        raise ValueError("distance matrices must have the same shape")
    iu = np.triu_indices(A.shape[0], k=1)
    a, b = A[iu], B[iu]
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na == 0 or nb == 0:
        raise ValueError("congruence undefined for an all-zero distance matrix")
    a, b = a / na, b / nb
    theta = 2.0 * math.atan2(np.linalg.norm(a - b), np.linalg.norm(a + b))
    return float(min(max(math.sin(theta), 0.0), 1.0))


def configuration_alienation(Y1, Y2) -> float:
    return alienation(euclidean_distances(Y1), euclidean_distances(Y2))


@dataclass
class ImportanceReport:
    variables: list
    absolute: np.ndarray
    metric: str
    variant: str | None = None
    extra: dict = field(default_factory=dict)

    @property
    def relative(self) -> np.ndarray:
        total = self.absolute.sum()
        if total == 0:
            return np.full_like(self.absolute, np.nan)
        return self.absolute / total

    def rows(self):
        return [
            {"variable": v, "absolute": float(a), "relative": float(r), "metric": self.metric}
            for v, a, r in zip(self.variables, self.absolute, self.relative)
        ]

    def to_csv(self, path, fmt="%.12g"):
        path = Path(path)
        with path.open("w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["variable", "absolute", "relative", "metric"])
            for r in self.rows():
                w.writerow([r["variable"], fmt % r["absolute"], fmt % r["relative"], r["metric"]])
        return path

    def to_json(self, path=None):
        doc = {"variant": self.variant, "metric": self.metric, "variables": self.rows()}
        text = json.dumps(doc, indent=2)
        if path is not None:
            Path(path).write_text(text + "\n", encoding="utf-8")
        return text


def _distance_fn(config, phi):
    if isinstance(config, DistanceConfig):
        return lambda ds: mixed_distance(ds, config, keep_contributions=False)
    return lambda ds: compute_variant(ds, config, phi=phi, keep_contributions=False)


def _loo_matrices(dataset, config, phi, threads):
    if len(dataset) < 2:
        raise DataError("leave-one-out needs at least two variables")
    fn = _distance_fn(config, phi)
    full = fn(dataset)
    names = dataset.names
    # every leave-one-out fit starts from the reduced dataset, so scalings,
    # rotations and association aggregates are re-fitted without variable j
    with ThreadPoolExecutor(max_workers=threads) as ex:
        reduced = list(ex.map(lambda name: fn(dataset.drop(name)), names))
    return full, names, reduced


def _variant_label(config):
    return config if isinstance(config, str) else None


def loo_importance(dataset: MixedDataset, config="unbiased_independent", k=2, phi=0.5, threads=1):
    """Both leave-one-out reports from one set of distance computations.

    ``config`` is a variant name or a :class:`DistanceConfig`. Returns
    ``(distance_report, mds_report)``.
    """
    full, names, reduced = _loo_matrices(dataset, config, phi, threads)
    abs_eff = np.array([mean_pair_distance(np.abs(full.values - r.values)) for r in reduced])
    Yfull = euclidean_distances(classical_mds(full, k).coords)
    with ThreadPoolExecutor(max_workers=threads) as ex:
        alien = list(
            ex.map(lambda r: alienation(Yfull, euclidean_distances(classical_mds(r, k).coords)), reduced)
        )
    label = _variant_label(config)
    return (
        ImportanceReport(names, abs_eff, "mean_abs_diff", label),
        ImportanceReport(names, np.array(alien), "alienation", label, {"k": k}),
    )


def loo_distance_importance(dataset: MixedDataset, config="unbiased_independent", phi=0.5, threads=1) -> ImportanceReport:
    """Mean absolute change of the pairwise distances when each variable is left out."""
    full, names, reduced = _loo_matrices(dataset, config, phi, threads)
    abs_eff = np.array([mean_pair_distance(np.abs(full.values - r.values)) for r in reduced])
    return ImportanceReport(names, abs_eff, "mean_abs_diff", _variant_label(config))


def loo_mds_importance(dataset: MixedDataset, config="unbiased_independent", k=2, phi=0.5, threads=1) -> ImportanceReport:
    """Alienation between the ``k``-dimensional classical scaling solution of the
    full distance and that of each leave-one-out distance."""
    return loo_importance(dataset, config, k, phi, threads)[1]
