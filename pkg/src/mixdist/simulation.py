"""Simulation studies on data with a planted two-dimensional structure.

A configuration ``Y`` (n x 2, orthogonal columns) is expanded to ``p``
observed variables through random loadings, perturbed with Gaussian noise,
and some columns are discretized into equal-width categories.
"""

from __future__ import annotations

import csv
from collections import defaultdict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ._rng import rng_for
from .analysis import alienation, classical_mds, euclidean_distances, loo_importance
from .data import MixedDataset, NumericColumn, discretize
from .distance import VARIANTS, compute_variant

__all__ = [
    "SimInstance",
    "generate_instance",
    "simulated_datasets",
    "run_variable_effects",
    "run_retrieval",
    "summarize",
    "write_tidy_csv",
    "TIDY_COLUMNS",
]

TIDY_COLUMNS = ("replication", "variant", "q", "variable", "metric", "value")
MAX_ATTEMPTS = 100


@dataclass(frozen=True)
class SimInstance:
    truth: np.ndarray
    loadings: np.ndarray
    noiseless: np.ndarray
    observed: np.ndarray
    seed: int
    key: tuple = ()


def generate_instance(n=500, p=6, seed=0, sigma=0.03, key=(), basis="orthonormal") -> SimInstance:
    """Draw one instance. The same ``(seed, key)`` always gives the same data.

    The configuration is the QR-orthogonalized ``n x 2`` uniform draw on
    ``[-2, 2]``. With ``basis="orthonormal"`` its columns have unit length, so
    at ``n = 500`` the observed columns have a standard deviation of roughly
    0.07 and ``sigma = 0.03`` noise is substantial; ``basis="draw"`` rescales
    each column to the length of the original draw, making the noise minor.
    """
    if not n > p >= 2:
        raise ValueError("need n > p >= 2")
    if basis not in ("orthonormal", "draw"):
        raise ValueError(f"unknown basis {basis!r}")
    rng = rng_for(seed, *key)
    raw = rng.uniform(-2.0, 2.0, (n, 2))
    Q, R = np.linalg.qr(raw)
    Y = Q * np.sign(np.diag(R))
    if basis == "draw":
        Y = Y * np.linalg.norm(raw, axis=0)
    N = rng.uniform(-2.0, 2.0, (2, p))
    X0 = Y @ N
    X = X0 + rng.normal(0.0, sigma, X0.shape)
    return SimInstance(Y, N, X0, X, int(seed), tuple(key))


def _names(cats, p):
    names, seen = [], defaultdict(int)
    for q in cats:
        seen[q] += 1
        names.append(f"cat{q}" if cats.count(q) == 1 else f"cat{q}_{seen[q]}")
    names += [f"num{k + 1}" for k in range(p - len(cats))]
    return names


def simulated_datasets(inst: SimInstance, cats):
    """``(mixed, numeric)`` datasets: the first ``len(cats)`` columns discretized
    into ``cats[k]`` categories, and the same columns left numeric.

    Returns ``None`` for the mixed dataset when a bin is empty.
    """
    cats = list(cats)
    p = inst.observed.shape[1]
    if len(cats) > p:
        raise ValueError("more categorical columns than variables")
    names = _names(cats, p)
    numeric_cols = [NumericColumn(nm, inst.observed[:, k]) for k, nm in enumerate(names)]
    mixed_cols = []
    for k, col in enumerate(numeric_cols):
        if k < len(cats):
            c = discretize(col, cats[k])
            if np.any(c.counts() == 0):
                return None, MixedDataset(numeric_cols)
            mixed_cols.append(c)
        else:
            mixed_cols.append(col)
    return MixedDataset(mixed_cols), MixedDataset(numeric_cols)


def _draw(n, p, seed, sigma, cats, key, basis):
    # redraw on empty bins; attempt index is part of the stream key
    for attempt in range(MAX_ATTEMPTS):
        inst = generate_instance(n, p, seed, sigma, key=(*key, attempt), basis=basis)
        mixed, numeric = simulated_datasets(inst, cats)
        if mixed is not None:
            return inst, mixed, numeric
    raise RuntimeError("could not draw an instance with every category observed")


def _dataset_for(variant, mixed, numeric):
    return numeric if variant == "numerical" else mixed


def _map(fn, items, threads):
    if threads == 1:
        return [fn(i) for i in items]
    with ThreadPoolExecutor(max_workers=threads) as ex:
        return list(ex.map(fn, items))


def run_variable_effects(reps=100, n=500, p=6, cats=(2, 3, 5, 9), seed=0, variants=VARIANTS, k=2, sigma=0.03, phi=0.5, threads=None, basis="orthonormal"):
    """Leave-one-variable-out effects on distances and on the ``k``-dimensional
    classical scaling solution, for every variant and replication.

    Returns tidy rows (see :data:`TIDY_COLUMNS`) with metrics
    ``abs_distance``, ``rel_distance``, ``alienation`` and ``rel_alienation``.
    """

    def one(rep):
        _, mixed, numeric = _draw(n, p, seed, sigma, list(cats), (0, rep), basis)
        rows = []
        for variant in variants:
            ds = _dataset_for(variant, mixed, numeric)
            dist, mds = loo_importance(ds, variant, k=k, phi=phi, threads=1)
            for rep_obj, metric in ((dist, "distance"), (mds, "alienation")):
                absname = "abs_distance" if metric == "distance" else "alienation"
                relname = "rel_distance" if metric == "distance" else "rel_alienation"
                for var, a, r in zip(rep_obj.variables, rep_obj.absolute, rep_obj.relative):
                    rows.append((rep, variant, "", var, absname, float(a)))
                    rows.append((rep, variant, "", var, relname, float(r)))
        return rows

    out = []
    for rows in _map(one, range(reps), threads):
        out.extend(dict(zip(TIDY_COLUMNS, r)) for r in rows)
    return out


def run_retrieval(reps=100, n=500, p=6, qs=(2, 3, 5, 9), n_cat=3, seed=0, variants=VARIANTS, k=2, sigma=0.03, phi=0.5, threads=None, basis="orthonormal"):
    """Alienation between the ``k``-dimensional classical scaling solution of
    each variant and the planted configuration.

    For every ``q`` in ``qs`` the first ``n_cat`` variables are discretized
    into ``q`` categories. Returns tidy rows with metric ``alienation``.
    """
    jobs = [(qi, rep) for qi in range(len(qs)) for rep in range(reps)]

    def one(job):
        qi, rep = job
        q = qs[qi]
        inst, mixed, numeric = _draw(n, p, seed, sigma, [q] * n_cat, (1, qi, rep), basis)
        truth = euclidean_distances(inst.truth)
        rows = []
        for variant in variants:
            ds = _dataset_for(variant, mixed, numeric)
            D = compute_variant(ds, variant, phi=phi, keep_contributions=False)
            Y = classical_mds(D, k).coords
            rows.append((rep, variant, q, "", "alienation", alienation(euclidean_distances(Y), truth)))
        return rows

    out = []
    for rows in _map(one, jobs, threads):
        out.extend(dict(zip(TIDY_COLUMNS, r)) for r in rows)
    return out


def summarize(rows, by=("variant", "q", "variable", "metric")):
    """Mean, standard deviation and quartiles of ``value`` per group, in first
    appearance order."""
    groups: dict = {}
    for r in rows:
        groups.setdefault(tuple(r[b] for b in by), []).append(r["value"])
    out = []
    for key, vals in groups.items():
        v = np.asarray(vals, dtype=float)
        q1, med, q3 = np.quantile(v, [0.25, 0.5, 0.75])
        out.append(
            dict(zip(by, key))
            | {
                "count": int(v.size),
                "mean": float(v.mean()),
                "sd": float(v.std()),
                "q1": float(q1),
                "median": float(med),
                "q3": float(q3),
                "iqr": float(q3 - q1),
            }
        )
    return out


def write_tidy_csv(rows, path, columns=TIDY_COLUMNS, fmt="%.12g"):
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(columns)
        for r in rows:
            w.writerow([fmt % r[c] if isinstance(r[c], float) else r[c] for c in columns])
    return path
