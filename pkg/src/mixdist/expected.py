"""Expected per-variable distances: closed forms and Monte-Carlo tables.

Numeric closed forms give the mean absolute difference of two independent
draws after scaling with the population parameters. The categorical
expectation of a dissimilarity matrix under category probabilities ``p`` is
``p' Delta p``.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np
from scipy.stats import norm

from . import catdissim as cd
from ._rng import rng_for
from .scaling import range_scale, robust_range_scale, sd_scale

__all__ = [
    "NoClosedForm",
    "NORMAL_Q75",
    "SKEW_GRID",
    "TABLE1_DISTRIBUTIONS",
    "uniform_mean",
    "normal_mean",
    "cat_expected",
    "eta_limits",
    "table3",
    "skew_profile",
    "mean_abs_difference",
    "sample_distribution",
    "scaled_mean_distances",
    "table1",
]

NORMAL_Q75 = float(norm.ppf(0.75))
SKEW_GRID = (0.05, 0.1, 0.2, 0.33, 0.5, 0.66, 0.8, 0.9, 0.95)
TABLE1_DISTRIBUTIONS = ("normal", "uniform", "skewed", "bimodal")


class NoClosedForm(ValueError):
    """The requested expectation has no sample-size free closed form."""


def uniform_mean(kind: str) -> float:
    if kind == "sd":
        return math.sqrt(12.0) / 3.0
    if kind == "range":
        return 1.0 / 3.0
    if kind == "robust_range":
        return 2.0 / 3.0
    raise ValueError(f"unknown scaling {kind!r}")


def normal_mean(kind: str) -> float:
    if kind == "sd":
        return 2.0 / math.sqrt(math.pi)
    if kind == "robust_range":
        # difference of two draws is N(0, 2 / IQR^2), IQR = 2 * q75
        return math.sqrt(1.0 / math.pi) / NORMAL_Q75
    if kind == "range":
        raise NoClosedForm(
            "range scaling of normal data depends on the sample extremes; "
            "use Monte-Carlo (table1) instead"
        )
    raise ValueError(f"unknown scaling {kind!r}")


def cat_expected(p, delta) -> float:
    p = np.asarray(p, dtype=float)
    delta = np.asarray(delta, dtype=float)
    return float(p @ delta @ p)


def eta_limits(q: int, phi: float = 0.5):
    """Hennig-Liao factor for balanced categories as ``n -> inf`` and at ``n = q``."""
    if q < 2:
        raise ValueError("need q >= 2")
    return math.sqrt(phi * (q / (q - 1))), math.sqrt(phi * ((q + 1) / (q - 1)))


def _perfect_dependence(q):
    # two variables with identical codes: every conditional row is a unit vector
    return np.eye(q)


def _uniform_deltas(q, n, phi, epsilon):
    p = np.full(q, 1.0 / q)
    eta_inf = eta_limits(q, phi)[0]
    R = _perfect_dependence(q)
    return p, {
        "matching": cd.matching(q),
        "eskin": cd.eskin(q),
        "of": cd.of_dissim(p),
        "iof": cd.iof_dissim(p, n),
        "indicator_plain": cd.indicator_plain(q),
        "indicator_hl": cd.indicator_hl(q, eta_inf),
        "indicator_sd": cd.indicator_sd(p),
        "indicator_cds": cd.indicator_cds(p),
        "tvd_assoc": cd.tvd_dissim(R),
        "kl_assoc": cd.kl_dissim(R, epsilon),
    }


def table3(q: int, n: int = 160, phi: float = 0.5, epsilon: float = cd.KL_EPSILON):
    """Expected distance of every dissimilarity under equal category probabilities.

    The Hennig-Liao row uses the large-sample factor; association-based rows
    use two perfectly dependent variables with ``q`` categories each. Returns a
    list of ``{"dissimilarity", "offdiag", "expected"}`` rows (``offdiag`` is
    the constant off-diagonal entry).
    """
    p, deltas = _uniform_deltas(q, n, phi, epsilon)
    return [
        {"dissimilarity": k, "offdiag": float(d[0, 1]), "expected": cat_expected(p, d)}
        for k, d in deltas.items()
    ]


def _skewed_p(q, p1):
    return np.array([p1] + [(1.0 - p1) / (q - 1)] * (q - 1))


def skew_profile(q: int, kind: str, p1_grid=SKEW_GRID, n: int = 160, phi: float = 0.5, epsilon: float = cd.KL_EPSILON):
    """Expected distance as the first category's probability varies.

    Remaining categories share ``1 - p1`` equally. The Hennig-Liao factor uses
    expected counts ``n p``; association-based kinds use two perfectly
    dependent variables with these marginals. Grid points where the
    dissimilarity is undefined (``n p_a < 1`` for IOF) are ``nan``.
    """
    out = np.empty(len(p1_grid))
    for i, p1 in enumerate(p1_grid):
        p = _skewed_p(q, p1)
        try:
            if kind == "matching":
                d = cd.matching(q)
            elif kind == "eskin":
                d = cd.eskin(q)
            elif kind == "of":
                d = cd.of_dissim(p)
            elif kind == "iof":
                d = cd.iof_dissim(p, n)
            elif kind == "indicator_plain":
                d = cd.indicator_plain(q)
            elif kind == "indicator_hl":
                d = cd.indicator_hl(q, cd.hl_factor(n * p, phi))
            elif kind == "indicator_sd":
                d = cd.indicator_sd(p)
            elif kind == "indicator_cds":
                d = cd.indicator_cds(p)
            elif kind == "tvd_assoc":
                d = cd.tvd_dissim(_perfect_dependence(q))
            elif kind == "kl_assoc":
                d = cd.kl_dissim(_perfect_dependence(q), epsilon)
            else:
                raise KeyError(kind)
        except KeyError:
            raise ValueError(f"unknown dissimilarity {kind!r}") from None
        except ValueError:
            out[i] = np.nan
            continue
        out[i] = cat_expected(p, d)
    return out


def mean_abs_difference(x) -> float:
    """Mean of ``|x_i - x_l|`` over ordered pairs ``i != l``, in O(n log n)."""
    x = np.sort(np.asarray(x, dtype=float))
    n = x.size
    ranks = np.arange(1, n + 1)
    return float(2.0 * np.sum((2 * ranks - n - 1) * x) / (n * (n - 1)))


def _chi2_half(rng, size):
    # chi-square with 1/2 degree of freedom
    return rng.gamma(0.25, 2.0, size)


def sample_distribution(name: str, n: int, rng) -> np.ndarray:
    """Draw ``n`` values from one of :data:`TABLE1_DISTRIBUTIONS`.

    ``bimodal`` is ``n/2`` chi-square(1/2) draws clipped at 10 and ``n/2``
    draws of ``10 - chi-square(1/2)`` clipped at 0.
    """
    if name == "normal":
        return rng.standard_normal(n)
    if name == "uniform":
        return rng.uniform(0.0, 1.0, n)
    if name == "skewed":
        return _chi2_half(rng, n)
    if name == "bimodal":
        h = n // 2
        low = np.minimum(_chi2_half(rng, h), 10.0)
        high = np.maximum(10.0 - _chi2_half(rng, n - h), 0.0)
        return np.concatenate([low, high])
    raise ValueError(f"unknown distribution {name!r}")


def scaled_mean_distances(x) -> dict:
    """Mean pair distance of ``x`` under each column-wise scaling."""
    return {
        "sd": mean_abs_difference(sd_scale(x)[0]),
        "range": mean_abs_difference(range_scale(x)[0]),
        "robust_range": mean_abs_difference(robust_range_scale(x)[0]),
    }


def table1(n_values=(50, 500), reps: int = 200, seed: int = 0, distributions=TABLE1_DISTRIBUTIONS, threads=None):
    """Monte-Carlo mean pair distance for each distribution, sample size and scaling.

    Returns rows ``{"distribution", "n", "sd", "range", "robust_range"}`` with
    the replication means, plus ``*_sd`` entries holding their standard
    deviations.
    """
    cells = [(d, n) for d in distributions for n in n_values]

    def run(idx):
        dist, n = cells[idx]
        vals = []
        for r in range(reps):
            x = sample_distribution(dist, n, rng_for(seed, idx, r))
            vals.append(list(scaled_mean_distances(x).values()))
        vals = np.asarray(vals)
        row = {"distribution": dist, "n": n}
        for k, kind in enumerate(("sd", "range", "robust_range")):
            row[kind] = float(vals[:, k].mean())
            row[kind + "_sd"] = float(vals[:, k].std())
        return row

    with ThreadPoolExecutor(max_workers=threads) as ex:
        return list(ex.map(run, range(len(cells))))
