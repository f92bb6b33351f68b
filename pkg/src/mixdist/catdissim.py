"""Category dissimilarity matrices.

Every constructor returns a symmetric ``q x q`` array with zero diagonal and
nonnegative off-diagonal entries. The distance between two observations on
a categorical variable is then the entry indexed by their two categories,
i.e. ``Z @ delta @ Z.T`` for indicator matrix ``Z``.
"""

from __future__ import annotations

import numpy as np

from .data import DataError, MixedDataset, appearance_order, indicator

__all__ = [
    "INDEPENDENT",
    "ASSOCIATION",
    "DISSIMILARITIES",
    "matching",
    "eskin",
    "of_dissim",
    "iof_dissim",
    "indicator_plain",
    "hl_factor",
    "indicator_hl",
    "indicator_sd",
    "indicator_cds",
    "conditional_rows",
    "kl_dissim",
    "tvd_dissim",
    "aggregate_assoc",
    "check_dissimilarity",
]

INDEPENDENT = (
    "matching",
    "eskin",
    "of",
    "iof",
    "indicator_plain",
    "indicator_hl",
    "indicator_sd",
    "indicator_cds",
)
ASSOCIATION = ("kl_assoc", "tvd_assoc")
DISSIMILARITIES = INDEPENDENT + ASSOCIATION

KL_EPSILON = 1e-5


def _check_q(q):
    q = int(q)
    if q < 2:
        raise ValueError(f"need at least 2 categories, got {q}")
    return q


def _probs(p):
    p = np.asarray(p, dtype=float)
    if p.ndim != 1 or p.size < 2:
        raise ValueError("proportions must be a vector with at least 2 entries")
    return p


def check_dissimilarity(delta, atol=0.0):
    """Raise ``ValueError`` unless ``delta`` is a valid dissimilarity matrix."""
    delta = np.asarray(delta, dtype=float)
    if delta.ndim != 2 or delta.shape[0] != delta.shape[1]:
        raise ValueError("dissimilarity matrix must be square")
    if np.abs(delta - delta.T).max() > atol:
        raise ValueError("dissimilarity matrix must be symmetric")
    if np.any(np.diag(delta) != 0):
        raise ValueError("dissimilarity matrix must have a zero diagonal")
    if np.any(delta < 0):
        raise ValueError("dissimilarity matrix must be nonnegative")
    return delta


def matching(q):
    q = _check_q(q)
    return np.ones((q, q)) - np.eye(q)


def eskin(q):
    q = _check_q(q)
    return 2.0 / q**2 * matching(q)


def of_dissim(p):
    """Occurrence frequency: ``log(p_a) * log(p_b)`` off the diagonal."""
    p = _probs(p)
    if np.any(p <= 0):
        raise ValueError("occurrence frequency dissimilarity needs all proportions > 0")
    lp = np.log(p)
    return np.outer(lp, lp) * matching(p.size)


def iof_dissim(p, n):
    """Inverse occurrence frequency: ``log(n p_a) * log(n p_b)`` off the diagonal.

    Counts ``n p_a`` below one would give negative logs and possibly negative
    dissimilarities, so they are rejected.
    """
    p = _probs(p)
    counts = n * p
    if np.any(counts < 1):
        raise ValueError(
            "inverse occurrence frequency needs n * p_a >= 1 for every category"
        )
    lc = np.log(counts)
    return np.outer(lc, lc) * matching(p.size)


def indicator_plain(q):
    return 2.0 * matching(q)


def hl_factor(counts, phi=0.5):
    """Hennig-Liao indicator scaling factor ``eta = sqrt(phi * T / B)``.

    ``T = n(n+1)/2`` counts all pairs (with repetition), ``W`` the
    within-category pairs and ``B = T - W``. Counts may be fractional (for
    expected counts ``n p``).
    """
    counts = np.asarray(counts)
    if np.any(counts < 0):
        raise ValueError("counts must be nonnegative")
    if np.count_nonzero(counts) < 2:
        raise ValueError("Hennig-Liao factor needs at least two nonempty categories")
    if not phi > 0:
        raise ValueError("phi must be positive")
    if np.issubdtype(counts.dtype, np.integer):
        # exact integer arithmetic keeps T / B correctly rounded
        n = int(counts.sum())
        T = n * (n + 1) // 2
        W = sum(int(c) * (int(c) + 1) // 2 for c in counts)
    else:
        n = float(counts.sum())
        T = n * (n + 1) / 2
        W = float(np.sum(counts * (counts + 1) / 2))
    B = T - W
    if B <= 0:
        raise ValueError("Hennig-Liao factor undefined: no between-category pairs")
    return float(np.sqrt(phi * (T / B)))


def indicator_hl(q, eta):
    return 2.0 * eta * matching(q)


def _indicator_variances(p):
    p = _probs(p)
    if np.any(p <= 0) or np.any(p >= 1):
        raise ValueError("indicator scaling needs 0 < p_a < 1 for every category")
    return p * (1 - p)


def indicator_sd(p):
    """Manhattan distances between rows of a per-category standardized indicator
    matrix, each column further scaled by ``1/sqrt(q)``."""
    s = _indicator_variances(p)
    q = s.size
    r = 1.0 / np.sqrt(s)
    return np.sqrt(1.0 / q) * (r[:, None] + r[None, :]) * matching(q)


def indicator_cds(p):
    """Matching dissimilarity rescaled by the indicator column variances:
    ``(1/q) * (s_a s_b)^(-1/2)`` off the diagonal."""
    s = _indicator_variances(p)
    q = s.size
    r = 1.0 / np.sqrt(s)
    return (1.0 / q) * np.outer(r, r) * matching(q)


def conditional_rows(Zj, Zk):
    """Rows: distribution of the categories of ``k`` within each category of ``j``."""
    Zj = np.asarray(Zj, dtype=float)
    Zk = np.asarray(Zk, dtype=float)
    if Zj.shape[0] != Zk.shape[0]:
        raise ValueError("indicator matrices must have the same number of rows")
    counts = Zj.sum(axis=0)
    if np.any(counts == 0):
        raise ValueError("every category of the conditioning variable must be observed")
    R = (Zj.T @ Zk) / counts[:, None]
    return R


def kl_dissim(R, epsilon=KL_EPSILON):
    """Symmetrized Kullback-Leibler divergence (base 2) between rows of ``R``.

    Zeros inside the log ratio are replaced by ``epsilon``; the multiplying
    probability is left as observed, so a term with a zero weight vanishes.
    """
    R = np.asarray(R, dtype=float)
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    L = np.log2(np.where(R > 0, R, epsilon))
    # diff[a, b, l] = log2 r_al - log2 r_bl
    diff = L[:, None, :] - L[None, :, :]
    terms = R[:, None, :] * diff - R[None, :, :] * diff
    delta = terms.sum(axis=2)
    delta = (delta + delta.T) / 2
    np.fill_diagonal(delta, 0.0)
    return np.maximum(delta, 0.0)


def tvd_dissim(R):
    """Total variation distance ``0.5 * ||r_a - r_b||_1`` between rows of ``R``."""
    R = np.asarray(R, dtype=float)
    delta = 0.5 * np.abs(R[:, None, :] - R[None, :, :]).sum(axis=2)
    np.fill_diagonal(delta, 0.0)
    return delta


_KERNELS = {"kl": kl_dissim, "tvd": tvd_dissim}


def aggregate_assoc(dataset: MixedDataset, j, kernel="tvd", epsilon=KL_EPSILON):
    """Mean association-based dissimilarity of variable ``j`` over all other
    categorical variables.

    ``j`` is a column name or an index into ``dataset.categorical``.
    """
    kernel = kernel.removesuffix("_assoc")
    if kernel not in _KERNELS:
        raise ValueError(f"unknown association kernel {kernel!r}")
    cats = dataset.categorical
    if len(cats) < 2:
        raise DataError("association-based dissimilarities need >= 2 categorical variables")
    if isinstance(j, str):
        names = [c.name for c in cats]
        if j not in names:
            raise KeyError(j)
        j = names.index(j)
    Zj = indicator(cats[j])
    total = np.zeros((cats[j].q, cats[j].q))
    for k, other in enumerate(cats):
        if k == j:
            continue
        # label-independent column order keeps the kernel sums exact under relabeling
        R = conditional_rows(Zj, indicator(other)[:, appearance_order(other)])
        total += kl_dissim(R, epsilon) if kernel == "kl" else tvd_dissim(R)
    return total / (len(cats) - 1)
