"""Per-column and block transforms applied to numeric variables before
taking absolute differences.

Population (divisor ``n``) moments are used throughout; quantiles use linear
interpolation between order statistics (numpy's default rule).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "ConvergenceError",
    "ScaledNumericBlock",
    "SCALINGS",
    "sd_scale",
    "range_scale",
    "robust_range_scale",
    "covariance",
    "sym_eig",
    "pc_scale",
    "scale_block",
]

SCALINGS = ("sd", "range", "robust_range", "pc")
RANK_TOL = 1e-10


class ConvergenceError(RuntimeError):
    pass


@dataclass(frozen=True)
class ScaledNumericBlock:
    """Scaled numeric block and the parameters that produced it.

    ``params`` holds per-column ``(center, scale)`` pairs for the
    column-wise scalings, and ``center``/``rotation`` for ``pc`` (where the
    output is ``(X - center) @ rotation``).
    """

    matrix: np.ndarray
    kind: str
    names: tuple
    params: dict = field(default_factory=dict)


def _as_1d(x):
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise ValueError("expected a one-dimensional column")
    return x


def _negligible(spread, x):
    # a spread below the rounding resolution of the data is numerically zero
    return not spread > np.finfo(float).eps * np.abs(x).max()


def sd_scale(x):
    """z-scores with the population standard deviation.

    Returns ``(scaled, (mean, sd))``.
    """
    x = _as_1d(x)
    mean = x.mean()
    sd = np.sqrt(np.mean((x - mean) ** 2))
    if _negligible(sd, x):
        raise ValueError("zero variance column cannot be sd-scaled")
    return (x - mean) / sd, (mean, sd)


def range_scale(x):
    x = _as_1d(x)
    lo, hi = x.min(), x.max()
    if _negligible(hi - lo, x):
        raise ValueError("zero range column cannot be range-scaled")
    return (x - lo) / (hi - lo), (lo, hi - lo)


def robust_range_scale(x):
    """Center on the median and divide by the interquartile range."""
    x = _as_1d(x)
    q25, med, q75 = np.quantile(x, [0.25, 0.5, 0.75])
    iqr = q75 - q25
    if _negligible(iqr, x):
        raise ValueError("zero interquartile range column cannot be robust-scaled")
    return (x - med) / iqr, (med, iqr)


_COLUMN_SCALERS = {
    "sd": sd_scale,
    "range": range_scale,
    "robust_range": robust_range_scale,
}


def covariance(X):
    """Covariance matrix with divisor ``n``."""
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[0] < 2:
        raise ValueError("covariance needs an (n, p) array with n >= 2")
    Xc = X - X.mean(axis=0)
    S = Xc.T @ Xc / X.shape[0]
    return (S + S.T) / 2


def _fix_signs(V):
    # largest-magnitude loading of each column made positive
    idx = np.argmax(np.abs(V), axis=0)
    signs = np.sign(V[idx, np.arange(V.shape[1])])
    signs[signs == 0] = 1.0
    return V * signs


def sym_eig(S, sym_tol=1e-10):
    """Eigendecomposition of a symmetric matrix.

    Returns ``(eigenvalues, V)`` with eigenvalues in non-increasing order and
    orthonormal eigenvectors in the columns of ``V``, each oriented so its
    largest-magnitude entry is positive.
    """
    S = np.asarray(S, dtype=float)
    if S.ndim != 2 or S.shape[0] != S.shape[1]:
        raise ValueError("expected a square matrix")
    scale = max(np.abs(S).max(), 1.0)
    if np.abs(S - S.T).max() > sym_tol * scale:
        raise ValueError("matrix is not symmetric")
    try:
        evals, V = np.linalg.eigh((S + S.T) / 2)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(str(exc)) from exc
    order = np.argsort(evals, kind="stable")[::-1]
    return evals[order], _fix_signs(V[:, order])


def pc_scale(X, names=None) -> ScaledNumericBlock:
    """Rotate to principal axes and standardize each axis to unit variance.

    No dimensions are dropped: a rank-deficient covariance is an error.
    """
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    p = X.shape[1]
    names = tuple(names) if names is not None else tuple(f"PC{k + 1}" for k in range(p))
    S = covariance(X)
    evals, V = sym_eig(S)
    if evals[0] <= 0 or evals[-1] <= RANK_TOL * evals[0]:
        raise ValueError(
            "covariance is rank deficient; principal component scaling needs full rank"
        )
    rotation = V / np.sqrt(evals)
    center = X.mean(axis=0)
    Xs = (X - center) @ rotation
    return ScaledNumericBlock(
        Xs,
        "pc",
        tuple(f"PC{k + 1}" for k in range(p)),
        {"center": center, "rotation": rotation, "eigenvalues": evals,
         "eigenvectors": V, "source": names},
    )


def scale_block(X, kinds, names=None) -> ScaledNumericBlock:
    """Scale the columns of ``X``.

    ``kinds`` is either one scaling name or a per-column sequence. ``"pc"``
    acts on the whole block and cannot be mixed with column-wise kinds.
    """
    X = np.asarray(X, dtype=float)
    p = X.shape[1]
    names = tuple(names) if names is not None else tuple(f"x{k + 1}" for k in range(p))
    if isinstance(kinds, str):
        kinds = [kinds] * p
    kinds = list(kinds)
    if len(kinds) != p:
        raise ValueError("need one scaling kind per column")
    for k in kinds:
        if k not in SCALINGS:
            raise ValueError(f"unknown scaling {k!r}; choose from {SCALINGS}")
    if "pc" in kinds:
        if any(k != "pc" for k in kinds):
            raise ValueError("pc scaling applies to the whole numeric block")
        return pc_scale(X, names)
    out = np.empty_like(X)
    params = {}
    for j, (name, kind) in enumerate(zip(names, kinds)):
        out[:, j], params[name] = _COLUMN_SCALERS[kind](X[:, j])
    label = kinds[0] if len(set(kinds)) == 1 else "mixed"
    return ScaledNumericBlock(out, label, names, params)
