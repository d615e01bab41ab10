"""Computable recovery certificates and dictionary diagnostics.

The certificate compares half the smallest singular value of the dictionary,
scaled by the smallest recovered coefficient magnitude, against the achieved
residual norm; when the bound wins, the returned support is provably the
optimal one at that sparsity.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidOrder, RankDeficient
from .greedy import select_deletion
from .linalg import RANK_RTOL, qr_init
from .model import ActiveSet, Dictionary, RecoveryOutcome


@dataclass(frozen=True)
class CertificateReport:
    """Outcome of the post-hoc optimality check."""

    bound: float
    residual_norm: float
    holds: bool
    sigma_min: float
    min_abs_coeff: float


def _sigma_min(matrix: np.ndarray) -> float:
    return float(np.linalg.svd(matrix, compute_uv=False).min())


def recovery_bound(dictionary: Dictionary, min_abs_coeff: float) -> float:
    """Largest noise norm under which backward elimination provably recovers
    a sparse signal whose smallest coefficient magnitude is given.

    Raises
    ------
    RankDeficient
        If the dictionary is numerically rank deficient.
    """
    if min_abs_coeff <= 0.0:
        raise ValueError("min_abs_coeff must be positive")
    svals = np.linalg.svd(dictionary.data, compute_uv=False)
    if dictionary.m > dictionary.n or svals.min() < RANK_RTOL * svals.max():
        raise RankDeficient("dictionary does not have full column rank")
    return 0.5 * float(svals.min()) * float(min_abs_coeff)


def posthoc_check(
    dictionary: Dictionary, y, outcome: RecoveryOutcome
) -> CertificateReport:
    """Check whether a returned support is provably optimal at its sparsity.

    The residual is recomputed from the outcome's support and coefficients so
    the check does not trust the solver that produced them.  Degenerate
    inputs (empty support, zero coefficient, rank-deficient dictionary) give
    ``holds=False`` with a zero bound.
    """
    y = np.asarray(y, dtype=float).reshape(-1)
    ids = list(outcome.active_set.ids)
    if ids:
        fit = dictionary.data[:, ids] @ outcome.coefficients
        residual_norm = float(np.linalg.norm(y - fit))
        min_abs = float(np.abs(outcome.coefficients).min()) if len(
            outcome.coefficients
        ) else 0.0
    else:
        residual_norm = float(np.linalg.norm(y))
        min_abs = 0.0
    svals = np.linalg.svd(dictionary.data, compute_uv=False)
    full_rank = (
        dictionary.m <= dictionary.n
        and svals.min() >= RANK_RTOL * svals.max()
    )
    sigma = float(svals.min()) if full_rank else 0.0
    bound = 0.5 * sigma * min_abs
    return CertificateReport(
        bound=bound,
        residual_norm=residual_norm,
        holds=bool(bound > residual_norm),
        sigma_min=sigma,
        min_abs_coeff=min_abs,
    )


def adaptive_stop_sparsity(dictionary: Dictionary, y) -> int:
    """Smallest sparsity at which backward elimination still certifies.

    Runs the backward deletion path from the full dictionary down to a single
    atom and evaluates the certificate at every iterate; returns the smallest
    certified size, or m when no iterate certifies.
    """
    y = np.asarray(y, dtype=float).reshape(-1)
    m = dictionary.m
    if m > dictionary.n:
        raise RankDeficient("backward elimination needs full column rank")
    svals = np.linalg.svd(dictionary.data, compute_uv=False)
    if svals.min() < RANK_RTOL * svals.max():
        raise RankDeficient("dictionary does not have full column rank")
    sigma = float(svals.min())

    qr = qr_init(dictionary.data, range(m))
    smallest = m
    while qr.p > 1:
        x, _ = qr.solve_ls(y)
        qr.remove_column(select_deletion(qr, x, "exact"))
        x, resid = qr.solve_ls(y)
        min_abs = float(np.abs(x).min())
        if 0.5 * sigma * min_abs > resid:
            smallest = qr.p
    return smallest


def babel(dictionary: Dictionary, k: int) -> float:
    """Cumulative coherence: worst-case sum of the k largest cross
    correlations of one normalized atom with the others."""
    m = dictionary.m
    if not 1 <= k <= m - 1:
        raise InvalidOrder(f"order must satisfy 1 <= k <= {m - 1}")
    data = dictionary.data / np.linalg.norm(dictionary.data, axis=0)
    gram = np.abs(data.T @ data)
    # the diagonal sorts below every cross correlation, so it never lands in
    # the k largest entries of a row
    np.fill_diagonal(gram, -np.inf)
    top = np.partition(gram, m - k, axis=1)[:, m - k:]
    return float(top.sum(axis=1).max())


def sigma_min_active(dictionary: Dictionary, active) -> float:
    """Smallest singular value of the selected column submatrix."""
    ids = list(active.ids) if isinstance(active, ActiveSet) else [
        int(i) for i in active
    ]
    if not ids:
        raise ValueError("active set must be nonempty")
    return _sigma_min(dictionary.data[:, ids])
