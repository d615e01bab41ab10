"""Single-stage greedy selection: backward elimination, magnitude pruning,
forward stepwise selection, and orthogonal matching pursuit.

All four maintain one updatable QR factorization of the active columns.  The
backward algorithms evaluate every candidate deletion in closed form from the
current coefficients and the inverse-Gram diagonal; the forward ones evaluate
every candidate insertion from correlations and projection residuals.
"""

from __future__ import annotations

import numpy as np

from .errors import InvalidSparsity, RankDeficient
from .linalg import RANK_RTOL, UpdatableQR, qr_init
from .model import ActiveSet, Dictionary, RecoveryOutcome


def deletion_scores(qr: UpdatableQR, x) -> np.ndarray:
    """Residual-energy increase caused by deleting each active atom.

    Parameters
    ----------
    qr : UpdatableQR
        Factorization of the active columns.
    x : ndarray, shape (p,)
        Least-squares coefficients for those columns.

    Returns
    -------
    ndarray, shape (p,)
        Entry i equals the growth of the squared residual norm if atom
        ``qr.col_ids[i]`` were removed and the rest refit.
    """
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.shape[0] != qr.p:
        raise ValueError("coefficient length does not match active set size")
    if qr.p == 0:
        return np.empty(0)
    return x * x / qr.gamma()


def _argmin_by_id(scores: np.ndarray, ids) -> int:
    """Position of the smallest score; exact ties go to the lowest column id."""
    hits = np.flatnonzero(scores == scores.min())
    if hits.shape[0] == 1:
        return int(hits[0])
    ids = np.asarray(ids)
    return int(hits[np.argmin(ids[hits])])


def _finalize(dictionary: Dictionary, ids, y, iterations, qr_updates=0):
    """Build an outcome: sort the support and refit it on a fresh factorization."""
    ids = sorted(int(i) for i in ids)
    if ids:
        qr = qr_init(dictionary.data, ids)
        x, resid = qr.solve_ls(y)
    else:
        x = np.empty(0)
        resid = float(np.linalg.norm(y))
    return RecoveryOutcome(
        active_set=ActiveSet(ids),
        coefficients=x,
        residual_norm=resid,
        iterations=iterations,
        qr_updates=qr_updates,
    )


def _check_target(dictionary: Dictionary, y) -> np.ndarray:
    y = np.asarray(y, dtype=float).reshape(-1)
    if y.shape[0] != dictionary.n:
        raise ValueError("target length does not match dictionary rows")
    return y


def select_deletion(qr: UpdatableQR, x, rule: str = "exact") -> int:
    """Column id to delete next.

    ``rule="exact"`` removes the atom whose deletion least increases the
    residual; ``rule="magnitude"`` removes the atom with the smallest absolute
    coefficient.  Exact score ties go to the lowest column id.
    """
    if rule == "magnitude":
        scores = np.abs(np.asarray(x, dtype=float).reshape(-1))
    else:
        scores = deletion_scores(qr, x)
    pos = _argmin_by_id(scores, qr.col_ids)
    return qr.col_ids[pos]


def _backward(dictionary: Dictionary, y, k: int, rule: str) -> RecoveryOutcome:
    y = _check_target(dictionary, y)
    m = dictionary.m
    if k < 0 or k >= m:
        raise InvalidSparsity(f"backward sparsity must satisfy 0 <= k < {m}")
    if m > dictionary.n:
        raise RankDeficient(
            "backward elimination needs full column rank (m <= n)"
        )
    qr = qr_init(dictionary.data, range(m))
    while qr.p > k:
        x, _ = qr.solve_ls(y)
        qr.remove_column(select_deletion(qr, x, rule))
    return _finalize(dictionary, qr.col_ids, y, m - k, qr.update_count)


def backward_regression(dictionary: Dictionary, y, k: int) -> RecoveryOutcome:
    """Delete atoms from the full dictionary until k remain.

    Each step removes the atom whose deletion least increases the residual
    norm, evaluated in closed form from the coefficients and the diagonal of
    the inverse Gram matrix, and downdates the factorization.

    Parameters
    ----------
    dictionary : Dictionary
        Must have full column rank (m <= n).
    y : ndarray, shape (n,)
    k : int
        Target size, 0 <= k < m.
    """
    return _backward(dictionary, y, k, "exact")


def lace(dictionary: Dictionary, y, k: int) -> RecoveryOutcome:
    """Backward elimination by smallest absolute coefficient.

    Identical to :func:`backward_regression` except the deletion criterion is
    plain magnitude pruning, which skips the inverse-Gram computation.
    """
    return _backward(dictionary, y, k, "magnitude")


def forward_scores(qr: UpdatableQR, data: np.ndarray, candidates, resid):
    """Insertion look-ahead: squared residual decrease for each candidate atom.

    Returns
    -------
    scores : ndarray
        Decrease of the squared residual norm if the candidate were inserted.
    eligible : ndarray of bool
        False where the candidate is numerically inside the current span.
    """
    cand = np.asarray(candidates, dtype=int)
    cols = data[:, cand]
    col_norms = np.linalg.norm(cols, axis=0)
    if qr.p:
        u = cols - qr.q @ (qr.q.T @ cols)
        proj_sq = np.einsum("ij,ij->j", u, u)
    else:
        proj_sq = col_norms * col_norms
    eligible = np.sqrt(proj_sq) >= RANK_RTOL * col_norms
    numer = cols.T @ resid
    scores = np.zeros(cand.shape[0])
    np.divide(numer * numer, proj_sq, out=scores, where=eligible)
    return scores, eligible


def select_insertion(qr: UpdatableQR, data: np.ndarray, active: set, resid):
    """Column id minimizing the residual after one insertion, or None."""
    m = data.shape[1]
    cand = np.array([i for i in range(m) if i not in active], dtype=int)
    if cand.shape[0] == 0:
        return None
    scores, eligible = forward_scores(qr, data, cand, resid)
    if not eligible.any():
        return None
    scores[~eligible] = -np.inf
    best = scores.max()
    hits = np.flatnonzero(scores == best)
    return int(cand[hits[0]])


def _forward(dictionary: Dictionary, y, k: int, rule: str) -> RecoveryOutcome:
    y = _check_target(dictionary, y)
    n, m = dictionary.n, dictionary.m
    if k < 0 or k > min(n, m):
        raise InvalidSparsity(
            f"forward sparsity must satisfy 0 <= k <= {min(n, m)}"
        )
    data = dictionary.data
    qr = qr_init(data, [])
    active = set()
    resid = y.copy()
    for _ in range(k):
        cand = np.array([i for i in range(m) if i not in active], dtype=int)
        scores, eligible = forward_scores(qr, data, cand, resid)
        if not eligible.any():
            raise RankDeficient(
                "all remaining atoms lie in the span of the active set"
            )
        if rule == "correlation":
            sel = np.abs(data[:, cand].T @ resid)
            sel[~eligible] = -np.inf
        else:
            sel = np.where(eligible, scores, -np.inf)
        best = int(cand[np.flatnonzero(sel == sel.max())[0]])
        qr.insert_column(data[:, best], best)
        active.add(best)
        w = qr.q.T @ y
        resid = y - qr.q @ w
    return _finalize(dictionary, active, y, k, qr.update_count)


def forward_regression(dictionary: Dictionary, y, k: int) -> RecoveryOutcome:
    """Add k atoms, each minimizing the residual norm of the next fit.

    The look-ahead is evaluated as the squared correlation with the current
    residual divided by the squared norm of the atom's component outside the
    active span; atoms numerically inside the span are skipped.
    """
    return _forward(dictionary, y, k, "lookahead")


def omp(dictionary: Dictionary, y, k: int) -> RecoveryOutcome:
    """Orthogonal matching pursuit: add the atom most correlated with the
    residual, refitting all coefficients by least squares each iteration."""
    return _forward(dictionary, y, k, "correlation")
