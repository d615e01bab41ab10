"""Two-stage replacement algorithms for compressed sensing: stepwise
replacement (forward/backward steps), subspace pursuit, and matching pursuit
with replacement.

All three keep an active set of fixed size k and iteratively swap atoms in
and out.  They share a stall policy: stop when the active set repeats, when
the residual stops improving, or after a cycle cap, and return the iterate
with the smallest residual norm seen.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidConfig, RankDeficient
from .greedy import _finalize, select_deletion, select_insertion
from .linalg import qr_init
from .model import Dictionary, RecoveryOutcome


@dataclass(frozen=True)
class SrrConfig:
    """Settings for stepwise replacement.

    Parameters
    ----------
    k : int
        Target sparsity.
    s : int
        Atoms added and removed per cycle, 1 <= s <= k.
    max_cycles : int
        Hard cap on replacement cycles.
    stall_tol : float
        Minimum relative residual improvement per cycle to keep going.
    """

    k: int
    s: int = 1
    max_cycles: int = 100
    stall_tol: float = 1e-12

    def __post_init__(self):
        if self.k < 1:
            raise InvalidConfig("sparsity k must be at least 1")
        if not 1 <= self.s <= self.k:
            raise InvalidConfig("step size must satisfy 1 <= s <= k")
        if self.max_cycles < 1:
            raise InvalidConfig("max_cycles must be at least 1")


def _check_target(dictionary: Dictionary, y) -> np.ndarray:
    y = np.asarray(y, dtype=float).reshape(-1)
    if y.shape[0] != dictionary.n:
        raise ValueError("target length does not match dictionary rows")
    return y


def _top_correlated(data: np.ndarray, vec: np.ndarray, k: int, exclude=()):
    """Ids of the k atoms with largest |<atom, vec>| / ||atom||.

    Scale-invariant so unnormalized dictionaries do not bias the choice
    toward long atoms.  Ties break toward the lower column id.
    """
    norms = np.linalg.norm(data, axis=0)
    scores = np.abs(data.T @ vec) / norms
    if exclude:
        scores[list(exclude)] = -np.inf
    order = np.lexsort((np.arange(scores.shape[0]), -scores))
    return [int(i) for i in order[:k]]


class _BestIterate:
    """Tracks the smallest-residual active set across cycle boundaries."""

    def __init__(self):
        self.resid = np.inf
        self.ids = None
        self.seen = set()

    def offer(self, ids, resid) -> bool:
        """Record an iterate; returns False if this set was seen before."""
        key = tuple(sorted(ids))
        if resid < self.resid:
            self.resid = resid
            self.ids = key
        if key in self.seen:
            return False
        self.seen.add(key)
        return True


def srr(dictionary: Dictionary, y, cfg: SrrConfig) -> RecoveryOutcome:
    """Stepwise replacement: s forward insertions then s backward deletions.

    Starts from the k atoms most correlated with the target.  Each cycle
    grows the active set with s stepwise insertions (each minimizing the next
    residual) and shrinks it back with s stepwise deletions (each minimizing
    the residual growth), so the factorization sees 2s updates per cycle.

    Parameters
    ----------
    dictionary : Dictionary
    y : ndarray, shape (n,)
    cfg : SrrConfig

    Returns
    -------
    RecoveryOutcome
        Best iterate by residual norm, with ``iterations`` counting cycles.
    """
    y = _check_target(dictionary, y)
    n, m = dictionary.n, dictionary.m
    k, s = cfg.k, cfg.s
    if k + s > n:
        raise InvalidConfig(
            f"k + s = {k + s} exceeds the row count {n}; the enlarged set "
            "could not stay full rank"
        )
    if m <= k:
        raise InvalidConfig(f"need more atoms than the sparsity k={k}")
    data = dictionary.data

    ids = _top_correlated(data, y, k)
    qr = qr_init(data, ids)
    active = set(ids)
    _, resid_norm = qr.solve_ls(y)
    best = _BestIterate()
    best.offer(qr.col_ids, resid_norm)

    cycles = 0
    prev = resid_norm
    for _ in range(cfg.max_cycles):
        cycles += 1
        w = qr.q.T @ y
        resid = y - qr.q @ w
        for _ in range(s):
            col = select_insertion(qr, data, active, resid)
            if col is None:
                break
            qr.insert_column(data[:, col], col)
            active.add(col)
            w = qr.q.T @ y
            resid = y - qr.q @ w
        while qr.p > k:
            x, _ = qr.solve_ls(y)
            col = select_deletion(qr, x, "exact")
            qr.remove_column(col)
            active.discard(col)
        _, resid_norm = qr.solve_ls(y)
        fresh = best.offer(qr.col_ids, resid_norm)
        if not fresh:
            break
        if not resid_norm < prev * (1.0 - cfg.stall_tol):
            break
        prev = resid_norm

    return _finalize(dictionary, best.ids, y, cycles, qr.update_count)


def subspace_pursuit(
    dictionary: Dictionary, y, k: int, max_cycles: int = 100
) -> RecoveryOutcome:
    """Classic two-stage pursuit: add k correlated atoms, fit, prune to k.

    Each cycle unions the active set with the k atoms most correlated with
    the residual, solves least squares on the enlarged set, keeps the k
    largest-magnitude coefficients, and refits.  Stops when the residual
    fails to decrease and returns the best iterate.
    """
    y = _check_target(dictionary, y)
    n, m = dictionary.n, dictionary.m
    if k < 1:
        raise InvalidConfig("sparsity k must be at least 1")
    if 2 * k > n:
        raise InvalidConfig(f"subspace pursuit needs 2k <= n, got k={k}, n={n}")
    if k > m:
        raise InvalidConfig("sparsity exceeds the number of atoms")
    data = dictionary.data

    ids = _top_correlated(data, y, k)
    qr = qr_init(data, ids)
    active = set(ids)
    _, resid_norm = qr.solve_ls(y)
    best = _BestIterate()
    best.offer(qr.col_ids, resid_norm)

    cycles = 0
    prev = resid_norm
    for _ in range(max_cycles):
        cycles += 1
        w = qr.q.T @ y
        resid = y - qr.q @ w
        incoming = _top_correlated(data, resid, k, exclude=active)
        for col in incoming:
            try:
                qr.insert_column(data[:, col], col)
            except RankDeficient:
                continue
            active.add(col)
        x, _ = qr.solve_ls(y)
        keep_order = np.lexsort((qr.col_ids, -np.abs(x)))
        drop = [qr.col_ids[i] for i in keep_order[k:]]
        for col in drop:
            qr.remove_column(col)
            active.discard(col)
        _, resid_norm = qr.solve_ls(y)
        fresh = best.offer(qr.col_ids, resid_norm)
        if not fresh:
            break
        if not resid_norm < prev:
            break
        prev = resid_norm

    return _finalize(dictionary, best.ids, y, cycles, qr.update_count)


def ompr(
    dictionary: Dictionary,
    y,
    k: int,
    s: int = 1,
    step_size: float = 1.0,
    max_cycles: int = 100,
    stall_tol: float = 1e-12,
) -> RecoveryOutcome:
    """Matching pursuit with replacement: one gradient step, then swap atoms.

    Each cycle takes a single gradient step on the least-squares objective,
    admits the s out-of-set atoms with the largest updated magnitudes, prunes
    the union back to k atoms by magnitude, and refits.
    """
    y = _check_target(dictionary, y)
    n, m = dictionary.n, dictionary.m
    if k < 1 or k > n:
        raise InvalidConfig(f"sparsity must satisfy 1 <= k <= n={n}")
    if not 1 <= s <= k:
        raise InvalidConfig("step size must satisfy 1 <= s <= k")
    if k > m:
        raise InvalidConfig("sparsity exceeds the number of atoms")
    data = dictionary.data

    ids = _top_correlated(data, y, k)
    qr = qr_init(data, ids)
    active = set(ids)
    x, resid_norm = qr.solve_ls(y)
    best = _BestIterate()
    best.offer(qr.col_ids, resid_norm)

    cycles = 0
    prev = resid_norm
    for _ in range(max_cycles):
        cycles += 1
        w = qr.q.T @ y
        resid = y - qr.q @ w
        z = step_size * (data.T @ resid)
        z[qr.col_ids] += x
        absz = np.abs(z)
        outside = np.array(
            [i for i in range(m) if i not in active], dtype=int
        )
        admit_order = np.lexsort((outside, -absz[outside]))
        admitted = [int(outside[i]) for i in admit_order[:s]]
        enlarged = np.array(qr.col_ids + admitted, dtype=int)
        keep_order = np.lexsort((enlarged, -absz[enlarged]))
        target = {int(enlarged[i]) for i in keep_order[:k]}
        for col in [c for c in qr.col_ids if c not in target]:
            qr.remove_column(col)
            active.discard(col)
        for col in sorted(target - active):
            qr.insert_column(data[:, col], col)
            active.add(col)
        x, resid_norm = qr.solve_ls(y)
        fresh = best.offer(qr.col_ids, resid_norm)
        if not fresh:
            break
        if not resid_norm < prev * (1.0 - stall_tol):
            break
        prev = resid_norm

    return _finalize(dictionary, best.ids, y, cycles, qr.update_count)
