"""Updatable thin QR factorization and the least-squares kernels built on it.

The factorization tracks a subset of columns of a source matrix and supports
appending and deleting single columns at O(n*p) cost, which is what makes the
backward and replacement algorithms in this package efficient.  The R factor
keeps a nonnegative diagonal so factorizations of the same column set are
comparable entrywise.
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import qr_delete, solve_triangular
from scipy.linalg.lapack import dtrtri

from .errors import RankDeficient, UnknownColumn

# A column counts as dependent when its norm after projection onto the current
# basis falls below this fraction of its original norm.
RANK_RTOL = 1e-12


def qr_delete_thin(q, r, pos):
    """Column-delete a thin factorization, staying thin.

    On a square factorization scipy treats the input as a full decomposition
    and returns a trapezoidal R; this trims the result back to thin form.
    """
    q2, r2 = qr_delete(q, r, pos, which="col", check_finite=False)
    p = r2.shape[1]
    if q2.shape[1] != p:
        q2 = q2[:, :p]
        r2 = r2[:p, :]
    return q2, r2


def _as_matrix(a):
    a = np.asarray(a, dtype=float)
    if a.ndim != 2:
        raise ValueError(f"expected a 2-d matrix, got shape {a.shape}")
    return a


def _as_vector(v, n, name="vector"):
    v = np.asarray(v, dtype=float).reshape(-1)
    if v.shape[0] != n:
        raise ValueError(f"{name} has length {v.shape[0]}, expected {n}")
    return v


class UpdatableQR:
    """Thin QR factorization of a column subset, supporting insert and remove.

    Attributes
    ----------
    q : ndarray, shape (n, p)
        Orthonormal columns spanning the active columns.
    r : ndarray, shape (p, p)
        Upper triangular with nonnegative diagonal.
    col_ids : list of int
        Original column indices, in factorization order.
    update_count : int
        Number of insert/remove operations applied since construction.
    """

    __slots__ = ("q", "r", "col_ids", "n", "update_count")

    def __init__(self, q, r, col_ids):
        self.q = q
        self.r = r
        self.col_ids = list(col_ids)
        self.n = q.shape[0]
        self.update_count = 0

    @property
    def p(self) -> int:
        """Number of active columns."""
        return len(self.col_ids)

    def copy(self) -> "UpdatableQR":
        dup = UpdatableQR(self.q.copy(), self.r.copy(), self.col_ids)
        dup.update_count = self.update_count
        return dup

    def position(self, col_id: int) -> int:
        """Index of ``col_id`` within the factorization order."""
        try:
            return self.col_ids.index(col_id)
        except ValueError:
            raise UnknownColumn(f"column {col_id} is not active") from None

    def insert_column(self, col, col_id: int) -> None:
        """Append one column, orthogonalizing it against the current basis.

        Classical Gram-Schmidt with a single reorthogonalization pass keeps
        the orthogonality drift bounded over long update sequences.

        Raises
        ------
        RankDeficient
            If the column is (numerically) in the span of the active columns,
            or the factorization is already square.
        """
        if col_id in self.col_ids:
            raise ValueError(f"column {col_id} is already active")
        col = _as_vector(col, self.n, "column")
        col_norm = np.linalg.norm(col)
        if self.p >= self.n:
            raise RankDeficient(
                f"cannot insert into a full {self.n}x{self.p} factorization"
            )
        if self.p == 0:
            if col_norm <= 0.0:
                raise RankDeficient("cannot insert a zero column")
            self.q = (col / col_norm).reshape(self.n, 1)
            self.r = np.array([[col_norm]])
        else:
            w = self.q.T @ col
            u = col - self.q @ w
            # one reorthogonalization pass ("twice is enough")
            w2 = self.q.T @ u
            u -= self.q @ w2
            w += w2
            rho = np.linalg.norm(u)
            if rho < RANK_RTOL * col_norm:
                raise RankDeficient(
                    f"column {col_id} is dependent on the active set"
                )
            p = self.p
            q_new = np.empty((self.n, p + 1))
            q_new[:, :p] = self.q
            q_new[:, p] = u / rho
            r_new = np.zeros((p + 1, p + 1))
            r_new[:p, :p] = self.r
            r_new[:p, p] = w
            r_new[p, p] = rho
            self.q, self.r = q_new, r_new
        self.col_ids.append(col_id)
        self.update_count += 1

    def remove_column(self, col_id: int) -> None:
        """Delete one column, restoring triangularity with Givens rotations.

        Raises
        ------
        UnknownColumn
            If ``col_id`` is not active.
        """
        j = self.position(col_id)
        p = self.p
        if p == 1:
            self.q = np.empty((self.n, 0))
            self.r = np.empty((0, 0))
        else:
            q, r = qr_delete_thin(self.q, self.r, j)
            # qr_delete does not keep the diagonal nonnegative
            flip = np.diag(r) < 0.0
            if flip.any():
                r[flip, :] *= -1.0
                q[:, flip] *= -1.0
            self.q, self.r = q, r
        del self.col_ids[j]
        self.update_count += 1

    def solve_ls(self, y):
        """Least-squares coefficients for the active columns and residual norm.

        The residual norm comes from projecting ``y`` onto the orthonormal
        basis, not from the coefficient solve.

        Returns
        -------
        x : ndarray, shape (p,)
        residual_norm : float
        """
        y = _as_vector(y, self.n, "target")
        if self.p == 0:
            return np.empty(0), float(np.linalg.norm(y))
        d = np.diag(self.r)
        if d.min() <= 0.0:
            raise RankDeficient("zero diagonal encountered in R")
        w = self.q.T @ y
        x = solve_triangular(self.r, w, lower=False, check_finite=False)
        resid = y - self.q @ w
        return x, float(np.linalg.norm(resid))

    def gamma(self):
        """Diagonal of the inverse Gram matrix of the active columns.

        Computed from one triangular inversion of R, entry i being the
        squared norm of row i of R^{-1}; never forms the Gram matrix itself.
        """
        if self.p == 0:
            return np.empty(0)
        d = np.diag(self.r)
        if d.min() <= 0.0:
            raise RankDeficient("zero diagonal encountered in R")
        rinv, info = dtrtri(self.r, lower=0)
        if info != 0:
            raise RankDeficient(f"triangular inversion failed (info={info})")
        return np.einsum("ij,ij->i", rinv, rinv)


def qr_init(matrix, columns) -> UpdatableQR:
    """Factor the selected columns of a dense matrix.

    Parameters
    ----------
    matrix : ndarray, shape (n, m)
    columns : sequence of int
        Distinct column indices; at most n of them.

    Raises
    ------
    RankDeficient
        If the selected submatrix is not numerically of full column rank.
    """
    matrix = _as_matrix(matrix)
    n, m = matrix.shape
    ids = [int(c) for c in columns]
    if len(set(ids)) != len(ids):
        raise ValueError("column indices must be distinct")
    if any(c < 0 or c >= m for c in ids):
        raise ValueError("column index out of range")
    if len(ids) > n:
        raise RankDeficient(
            f"{len(ids)} columns cannot have full rank in {n} rows"
        )
    if not ids:
        return UpdatableQR(np.empty((n, 0)), np.empty((0, 0)), [])
    sub = matrix[:, ids]
    q, r = np.linalg.qr(sub)
    sign = np.sign(np.diag(r))
    sign[sign == 0.0] = 1.0
    r *= sign[:, None]
    q *= sign[None, :]
    col_norms = np.linalg.norm(sub, axis=0)
    if np.any(np.abs(np.diag(r)) < RANK_RTOL * col_norms):
        raise RankDeficient("selected columns are numerically rank deficient")
    return UpdatableQR(q, r, ids)
