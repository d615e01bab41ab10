"""Core problem data types shared by all algorithms."""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import ZeroTarget
from .linalg import qr_init


class Certificate(enum.Enum):
    """Whether an outcome carries an optimality certificate."""

    PROVEN = "proven"
    UNPROVEN = "unproven"


@dataclass(frozen=True)
class Dictionary:
    """Dense matrix of column atoms.

    Parameters
    ----------
    data : ndarray, shape (n, m)
        One atom per column; no atom may be identically zero.
    """

    data: np.ndarray

    def __post_init__(self):
        data = np.asarray(self.data, dtype=float)
        if data.ndim != 2:
            raise ValueError(f"dictionary must be 2-d, got shape {data.shape}")
        if data.shape[0] < 1 or data.shape[1] < 1:
            raise ValueError("dictionary must have at least one row and column")
        if np.any(np.linalg.norm(data, axis=0) == 0.0):
            raise ValueError("dictionary contains an all-zero column")
        object.__setattr__(self, "data", data)

    @property
    def n(self) -> int:
        return self.data.shape[0]

    @property
    def m(self) -> int:
        return self.data.shape[1]

    def atom(self, i: int) -> np.ndarray:
        return self.data[:, i]


@dataclass(frozen=True)
class SparseSignal:
    """A vector described by its support and the values on it.

    All stored coefficients are nonzero; ``m`` is the ambient dimension.
    """

    support: tuple
    coefficients: np.ndarray
    m: int

    def __post_init__(self):
        support = tuple(int(i) for i in self.support)
        coeffs = np.asarray(self.coefficients, dtype=float).reshape(-1)
        if len(support) != len(set(support)):
            raise ValueError("support contains duplicate indices")
        if sorted(support) != list(support):
            raise ValueError("support must be sorted ascending")
        if any(i < 0 or i >= self.m for i in support):
            raise ValueError("support index out of range")
        if coeffs.shape[0] != len(support):
            raise ValueError("one coefficient per support index required")
        if len(support) and np.any(coeffs == 0.0):
            raise ValueError("coefficients on the support must be nonzero")
        object.__setattr__(self, "support", support)
        object.__setattr__(self, "coefficients", coeffs)

    @property
    def k(self) -> int:
        return len(self.support)

    @property
    def min_abs_coefficient(self) -> float:
        if not self.support:
            return 0.0
        return float(np.abs(self.coefficients).min())

    def dense(self) -> np.ndarray:
        x = np.zeros(self.m)
        x[list(self.support)] = self.coefficients
        return x


@dataclass(frozen=True, init=False)
class ActiveSet:
    """Ordered distinct column indices defining the current model."""

    ids: tuple

    def __init__(self, ids=()):
        ids = tuple(int(i) for i in ids)
        if len(ids) != len(set(ids)):
            raise ValueError("active set contains duplicate indices")
        if any(i < 0 for i in ids):
            raise ValueError("active set indices must be nonnegative")
        object.__setattr__(self, "ids", ids)

    def __len__(self) -> int:
        return len(self.ids)

    def __iter__(self):
        return iter(self.ids)

    def sorted(self) -> tuple:
        return tuple(sorted(self.ids))


@dataclass(frozen=True)
class RecoveryOutcome:
    """Result of one recovery/selection run.

    ``active_set`` is reported sorted ascending with ``coefficients`` aligned
    to it.  ``qr_updates`` counts factorization insert/remove operations,
    excluding the initial factorization.
    """

    active_set: ActiveSet
    coefficients: np.ndarray
    residual_norm: float
    iterations: int
    certificate: Certificate = Certificate.UNPROVEN
    qr_updates: int = 0

    @property
    def support(self) -> tuple:
        return self.active_set.ids

    def dense_coefficients(self, m: int) -> np.ndarray:
        x = np.zeros(m)
        x[list(self.active_set.ids)] = self.coefficients
        return x


def _as_ids(active) -> list:
    if isinstance(active, ActiveSet):
        return list(active.ids)
    return [int(i) for i in active]


def residual(dictionary: Dictionary, active, y):
    """Least-squares residual of ``y`` against the selected atoms.

    Returns
    -------
    r : ndarray, shape (n,)
    norm : float
    """
    y = np.asarray(y, dtype=float).reshape(-1)
    if y.shape[0] != dictionary.n:
        raise ValueError("target length does not match dictionary rows")
    ids = _as_ids(active)
    if not ids:
        return y.copy(), float(np.linalg.norm(y))
    qr = qr_init(dictionary.data, ids)
    w = qr.q.T @ y
    r = y - qr.q @ w
    return r, float(np.linalg.norm(r))


def r_squared(dictionary: Dictionary, active, y) -> float:
    """Fraction of the target's energy explained by the selected atoms.

    Defined without mean-centering, so the empty set scores 0 and an exact
    fit scores 1.
    """
    y = np.asarray(y, dtype=float).reshape(-1)
    energy = float(y @ y)
    if energy == 0.0:
        raise ZeroTarget("target vector has zero norm")
    r, _ = residual(dictionary, active, y)
    return 1.0 - float(r @ r) / energy
