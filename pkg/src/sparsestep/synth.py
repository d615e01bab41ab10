"""Reproducible synthetic problem instances with controlled conditioning.

Matrices are built as U S V^T with orthonormal factors drawn uniformly at
random and a prescribed, uniformly spaced singular spectrum, so the smallest
singular value is an exact input.  Signals are Rademacher on a uniform random
support and perturbations are uniform on a sphere of prescribed radius.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidSpec
from .model import Dictionary, SparseSignal


@dataclass(frozen=True)
class InstanceSpec:
    """Full description of one synthetic recovery problem.

    Attributes
    ----------
    n, m : int
        Dictionary dimensions.
    k : int
        Signal sparsity, at most min(n, m).
    sigma_min : float
        Smallest singular value of the dictionary, in (0, 1].
    delta : float
        Euclidean norm of the additive perturbation.
    seed : int
        Generator seed; the instance is a pure function of the spec.
    """

    n: int
    m: int
    k: int
    sigma_min: float
    delta: float
    seed: int

    def __post_init__(self):
        if self.n < 1 or self.m < 1:
            raise InvalidSpec("dimensions must be positive")
        if not 1 <= self.k <= min(self.n, self.m):
            raise InvalidSpec(
                f"sparsity must satisfy 1 <= k <= {min(self.n, self.m)}"
            )
        if not 0.0 < self.sigma_min <= 1.0:
            raise InvalidSpec("sigma_min must lie in (0, 1]")
        if self.delta < 0.0:
            raise InvalidSpec("delta must be nonnegative")

    def to_config(self) -> str:
        """Flat key=value text, one field per line."""
        return "".join(
            f"{name} = {getattr(self, name)!r}\n"
            for name in ("n", "m", "k", "sigma_min", "delta", "seed")
        )

    @classmethod
    def from_config(cls, text: str) -> "InstanceSpec":
        fields = {}
        for line in text.splitlines():
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            key, _, value = line.partition("=")
            fields[key.strip()] = value.strip()
        try:
            return cls(
                n=int(fields["n"]),
                m=int(fields["m"]),
                k=int(fields["k"]),
                sigma_min=float(fields["sigma_min"]),
                delta=float(fields["delta"]),
                seed=int(fields["seed"]),
            )
        except KeyError as missing:
            raise InvalidSpec(f"missing field {missing}") from None


@dataclass(frozen=True)
class Instance:
    """A generated problem: dictionary, planted signal, noise, observation."""

    dictionary: Dictionary
    signal: SparseSignal
    noise: np.ndarray
    y: np.ndarray


def _haar_columns(rows: int, cols: int, rng: np.random.Generator) -> np.ndarray:
    """Orthonormal factor of a Gaussian matrix, sign-corrected for uniformity."""
    g = rng.standard_normal((rows, cols))
    q, r = np.linalg.qr(g)
    sign = np.sign(np.diag(r))
    sign[sign == 0.0] = 1.0
    return q * sign[None, :]


def make_matrix(
    n: int, m: int, sigma_min: float, rng: np.random.Generator
) -> Dictionary:
    """Random dictionary with uniformly spaced singular values.

    The min(n, m) singular values run from ``sigma_min`` up to 1 inclusive;
    the singular vectors are uniform over orthonormal frames.  Columns are
    not normalized afterwards, which would destroy the prescribed spectrum.
    """
    if not 0.0 < sigma_min <= 1.0:
        raise InvalidSpec("sigma_min must lie in (0, 1]")
    if n < 1 or m < 1:
        raise InvalidSpec("dimensions must be positive")
    p = min(n, m)
    spectrum = np.linspace(sigma_min, 1.0, p)
    u = _haar_columns(n, p, rng)
    v = _haar_columns(m, p, rng)
    return Dictionary((u * spectrum[None, :]) @ v.T)


def make_signal(m: int, k: int, rng: np.random.Generator) -> SparseSignal:
    """Random sparse signal: uniform support, coefficients +-1 equally likely."""
    if not 1 <= k <= m:
        raise InvalidSpec(f"sparsity must satisfy 1 <= k <= {m}")
    support = np.sort(rng.choice(m, size=k, replace=False))
    coeffs = rng.integers(0, 2, size=k) * 2.0 - 1.0
    return SparseSignal(tuple(int(i) for i in support), coeffs, m)


def make_noise(n: int, delta: float, rng: np.random.Generator) -> np.ndarray:
    """Vector drawn uniformly from the sphere of radius ``delta``."""
    if delta < 0.0:
        raise InvalidSpec("delta must be nonnegative")
    if delta == 0.0:
        return np.zeros(n)
    g = rng.standard_normal(n)
    return g * (delta / np.linalg.norm(g))


def make_instance(spec: InstanceSpec) -> Instance:
    """Deterministically generate the instance described by ``spec``."""
    rng = np.random.default_rng(spec.seed)
    dictionary = make_matrix(spec.n, spec.m, spec.sigma_min, rng)
    signal = make_signal(spec.m, spec.k, rng)
    noise = make_noise(spec.n, spec.delta, rng)
    y = dictionary.data @ signal.dense() + noise
    return Instance(dictionary=dictionary, signal=signal, noise=noise, y=y)


def instance_seed(base_seed: int, *indices: int) -> int:
    """Derive an independent per-work-unit seed from a base seed.

    Feeding the base seed and the work-unit coordinates (for grids: the two
    cell indices and the trial number) into a seed sequence makes instance
    generation independent of execution order.
    """
    ss = np.random.SeedSequence((int(base_seed),) + tuple(int(i) for i in indices))
    return int(ss.generate_state(2, dtype=np.uint32).view(np.uint64)[0])
