"""Core data types and the residual/score helpers."""

import numpy as np
import pytest

from sparsestep import (
    ActiveSet,
    Certificate,
    Dictionary,
    RecoveryOutcome,
    SparseSignal,
    ZeroTarget,
    r_squared,
    residual,
)


class TestDictionary:
    def test_dimensions(self):
        d = Dictionary(np.ones((3, 5)))
        assert (d.n, d.m) == (3, 5)

    def test_rejects_zero_column(self):
        a = np.eye(3)
        a[:, 1] = 0.0
        with pytest.raises(ValueError):
            Dictionary(a)

    def test_rejects_wrong_rank(self):
        with pytest.raises(ValueError):
            Dictionary(np.ones(4))

    def test_atom(self):
        d = Dictionary(np.eye(3))
        assert np.allclose(d.atom(2), [0, 0, 1])


class TestSparseSignal:
    def test_dense(self):
        s = SparseSignal((1, 3), np.array([2.0, -1.0]), 5)
        assert np.allclose(s.dense(), [0, 2, 0, -1, 0])
        assert s.k == 2
        assert s.min_abs_coefficient == 1.0

    def test_rejects_zero_coefficient(self):
        with pytest.raises(ValueError):
            SparseSignal((0, 1), np.array([1.0, 0.0]), 4)

    def test_rejects_unsorted_support(self):
        with pytest.raises(ValueError):
            SparseSignal((3, 1), np.array([1.0, 1.0]), 4)

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            SparseSignal((1, 4), np.array([1.0, 1.0]), 4)


class TestActiveSet:
    def test_keeps_order(self):
        a = ActiveSet([3, 0, 2])
        assert a.ids == (3, 0, 2)
        assert a.sorted() == (0, 2, 3)
        assert len(a) == 3

    def test_rejects_duplicates(self):
        with pytest.raises(ValueError):
            ActiveSet([1, 1])


class TestRecoveryOutcome:
    def test_dense_coefficients(self):
        out = RecoveryOutcome(
            active_set=ActiveSet([0, 2]),
            coefficients=np.array([1.0, -2.0]),
            residual_norm=0.0,
            iterations=2,
        )
        assert np.allclose(out.dense_coefficients(4), [1, 0, -2, 0])
        assert out.certificate is Certificate.UNPROVEN
        assert out.support == (0, 2)


class TestResidual:
    def test_empty_set_returns_target(self):
        d = Dictionary(np.eye(3))
        y = np.array([1.0, -2.0, 2.0])
        r, norm = residual(d, ActiveSet(), y)
        assert np.allclose(r, y)
        assert norm == 3.0

    def test_spanning_set_gives_zero(self):
        d = Dictionary(np.eye(4))
        y = np.zeros(4)
        y[1] = 2.0
        y[3] = -1.0
        _, norm = residual(d, [1, 3], y)
        assert norm == pytest.approx(0.0, abs=1e-14)

    def test_matches_pseudo_inverse_oracle(self):
        rng = np.random.default_rng(7)
        a = rng.standard_normal((8, 6))
        y = rng.standard_normal(8)
        ids = [0, 2, 5]
        r, norm = residual(Dictionary(a), ids, y)
        sub = a[:, ids]
        r_oracle = y - sub @ (np.linalg.pinv(sub) @ y)
        assert np.abs(r - r_oracle).max() <= 1e-9
        assert norm == pytest.approx(np.linalg.norm(r_oracle), abs=1e-9)

    def test_superset_never_increases_norm(self):
        rng = np.random.default_rng(13)
        a = rng.standard_normal((10, 7))
        y = rng.standard_normal(10)
        d = Dictionary(a)
        small = [1, 4]
        for extra in ([], [0], [0, 6], [0, 2, 6]):
            _, n_small = residual(d, small, y)
            _, n_big = residual(d, small + extra, y)
            assert n_big <= n_small + 1e-10


class TestRSquared:
    def test_empty_set_is_zero(self):
        d = Dictionary(np.eye(3))
        assert r_squared(d, [], np.array([1.0, 2.0, 0.0])) == 0.0

    def test_exact_fit_is_one(self):
        d = Dictionary(np.eye(3))
        y = np.array([0.0, 5.0, 0.0])
        assert r_squared(d, [1], y) == pytest.approx(1.0)

    def test_half_energy(self):
        d = Dictionary(np.eye(2))
        y = np.array([1.0, 1.0])
        assert r_squared(d, [0], y) == pytest.approx(0.5)

    def test_zero_target_raises(self):
        d = Dictionary(np.eye(2))
        with pytest.raises(ZeroTarget):
            r_squared(d, [0], np.zeros(2))
