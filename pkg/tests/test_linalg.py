"""Updatable QR kernels against dense linear-algebra oracles."""

import numpy as np
import pytest

from sparsestep import RankDeficient, UnknownColumn, qr_init
from sparsestep.linalg import UpdatableQR


def check_invariants(qr, source, atol=1e-10):
    p = qr.p
    assert qr.q.shape == (qr.n, p)
    assert qr.r.shape == (p, p)
    assert len(set(qr.col_ids)) == p
    if p == 0:
        return
    assert np.abs(qr.q.T @ qr.q - np.eye(p)).max() <= atol
    if p > 1:
        assert np.abs(np.tril(qr.r, -1)).max() == 0.0
    assert np.all(np.diag(qr.r) >= 0.0)
    sub = source[:, qr.col_ids]
    scale = max(np.linalg.norm(sub, axis=0).max(), 1.0)
    assert np.abs(qr.q @ qr.r - sub).max() <= atol * scale


class TestQrInit:
    def test_identity(self):
        qr = qr_init(np.eye(3), [0, 1, 2])
        assert np.allclose(qr.q, np.eye(3))
        assert np.allclose(qr.r, np.eye(3))
        assert qr.col_ids == [0, 1, 2]

    def test_orthonormal_columns_give_identity_r(self):
        a = np.zeros((4, 2))
        a[1, 0] = 1.0
        a[3, 1] = 1.0
        qr = qr_init(a, [0, 1])
        assert np.allclose(qr.r, np.eye(2))

    def test_matches_dense_qr_oracle(self):
        rng = np.random.default_rng(42)
        a = rng.standard_normal((6, 4))
        qr = qr_init(a, [0, 1, 2, 3])
        assert np.abs(qr.q @ qr.r - a).max() <= 1e-12
        # oracle: dense QR with the same sign convention
        q0, r0 = np.linalg.qr(a)
        sign = np.sign(np.diag(r0))
        assert np.allclose(qr.r, r0 * sign[:, None], atol=1e-12)
        assert np.allclose(qr.q, q0 * sign[None, :], atol=1e-12)

    def test_rank_deficient_rejected(self):
        a = np.ones((3, 2))
        with pytest.raises(RankDeficient):
            qr_init(a, [0, 1])

    def test_more_columns_than_rows_rejected(self):
        rng = np.random.default_rng(0)
        with pytest.raises(RankDeficient):
            qr_init(rng.standard_normal((3, 5)), range(5))

    def test_duplicate_columns_rejected(self):
        with pytest.raises(ValueError):
            qr_init(np.eye(3), [0, 0])

    def test_empty_selection(self):
        qr = qr_init(np.eye(3), [])
        assert qr.p == 0
        x, resid = qr.solve_ls(np.array([1.0, 2.0, 2.0]))
        assert x.size == 0
        assert resid == 3.0


class TestInsertColumn:
    def test_orthogonal_insert(self):
        e1 = np.zeros(3)
        e1[0] = 1.0
        qr = qr_init(e1.reshape(3, 1), [0])
        e2 = np.zeros(3)
        e2[1] = 1.0
        qr.insert_column(e2, 1)
        assert np.allclose(qr.q, np.eye(3)[:, :2])
        assert np.allclose(qr.r, np.eye(2))
        assert qr.col_ids == [0, 1]

    def test_insert_remove_round_trip(self):
        rng = np.random.default_rng(3)
        a = rng.standard_normal((7, 5))
        qr = qr_init(a, [0, 1, 2])
        before = qr.q @ qr.r
        qr.insert_column(a[:, 4], 4)
        qr.remove_column(4)
        assert np.abs(qr.q @ qr.r - before).max() <= 1e-12
        assert qr.col_ids == [0, 1, 2]

    def test_duplicate_column_is_rank_deficient(self):
        rng = np.random.default_rng(5)
        a = rng.standard_normal((6, 3))
        qr = qr_init(a, [0, 1, 2])
        with pytest.raises(RankDeficient):
            qr.insert_column(a[:, 1], 5)

    def test_duplicate_id_rejected(self):
        qr = qr_init(np.eye(3), [0])
        with pytest.raises(ValueError):
            qr.insert_column(np.array([0.0, 1.0, 0.0]), 0)

    def test_insert_into_square_factorization_fails(self):
        qr = qr_init(np.eye(2), [0, 1])
        with pytest.raises(RankDeficient):
            qr.insert_column(np.array([1.0, 1.0]), 2)

    def test_update_count(self):
        qr = qr_init(np.eye(4), [0])
        qr.insert_column(np.eye(4)[:, 1], 1)
        qr.remove_column(0)
        assert qr.update_count == 2


class TestRemoveColumn:
    def test_identity_middle_column(self):
        qr = qr_init(np.eye(3), [0, 1, 2])
        qr.remove_column(1)
        assert qr.col_ids == [0, 2]
        assert np.allclose(qr.q @ qr.r, np.eye(3)[:, [0, 2]])

    def test_each_removal_matches_fresh_factorization(self):
        rng = np.random.default_rng(11)
        a = rng.standard_normal((8, 5))
        for drop in range(5):
            qr = qr_init(a, range(5))
            qr.remove_column(drop)
            keep = [i for i in range(5) if i != drop]
            fresh = qr_init(a, keep)
            # nonnegative-diagonal convention makes factors directly comparable
            assert np.abs(qr.r - fresh.r).max() <= 1e-10
            assert np.abs(qr.q - fresh.q).max() <= 1e-10
            check_invariants(qr, a)

    def test_unknown_column(self):
        qr = qr_init(np.eye(3), [0, 1])
        with pytest.raises(UnknownColumn):
            qr.remove_column(2)

    def test_remove_last_column_empties(self):
        qr = qr_init(np.eye(3), [2])
        qr.remove_column(2)
        assert qr.p == 0


class TestSolveLs:
    def test_identity(self):
        qr = qr_init(np.eye(3), [0, 1, 2])
        x, resid = qr.solve_ls(np.array([1.0, 2.0, 3.0]))
        assert np.allclose(x, [1.0, 2.0, 3.0])
        assert resid == pytest.approx(0.0, abs=1e-14)

    def test_orthogonal_target(self):
        qr = qr_init(np.eye(3), [0])
        y = np.array([0.0, 3.0, 4.0])
        x, resid = qr.solve_ls(y)
        assert np.allclose(x, [0.0])
        assert resid == pytest.approx(5.0)

    def test_matches_normal_equation_oracle(self):
        rng = np.random.default_rng(17)
        a = rng.standard_normal((10, 4))
        y = rng.standard_normal(10)
        qr = qr_init(a, range(4))
        x, resid = qr.solve_ls(y)
        x_oracle = np.linalg.solve(a.T @ a, a.T @ y)
        assert np.abs(x - x_oracle).max() <= 1e-8
        assert resid == pytest.approx(np.linalg.norm(y - a @ x_oracle), abs=1e-10)

    def test_pythagoras(self):
        rng = np.random.default_rng(23)
        a = rng.standard_normal((9, 3))
        y = rng.standard_normal(9)
        qr = qr_init(a, range(3))
        _, resid = qr.solve_ls(y)
        proj = np.linalg.norm(qr.q.T @ y)
        assert resid**2 + proj**2 == pytest.approx(
            np.linalg.norm(y) ** 2, rel=1e-10
        )


class TestGamma:
    def test_orthonormal_gives_ones(self):
        qr = qr_init(np.eye(4), [0, 2])
        assert np.allclose(qr.gamma(), 1.0, atol=1e-10)

    def test_diagonal_matrix_analytic(self):
        qr = qr_init(np.diag([2.0, 1.0]), [0, 1])
        assert np.allclose(qr.gamma(), [0.25, 1.0])

    def test_matches_explicit_gram_inverse(self):
        rng = np.random.default_rng(31)
        a = rng.standard_normal((7, 3))
        qr = qr_init(a, range(3))
        oracle = np.diag(np.linalg.inv(a.T @ a))
        assert np.abs(qr.gamma() - oracle).max() <= 1e-9 * np.abs(oracle).max()

    def test_positive_entries(self):
        rng = np.random.default_rng(37)
        a = rng.standard_normal((12, 6))
        qr = qr_init(a, range(6))
        assert np.all(qr.gamma() > 0.0)


class TestUpdateSequences:
    def test_long_mixed_sequence_keeps_invariants(self):
        rng = np.random.default_rng(101)
        n, m = 20, 30
        a = rng.standard_normal((n, m))
        qr = qr_init(a, [])
        active = []
        for step in range(200):
            if active and (qr.p >= n or rng.random() < 0.45):
                drop = active.pop(rng.integers(len(active)))
                qr.remove_column(drop)
            else:
                avail = [i for i in range(m) if i not in active]
                pick = int(rng.choice(avail))
                qr.insert_column(a[:, pick], pick)
                active.append(pick)
            assert sorted(qr.col_ids) == sorted(active)
            check_invariants(qr, a)

    def test_gamma_tracks_gram_inverse_through_updates(self):
        rng = np.random.default_rng(59)
        a = rng.standard_normal((15, 10))
        qr = qr_init(a, range(10))
        for drop in (3, 7, 0, 9):
            qr.remove_column(drop)
            sub = a[:, qr.col_ids]
            oracle = np.diag(np.linalg.inv(sub.T @ sub))
            assert np.abs(qr.gamma() - oracle).max() <= 1e-8 * np.abs(
                oracle
            ).max()

    def test_copy_is_independent(self):
        qr = qr_init(np.eye(4), [0, 1])
        dup = qr.copy()
        dup.remove_column(0)
        assert qr.col_ids == [0, 1]
        assert dup.col_ids == [1]
