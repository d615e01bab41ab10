"""Synthetic generators: prescribed spectra, Rademacher signals, sphere
noise, determinism."""

import numpy as np
import pytest

from sparsestep import (
    InstanceSpec,
    InvalidSpec,
    instance_seed,
    make_instance,
    make_matrix,
    make_noise,
    make_signal,
)


class TestMakeMatrix:
    def test_unit_sigma_min_gives_orthogonal_factor(self):
        rng = np.random.default_rng(0)
        d = make_matrix(6, 6, 1.0, rng)
        svals = np.linalg.svd(d.data, compute_uv=False)
        assert np.abs(svals - 1.0).max() <= 1e-12

    def test_square_spectrum_endpoints(self):
        rng = np.random.default_rng(1)
        d = make_matrix(64, 64, 0.1, rng)
        svals = np.linalg.svd(d.data, compute_uv=False)
        assert svals.min() == pytest.approx(0.1, abs=1e-10)
        assert svals.max() == pytest.approx(1.0, abs=1e-10)

    def test_rectangular_spectrum_is_arithmetic(self):
        rng = np.random.default_rng(2)
        d = make_matrix(64, 128, 0.25, rng)
        svals = np.sort(np.linalg.svd(d.data, compute_uv=False))
        assert svals.shape == (64,)
        expected = np.linspace(0.25, 1.0, 64)
        assert np.abs(svals - expected).max() <= 1e-10

    def test_rejects_bad_sigma(self):
        rng = np.random.default_rng(3)
        for bad in (0.0, -0.5, 1.5):
            with pytest.raises(InvalidSpec):
                make_matrix(4, 4, bad, rng)


class TestMakeSignal:
    def test_full_support(self):
        rng = np.random.default_rng(4)
        s = make_signal(6, 6, rng)
        assert s.support == tuple(range(6))
        assert np.all(np.abs(s.coefficients) == 1.0)

    def test_unit_magnitudes(self):
        rng = np.random.default_rng(5)
        for _ in range(50):
            s = make_signal(20, 7, rng)
            assert np.all(np.abs(s.coefficients) == 1.0)
            assert s.min_abs_coefficient == 1.0

    def test_monte_carlo_mean_is_centered(self):
        rng = np.random.default_rng(6)
        total = sum(make_signal(10, 10, rng).coefficients.mean() for _ in range(10_000))
        assert abs(total / 10_000) < 0.05

    def test_support_uniformity_smoke(self):
        rng = np.random.default_rng(7)
        counts = np.zeros(8)
        for _ in range(4000):
            s = make_signal(8, 2, rng)
            counts[list(s.support)] += 1
        freq = counts / counts.sum()
        assert np.abs(freq - 1.0 / 8).max() < 0.02

    def test_rejects_bad_sparsity(self):
        rng = np.random.default_rng(8)
        with pytest.raises(InvalidSpec):
            make_signal(5, 0, rng)
        with pytest.raises(InvalidSpec):
            make_signal(5, 6, rng)


class TestMakeNoise:
    def test_zero_radius(self):
        rng = np.random.default_rng(9)
        assert np.array_equal(make_noise(5, 0.0, rng), np.zeros(5))

    def test_exact_norm(self):
        rng = np.random.default_rng(10)
        for delta in (1e-6, 0.3, 7.0):
            eps = make_noise(12, delta, rng)
            assert np.linalg.norm(eps) == pytest.approx(delta, abs=1e-14 * max(delta, 1))

    def test_isotropy_monte_carlo(self):
        rng = np.random.default_rng(11)
        acc = np.zeros(6)
        for _ in range(10_000):
            acc += make_noise(6, 1.0, rng)
        assert np.abs(acc / 10_000).max() < 0.05

    def test_rejects_negative(self):
        rng = np.random.default_rng(12)
        with pytest.raises(InvalidSpec):
            make_noise(4, -1.0, rng)


class TestMakeInstance:
    def test_determinism(self):
        spec = InstanceSpec(n=16, m=24, k=5, sigma_min=0.3, delta=0.2, seed=42)
        a = make_instance(spec)
        b = make_instance(spec)
        assert np.array_equal(a.dictionary.data, b.dictionary.data)
        assert a.signal.support == b.signal.support
        assert np.array_equal(a.signal.coefficients, b.signal.coefficients)
        assert np.array_equal(a.noise, b.noise)
        assert np.array_equal(a.y, b.y)

    def test_distinct_seeds_differ(self):
        base = InstanceSpec(n=8, m=8, k=2, sigma_min=0.5, delta=0.1, seed=0)
        other = InstanceSpec(n=8, m=8, k=2, sigma_min=0.5, delta=0.1, seed=1)
        assert not np.array_equal(
            make_instance(base).dictionary.data,
            make_instance(other).dictionary.data,
        )

    def test_composition(self):
        spec = InstanceSpec(n=10, m=14, k=4, sigma_min=0.4, delta=0.25, seed=3)
        inst = make_instance(spec)
        assert np.linalg.norm(inst.noise) == pytest.approx(0.25, abs=1e-12)
        assert inst.signal.k == 4
        expected = inst.dictionary.data @ inst.signal.dense() + inst.noise
        assert np.array_equal(inst.y, expected)

    def test_noiseless_orthogonal_instance_certifies(self):
        from sparsestep import backward_regression, recovery_bound

        spec = InstanceSpec(n=12, m=12, k=4, sigma_min=1.0, delta=0.0, seed=9)
        inst = make_instance(spec)
        bound = recovery_bound(inst.dictionary, inst.signal.min_abs_coefficient)
        assert bound == pytest.approx(0.5, abs=1e-10)
        out = backward_regression(inst.dictionary, inst.y, 4)
        assert out.active_set.sorted() == inst.signal.support

    def test_supports_full_scale_protocol(self):
        spec = InstanceSpec(n=64, m=64, k=32, sigma_min=0.4, delta=0.3, seed=0)
        inst = make_instance(spec)
        assert inst.dictionary.data.shape == (64, 64)
        assert inst.signal.k == 32
        assert np.linalg.norm(inst.noise) == pytest.approx(0.3, abs=1e-12)

    def test_rejects_invalid_spec(self):
        with pytest.raises(InvalidSpec):
            InstanceSpec(n=4, m=8, k=5, sigma_min=0.5, delta=0.0, seed=0)
        with pytest.raises(InvalidSpec):
            InstanceSpec(n=4, m=8, k=2, sigma_min=0.0, delta=0.0, seed=0)
        with pytest.raises(InvalidSpec):
            InstanceSpec(n=4, m=8, k=2, sigma_min=0.5, delta=-0.1, seed=0)


class TestSpecSerialization:
    def test_config_round_trip(self):
        spec = InstanceSpec(n=64, m=64, k=32, sigma_min=0.05, delta=0.6, seed=128)
        assert InstanceSpec.from_config(spec.to_config()) == spec

    def test_from_config_with_comments(self):
        text = "n = 8\nm = 8  # atoms\nk = 2\nsigma_min = 0.5\ndelta = 0.0\nseed = 1\n"
        spec = InstanceSpec.from_config(text)
        assert (spec.n, spec.m, spec.k) == (8, 8, 2)

    def test_missing_field(self):
        with pytest.raises(InvalidSpec):
            InstanceSpec.from_config("n = 8\n")


class TestInstanceSeed:
    def test_deterministic_and_order_free(self):
        a = instance_seed(7, 1, 2, 3)
        b = instance_seed(7, 1, 2, 3)
        assert a == b
        assert instance_seed(7, 2, 1, 3) != a
        assert instance_seed(8, 1, 2, 3) != a
