"""Triangular-matrix ensemble: sampler distributions, spectra, invariants."""

import numpy as np
import pytest
from scipy.stats import kstest

from biortho import dh_law, ensemble as en
from biortho.measures import EmpiricalMeasure, w1_distance


def params(n=64, theta=0.0, b=1.0, seed=0):
    return en.EnsembleParams(n=n, theta=theta, b=b, seed=seed)


class TestParams:
    def test_validation(self):
        with pytest.raises(ValueError):
            en.EnsembleParams(n=0, theta=0.0, b=1.0, seed=0)
        with pytest.raises(ValueError):
            en.EnsembleParams(n=4, theta=-0.5, b=1.0, seed=0)
        with pytest.raises(ValueError):
            en.EnsembleParams(n=4, theta=0.0, b=0.0, seed=0)


class TestSampleTriangular:
    def test_strictly_upper_zero(self):
        t = en.sample_triangular(params(n=30, theta=1.5, b=0.5, seed=9))
        assert np.all(t[np.triu_indices(30, k=1)] == 0.0)

    def test_diag_modulus_squared_exponential(self):
        # change of variables: density e^{-r^2} r^{2(c-1)} in the modulus
        # means modulus^2 ~ Gamma(c); at theta=0, b=1 that is Exp(1)
        draws = []
        for k in range(100):
            t = en.sample_triangular(params(n=100, seed=8), trial=k)
            draws.append(np.abs(np.diag(t)) ** 2)
        draws = np.concatenate(draws)
        stat, _ = kstest(draws, "expon")
        assert draws.size == 10_000
        assert stat < 1.9495 / np.sqrt(draws.size)   # 0.001-level critical value

    def test_diag_gamma_shape_theta(self):
        # j-th diagonal entry has modulus^2 ~ Gamma(theta*(j-1) + b)
        theta, b, j = 1.0, 1.0, 50
        draws = np.array([
            np.abs(en.sample_triangular(params(n=64, theta=theta, b=b, seed=17),
                                        trial=k)[j, j]) ** 2
            for k in range(4000)])
        stat, _ = kstest(draws, "gamma", args=(theta * j + b,))
        assert stat < 1.9495 / np.sqrt(draws.size)

    def test_trace_mean(self):
        # E tr(T T*) = n(n-1)(1+theta)/2 + b n, summing entry variances
        n, theta, b = 64, 2.0, 0.5
        traces = []
        for k in range(100):
            t = en.sample_triangular(params(n=n, theta=theta, b=b, seed=4), trial=k)
            traces.append(np.sum(np.abs(t) ** 2))
        traces = np.asarray(traces)
        expected = n * (n - 1) * (1 + theta) / 2 + b * n
        se = traces.std(ddof=1) / np.sqrt(len(traces))
        assert abs(traces.mean() - expected) <= 3 * se

    def test_deterministic(self):
        a = en.sample_triangular(params(seed=123), trial=7)
        b = en.sample_triangular(params(seed=123), trial=7)
        assert np.array_equal(a, b)
        c = en.sample_triangular(params(seed=123), trial=8)
        assert not np.array_equal(a, c)


class TestEigenvaluesPsd:
    def test_identity(self):
        assert np.allclose(en.eigenvalues_psd(np.eye(5)), np.ones(5))

    def test_analytic_2x2(self):
        w = en.eigenvalues_psd(np.array([[2.0, 1.0], [1.0, 2.0]]))
        assert np.allclose(w, [1.0, 3.0])

    def test_trace_identities(self):
        rng = np.random.default_rng(2)
        a = rng.normal(size=(40, 40)) + 1j * rng.normal(size=(40, 40))
        h = a @ a.conj().T
        h = 0.5 * (h + h.conj().T)
        w = en.eigenvalues_psd(h)
        tr = np.trace(h).real
        assert abs(w.sum() - tr) <= 1e-9 * (1 + abs(tr))
        fro2 = np.linalg.norm(h, "fro") ** 2
        assert abs((w ** 2).sum() - fro2) <= 1e-9 * (1 + fro2)

    def test_eigenpair_residuals(self):
        rng = np.random.default_rng(3)
        a = rng.normal(size=(30, 30)) + 1j * rng.normal(size=(30, 30))
        h = a + a.conj().T
        w, v = np.linalg.eigh(h)
        assert np.allclose(en.eigenvalues_psd(h), w)
        res = np.linalg.norm(h @ v - v * w, axis=0)
        assert res.max() <= 1e-10 * np.linalg.norm(h)

    def test_rejects_non_hermitian(self):
        with pytest.raises(ValueError):
            en.eigenvalues_psd(np.array([[0.0, 1.0], [0.0, 0.0]]))
        with pytest.raises(ValueError):
            en.eigenvalues_psd(np.ones((2, 3)))

    def test_ascending(self):
        rng = np.random.default_rng(4)
        h = np.diag(rng.uniform(0, 5, 20))
        assert np.all(np.diff(en.eigenvalues_psd(h)) >= 0)


class TestSampleSpectrum:
    def test_n_equals_one_is_exponential(self):
        draws = np.array([
            en.sample_spectrum(params(n=1, seed=5), trial=k).points[0]
            for k in range(3000)])
        stat, _ = kstest(draws, "expon")
        assert stat < 1.9495 / np.sqrt(draws.size)

    def test_all_nonnegative_and_sorted(self):
        s = en.sample_spectrum(params(n=128, theta=0.5, b=2.0, seed=6))
        assert np.all(s.points >= 0)
        assert np.all(np.diff(s.points) >= 0)

    def test_trace_identity(self):
        p = params(n=96, theta=0.5, b=2.0, seed=1)
        t = en.sample_triangular(p, trial=3)
        lam = en.sample_spectrum(p, trial=3).points * p.n
        tr = np.sum(np.abs(t) ** 2)
        assert abs(lam.sum() - tr) <= 1e-9 * (1 + tr)

    def test_reproducible(self):
        a = en.sample_spectrum(params(seed=44), trial=2).points
        b = en.sample_spectrum(params(seed=44), trial=2).points
        assert np.array_equal(a, b)

    @pytest.mark.parametrize("theta,b", [(0.0, 1.0), (1.0, 1.0), (2.0, 0.5)])
    def test_first_moment_scaling(self, theta, b):
        n, trials = 128, 100
        p = params(n=n, theta=theta, b=b, seed=3)
        m1 = np.array([en.sample_spectrum(p, k).points.mean()
                       for k in range(trials)])
        expected = ((1 + theta) * (n - 1) / 2 + b) / n
        se = m1.std(ddof=1) / np.sqrt(trials)
        assert abs(m1.mean() - expected) <= 3 * se

    def test_second_moment_near_dh(self):
        p = params(n=128, seed=12)
        m2 = np.mean([np.mean(en.sample_spectrum(p, k).points ** 2)
                      for k in range(30)])
        assert abs(m2 - 2.0 / 3.0) / (2.0 / 3.0) <= 0.05


class TestLargestParticle:
    def test_trivial(self):
        assert en.largest_particle(EmpiricalMeasure([0.1, 0.5, 0.3])) == 0.5
        assert en.largest_particle(EmpiricalMeasure([0.7])) == 0.7

    def test_empty(self):
        with pytest.raises(ValueError):
            en.largest_particle(EmpiricalMeasure([]))

    def test_near_e_at_moderate_n(self):
        p = params(n=256, seed=15)
        xs = [en.largest_particle(en.sample_spectrum(p, k)) for k in range(10)]
        assert np.e - 0.35 <= np.median(xs) <= np.e + 0.2


def test_weak_convergence_to_dh():
    law = dh_law.default_law()
    target = EmpiricalMeasure(law.quantile((np.arange(2000) + 0.5) / 2000))
    medians = []
    for n in (64, 128, 256, 512):
        p = params(n=n, seed=7)
        w1s = [w1_distance(en.sample_spectrum(p, k), target) for k in range(9)]
        medians.append(np.median(w1s))
    assert all(medians[k + 1] < medians[k] for k in range(3))


def test_parallel_spectra_match_serial():
    p = params(n=48, seed=31)
    serial = [en.sample_spectrum(p, k).points for k in range(6)]
    parallel = [m.points for m in en.sample_spectra(p, 6, max_workers=3)]
    for a, b in zip(serial, parallel):
        assert np.array_equal(a, b)


def test_thread_count_env(monkeypatch):
    monkeypatch.setenv("BIORTHO_THREADS", "3")
    assert en.thread_count() == 3
    monkeypatch.setenv("BIORTHO_THREADS", "")
    assert en.thread_count() >= 1
