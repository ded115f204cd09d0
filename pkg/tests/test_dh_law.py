"""Dykema-Haagerup law: density, CDF/quantile, moments, transforms.

The CDF tests use an independent closed-form oracle derived from the
trigonometric parametrization of the cut branch: with w = -v*cot(v) + i*v,
the point x(v) = sin(v) * exp(v*cot(v)) / v sweeps (0, e) as v runs down
from pi to 0, the density there is sin(v)^2 / (pi * v * x), and
integrating density * dx/dv gives the primitive in closed form,

    CDF(x(v)) = 1 - v/pi + sin(v)^2 / (pi * v).

None of this shares code with the quadrature path under test.
"""

import numpy as np
import pytest
import scipy.integrate
import scipy.special

from biortho import dh_law


def oracle_v(x):
    """Invert x(v) = sin(v) exp(v cot v)/v by bisection (x decreasing in v)."""
    lo, hi = 1e-12, np.pi - 1e-9
    for _ in range(200):
        v = 0.5 * (lo + hi)
        xv = np.sin(v) * np.exp(v * np.cos(v) / np.sin(v)) / v
        if xv > x:
            lo = v
        else:
            hi = v
    return 0.5 * (lo + hi)


def oracle_cdf(x):
    v = oracle_v(x)
    return 1.0 - v / np.pi + np.sin(v) ** 2 / (np.pi * v)


@pytest.fixture(scope="module")
def law():
    return dh_law.default_law()


class TestDensity:
    def test_support_edges(self):
        assert dh_law.dh_density(np.e) == 0.0
        assert dh_law.dh_density(3.0) == 0.0
        assert dh_law.dh_density(0.0) == 0.0
        assert dh_law.dh_density(-1.0) == 0.0

    def test_value_at_one_vs_independent_root_solve(self):
        # (1/pi) Im exp(w) where w solves w e^w = -1 in the upper strip,
        # via scipy's Lambert W (independent implementation)
        w = scipy.special.lambertw(-1.0 + 0j)
        expected = float(np.imag(np.exp(w)) / np.pi)
        assert abs(expected - 0.2253) < 1e-3
        assert abs(dh_law.dh_density(1.0) - expected) < 1e-12

    def test_positive_inside(self):
        x = np.linspace(1e-6, np.e - 1e-9, 1000)
        d = dh_law.dh_density(x)
        assert np.all(d > 0)

    def test_parametrization_oracle(self):
        for x in (0.01, 0.3, 1.7, 2.5):
            v = oracle_v(x)
            expected = np.sin(v) ** 2 / (np.pi * v * x)
            assert abs(dh_law.dh_density(x) - expected) < 1e-10


class TestCdfQuantile:
    def test_edges(self, law):
        assert law.cdf(0.0) == 0.0
        assert abs(law.cdf(np.e) - 1.0) <= 1e-8
        assert abs(law.cdf(5.0) - 1.0) <= 1e-8

    def test_monotone(self, law):
        x = np.linspace(0.0, np.e, 400)
        c = law.cdf(x)
        assert np.all(np.diff(c) >= 0)

    def test_two_resolutions_agree(self):
        coarse = dh_law.DHLaw(mesh=24)
        fine = dh_law.DHLaw(mesh=40)
        assert abs(coarse.cdf(1.0) - fine.cdf(1.0)) <= 1e-8

    def test_closed_form_oracle(self, law):
        # the quadrature misses only the mass below exp(-1e9), ~1e-9
        for x in (0.001, 0.05, 0.4, 1.0, 2.0, 2.6):
            assert abs(law.cdf(x) - oracle_cdf(x)) <= 2e-9

    def test_quantile_roundtrip(self, law):
        for p in (0.1, 0.5, 0.9):
            q = law.quantile(p)
            assert 0.0 < q < np.e
            assert abs(law.cdf(q) - p) <= 1e-8

    def test_quantile_monotone_and_inside(self, law):
        p = np.linspace(0.01, 0.99, 100)
        q = law.quantile(p)
        assert np.all(np.diff(q) > 0)
        assert q[0] > 0.0 and q[-1] < np.e
        assert law.quantile(0.999) < np.e

    def test_quantile_domain(self, law):
        for bad in (0.0, 1.0, -0.2, 1.3):
            with pytest.raises(ValueError):
                law.quantile(bad)


class TestMoments:
    @pytest.mark.parametrize("k,expected", [
        (0, 1.0), (1, 0.5), (2, 2.0 / 3.0), (3, 1.125),
        (4, 32.0 / 15.0), (5, 3125.0 / 720.0), (6, 46656.0 / 5040.0),
    ])
    def test_exact_formula(self, k, expected):
        assert abs(dh_law.dh_moment_exact(k) - expected) < 1e-15

    def test_exact_domain(self):
        with pytest.raises(ValueError):
            dh_law.dh_moment_exact(-1)

    def test_numeric_matches_exact(self, law):
        for k in range(7):
            exact = dh_law.dh_moment_exact(k)
            numeric = law.moment_numeric(k)
            assert abs(numeric - exact) <= 1e-6 * max(1.0, exact)

    def test_numeric_examples(self, law):
        assert abs(law.moment_numeric(1) - 0.5) <= 1e-6
        assert abs(law.moment_numeric(6) - 46656.0 / 5040.0) <= 1e-4

    def test_numeric_cap(self, law):
        with pytest.raises(ValueError):
            law.moment_numeric(13)


class TestStieltjes:
    def test_total_mass_asymptotics(self):
        z = 1e6j
        assert abs(dh_law.dh_stieltjes(z) - (-1.0 / z)) <= 1e-5

    def test_quadrature_oracle_at_i(self):
        # direct integral of d(mu)/(x - i) over the three smooth charts,
        # sharing only the density evaluator with the closed form under test
        from biortho import special
        z = 1j

        def in_t(t):
            # density(x) * x stays bounded where density alone overflows
            w = special.lambert_w0_cut_above_log(np.atleast_1d(t))[0]
            rho = np.exp(w.real - t) * np.sin(w.imag) / np.pi
            with np.errstate(under="ignore"):
                x = np.exp(-t)
            return rho / (x - z)

        def in_x(x):
            return dh_law.dh_density(x) / (x - z)

        def in_s(s):
            x = np.e - s * s
            return dh_law.dh_density(x) * 2.0 * s / (x - z)

        total = 0j
        for fn, lo, hi in ((in_t, np.log(10.0), np.inf),
                           (in_x, 0.1, 2.0),
                           (in_s, 0.0, np.sqrt(np.e - 2.0))):
            re = scipy.integrate.quad(lambda u: fn(u).real, lo, hi, limit=400)[0]
            im = scipy.integrate.quad(lambda u: fn(u).imag, lo, hi, limit=400)[0]
            total += re + 1j * im
        assert abs(dh_law.dh_stieltjes(z) - total) <= 1e-6

    def test_boundary_inversion(self):
        x = np.linspace(0.1, np.e - 0.1, 50)
        s = dh_law.dh_stieltjes(x + 1e-6j)
        recovered = s.imag / np.pi
        assert np.max(np.abs(recovered - dh_law.dh_density(x))) <= 1e-3

    def test_domain(self):
        for z in (1.0 + 0j, 1.0 - 1j):
            with pytest.raises(ValueError):
                dh_law.dh_stieltjes(z)


class TestRTransform:
    def test_limit_at_zero_is_first_moment(self):
        # series oracle: the limit must equal moment 1 = 1/2
        for z in (1e-5, 1e-7, 1e-5j):
            assert abs(dh_law.dh_r_transform(z) - 0.5) < 1e-4
        assert abs(dh_law.dh_r_transform(1e-8) - dh_law.dh_moment_exact(1)) < 1e-7

    def test_hand_value_at_half(self):
        expected = 2.0 / np.log(2.0) - 2.0
        assert abs(dh_law.dh_r_transform(0.5) - expected) < 1e-14

    def test_real_in_real_out(self):
        for z in (0.1, 0.5, 0.9, -0.5):
            val = dh_law.dh_r_transform(z)
            assert isinstance(val, float)

    def test_series_formula_crossover(self):
        # the series region must agree with direct evaluation where both work
        for z in (9e-4, 2e-3, 9e-4 * 1j):
            direct = -1.0 / ((1.0 - z) * np.log(1.0 - z)) - 1.0 / z
            assert abs(dh_law.dh_r_transform(z) - direct) < 1e-9

    def test_domain(self):
        with pytest.raises(ValueError):
            dh_law.dh_r_transform(0.0)
        with pytest.raises(ValueError):
            dh_law.dh_r_transform(1.0)
        with pytest.raises(ValueError):
            dh_law.dh_r_transform(1.2j)


def test_law_invariants(law):
    assert law.total_mass == pytest.approx(1.0, abs=1e-8)
    x = np.linspace(0.0, np.e, 257)
    c = law.cdf(x)
    assert np.all(np.diff(c) >= 0)
    assert law.mesh_parameter >= 4
