import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from superlab.numerics import (
    DomainError,
    LogComplex,
    canonical_phase,
    composite_rule,
    hermite_function,
    hermite_function_table,
    hermite_log,
    hermite_log_sequence,
    legendre_P,
    legendre_P_derivs,
    log_binomial,
    quadrature,
)

from oracles import hermite_exact, hermite_function_oracle, log_abs_fraction, log_binomial_exact

# Frozen from tests/oracles.py (exact integers / rationals, 40-60 digit logs).
LOG_C_1000_500 = 689.4672615678512
LOG_H500_HALF = 1477.4041521819368  # H_500(0.5) < 0
PSI_100_AT_1P3 = 0.19170594356310258


class TestLogComplex:
    def test_roundtrip(self):
        for z in [1 + 2j, -3.5, 1e-200j, -7.25 - 1e5j]:
            lc = LogComplex.from_complex(z)
            assert abs(lc.to_complex() - z) <= 1e-12 * abs(z)

    def test_zero_absorbs_multiplication(self):
        z = LogComplex.zero() * LogComplex(5.0, 1.0)
        assert z.is_zero and z.to_complex() == 0

    def test_multiplication_adds_fields(self):
        p = LogComplex(2.0, 3.0) * LogComplex(1.5, 1.0)
        assert p.log_mag == 3.5
        assert p.phase == pytest.approx(4.0 - 2 * math.pi)

    def test_addition_far_apart_returns_larger(self):
        big = LogComplex(1000.0, 0.3)
        small = LogComplex(100.0, -2.0)
        s = big + small
        assert s.log_mag == big.log_mag and s.phase == big.phase
        s = small + big
        assert s.log_mag == big.log_mag and s.phase == big.phase

    def test_huge_magnitudes(self):
        a = LogComplex(3000.0, 0.0)
        b = LogComplex(3000.0 + math.log(2.0), math.pi)
        s = a + b  # e^3000 - 2 e^3000
        assert s.log_mag == pytest.approx(3000.0, abs=1e-12)
        assert abs(s.phase) == pytest.approx(math.pi)

    def test_sum_factors_max(self):
        terms = [LogComplex(3000.0 + math.log(k), 0.0) for k in range(1, 5)]
        assert LogComplex.sum(terms).log_mag == pytest.approx(3000.0 + math.log(10.0))

    def test_phase_canonical(self):
        for p in [math.pi, -math.pi, 3 * math.pi, 7.0, -7.0, 0.0]:
            q = canonical_phase(p)
            assert -math.pi < q <= math.pi
            assert math.cos(q) == pytest.approx(math.cos(p))
        assert canonical_phase(-math.pi) == pytest.approx(math.pi)

    def test_random_pairs_match_native(self):
        rng = np.random.default_rng(7)
        mags = rng.uniform(-50, 50, size=(2, 10_000))
        phs = rng.uniform(-math.pi, math.pi, size=(2, 10_000))
        a = LogComplex(mags[0], phs[0])
        b = LogComplex(mags[1], phs[1])
        za, zb = a.to_complex(), b.to_complex()
        prod = (a * b).to_complex()
        assert np.all(np.abs(prod - za * zb) <= 1e-10 * np.abs(za * zb))
        tot = (a + b).to_complex()
        ref = za + zb
        # relative to the operands: the sum may itself cancel
        assert np.all(np.abs(tot - ref) <= 1e-10 * (np.abs(za) + np.abs(zb)))

    @given(st.floats(-50, 50), st.floats(-3, 3), st.floats(-50, 50), st.floats(-3, 3))
    def test_division_inverts_multiplication(self, m1, p1, m2, p2):
        a, b = LogComplex(m1, p1), LogComplex(m2, p2)
        q = (a * b) / b
        assert q.log_mag == pytest.approx(a.log_mag, abs=1e-9)
        assert math.cos(q.phase - a.phase) == pytest.approx(1.0)


class TestLogBinomial:
    def test_small(self):
        assert log_binomial(4, 2) == pytest.approx(math.log(6), rel=1e-14)
        assert log_binomial(0, 0) == 0.0

    def test_against_big_integer_oracle(self):
        assert log_binomial(1000, 500) == pytest.approx(LOG_C_1000_500, rel=1e-12)
        assert log_binomial(1000, 500) == pytest.approx(log_binomial_exact(1000, 500), rel=1e-12)

    def test_large_N(self):
        N = 10**6
        assert log_binomial(N, 12345) == pytest.approx(log_binomial_exact(N, 12345), rel=1e-12)

    def test_domain(self):
        with pytest.raises(DomainError):
            log_binomial(3, 4)


class TestHermite:
    def test_trivial(self):
        assert hermite_log(0, 0.7).to_complex() == pytest.approx(1.0)
        assert hermite_log(2, 0.5).to_complex().real == pytest.approx(-1.0)

    def test_large_order_against_rational_oracle(self):
        h = hermite_log(500, 0.5)
        assert h.log_mag == pytest.approx(LOG_H500_HALF, rel=1e-10)
        assert abs(h.phase) == pytest.approx(math.pi)

    @pytest.mark.parametrize("n,z", [(2000, 0.5), (2000, 37.3), (1500, -12.25), (800, 50.0)])
    def test_against_oracle(self, n, z):
        exact = hermite_exact(n, z)
        h = hermite_log(n, z)
        assert h.log_mag == pytest.approx(log_abs_fraction(exact), abs=1e-10)
        assert (exact < 0) == (abs(h.phase) > 1)

    def test_recurrence_residual(self):
        z = 0.5
        logs, signs = hermite_log_sequence(2000, z)
        with mpmath.workdps(40):
            H = [s * mpmath.exp(mpmath.mpf(l)) for l, s in zip(logs, signs)]
            worst = 0.0
            for n in range(1, 2000):
                r = abs(H[n + 1] - 2 * z * H[n] + 2 * n * H[n - 1]) / abs(H[n + 1])
                worst = max(worst, float(r))
        assert worst < 1e-9

    def test_vectorized(self):
        z = np.array([-1.0, 0.0, 2.0])
        h = hermite_log(3, z)  # 8z^3 - 12z
        np.testing.assert_allclose(h.to_complex().real, 8 * z**3 - 12 * z, atol=1e-12)


class TestHermiteFunction:
    def test_trivial(self):
        assert hermite_function(0, 0.0) == pytest.approx(math.pi ** -0.25, rel=1e-15)
        assert hermite_function(1, 0.0) == 0.0

    def test_against_log_domain_product(self):
        assert hermite_function(100, 1.3) == pytest.approx(PSI_100_AT_1P3, rel=1e-11)
        assert hermite_function(37, -2.1) == pytest.approx(hermite_function_oracle(37, -2.1), rel=1e-11)

    def test_no_overflow_high_order(self):
        v = hermite_function(100_000, 300.0)
        assert np.isfinite(v)
        m, s = hermite_function_table(2000, np.array([0.0, 45.0, 90.0]))
        assert np.all(np.isfinite(m)) and np.all(np.isfinite(s))

    def test_orthonormality(self):
        rule = composite_rule(-40.0, 40.0, 50)
        m, s = hermite_function_table(50, rule.nodes)
        psi = m * np.exp(s)
        gram = (psi * rule.weights) @ psi.T
        np.testing.assert_allclose(gram, np.eye(51), atol=1e-12)

    @given(st.integers(0, 200), st.floats(-20, 20))
    @settings(max_examples=60)
    def test_parity(self, n, y):
        assert hermite_function(n, -y) == (-1) ** n * hermite_function(n, y)


class TestLegendre:
    def test_trivial(self):
        assert legendre_P(0, 0.3) == 1.0
        assert legendre_P(1, -0.4) == -0.4
        assert legendre_P(2, 0.5) == pytest.approx(-0.125, rel=1e-15)

    def test_against_scipy(self):
        from scipy.special import eval_legendre

        u = np.linspace(-1, 1, 101)
        for l in [5, 37, 100]:
            ref = eval_legendre(l, u)
            got = legendre_P(l, u)
            np.testing.assert_allclose(got, ref, rtol=1e-12, atol=1e-13)

    def test_derivatives_against_polynomial(self):
        u = np.linspace(-0.9, 0.9, 7)
        P, dP, ddP = legendre_P_derivs(3, u)  # (5u^3 - 3u)/2
        np.testing.assert_allclose(P, (5 * u**3 - 3 * u) / 2, atol=1e-14)
        np.testing.assert_allclose(dP, (15 * u**2 - 3) / 2, atol=1e-14)
        np.testing.assert_allclose(ddP, 15 * u, atol=1e-13)

    def test_domain(self):
        with pytest.raises(DomainError):
            legendre_P(2, 1.5)


class TestQuadrature:
    def test_examples(self):
        assert quadrature(2, -1, 1).integrate(lambda u: u**2) == pytest.approx(2 / 3, rel=1e-14)
        assert quadrature(32, 0, math.pi).integrate(np.sin) == pytest.approx(2.0, abs=1e-12)
        assert quadrature(8, -1, 1).integrate(np.ones_like) == pytest.approx(2.0, rel=1e-14)

    @pytest.mark.parametrize("order", [3, 6, 11])
    def test_polynomial_exactness(self, order):
        rng = np.random.default_rng(order)
        a, b = -0.7, 2.3
        rule = quadrature(order, a, b)
        deg = min(2 * order - 1, 20)
        coef = rng.normal(size=deg + 1)
        poly = np.polynomial.Polynomial(coef)
        exact = poly.integ()(b) - poly.integ()(a)
        assert rule.integrate(poly) == pytest.approx(exact, rel=1e-12)

    def test_domain(self):
        with pytest.raises(DomainError):
            quadrature(4, 1.0, 1.0)
