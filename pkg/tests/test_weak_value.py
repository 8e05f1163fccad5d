import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from superlab.numerics import PreconditionError, SingularityError, composite_rule
from superlab.weak_value import (
    angular_momentum_sq_operator,
    detect_super_regions,
    evaluator,
    finite_difference_evaluator,
    flag_profile,
    generating_function,
    legendre_state,
    local_wavenumber,
    momentum_operator,
    oscillator_hamiltonian,
    oscillator_state,
    plane_wave_state,
    spectral_expectation,
    spectral_operator,
    sum_rule_check,
    supergrowth_rate,
    superoscillating_state,
    weak_value_field,
)


def _non_nodal(ev, x, frac=1e-3):
    a = np.abs(ev.value(x))
    return x[a > frac * a.max()]


class TestEigenstates:
    @pytest.mark.parametrize("n", range(11))
    def test_oscillator_fixed_point(self, n):
        st_ = oscillator_state([n], [1.0])
        ev = evaluator(st_)
        x = _non_nodal(ev, np.linspace(-5, 5, 151))
        prof = weak_value_field(oscillator_hamiltonian(1.0), ev, x)
        np.testing.assert_allclose(prof.real, n + 0.5, rtol=1e-8)
        assert not prof.super_flags.any()

    @pytest.mark.parametrize("l", [0, 1, 4])
    def test_legendre_fixed_point(self, l):
        ev = evaluator(legendre_state([l], [1.0]))
        theta = _non_nodal(ev, np.linspace(0.05, math.pi - 0.05, 120))
        prof = weak_value_field(angular_momentum_sq_operator(), ev, theta)
        np.testing.assert_allclose(prof.real, l * (l + 1), rtol=1e-8, atol=1e-8)

    def test_plane_wave_momentum(self):
        ev = evaluator(plane_wave_state([3.0], [2 - 1j]))
        prof = weak_value_field(momentum_operator(), ev, np.linspace(-3, 3, 50))
        np.testing.assert_allclose(prof.values, 3.0, rtol=1e-12)


class TestSuperoscillation:
    def test_local_wavenumber_at_origin(self):
        # (cos(x/N) + i a sin(x/N))^N has local wavenumber a at x = 0.  The sum
        # cancels by a factor a^N, which bounds the attainable accuracy.
        ev = evaluator(superoscillating_state(2.0, 10))
        assert local_wavenumber(ev, np.array([0.0]))[0] == pytest.approx(2.0, rel=1e-10)
        ev = evaluator(superoscillating_state(3.0, 20))
        assert local_wavenumber(ev, np.array([0.0]))[0] == pytest.approx(3.0, rel=1e-5)

    def test_super_region_flagged_and_detected(self):
        state = superoscillating_state(3.0, 20)
        ev = evaluator(state)
        x = np.linspace(-10, 10, 401)
        prof = weak_value_field(momentum_operator(), ev, x)
        regions = detect_super_regions(prof)
        assert any(lo < 0 < hi for lo, hi in regions)
        assert state.bounds == (-1.0, 1.0)

    def test_supergrowth_is_imaginary_weak_value(self):
        ev = evaluator(superoscillating_state(2.0, 10))
        x = np.linspace(0.5, 4.0, 9)
        prof = weak_value_field(momentum_operator(), ev, x)
        # Im(-i psi'/psi) = -Re(psi'/psi)
        np.testing.assert_allclose(prof.imag, -supergrowth_rate(ev, x), rtol=1e-12, atol=1e-14)

    def test_finite_difference_matches_spectral(self):
        ev = evaluator(superoscillating_state(2.0, 10))
        fd = finite_difference_evaluator(ev.value, h=1e-4)
        x = np.linspace(-2, 2, 11)
        np.testing.assert_allclose(fd.d1(x), ev.d1(x), rtol=1e-6)
        np.testing.assert_allclose(fd.d2(x), ev.d2(x), rtol=1e-5)
        assert fd.derivative_kind == "finite_difference"


class TestSingularities:
    def test_node_is_nan_and_not_super(self):
        ev = evaluator(oscillator_state([1], [1.0]))
        prof = weak_value_field(oscillator_hamiltonian(1.0), ev, np.array([-1.0, 0.0, 1.0]))
        assert prof.singular_flags.tolist() == [False, True, False]
        assert np.isnan(prof.values[1].real) and np.isnan(prof.values[1].imag)
        assert not prof.super_flags[1]

    def test_wavenumber_nan_at_zero(self):
        ev = evaluator(plane_wave_state([1.0, -1.0], [1.0, -1.0]))  # 2i sin x
        k = local_wavenumber(ev, np.array([0.0, 1.0]))
        assert np.isnan(k[0]) and np.isfinite(k[1])

    def test_band_edges_not_super(self):
        prof = flag_profile([0, 1, 2], np.array([0.0, 2.0 + 1e-12, 2.1]), (0.0, 2.0),
                            np.zeros(3, dtype=bool))
        assert prof.super_flags.tolist() == [False, False, True]


class TestSpectralOperator:
    def test_matches_hamiltonian_on_oscillator_state(self):
        st_ = oscillator_state([0, 3, 7], [1.0, 0.5j, -0.25])
        ev = evaluator(st_)
        x = np.linspace(-3, 3, 31)
        a = spectral_operator(st_)(ev, x)
        b = oscillator_hamiltonian(1.0)(ev, x)
        np.testing.assert_allclose(a, b, rtol=1e-10, atol=1e-12)


def _random_state(rng, basis):
    k = int(rng.integers(2, 6))
    coeffs = rng.normal(size=k) + 1j * rng.normal(size=k)
    if basis == "oscillator":
        return oscillator_state(sorted(rng.choice(12, size=k, replace=False)), coeffs), \
            oscillator_hamiltonian(1.0), composite_rule(-15.0, 15.0, 60)
    if basis == "plane_wave":
        ks = sorted(rng.choice(np.arange(-6, 7), size=k, replace=False))
        return plane_wave_state(ks, coeffs), momentum_operator(), \
            composite_rule(-math.pi, math.pi, 60)
    return legendre_state(sorted(rng.choice(8, size=k, replace=False)), coeffs), \
        angular_momentum_sq_operator(), composite_rule(0.0, math.pi, 80)


class TestSumRule:
    @pytest.mark.parametrize("seed,basis", [(1, "oscillator"), (2, "plane_wave"),
                                            (3, "legendre_m0")])
    def test_random_states(self, seed, basis):
        rng = np.random.default_rng(seed)
        for _ in range(10):
            state, op, rule = _random_state(rng, basis)
            prof = weak_value_field(op, evaluator(state), rule.nodes)
            lhs, rhs = sum_rule_check(state, prof, rule)
            assert lhs == pytest.approx(rhs, rel=1e-6, abs=1e-9)

    def test_rejects_partial_period(self):
        state = plane_wave_state([1, 2], [1, 1])
        rule = composite_rule(0.0, 1.0, 20)
        prof = weak_value_field(momentum_operator(), evaluator(state), rule.nodes)
        with pytest.raises(PreconditionError):
            sum_rule_check(state, prof, rule)

    def test_rejects_truncated_oscillator_norm(self):
        state = oscillator_state([0, 10], [1, 1])
        rule = composite_rule(-1.0, 1.0, 40)
        prof = weak_value_field(oscillator_hamiltonian(1.0), evaluator(state), rule.nodes)
        with pytest.raises(PreconditionError):
            sum_rule_check(state, prof, rule)

    def test_spectral_expectation_mean_of_eigenvalues(self):
        assert spectral_expectation(oscillator_state([0, 2], [1, 1j])) == pytest.approx(1.5)
        # Legendre weights carry 4 pi/(2l+1)
        assert spectral_expectation(legendre_state([0, 1], [1, 1])) == pytest.approx(0.5)


class TestGeneratingFunction:
    def test_weak_value_at_origin(self):
        state = plane_wave_state([-1.0, 1.0], [1.0, 1.0])
        overlaps = [1.0, -0.9]
        z, freq = generating_function(state, overlaps, [0.0, 0.3])
        a = np.array([1.0, -0.9])
        weak = (a * np.array([-1.0, 1.0])).sum() / a.sum()
        assert z[0] == pytest.approx(1.0)
        assert freq[0] == pytest.approx(weak)
        assert abs(freq[0]) > 1  # outside the band [-1, 1]

    def test_orthogonal_postselection(self):
        state = plane_wave_state([-1.0, 1.0], [1.0, 1.0])
        with pytest.raises(SingularityError):
            generating_function(state, [1.0, -1.0], [0.0])


@settings(max_examples=40, deadline=None)
@given(st.lists(st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False),
                min_size=1, max_size=5),
       st.floats(-2.5, 2.5))
def test_global_phase_invariance(coeffs, x):
    if max(abs(c) for c in coeffs) < 1e-3:
        return
    ns = list(range(len(coeffs)))
    a = evaluator(oscillator_state(ns, coeffs))
    b = evaluator(oscillator_state(ns, [1j * c for c in coeffs]))
    op = oscillator_hamiltonian(1.0)
    pa = weak_value_field(op, a, [x])
    pb = weak_value_field(op, b, [x])
    if pa.singular_flags[0] or abs(a.value(np.array([x]))[0]) < 1e-6:
        return
    assert pa.values[0] == pytest.approx(pb.values[0], rel=1e-8, abs=1e-8)
