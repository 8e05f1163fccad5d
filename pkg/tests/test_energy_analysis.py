import math
import warnings

import numpy as np
import pytest

from superlab.energy_analysis import (
    energy_bound,
    mimicry_sweep,
    spectral_energy,
    windowed_energy,
    windowed_expectation,
)
from superlab.numerics import DomainError, NumericalError
from superlab.oscillator import OscillatorConfig, Scaling, build_sequence_state, local_energy
from superlab.weak_value import evaluator, oscillator_hamiltonian, oscillator_state


def test_spectral_energy_below_bound():
    for g in (0.3, 0.5, 1.0):
        for N in (1, 2, 10, 100):
            cfg = OscillatorConfig(N, g, Scaling.INVERSE_N2)
            e = spectral_energy(build_sequence_state(cfg)) / cfg.omega0
            assert cfg.E_min / cfg.omega0 <= e <= energy_bound(cfg)


def test_spectral_energy_single_term():
    # N = 0: only the ground state
    cfg = OscillatorConfig(0, 0.5, Scaling.INVERSE_N)
    assert spectral_energy(build_sequence_state(cfg)) == pytest.approx(0.5)


def test_bound_values():
    assert energy_bound(OscillatorConfig(100, 0.5, Scaling.INVERSE_N2)) == pytest.approx(0.01005)
    assert energy_bound(OscillatorConfig(10, 0.5, Scaling.INVERSE_N)) == pytest.approx(1.05)


def test_windowed_energy_approaches_superenergy():
    r = windowed_energy(OscillatorConfig(300, 0.5, Scaling.INVERSE_N2), 2.0)
    assert r.windowed_energy == pytest.approx(2.0, rel=0.01)
    assert r.windowed_energy > 100 * r.spectral_energy
    assert r.quad_change < 1e-8
    assert r.imag_residue < 1e-10
    assert r.log_postselection_prob < -1000
    assert r.postselection_prob == 0.0  # underflows; the log is the usable figure
    assert r.window == (-2.0, 2.0)


def test_wide_window_recovers_spectral_energy():
    cfg = OscillatorConfig(8, 0.5, Scaling.INVERSE_N2)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        r = windowed_energy(cfg, 60.0)
    assert r.windowed_energy == pytest.approx(r.spectral_energy, rel=1e-8)
    assert r.log_postselection_prob == pytest.approx(0.0, abs=1e-10)


def test_warns_past_mimicry_limit():
    with pytest.warns(UserWarning, match="mimicry limit"):
        windowed_energy(OscillatorConfig(4, 0.5, Scaling.INVERSE_N2), 2.0)


def test_unconverged_quadrature_raises():
    with pytest.raises(NumericalError):
        windowed_energy(OscillatorConfig(300, 0.5, Scaling.INVERSE_N2), 2.0, rule_order=2)


def test_invalid_window():
    with pytest.raises(DomainError):
        windowed_energy(OscillatorConfig(10, 0.5), 0.0)


def test_windowed_expectation_generic_matches_closed_form():
    cfg = OscillatorConfig(10, 0.5, Scaling.INVERSE_N2)
    seq = build_sequence_state(cfg)
    st = oscillator_state(range(11), [seq.coefficient(n) for n in range(11)], omega=cfg.omega_N)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        ref = windowed_energy(cfg, 1.5).windowed_energy * cfg.omega0
    val, resid = windowed_expectation(evaluator(st), oscillator_hamiltonian(cfg.omega_N), 1.5, 60)
    assert val == pytest.approx(ref, rel=1e-7)
    assert resid < 1e-8


def test_local_energy_parity():
    cfg = OscillatorConfig(50, 0.5, Scaling.INVERSE_N2)
    e = local_energy(cfg, np.array([-1.0, 1.0]))
    # Im is odd in x, Re even
    assert e[0].real == pytest.approx(e[1].real)
    assert e[0].imag == pytest.approx(-e[1].imag)


def test_mimicry_sweep_order():
    reports = mimicry_sweep([0.5, 1.0], 4, 1.0)
    assert [(r.g, r.N) for r in reports] == [(g, N) for g in (0.5, 1.0) for N in range(1, 5)]
    assert all(math.isfinite(r.windowed_energy) for r in reports)
