"""Spectral versus windowed (postselected) energy of the oscillator sequence.

The spectral energy weights each level by |c_n|^2 and stays below the top
level E_N.  Conditioning on finding the particle in (-L, L) instead gives the
|h_N|^2-weighted average of the local energy, which for omega_N = omega_0/N^2
approaches the superenergy hbar omega_0/(2 g^2) as N grows, while the
probability of that postselection collapses.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .numerics import (
    DomainError,
    NumericalError,
    composite_rule,
    default_quad_order,
)
from .oscillator import (
    OscillatorConfig,
    Scaling,
    SequenceState,
    build_sequence_state,
    hN_closed,
    local_energy,
)

__all__ = [
    "EnergyReport",
    "spectral_energy",
    "energy_bound",
    "windowed_energy",
    "windowed_expectation",
    "mimicry_sweep",
]

QUAD_RTOL = 1e-8
# Extent of the full-line normalization past the top level's turning point.
TAIL_WIDTHS = 10.0


@dataclass(frozen=True)
class EnergyReport:
    """Energies are in units of hbar omega_0."""

    N: int
    g: float
    spectral_energy: float
    windowed_energy: float
    window: tuple[float, float]
    postselection_prob: float
    log_postselection_prob: float
    bound: float
    imag_residue: float = 0.0
    quad_change: float = 0.0
    scaling: str = Scaling.INVERSE_N2.value


def spectral_energy(state: SequenceState) -> float:
    """``sum |c_n|^2 E_n / sum |c_n|^2`` over n = 0..N with max-factored weights."""
    cfg = state.config
    log_w = 2 * state.log_mag
    w = np.exp(log_w - np.max(log_w))
    return float(np.sum(w * cfg.energy(np.arange(cfg.N + 1))) / np.sum(w))


def energy_bound(config: OscillatorConfig) -> float:
    """Top component energy in units of hbar omega_0: (N+1/2)/N or (N+1/2)/N^2."""
    return config.E_max / (config.hbar * config.omega0)


def _log_density(config, x):
    return 2 * np.asarray(hN_closed(config, x).log_mag)


def _window_integrals(config: OscillatorConfig, L: float, order: int):
    """Log of the window norm and the |h|^2-weighted local energy (shifted by the same max)."""
    a = config.alpha
    rule = composite_rule(-a * L, a * L, order)
    x = rule.nodes / a
    w = rule.weights / a
    log_d = _log_density(config, x)
    m = float(np.max(log_d))
    dens = w * np.exp(log_d - m)
    num = np.sum(dens * local_energy(config, x))
    den = float(np.sum(dens))
    return m + math.log(den), num / den


def _log_full_norm(config: OscillatorConfig, order: int, L: float) -> float:
    a = config.alpha
    ymax = max(math.sqrt(2 * config.N + 1) + TAIL_WIDTHS, a * L)
    rule = composite_rule(-ymax, ymax, order)
    x = rule.nodes / a
    log_d = _log_density(config, x)
    m = float(np.max(log_d))
    return m + math.log(float(np.sum(rule.weights / a * np.exp(log_d - m))))


def windowed_energy(config: OscillatorConfig, L: float, rule_order: int | None = None,
                    *, rtol: float = QUAD_RTOL) -> EnergyReport:
    """Energy conditioned on postselecting the particle inside (-L, L).

    The numerator integrand is ``|h_N|^2 * local_energy`` with the analytic
    local energy, so the conjugated left factor makes the result real up to
    a residue reported as ``imag_residue``.  The integral is repeated at
    twice ``rule_order`` nodes per oscillator length; a relative change above
    ``rtol`` raises NumericalError.
    """
    if not L > 0:
        raise DomainError("window half-width L must be positive")
    order = rule_order or default_quad_order()
    limit = config.g * math.sqrt(config.hbar * config.N / (config.mass * config.omega0))
    if L > limit:
        warnings.warn(f"L = {L} exceeds the mimicry limit g sqrt(hbar N/(m omega_0)) = {limit:.4g}",
                      stacklevel=2)
    log_win, avg = _window_integrals(config, L, order)
    _, avg2 = _window_integrals(config, L, 2 * order)
    change = abs(avg2.real - avg.real) / max(abs(avg2.real), np.finfo(float).tiny)
    if not change < rtol:
        raise NumericalError(
            f"windowed energy not converged for N={config.N}, g={config.g}, L={L}: "
            f"{avg.real!r} at order {order} vs {avg2.real!r} at {2 * order} "
            f"(relative change {change:.2e})")
    log_prob = min(0.0, log_win - _log_full_norm(config, order, L))
    unit = config.hbar * config.omega0
    state = build_sequence_state(config)
    return EnergyReport(
        N=config.N,
        g=config.g,
        spectral_energy=spectral_energy(state) / unit,
        windowed_energy=float(avg2.real) / unit,
        window=(-float(L), float(L)),
        postselection_prob=math.exp(log_prob),
        log_postselection_prob=log_prob,
        bound=energy_bound(config),
        imag_residue=abs(avg2.imag) / max(abs(avg2.real), np.finfo(float).tiny),
        quad_change=change,
        scaling=config.scaling.value,
    )


def windowed_expectation(ev, op_apply, L: float, order: int | None = None):
    """``Re int conj(psi) O psi / int |psi|^2`` over (-L, L) for any evaluator.

    Returns ``(value, imag_residue)``.
    """
    if not L > 0:
        raise DomainError("window half-width L must be positive")
    order = order or default_quad_order()
    rule = composite_rule(-L, L, order)
    psi = ev.value(rule.nodes)
    num = np.sum(rule.weights * np.conj(psi) * op_apply(ev, rule.nodes))
    den = np.sum(rule.weights * np.abs(psi) ** 2)
    return float(num.real / den), abs(num.imag) / max(abs(num.real), np.finfo(float).tiny)


def mimicry_sweep(g_values, N_max: int, L: float, *, scaling=Scaling.INVERSE_N2,
                  scale: float = 1.0, rule_order: int | None = None) -> list[EnergyReport]:
    """Reports for every g (outer) and N = 1..N_max (inner)."""
    reports = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for g in g_values:
            for N in range(1, N_max + 1):
                cfg = OscillatorConfig(N, g, scaling, scale)
                reports.append(windowed_energy(cfg, L, rule_order))
    return reports
