"""Time evolution of the oscillator sequence and superoscillation in time.

All times are in units of 1/omega_0.  Exact evolution attaches the phase
``exp(-i E_n t / hbar)`` to every eigenmode and resums; the approximants
(first order in t, the resummed series and the limiting plane wave) are the
large-N forms valid for omega_N = omega_0/N^2 and |z| < g, where
``z = sqrt(m omega_0/hbar) x / N``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .numerics import (
    DomainError,
    LogComplex,
    composite_rule,
    default_quad_order,
    logsumexp_complex,
)
from .oscillator import (
    OscillatorConfig,
    Scaling,
    SequenceState,
    _require,
    build_sequence_state,
    spectral_sum,
)

__all__ = [
    "TimeEvolvedSample",
    "evolve_sample",
    "hN_time",
    "local_time_energy",
    "first_order_approx",
    "resummed_series",
    "stirling_log_prefactor",
    "plane_wave_approx",
    "superenergy_frequency",
    "phase_velocity",
    "fig5_trace",
    "fig5_deviation",
    "convergence_window",
    "full_line_rule",
    "evolved_norm",
    "average_local_time_energy",
]

# Pointwise error allowed in full-line integrals, relative to the peak |h_N|.
INTEGRAL_ATOL = 1e-11
# NaN in both parts, so .real and .imag of a singular point are NaN.
_CNAN = complex(math.nan, math.nan)


@dataclass(frozen=True, eq=False)
class TimeEvolvedSample:
    x: float
    t: float
    value: LogComplex
    local_time_energy: complex


def _physical_time(cfg: OscillatorConfig, t) -> float:
    return t / cfg.omega0


def hN_time(state: SequenceState, x, t: float) -> LogComplex:
    """``exp(-i omega_N t/2) sum_n c_n exp(-i n omega_N t) psi_n(x)``."""
    return spectral_sum(state, x, _physical_time(state.config, t))


def local_time_energy(state: SequenceState, x, t: float):
    """``i hbar d/dt ln h_N(x, t)`` from the exact spectral time derivative.

    NaN where h_N vanishes.
    """
    s, se = spectral_sum(state, x, _physical_time(state.config, t), weighted=True)
    with np.errstate(invalid="ignore", over="ignore"):
        out = np.where(s.is_zero, _CNAN,
                       np.exp((np.asarray(se.log_mag) - np.where(s.is_zero, 0.0, s.log_mag))
                              + 1j * (np.asarray(se.phase) - s.phase)))
    return complex(out) if out.ndim == 0 else out


def evolve_sample(state: SequenceState, x: float, t: float) -> TimeEvolvedSample:
    s, se = spectral_sum(state, x, _physical_time(state.config, t), weighted=True)
    return TimeEvolvedSample(float(x), float(t), s, (se / s).to_complex())


def _z(cfg: OscillatorConfig, x):
    return math.sqrt(cfg.scale) * np.asarray(x, dtype=float) / cfg.N


def first_order_approx(config: OscillatorConfig, x, t: float) -> LogComplex:
    """h_N(x, t) to first order in omega_0 t for omega_N = omega_0/N^2.

    ``e^{-z^2/2 - i omega_N t/2} [2^N w^N + (omega_0 t/N) 2^(N-1) (2z w^(N-1) - i(N-1) w^(N-2))]``
    with ``w = g + i z``, evaluated as ``2^N w^N (1 + correction)``.
    """
    _require(config, Scaling.INVERSE_N2, "first_order_approx")
    N, g = config.N, config.g
    z = _z(config, x)
    w = g + 1j * z
    corr = (t / N) * 0.5 * (2 * z / w - 1j * (N - 1) / w ** 2)
    log_total = (N * math.log(2.0) + N * np.log(w) + np.log(1 + corr)
                 - 0.5 * z * z - 0.5j * t / N ** 2)
    return LogComplex(np.real(log_total), np.imag(log_total))


def stirling_log_prefactor(N: int, n):
    """``ln(N! / ((N-2n)! N^(2n)))``; approximately ``-2 n^2 / N`` for n << N."""
    n = np.asarray(n, dtype=float)
    return gammaln(N + 1) - gammaln(N - 2 * n + 1) - 2 * n * math.log(N)


def resummed_series(config: OscillatorConfig, x, t: float, n_terms: int) -> LogComplex:
    """Large-N resummation ``e^{-z^2/2} 2^N w^N sum_n N!/(n!(N-2n)! N^2n) r^n``.

    ``r = -i omega_0 t / (2 w^2)``, ``w = g + i z``; orders n = 0..n_terms.
    """
    _require(config, Scaling.INVERSE_N2, "resummed_series")
    N, g = config.N, config.g
    if n_terms < 0 or n_terms > N // 2:
        raise DomainError(f"n_terms must lie in [0, N/2]; got {n_terms} for N={N}")
    z = _z(config, x)
    w = g + 1j * z
    n = np.arange(n_terms + 1)
    log_pref = stirling_log_prefactor(N, n) - gammaln(n + 1)
    if t == 0:
        log_r = np.full(np.shape(w), -np.inf + 0j)
    else:
        log_r = np.log(-1j * t / (2 * w ** 2))
    log_terms = log_pref.reshape((-1,) + (1,) * np.ndim(w)) + np.multiply.outer(n, log_r)
    with np.errstate(invalid="ignore"):
        # 0 * -inf for the n = 0 term when t = 0
        log_terms = np.where(np.isnan(log_terms), 0.0, log_terms)
    L, P = logsumexp_complex(log_terms.real, log_terms.imag, axis=0)
    base = N * math.log(2.0) + N * np.log(w) - 0.5 * z * z
    return LogComplex(np.real(base) + L, np.imag(base) + P)


def plane_wave_approx(config: OscillatorConfig, x, t: float) -> LogComplex:
    """``(2g)^N exp(-z^2/2 + i z N/g - i omega_0 t/(2 g^2))``.

    Accurate only for |z| < g and |t| < 2 g^2 / omega_0; outside that range
    a warning is issued.
    """
    N, g = config.N, config.g
    z = _z(config, x)
    if np.any(np.abs(z) >= g) or abs(t) >= 2 * g * g:
        warnings.warn("plane-wave approximant used outside |z| < g, |t| < 2g^2/omega_0",
                      stacklevel=2)
    return LogComplex(N * math.log(2 * g) - 0.5 * z * z, z * N / g - t / (2 * g * g))


def superenergy_frequency(config: OscillatorConfig) -> float:
    """omega_0 / (2 g^2): the time frequency of the limiting plane wave."""
    return config.omega0 / (2 * config.g ** 2)


def phase_velocity(config: OscillatorConfig) -> float:
    return math.sqrt(config.hbar * config.omega0 / config.mass) / (2 * config.g)


def fig5_trace(config: OscillatorConfig, t_grid) -> np.ndarray:
    """h_N(0, t) / h_N(0, 0) with the exact normalization h_N(0, 0) = (2g)^N."""
    _require(config, Scaling.INVERSE_N2, "fig5_trace")
    state = build_sequence_state(config)
    ref = config.N * math.log(2 * config.g)
    out = []
    for t in np.asarray(t_grid, dtype=float):
        h = hN_time(state, 0.0, float(t))
        out.append(np.exp(h.log_mag - ref + 1j * h.phase))
    return np.array(out, dtype=complex)


def fig5_deviation(config: OscillatorConfig, t_grid, trace=None) -> np.ndarray:
    """|trace - exp(-i t/(2g^2))| on ``t_grid``."""
    t = np.asarray(t_grid, dtype=float)
    if trace is None:
        trace = fig5_trace(config, t)
    return np.abs(trace - np.exp(-1j * superenergy_frequency(config) / config.omega0 * t))


def convergence_window(config: OscillatorConfig, t_grid, threshold: float = 0.05) -> float:
    """Largest |t| up to which the deviation from the plane wave stays below ``threshold``.

    The grid is visited in order of increasing |t|; returns the last |t| before
    the first exceedance, or the largest |t| if there is none.
    """
    t = np.asarray(t_grid, dtype=float)
    order = np.argsort(np.abs(t), kind="stable")
    dev = fig5_deviation(config, t[order])
    over = np.flatnonzero(dev > threshold)
    if over.size == 0:
        return float(abs(t[order][-1]))
    if over[0] == 0:
        return 0.0
    return float(abs(t[order][over[0] - 1]))


# -- integrals over the whole line -------------------------------------------

def full_line_rule(config: OscillatorConfig, order: int | None = None):
    """Composite Gauss-Legendre rule in x covering every eigenmode n <= N.

    The rule extends ten oscillator lengths past the classical turning point
    of the top level, sqrt(2N+1), with ``order`` nodes per oscillator length.
    """
    order = order or default_quad_order()
    ymax = math.sqrt(2 * config.N + 1) + 10.0
    rule = composite_rule(-ymax, ymax, order)
    a = config.alpha
    return rule.nodes / a, rule.weights / a


def evolved_norm(state: SequenceState, t: float, order: int | None = None) -> LogComplex:
    """``int |h_N(x, t)|^2 dx`` as a log value (phase 0)."""
    x, w = full_line_rule(state.config, order)
    h = spectral_sum(state, x, _physical_time(state.config, t), atol=INTEGRAL_ATOL)
    log_d = 2 * np.asarray(h.log_mag)
    m = np.max(log_d)
    return LogComplex(m + math.log(np.sum(w * np.exp(log_d - m))))


def average_local_time_energy(state: SequenceState, t: float, order: int | None = None) -> float:
    """|h|^2-weighted spatial average of Re of the local time energy."""
    x, w = full_line_rule(state.config, order)
    s, se = spectral_sum(state, x, _physical_time(state.config, t), weighted=True,
                         atol=INTEGRAL_ATOL)
    log_d = 2 * np.asarray(s.log_mag)
    m = np.max(log_d)
    dens = w * np.exp(log_d - m)
    # |h|^2 Re(E h / h) = Re(conj(h) * E h)
    cross = np.exp(np.asarray(s.log_mag) + np.asarray(se.log_mag) - m) * np.cos(
        np.asarray(se.phase) - np.asarray(s.phase))
    return float(np.sum(w * cross) / np.sum(dens))
