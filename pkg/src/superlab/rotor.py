"""Super total angular momentum of the two-level rigid-rotor state.

The state is ``|0,0> + c|1,0>``, i.e. ``psi(theta) = 1 + c cos(theta)`` in
terms of Legendre polynomials.  Its local L^2/hbar^2 is
``2c cos(theta) / (1 + c cos(theta))``, negative (below the band [0, 2]) for
theta past pi/2 and divergent at theta = pi when c = 1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .weak_value import (
    EPS_ZERO,
    ObservableProfile,
    angular_momentum_sq_operator,
    evaluator,
    legendre_state,
    weak_value_field,
)

__all__ = [
    "RotorState",
    "as_band_limited",
    "theta_grid",
    "local_L2",
    "local_L2_generic",
    "local_L2_profile",
    "rotor_time_phase",
    "rotor_exact_evolution",
    "rotor_local_frequency",
]


@dataclass(frozen=True)
class RotorState:
    c: float
    mass_length_sq: float = 1.0
    hbar: float = 1.0

    def __post_init__(self):
        if not np.isreal(self.c) or self.c < 0:
            raise ValueError("mixing amplitude c must be real and nonnegative")
        if self.mass_length_sq <= 0:
            raise ValueError("m a^2 must be positive")

    @property
    def frequency_unit(self) -> float:
        """hbar / (2 m a^2): the angular frequency per unit of L^2/hbar^2."""
        return self.hbar / (2 * self.mass_length_sq)


def as_band_limited(state: RotorState):
    return legendre_state([0, 1], [1.0, state.c], bounds=(0.0, 2.0))


def theta_grid(num: int) -> np.ndarray:
    """``num`` equally spaced angles in (0, pi) that stay half a step off both poles."""
    step = np.pi / num
    return (np.arange(num) + 0.5) * step


def _wavefunction(state: RotorState, theta):
    return 1.0 + state.c * np.cos(theta)


def local_L2(state: RotorState, theta, *, eps_zero: float = EPS_ZERO):
    """Closed-form local L^2/hbar^2; NaN where ``1 + c cos(theta)`` vanishes."""
    theta = np.asarray(theta, dtype=float)
    psi = _wavefunction(state, theta)
    sing = np.abs(psi) <= eps_zero * (1.0 + state.c)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(sing, np.nan, 2 * state.c * np.cos(theta) / np.where(sing, 1.0, psi))
    return float(out) if out.ndim == 0 else out


def local_L2_generic(state: RotorState, theta):
    """Local L^2/hbar^2 from the differential operator acting on Legendre terms."""
    return local_L2_profile(state, theta).real


def local_L2_profile(state: RotorState, theta) -> ObservableProfile:
    ev = evaluator(as_band_limited(state))
    return weak_value_field(angular_momentum_sq_operator(), ev, theta, (0.0, 2.0))


def rotor_time_phase(state: RotorState, theta, t):
    """Approximate local time dependence ``exp(-i t hbar/(2ma^2) * local L^2)``."""
    return np.exp(-1j * np.asarray(t) * state.frequency_unit * local_L2(state, theta))


def rotor_exact_evolution(state: RotorState, theta, t):
    """Unnormalized ``P_0 + c P_1(cos theta) exp(-i E_1 t/hbar)`` with E_0 = 0."""
    omega1 = 2 * state.frequency_unit
    return 1.0 + state.c * np.cos(theta) * np.exp(-1j * omega1 * np.asarray(t))


def rotor_local_frequency(state: RotorState, theta, t=0.0):
    """``i d/dt ln psi(theta, t)`` of the exact evolution (real part is physical)."""
    omega1 = 2 * state.frequency_unit
    e1 = state.c * np.cos(theta) * np.exp(-1j * omega1 * np.asarray(t))
    return omega1 * e1 / (1.0 + e1)
