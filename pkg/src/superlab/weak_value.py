"""Local super-observables: weak values postselected on position.

A band-limited state is a finite superposition of eigenfunctions of some
observable.  Its local observable at x is ``<x|O|psi> / <x|psi>``; the real
part leaving the eigenvalue band marks superbehavior, the imaginary part of
the momentum weak value is the supergrowth rate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from .numerics import (
    LogComplex,
    PreconditionError,
    QuadratureRule,
    SingularityError,
    hermite_function_table,
    legendre_P_derivs,
    log_binomial,
)

__all__ = [
    "BASES",
    "EPS_ZERO",
    "BandLimitedState",
    "StateEvaluator",
    "ObservableProfile",
    "plane_wave_state",
    "oscillator_state",
    "legendre_state",
    "superoscillating_state",
    "evaluator",
    "finite_difference_evaluator",
    "momentum_operator",
    "hamiltonian_operator",
    "oscillator_hamiltonian",
    "angular_momentum_sq_operator",
    "spectral_operator",
    "local_wavenumber",
    "supergrowth_rate",
    "flag_profile",
    "weak_value_field",
    "spectral_expectation",
    "sum_rule_check",
    "generating_function",
    "detect_super_regions",
]

BASES = ("plane_wave", "oscillator", "legendre_m0")
EPS_ZERO = 1e-12
# Slack on the band edges so rounding of an exact eigenvalue is not "super".
BAND_RTOL = 1e-9
# NaN in both parts, so .real and .imag of a singular point are NaN.
_CNAN = complex(math.nan, math.nan)


@dataclass(frozen=True)
class BandLimitedState:
    """Finite superposition ``sum_j c_j phi_j`` with eigenvalues in ``bounds``.

    ``labels`` identify the basis functions: wavenumbers for ``plane_wave``,
    oscillator quantum numbers for ``oscillator``, Legendre degrees for
    ``legendre_m0`` (basis functions P_l(cos theta), not unit-normalized).
    """

    basis: str
    labels: tuple
    coefficients: tuple[LogComplex, ...]
    eigenvalues: tuple[float, ...]
    bounds: tuple[float, float]
    domain: tuple[float, float] = (-math.pi, math.pi)
    omega: float = 1.0
    mass: float = 1.0
    hbar: float = 1.0

    def __post_init__(self):
        if self.basis not in BASES:
            raise ValueError(f"unknown basis {self.basis!r}")
        if not self.coefficients:
            raise ValueError("coefficient list must be non-empty")
        if len(self.coefficients) != len(self.labels) or len(self.labels) != len(self.eigenvalues):
            raise ValueError("labels, coefficients and eigenvalues must have equal length")
        if all(c.is_zero for c in self.coefficients):
            raise ValueError("at least one coefficient must be nonzero")
        lo, hi = self.bounds
        tol = BAND_RTOL * max(1.0, abs(lo), abs(hi))
        if any(not (lo - tol <= lam <= hi + tol) for lam in self.eigenvalues):
            raise ValueError("every eigenvalue must lie inside the bounds")

    def scaled_coefficients(self) -> tuple[np.ndarray, float]:
        """Coefficients as complex numbers divided by ``exp(shift)``; returns (c, shift)."""
        mags = np.array([c.log_mag for c in self.coefficients])
        phases = np.array([c.phase for c in self.coefficients])
        shift = float(np.max(mags))
        return np.exp(mags - shift) * np.exp(1j * phases), shift

    def basis_norms_sq(self) -> np.ndarray:
        """Squared norms of the basis functions on their natural measure."""
        labels = np.asarray(self.labels, dtype=float)
        if self.basis == "legendre_m0":
            return 4 * np.pi / (2 * labels + 1)
        if self.basis == "plane_wave":
            return np.full(labels.shape, self.domain[1] - self.domain[0])
        return np.ones(labels.shape)

    def with_coefficients(self, coefficients) -> "BandLimitedState":
        return replace(self, coefficients=tuple(_lc(c) for c in coefficients))


def _lc(c) -> LogComplex:
    return c if isinstance(c, LogComplex) else LogComplex.from_complex(c)


def _bounds(eigenvalues, bounds):
    if bounds is None:
        return (float(min(eigenvalues)), float(max(eigenvalues)))
    return (float(bounds[0]), float(bounds[1]))


def plane_wave_state(wavenumbers, coefficients, *, hbar=1.0, domain=(-math.pi, math.pi),
                     bounds=None) -> BandLimitedState:
    """Superposition of ``exp(i k x)``; eigenvalues are momenta hbar*k."""
    ks = tuple(float(k) for k in wavenumbers)
    eig = tuple(hbar * k for k in ks)
    return BandLimitedState("plane_wave", ks, tuple(_lc(c) for c in coefficients), eig,
                            _bounds(eig, bounds), domain=tuple(domain), hbar=hbar)


def oscillator_state(quantum_numbers, coefficients, *, omega=1.0, mass=1.0, hbar=1.0,
                     bounds=None) -> BandLimitedState:
    """Superposition of orthonormal oscillator eigenfunctions; eigenvalues are energies."""
    ns = tuple(int(n) for n in quantum_numbers)
    eig = tuple(hbar * omega * (n + 0.5) for n in ns)
    return BandLimitedState("oscillator", ns, tuple(_lc(c) for c in coefficients), eig,
                            _bounds(eig, bounds), domain=(-math.inf, math.inf),
                            omega=omega, mass=mass, hbar=hbar)


def legendre_state(degrees, coefficients, *, bounds=None) -> BandLimitedState:
    """m = 0 superposition ``sum_l c_l P_l(cos theta)``; eigenvalues l(l+1) of L^2/hbar^2."""
    ls = tuple(int(l) for l in degrees)
    eig = tuple(float(l * (l + 1)) for l in ls)
    return BandLimitedState("legendre_m0", ls, tuple(_lc(c) for c in coefficients), eig,
                            _bounds(eig, bounds), domain=(0.0, math.pi))


def superoscillating_state(a: float, N: int) -> BandLimitedState:
    """``(cos(x/N) + i a sin(x/N))^N`` expanded into its N+1 plane waves.

    Wavenumbers are ``1 - 2n/N`` with binomial weights; the function is
    periodic on ``(-N pi, N pi)``.
    """
    if N < 1:
        raise ValueError("N must be positive")
    coeffs = []
    for n in range(N + 1):
        # C(N, n) ((1+a)/2)^(N-n) ((1-a)/2)^n, kept in log-polar form
        lc = LogComplex(log_binomial(N, n))
        lc = lc * LogComplex.from_complex((1 + a) / 2) ** (N - n) if N - n else lc
        lc = lc * LogComplex.from_complex((1 - a) / 2) ** n if n else lc
        coeffs.append(lc)
    ks = [1 - 2 * n / N for n in range(N + 1)]
    return plane_wave_state(ks, coeffs, domain=(-N * math.pi, N * math.pi), bounds=(-1.0, 1.0))


@dataclass(frozen=True)
class StateEvaluator:
    """Position representation of a state and its first two derivatives.

    ``value``, ``d1`` and ``d2`` take an array of positions and return complex
    arrays.  Values may carry an arbitrary common factor; weak values do not
    see it.
    """

    value: Callable
    d1: Callable
    d2: Callable
    derivative_kind: str = "spectral"
    state: BandLimitedState | None = field(default=None, compare=False)


def evaluator(state: BandLimitedState) -> StateEvaluator:
    """Spectral evaluator: each basis function is differentiated analytically."""
    c, _ = state.scaled_coefficients()
    return _evaluator_from(state, c)


def _evaluator_from(state: BandLimitedState, c: np.ndarray) -> StateEvaluator:
    labels = np.asarray(state.labels)

    if state.basis == "plane_wave":
        ks = labels.astype(float)

        def make(power):
            def f(x):
                x = np.asarray(x, dtype=float)
                ph = np.exp(1j * np.multiply.outer(x, ks))
                return ph @ (c * (1j * ks) ** power)
            return f

        return StateEvaluator(make(0), make(1), make(2), "spectral", state)

    if state.basis == "oscillator":
        alpha = math.sqrt(state.mass * state.omega / state.hbar)
        ns = labels.astype(int)
        nmax = int(ns.max()) + 1

        def table(x):
            y = alpha * np.asarray(x, dtype=float)
            m, s = hermite_function_table(nmax, y)
            with np.errstate(under="ignore", over="ignore"):
                return y, m * np.exp(s) * math.sqrt(alpha)

        def value(x):
            _, psi = table(x)
            return np.tensordot(c, psi[ns], axes=(0, 0))

        def d1(x):
            y, psi = table(x)
            sh = (-1,) + (1,) * y.ndim
            lower = psi[np.maximum(ns - 1, 0)] * (ns > 0).reshape(sh)
            terms = (np.sqrt(ns / 2.0).reshape(sh) * lower
                     - np.sqrt((ns + 1) / 2.0).reshape(sh) * psi[ns + 1])
            return alpha * np.tensordot(c, terms, axes=(0, 0))

        def d2(x):
            y, psi = table(x)
            terms = (y[None, ...] ** 2 - (2 * ns + 1).reshape((-1,) + (1,) * y.ndim)) * psi[ns]
            return alpha ** 2 * np.tensordot(c, terms, axes=(0, 0))

        return StateEvaluator(value, d1, d2, "spectral", state)

    # legendre_m0: psi(theta) = sum_l c_l P_l(cos theta)
    ls = labels.astype(int)

    def parts(theta):
        theta = np.asarray(theta, dtype=float)
        u, s = np.cos(theta), np.sin(theta)
        p = np.zeros(theta.shape, dtype=complex)
        dp = np.zeros_like(p)
        ddp = np.zeros_like(p)
        for cl, l in zip(c, ls):
            P, dP, ddP = legendre_P_derivs(int(l), u)
            p = p + cl * P
            dp = dp + cl * (-s * dP)
            ddp = ddp + cl * (s * s * ddP - u * dP)
        return p, dp, ddp

    return StateEvaluator(lambda t: parts(t)[0], lambda t: parts(t)[1],
                          lambda t: parts(t)[2], "spectral", state)


def finite_difference_evaluator(value: Callable, h: float = 1e-4) -> StateEvaluator:
    """Central-difference derivatives of an arbitrary position function."""

    def d1(x):
        x = np.asarray(x, dtype=float)
        return (value(x + h) - value(x - h)) / (2 * h)

    def d2(x):
        x = np.asarray(x, dtype=float)
        return (value(x + h) - 2 * value(x) + value(x - h)) / (h * h)

    return StateEvaluator(value, d1, d2, "finite_difference")


# -- operators: each maps (StateEvaluator, x) to <x|O|psi> ------------------

def momentum_operator(hbar: float = 1.0):
    return lambda ev, x: -1j * hbar * ev.d1(x)


def hamiltonian_operator(potential: Callable, mass: float = 1.0, hbar: float = 1.0):
    def apply(ev, x):
        x = np.asarray(x, dtype=float)
        return -(hbar ** 2) / (2 * mass) * ev.d2(x) + potential(x) * ev.value(x)
    return apply


def oscillator_hamiltonian(omega: float, mass: float = 1.0, hbar: float = 1.0):
    return hamiltonian_operator(lambda x: 0.5 * mass * omega ** 2 * x ** 2, mass, hbar)


def angular_momentum_sq_operator(d2_phi: Callable | None = None):
    """L^2/hbar^2 = -d_theta^2 - cot(theta) d_theta - csc^2(theta) d_phi^2.

    ``d2_phi`` supplies the azimuthal second derivative; it vanishes for the
    m = 0 states handled here.
    """
    def apply(ev, theta):
        theta = np.asarray(theta, dtype=float)
        azimuthal = d2_phi(theta) if d2_phi is not None else np.zeros(theta.shape)
        return -(ev.d2(theta) + ev.d1(theta) / np.tan(theta)) - azimuthal / np.sin(theta) ** 2
    return apply


def spectral_operator(state: BandLimitedState):
    """Apply the observable through its eigendecomposition: ``sum_j c_j lambda_j phi_j``.

    Pairs with ``evaluator(state)``, whose values share the same common factor.
    """
    c, _ = state.scaled_coefficients()
    weighted = _evaluator_from(state, c * np.asarray(state.eigenvalues, dtype=float))
    return lambda ev, x: weighted.value(x)


# -- local quantities ---------------------------------------------------------

def _singular_mask(psi, eps_zero, scale):
    a = np.abs(psi)
    ref = np.max(a) if scale is None else scale
    return a <= eps_zero * ref


def _log_derivative(ev: StateEvaluator, x, eps_zero, scale):
    x = np.asarray(x, dtype=float)
    psi = ev.value(x)
    d = ev.d1(x)
    sing = _singular_mask(psi, eps_zero, scale)
    with np.errstate(divide="ignore", invalid="ignore"):
        q = np.where(sing, _CNAN, d / np.where(sing, 1.0, psi))
    return q


def local_wavenumber(ev: StateEvaluator, x, *, eps_zero: float = EPS_ZERO, scale=None):
    """``Im psi'/psi``; NaN where |psi| is below ``eps_zero`` times the reference.

    The reference magnitude is ``scale`` or, by default, max |psi| over ``x``.
    """
    q = _log_derivative(ev, x, eps_zero, scale)
    return float(q.imag) if np.ndim(q) == 0 else q.imag


def supergrowth_rate(ev: StateEvaluator, x, *, eps_zero: float = EPS_ZERO, scale=None):
    """Local log-magnitude growth rate ``Re psi'/psi``, singular points NaN."""
    q = _log_derivative(ev, x, eps_zero, scale)
    return float(q.real) if np.ndim(q) == 0 else q.real


@dataclass(frozen=True)
class ObservableProfile:
    grid: np.ndarray
    values: np.ndarray
    bounds: tuple[float, float]
    super_flags: np.ndarray
    singular_flags: np.ndarray

    @property
    def real(self):
        return self.values.real

    @property
    def imag(self):
        return self.values.imag


def flag_profile(grid, values, bounds, singular, band_rtol: float = BAND_RTOL) -> ObservableProfile:
    """Assemble a profile, marking super points where Re value leaves ``bounds``."""
    lo, hi = bounds
    tol = band_rtol * max(1.0, abs(lo), abs(hi))
    re = np.real(values)
    with np.errstate(invalid="ignore"):
        outside = (re < lo - tol) | (re > hi + tol)
    super_flags = outside & ~singular
    return ObservableProfile(np.asarray(grid, dtype=float), np.asarray(values, dtype=complex),
                             (float(lo), float(hi)), super_flags, np.asarray(singular, dtype=bool))


def weak_value_field(op_apply, ev: StateEvaluator, grid, bounds=None, *,
                     eps_zero: float = EPS_ZERO) -> ObservableProfile:
    """Sample ``<x|O|psi>/<x|psi>`` over ``grid`` and flag super/singular points."""
    grid = np.atleast_1d(np.asarray(grid, dtype=float))
    if grid.size == 0:
        raise ValueError("grid must be non-empty")
    if bounds is None:
        if ev.state is None:
            raise ValueError("bounds required for evaluators without a state")
        bounds = ev.state.bounds
    psi = ev.value(grid)
    num = op_apply(ev, grid)
    singular = _singular_mask(psi, eps_zero, None)
    with np.errstate(divide="ignore", invalid="ignore"):
        vals = np.where(singular, _CNAN, num / np.where(singular, 1.0, psi))
    return flag_profile(grid, vals, bounds, singular)


def spectral_expectation(state: BandLimitedState) -> float:
    """``sum |c_j|^2 |phi_j|^2 lambda_j / sum |c_j|^2 |phi_j|^2`` with max-factored weights."""
    mags = np.array([2 * c.log_mag for c in state.coefficients]) + np.log(state.basis_norms_sq())
    w = np.exp(mags - np.max(mags))
    lam = np.asarray(state.eigenvalues, dtype=float)
    return float(np.sum(w * lam) / np.sum(w))


def _measure(state: BandLimitedState, x):
    if state.basis == "legendre_m0":
        return 2 * np.pi * np.sin(x)
    return np.ones_like(x)


def sum_rule_check(state: BandLimitedState, profile: ObservableProfile,
                   rule: QuadratureRule, *, tail_tol: float = 1e-10) -> tuple[float, float]:
    """Compare the |psi|^2-weighted average of Re O(x) with the spectral expectation.

    ``profile`` must be sampled at the nodes of ``rule``.  Returns ``(lhs, rhs)``;
    the identity holds when the two agree to ~1e-6.
    """
    if profile.grid.shape != rule.nodes.shape or not np.allclose(profile.grid, rule.nodes):
        raise ValueError("profile must be sampled on the quadrature nodes")
    ev = evaluator(state)
    x = rule.nodes
    dens = np.abs(ev.value(x)) ** 2 * _measure(state, x)
    norm = float(np.sum(rule.weights * dens))

    c, shift = state.scaled_coefficients()
    exact_norm = float(np.sum(np.abs(c) ** 2 * state.basis_norms_sq()))
    if state.basis == "plane_wave":
        a, b = state.domain
        if not (np.isclose(rule.interval[0], a) and np.isclose(rule.interval[1], b)):
            raise PreconditionError("plane-wave sum rule needs one full period as the interval")
    if abs(norm - exact_norm) > tail_tol * exact_norm + 1e-13 * exact_norm:
        raise PreconditionError(
            f"state not normalizable on {rule.interval}: captured norm {norm:.3e} "
            f"vs {exact_norm:.3e}")
    re = np.where(profile.singular_flags, 0.0, np.nan_to_num(profile.real))
    lhs = float(np.sum(rule.weights * dens * re) / norm)
    return lhs, spectral_expectation(state)


def generating_function(state: BandLimitedState, post_state_overlaps, chi_grid, *,
                        eps_zero: float = EPS_ZERO):
    """Weak generating function ``Z(chi)`` and its local chi-frequency ``Im Z'/Z``.

    ``post_state_overlaps[j]`` is ``<phi|phi_j>``.  Raises SingularityError
    when the postselection overlap ``<phi|psi>`` vanishes.
    """
    c, _ = state.scaled_coefficients()
    o = np.asarray(post_state_overlaps, dtype=complex)
    lam = np.asarray(state.eigenvalues, dtype=float)
    chi = np.asarray(chi_grid, dtype=float)
    a = c * o
    denom = a.sum()
    if abs(denom) <= eps_zero * max(np.abs(a).sum(), np.finfo(float).tiny):
        raise SingularityError("postselection overlap <phi|psi> vanishes")
    phases = np.exp(1j * np.multiply.outer(chi, lam))
    z = phases @ a / denom
    dz = phases @ (1j * lam * a) / denom
    return z, (dz / z).imag


def detect_super_regions(profile: ObservableProfile) -> list[tuple[float, float]]:
    """Maximal runs of super points as ``(first x, last x)`` at grid resolution."""
    grid = profile.grid
    if grid.size > 1 and np.any(np.diff(grid) <= 0):
        raise ValueError("profile grid must be strictly increasing")
    regions = []
    start = None
    for i, flag in enumerate(profile.super_flags):
        if flag and start is None:
            start = i
        elif not flag and start is not None:
            regions.append((float(grid[start]), float(grid[i - 1])))
            start = None
    if start is not None:
        regions.append((float(grid[start]), float(grid[-1])))
    return regions
