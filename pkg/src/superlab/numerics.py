"""Extreme-dynamic-range arithmetic and stable special functions.

Everything here works on plain floats as well as numpy arrays.  Values whose
magnitude cannot be represented in double precision (the oscillator sequence
coefficients reach ``exp(±3000)`` at N = 1000) are carried as a
log-magnitude plus a phase, see :class:`LogComplex`.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import gammaln

__all__ = [
    "DomainError",
    "NumericalError",
    "SingularityError",
    "PreconditionError",
    "LogComplex",
    "canonical_phase",
    "logsumexp_complex",
    "log_binomial",
    "hermite_log",
    "hermite_log_sequence",
    "hermite_function",
    "hermite_function_table",
    "legendre_P",
    "legendre_P_derivs",
    "QuadratureRule",
    "quadrature",
    "composite_rule",
    "default_quad_order",
]

# Beyond this gap in log-magnitude the smaller addend is below double rounding.
_ADD_CUTOFF = 800.0
# Rescale recurrence mantissas once they leave [1/_BIG, _BIG].
_BIG = 1e100
_LOG_BIG = math.log(_BIG)


class DomainError(ValueError):
    """Argument outside the mathematical domain of an operation."""


class PreconditionError(ValueError):
    """Inputs violate a documented precondition (e.g. truncation too short)."""


class NumericalError(ArithmeticError):
    """A numerical self-check failed (e.g. quadrature did not converge)."""


class SingularityError(ZeroDivisionError):
    """A quotient has a vanishing denominator."""


def canonical_phase(phase):
    """Map angles onto (-pi, pi]."""
    p = np.pi - np.mod(np.pi - np.asarray(phase, dtype=float), 2 * np.pi)
    return _unwrap_scalar(p)


def _unwrap_scalar(a):
    a = np.asarray(a)
    return float(a) if a.ndim == 0 else a


@dataclass(frozen=True)
class LogComplex:
    """Complex number ``exp(log_mag + 1j*phase)``.

    ``log_mag = -inf`` encodes zero.  Both fields may be numpy arrays of a
    common shape, in which case every operation acts elementwise.
    """

    log_mag: float | np.ndarray
    phase: float | np.ndarray = 0.0

    def __post_init__(self):
        log_mag = np.asarray(self.log_mag, dtype=float)
        phase = np.where(np.isneginf(log_mag), 0.0,
                         np.asarray(canonical_phase(self.phase), dtype=float))
        object.__setattr__(self, "log_mag", _unwrap_scalar(log_mag))
        object.__setattr__(self, "phase", _unwrap_scalar(phase))

    @classmethod
    def from_complex(cls, z) -> "LogComplex":
        z = np.asarray(z, dtype=complex)
        with np.errstate(divide="ignore"):
            return cls(np.log(np.abs(z)), np.angle(z))

    @classmethod
    def zero(cls) -> "LogComplex":
        return cls(-math.inf, 0.0)

    @property
    def is_zero(self):
        return np.isneginf(self.log_mag)

    def to_complex(self):
        """Convert to native complex (overflows to inf when unrepresentable)."""
        with np.errstate(over="ignore"):
            z = np.exp(self.log_mag) * np.exp(1j * np.asarray(self.phase))
        z = np.asarray(z)
        return complex(z) if z.ndim == 0 else z

    def log(self):
        """Principal complex logarithm ``log_mag + 1j*phase``."""
        z = np.asarray(self.log_mag) + 1j * np.asarray(self.phase)
        return complex(z) if z.ndim == 0 else z

    def conjugate(self) -> "LogComplex":
        return LogComplex(self.log_mag, -np.asarray(self.phase))

    def __neg__(self) -> "LogComplex":
        return LogComplex(self.log_mag, np.asarray(self.phase) + np.pi)

    def __mul__(self, other) -> "LogComplex":
        other = _as_logcomplex(other)
        return LogComplex(np.asarray(self.log_mag) + other.log_mag,
                          np.asarray(self.phase) + other.phase)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "LogComplex":
        other = _as_logcomplex(other)
        if np.any(other.is_zero):
            raise SingularityError("division by a zero LogComplex")
        return LogComplex(np.asarray(self.log_mag) - other.log_mag,
                          np.asarray(self.phase) - other.phase)

    def __rtruediv__(self, other) -> "LogComplex":
        return _as_logcomplex(other) / self

    def __pow__(self, k) -> "LogComplex":
        return LogComplex(k * np.asarray(self.log_mag),
                          k * np.asarray(self.phase))

    def __add__(self, other) -> "LogComplex":
        other = _as_logcomplex(other)
        a_mag, b_mag = np.broadcast_arrays(np.asarray(self.log_mag, dtype=float),
                                           np.asarray(other.log_mag, dtype=float))
        a_ph, b_ph = np.broadcast_arrays(np.asarray(self.phase, dtype=float),
                                         np.asarray(other.phase, dtype=float))
        swap = b_mag > a_mag
        hi_mag = np.where(swap, b_mag, a_mag)
        lo_mag = np.where(swap, a_mag, b_mag)
        hi_ph = np.where(swap, b_ph, a_ph)
        lo_ph = np.where(swap, a_ph, b_ph)
        with np.errstate(invalid="ignore", divide="ignore"):
            gap = np.where(np.isneginf(hi_mag), np.inf, hi_mag - lo_mag)
            small = np.where(gap > _ADD_CUTOFF, 0.0, np.exp(-gap))
            s = np.exp(1j * hi_ph) + small * np.exp(1j * lo_ph)
            mag = np.where(gap > _ADD_CUTOFF, hi_mag, hi_mag + np.log(np.abs(s)))
            ph = np.where(gap > _ADD_CUTOFF, hi_ph, np.angle(s))
        return LogComplex(mag, ph)

    __radd__ = __add__

    def __sub__(self, other) -> "LogComplex":
        return self + (-_as_logcomplex(other))

    @staticmethod
    def sum(terms) -> "LogComplex":
        """Sum of many LogComplex values by factoring out the largest magnitude."""
        terms = list(terms)
        if not terms:
            return LogComplex.zero()
        mags = np.array([t.log_mag for t in terms], dtype=float)
        phases = np.array([t.phase for t in terms], dtype=float)
        mag, ph = logsumexp_complex(mags, phases, axis=0)
        return LogComplex(mag, ph)

    def __repr__(self) -> str:
        return f"LogComplex(log_mag={self.log_mag!r}, phase={self.phase!r})"


def _as_logcomplex(x) -> LogComplex:
    if isinstance(x, LogComplex):
        return x
    return LogComplex.from_complex(x)


def logsumexp_complex(log_mag, phase, axis=0, return_abs_sum=False):
    """Log-polar sum of ``exp(log_mag + 1j*phase)`` along ``axis``.

    Returns ``(log|S|, arg S)``; with ``return_abs_sum`` also ``log sum|terms|``,
    whose difference from ``log|S|`` measures the cancellation in the sum.
    """
    log_mag = np.asarray(log_mag, dtype=float)
    phase = np.asarray(phase, dtype=float)
    m = np.max(log_mag, axis=axis, keepdims=True)
    m = np.where(np.isfinite(m), m, 0.0)
    with np.errstate(under="ignore"):
        w = np.exp(log_mag - m)
    s = np.sum(w * np.exp(1j * phase), axis=axis)
    m = np.squeeze(m, axis=axis)
    with np.errstate(divide="ignore"):
        out_mag = m + np.log(np.abs(s))
        out = (_unwrap_scalar(out_mag), _unwrap_scalar(np.angle(s)))
        if return_abs_sum:
            out += (_unwrap_scalar(m + np.log(np.sum(w, axis=axis))),)
    return out


def log_binomial(N: int, n: int) -> float:
    """Natural log of the binomial coefficient C(N, n) via log-gamma."""
    if N < 0 or n < 0 or n > N:
        raise DomainError(f"log_binomial requires 0 <= n <= N, got N={N}, n={n}")
    return float(gammaln(N + 1) - gammaln(n + 1) - gammaln(N - n + 1))


def _hermite_scaled(n: int, z, *, keep_all: bool = False):
    """Physicists' Hermite recurrence carried as mantissa * exp(log_scale)."""
    z = np.asarray(z, dtype=float)
    scale = np.zeros_like(z)
    prev = np.ones_like(z)
    mants, scales = [prev.copy()], [scale.copy()]
    if n == 0:
        return (np.array(mants), np.array(scales)) if keep_all else (prev, scale)
    cur = 2.0 * z
    mants.append(cur.copy())
    scales.append(scale.copy())
    for k in range(1, n):
        nxt = 2.0 * z * cur - 2.0 * k * prev
        prev, cur = cur, nxt
        big = np.abs(cur) > _BIG
        if np.any(big):
            cur = np.where(big, cur / _BIG, cur)
            prev = np.where(big, prev / _BIG, prev)
            scale = scale + np.where(big, _LOG_BIG, 0.0)
        if keep_all:
            mants.append(cur.copy())
            scales.append(scale.copy())
    if keep_all:
        return np.array(mants), np.array(scales)
    return cur, scale


def hermite_log(n: int, z) -> LogComplex:
    """H_n(z) as a signed log value (phase 0 or pi)."""
    if n < 0:
        raise DomainError("Hermite order must be nonnegative")
    mant, scale = _hermite_scaled(n, z)
    with np.errstate(divide="ignore"):
        log_mag = scale + np.log(np.abs(mant))
    return LogComplex(log_mag, np.where(mant < 0, np.pi, 0.0))


def hermite_log_sequence(nmax: int, z):
    """``(log|H_k(z)|, sign H_k(z))`` for k = 0..nmax, stacked along axis 0."""
    if nmax < 0:
        raise DomainError("Hermite order must be nonnegative")
    mants, scales = _hermite_scaled(nmax, z, keep_all=True)
    with np.errstate(divide="ignore"):
        return scales + np.log(np.abs(mants)), np.sign(mants)


def hermite_function_table(nmax: int, y):
    """Orthonormal oscillator eigenfunctions psi_0..psi_nmax at ``y``.

    Returns ``(mantissa, log_scale)`` of shape ``(nmax + 1, *y.shape)`` with
    ``psi_n(y) = mantissa[n] * exp(log_scale[n])``.  The normalized recurrence
    plus periodic rescaling keeps every entry finite for any y and n.
    """
    y = np.asarray(y, dtype=float)
    out_m = np.empty((nmax + 1,) + y.shape)
    out_s = np.empty((nmax + 1,) + y.shape)
    scale = -0.5 * y * y
    prev = np.zeros_like(y)
    cur = np.full_like(y, np.pi ** -0.25)
    out_m[0], out_s[0] = cur, scale
    for n in range(nmax):
        nxt = math.sqrt(2.0 / (n + 1)) * y * cur - math.sqrt(n / (n + 1)) * prev
        prev, cur = cur, nxt
        big = np.abs(cur) > _BIG
        if np.any(big):
            cur = np.where(big, cur / _BIG, cur)
            prev = np.where(big, prev / _BIG, prev)
            scale = scale + np.where(big, _LOG_BIG, 0.0)
        out_m[n + 1], out_s[n + 1] = cur, scale
    return out_m, out_s


def hermite_function(n: int, y):
    """Orthonormal eigenfunction psi_n at dimensionless position ``y``.

    Uses psi_{n+1} = sqrt(2/(n+1)) y psi_n - sqrt(n/(n+1)) psi_{n-1} started
    from psi_0 = pi^(-1/4) exp(-y^2/2).
    """
    if n < 0:
        raise DomainError("eigenfunction index must be nonnegative")
    m, s = hermite_function_table(n, y)
    with np.errstate(under="ignore", over="ignore"):
        return _unwrap_scalar(m[n] * np.exp(s[n]))


def legendre_P(l: int, u):
    """Legendre polynomial P_l(u) on [-1, 1] by Bonnet's recurrence."""
    return legendre_P_derivs(l, u)[0]


def legendre_P_derivs(l: int, u):
    """``(P_l, P_l', P_l'')`` at ``u`` from the differentiated Bonnet recurrence."""
    if l < 0:
        raise DomainError("Legendre degree must be nonnegative")
    u = np.asarray(u, dtype=float)
    if np.any(np.abs(u) > 1.0):
        raise DomainError("Legendre argument must lie in [-1, 1]")
    p0, d0, s0 = np.ones_like(u), np.zeros_like(u), np.zeros_like(u)
    if l == 0:
        return _unwrap_scalar(p0), _unwrap_scalar(d0), _unwrap_scalar(s0)
    p1, d1, s1 = u.copy(), np.ones_like(u), np.zeros_like(u)
    for k in range(1, l):
        p2 = ((2 * k + 1) * u * p1 - k * p0) / (k + 1)
        d2 = ((2 * k + 1) * (p1 + u * d1) - k * d0) / (k + 1)
        s2 = ((2 * k + 1) * (2 * d1 + u * s1) - k * s0) / (k + 1)
        p0, p1, d0, d1, s0, s1 = p1, p2, d1, d2, s1, s2
    return _unwrap_scalar(p1), _unwrap_scalar(d1), _unwrap_scalar(s1)


@dataclass(frozen=True)
class QuadratureRule:
    """Nodes and weights for integrating over ``interval``."""

    nodes: np.ndarray
    weights: np.ndarray
    interval: tuple[float, float]

    def integrate(self, f):
        """Apply the rule to a callable or to values sampled at the nodes."""
        vals = f(self.nodes) if callable(f) else np.asarray(f)
        return np.sum(self.weights * vals, axis=-1)


@lru_cache(maxsize=64)
def _leggauss(order: int):
    x, w = np.polynomial.legendre.leggauss(order)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def quadrature(order: int, a: float, b: float) -> QuadratureRule:
    """Gauss-Legendre rule with ``order`` nodes mapped onto (a, b)."""
    if order < 2:
        raise DomainError("quadrature order must be >= 2")
    if not a < b:
        raise DomainError(f"quadrature interval requires a < b, got ({a}, {b})")
    x, w = _leggauss(int(order))
    half = 0.5 * (b - a)
    return QuadratureRule(a + half * (x + 1.0), half * w, (float(a), float(b)))


def composite_rule(a: float, b: float, order: int, panel_width: float = 1.0) -> QuadratureRule:
    """Gauss-Legendre rule of ``order`` nodes on each panel of about ``panel_width``."""
    if not a < b:
        raise DomainError(f"quadrature interval requires a < b, got ({a}, {b})")
    panels = max(1, int(math.ceil((b - a) / panel_width - 1e-12)))
    edges = np.linspace(a, b, panels + 1)
    x, w = _leggauss(int(order))
    half = 0.5 * np.diff(edges)[:, None]
    nodes = edges[:-1, None] + half * (x + 1.0)
    weights = half * w
    return QuadratureRule(nodes.ravel(), weights.ravel(), (float(a), float(b)))


def default_quad_order() -> int:
    """Nodes per unit length for energy integrals; ``SUPERLAB_QUAD_ORDER`` overrides."""
    raw = os.environ.get("SUPERLAB_QUAD_ORDER")
    if raw is None:
        return 200
    order = int(raw)
    if order < 2:
        raise DomainError("SUPERLAB_QUAD_ORDER must be >= 2")
    return order
