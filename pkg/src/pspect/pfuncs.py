"""Scalar p-calculus.

The building blocks for everything else in the package:

* ``phi_p(s) = |s|^{p-2} s``, the odd power map, and its inverse (which is
  the same map for the conjugate exponent p' = p/(p-1)),
* ``pi_p``, the half period of the generalized sine,
* ``sin_p``, the generalized sine, defined here as the solution of

      (phi_p(u'))' + (p-1) phi_p(u) = 0,   u(0) = 0, u'(0) = 1.

With this normalization the first integral is the exact identity

      |u(x)|^p + |u'(x)|^p = 1,

which the tests lean on.  Other conventions in circulation rescale the
argument (e.g. the solution of (phi_p(u'))' + phi_p(u) = 0 is
``sin_p(x / (p-1)^{1/p})`` in ours); translate accordingly.

On the quarter period [0, pi_p/2] the function is the inverse of the
arclength integral

      x(u) = integral_0^u (1 - s^p)^{-1/p} ds,

which in closed form is (pi_p/2) * I(1/p, 1-1/p; u^p) with I the
regularized incomplete beta function.  We invert through
``scipy.special.betaincinv``, then extend by the reflection
sin_p(pi_p - x) = sin_p(x) and by antiperiodicity over the half period
(full period 2 pi_p).  This sidesteps integrating the defining ODE, which
degenerates at the extrema for p != 2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import special
from scipy.interpolate import PchipInterpolator


@dataclass(frozen=True)
class Exponent:
    """A p-Laplacian exponent p > 1.  The conjugate p' is derived, never stored."""

    p: float

    def __post_init__(self):
        p = float(self.p)
        if not (math.isfinite(p) and p > 1.0):
            raise ValueError(f"exponent must satisfy 1 < p < inf, got {self.p!r}")
        object.__setattr__(self, "p", p)

    @property
    def conjugate(self) -> float:
        """p' = p/(p-1), so that 1/p + 1/p' = 1."""
        return self.p / (self.p - 1.0)


def _pval(p) -> float:
    """Accept a raw float or an Exponent; validate either way."""
    if isinstance(p, Exponent):
        return p.p
    return Exponent(float(p)).p


def phi_p(s, p):
    """The odd power map |s|^{p-2} s.

    Evaluated as |s|^{p-1} * sign(s), which is total: no division by zero
    at s = 0 when p < 2.  Works on scalars and arrays.
    """
    pv = _pval(p)
    s_arr = np.asarray(s, dtype=float)
    out = np.sign(s_arr) * np.abs(s_arr) ** (pv - 1.0)
    return float(out) if np.isscalar(s) or s_arr.ndim == 0 else out


def phi_p_inv(s, p):
    """Inverse of phi_p, i.e. phi_{p'} for the conjugate exponent."""
    pv = _pval(p)
    return phi_p(s, pv / (pv - 1.0))


def pi_p(p) -> float:
    """Half period of sin_p: 2*pi / (p*sin(pi/p)).

    Equals twice the arclength integral integral_0^1 (1-s^p)^{-1/p} ds
    (Gamma-function evaluation of the beta integral).
    """
    pv = _pval(p)
    return 2.0 * math.pi / (pv * math.sin(math.pi / pv))


def _sinp_quarter_pair(tau, pv: float, quarter: float):
    """(sin_p, sin_p') on the quarter period [0, pi_p/2].

    The value solves I(1/p, 1-1/p; u^p) = tau/quarter for the regularized
    incomplete beta I.  The derivative needs 1 - u^p, which cancels
    catastrophically near the extremum; by the reflection
    I_x(a, b) = 1 - I_{1-x}(b, a) it equals the inverse beta at swapped
    parameters of the complementary abscissa (quarter - tau)/quarter,
    formed exactly from the folded argument.
    """
    a = 1.0 / pv
    b = 1.0 - a
    y = np.clip(tau / quarter, 0.0, 1.0)
    yc = np.clip((quarter - tau) / quarter, 0.0, 1.0)
    w = special.betaincinv(a, b, y)  # u^p
    s = special.betaincinv(b, a, yc)  # 1 - u^p, cancellation free
    u = np.where(y <= 0.5, w, 1.0 - s) ** (1.0 / pv)
    du = s ** (1.0 / pv)
    return u, du


def sin_p(x, p):
    """Generalized sine and its derivative, ``(value, derivative)``.

    Defined on all of R by quarter-period inversion plus the symmetries
    sin_p(pi_p - x) = sin_p(x) and sin_p(x + pi_p) = -sin_p(x).
    Accepts scalars or arrays.
    """
    pv = _pval(p)
    half = pi_p(pv)
    quarter = 0.5 * half
    period = 2.0 * half

    x_arr = np.asarray(x, dtype=float)
    scalar = np.isscalar(x) or x_arr.ndim == 0

    t = np.mod(x_arr, period)
    sgn = np.where(t < half, 1.0, -1.0)
    t = np.where(t >= half, t - half, t)
    # fold [0, half] onto [0, quarter]; derivative flips sign on the way down
    dsgn = np.where(t > quarter, -1.0, 1.0)
    tau = np.where(t > quarter, half - t, t)

    u, du = _sinp_quarter_pair(tau, pv, quarter)

    val = sgn * u
    der = sgn * dsgn * du
    if scalar:
        return float(val), float(der)
    return val, der


_CONVENTION = (
    "(phi_p(u'))' + (p-1) phi_p(u) = 0, u(0)=0, u'(0)=1; "
    "first integral |u|^p + |u'|^p = 1"
)


@dataclass(frozen=True)
class PTrigTable:
    """Cached quarter-period samples of (x, sin_p, sin_p') plus pi_p.

    Carries monotone (PCHIP) interpolants for bulk evaluation; the exact
    inverse-beta path in :func:`sin_p` stays the reference.  Near the
    quarter-period folds the function behaves like a fractional power
    (exponent p/(p-1)), which caps polynomial interpolation accuracy
    there; treat the table as a plotting/bulk cache, not an oracle.
    """

    p: float
    pi_p: float
    x: np.ndarray
    sin_vals: np.ndarray
    dsin_vals: np.ndarray
    convention: str = _CONVENTION
    _interp_s: PchipInterpolator = field(repr=False, default=None)
    _interp_c: PchipInterpolator = field(repr=False, default=None)

    @classmethod
    def build(cls, p, n: int = 1025) -> "PTrigTable":
        pv = _pval(p)
        half = pi_p(pv)
        xs = np.linspace(0.0, 0.5 * half, n)
        u, du = _sinp_quarter_pair(xs, pv, 0.5 * half)
        return cls(
            p=pv,
            pi_p=half,
            x=xs,
            sin_vals=u,
            dsin_vals=du,
            _interp_s=PchipInterpolator(xs, u),
            _interp_c=PchipInterpolator(xs, du),
        )

    def __call__(self, x):
        """Interpolated (value, derivative), extended to all of R by symmetry."""
        half = self.pi_p
        quarter = 0.5 * half
        t = np.mod(np.asarray(x, dtype=float), 2.0 * half)
        sgn = np.where(t < half, 1.0, -1.0)
        t = np.where(t >= half, t - half, t)
        dsgn = np.where(t > quarter, -1.0, 1.0)
        tau = np.where(t > quarter, half - t, t)
        return sgn * self._interp_s(tau), sgn * dsgn * self._interp_c(tau)
