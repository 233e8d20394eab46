"""Adaptive Dormand-Prince 5(4) stepper for the radial first-order system.

Specialized to a two-component real system y = (u, v) with a scalar
right-hand side callback f(r, u, v) -> (du, dv) operating on plain
floats.  The per-step quartic interpolant (the standard DP dense-output
polynomial) is stored for every accepted step, so trajectories can be
evaluated anywhere afterwards; that is what zero location and profile
resampling run on.

The stepping loop deliberately avoids numpy in the hot path; shots in
this package are ~1e2..1e3 steps of trivially cheap arithmetic, where
array machinery costs more than the math.
"""

from __future__ import annotations

import math
from bisect import bisect_right

import numpy as np

from .errors import IntegrationError

# Dormand-Prince coefficients
_C2, _C3, _C4, _C5 = 1 / 5, 3 / 10, 4 / 5, 8 / 9

_A21 = 1 / 5
_A31, _A32 = 3 / 40, 9 / 40
_A41, _A42, _A43 = 44 / 45, -56 / 15, 32 / 9
_A51, _A52, _A53, _A54 = 19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729
_A61, _A62, _A63, _A64, _A65 = (
    9017 / 3168,
    -355 / 33,
    46732 / 5247,
    49 / 176,
    -5103 / 18656,
)
_B1, _B3, _B4, _B5, _B6 = 35 / 384, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84

# error weights (5th minus embedded 4th order)
_E1, _E3, _E4, _E5, _E6, _E7 = (
    71 / 57600,
    -71 / 16695,
    71 / 1920,
    -17253 / 339200,
    22 / 525,
    -1 / 40,
)

# dense-output polynomial, columns are theta^1..theta^4 coefficients
_P = (
    (1.0, -8048581381 / 2820520608, 8663915743 / 2820520608, -12715105075 / 11282082432),
    (0.0, 0.0, 0.0, 0.0),
    (0.0, 131558114200 / 32700410799, -68118460800 / 10900136933, 87487479700 / 32700410799),
    (0.0, -1754552775 / 470086768, 14199869525 / 1410260304, -10690763975 / 1880347072),
    (0.0, 127303824393 / 49829197408, -318862633887 / 49829197408, 701980252875 / 199316789632),
    (0.0, -282668133 / 205662961, 2019193451 / 616988883, -1453857185 / 822651844),
    (0.0, 40617522 / 29380423, -110615467 / 29380423, 69997945 / 29380423),
)

_SAFETY = 0.9
_MIN_FACTOR = 0.2
_MAX_FACTOR = 10.0


class DenseOutput:
    """Piecewise-quartic interpolant over the accepted steps."""

    __slots__ = ("t0", "t_end", "ts", "y0s", "hs", "coef", "_np")

    def __init__(self, t0, t_end, ts, y0s, hs, coef):
        self.t0 = t0
        self.t_end = t_end
        self.ts = ts  # left nodes of the steps, ascending
        self.y0s = y0s  # (n_steps, 2)
        self.hs = hs
        self.coef = coef  # (n_steps, 2, 4) theta-polynomial coefficients
        self._np = None

    def _as_arrays(self):
        if self._np is None:
            self._np = (
                np.asarray(self.ts),
                np.asarray(self.y0s),
                np.asarray(self.hs),
                np.asarray(self.coef),
            )
        return self._np

    def _segment(self, t: float) -> int:
        i = bisect_right(self.ts, t) - 1
        if i < 0:
            return 0
        if i >= len(self.hs):
            return len(self.hs) - 1
        return i

    def eval_scalar(self, t: float):
        i = self._segment(t)
        th = (t - self.ts[i]) / self.hs[i]
        c = self.coef[i]
        u = self.y0s[i][0] + th * (c[0][0] + th * (c[0][1] + th * (c[0][2] + th * c[0][3])))
        v = self.y0s[i][1] + th * (c[1][0] + th * (c[1][1] + th * (c[1][2] + th * c[1][3])))
        return u, v

    def u_scalar(self, t: float) -> float:
        i = self._segment(t)
        th = (t - self.ts[i]) / self.hs[i]
        c = self.coef[i][0]
        return self.y0s[i][0] + th * (c[0] + th * (c[1] + th * (c[2] + th * c[3])))

    def __call__(self, t):
        t_arr = np.asarray(t, dtype=float)
        if t_arr.ndim == 0:
            return np.array(self.eval_scalar(float(t_arr)))
        ts, y0s, hs, coef = self._as_arrays()
        idx = np.clip(np.searchsorted(ts, t_arr, side="right") - 1, 0, len(self.hs) - 1)
        th = (t_arr - ts[idx]) / hs[idx]
        c = coef[idx]  # (n, 2, 4)
        acc = c[:, :, 3]
        for j in (2, 1, 0):
            acc = acc * th[:, None] + c[:, :, j]
        return (y0s[idx] + acc * th[:, None]).T  # shape (2, n)


def _initial_step(f, t0, y0, f0, t_end, rtol, atol_u, atol_v):
    scale_u = atol_u + rtol * abs(y0[0])
    scale_v = atol_v + rtol * abs(y0[1])
    d0 = math.hypot(y0[0] / scale_u, y0[1] / scale_v) / math.sqrt(2)
    d1 = math.hypot(f0[0] / scale_u, f0[1] / scale_v) / math.sqrt(2)
    h0 = 1e-6 if (d0 < 1e-5 or d1 < 1e-5) else 0.01 * d0 / d1
    h0 = min(h0, t_end - t0)
    u1 = y0[0] + h0 * f0[0]
    v1 = y0[1] + h0 * f0[1]
    f1 = f(t0 + h0, u1, v1)
    d2 = (
        math.hypot((f1[0] - f0[0]) / scale_u, (f1[1] - f0[1]) / scale_v)
        / math.sqrt(2)
        / h0
    )
    if d1 <= 1e-15 and d2 <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** 0.2
    return min(100 * h0, h1, t_end - t0)


def integrate(f, t0, t_end, y0, *, rtol, atol, blowup_limit=None):
    """March from t0 to t_end; returns (ts, ys, dense, blowup_t).

    ts, ys: accepted nodes and states (arrays).  blowup_t is the radius
    where |u| first exceeded blowup_limit (integration stops there), or
    None if t_end was reached.  Raises IntegrationError on step-size
    underflow.
    """
    span = t_end - t0
    u, v = float(y0[0]), float(y0[1])
    t = t0
    fu, fv = f(t, u, v)

    # atol may be per-component (u, v); homothetic scalings of the linear
    # problem then reproduce exactly scaled trajectories
    atol_u, atol_v = (atol, atol) if np.isscalar(atol) else atol

    h = _initial_step(f, t0, (u, v), (fu, fv), t_end, rtol, atol_u, atol_v)
    h_min = 16 * abs(span) * 2.3e-16 + 1e-300

    ts = [t0]
    ys = [(u, v)]
    seg_t, seg_y0, seg_h, seg_coef = [], [], [], []
    blowup_t = None

    while t < t_end:
        if h < h_min:
            raise IntegrationError(
                f"step size underflow at r = {t:.6e}", last_r=t
            )
        if t + h > t_end:
            h = t_end - t

        k1u, k1v = fu, fv
        k2u, k2v = f(t + _C2 * h, u + h * _A21 * k1u, v + h * _A21 * k1v)
        k3u, k3v = f(
            t + _C3 * h,
            u + h * (_A31 * k1u + _A32 * k2u),
            v + h * (_A31 * k1v + _A32 * k2v),
        )
        k4u, k4v = f(
            t + _C4 * h,
            u + h * (_A41 * k1u + _A42 * k2u + _A43 * k3u),
            v + h * (_A41 * k1v + _A42 * k2v + _A43 * k3v),
        )
        k5u, k5v = f(
            t + _C5 * h,
            u + h * (_A51 * k1u + _A52 * k2u + _A53 * k3u + _A54 * k4u),
            v + h * (_A51 * k1v + _A52 * k2v + _A53 * k3v + _A54 * k4v),
        )
        k6u, k6v = f(
            t + h,
            u + h * (_A61 * k1u + _A62 * k2u + _A63 * k3u + _A64 * k4u + _A65 * k5u),
            v + h * (_A61 * k1v + _A62 * k2v + _A63 * k3v + _A64 * k4v + _A65 * k5v),
        )
        u1 = u + h * (_B1 * k1u + _B3 * k3u + _B4 * k4u + _B5 * k5u + _B6 * k6u)
        v1 = v + h * (_B1 * k1v + _B3 * k3v + _B4 * k4v + _B5 * k5v + _B6 * k6v)
        k7u, k7v = f(t + h, u1, v1)

        err_u = h * (
            _E1 * k1u + _E3 * k3u + _E4 * k4u + _E5 * k5u + _E6 * k6u + _E7 * k7u
        )
        err_v = h * (
            _E1 * k1v + _E3 * k3v + _E4 * k4v + _E5 * k5v + _E6 * k6v + _E7 * k7v
        )
        scale_u = atol_u + rtol * max(abs(u), abs(u1))
        scale_v = atol_v + rtol * max(abs(v), abs(v1))
        norm = math.sqrt(0.5 * ((err_u / scale_u) ** 2 + (err_v / scale_v) ** 2))

        if norm > 1.0:
            h *= max(_MIN_FACTOR, _SAFETY * norm ** (-0.2))
            continue

        # accept: store the dense quartic for this step
        ku = (k1u, k2u, k3u, k4u, k5u, k6u, k7u)
        kv = (k1v, k2v, k3v, k4v, k5v, k6v, k7v)
        cu = [0.0, 0.0, 0.0, 0.0]
        cv = [0.0, 0.0, 0.0, 0.0]
        for j in range(4):
            su = 0.0
            sv = 0.0
            for i in range(7):
                pij = _P[i][j]
                if pij != 0.0:
                    su += pij * ku[i]
                    sv += pij * kv[i]
            cu[j] = h * su
            cv[j] = h * sv
        seg_t.append(t)
        seg_y0.append((u, v))
        seg_h.append(h)
        seg_coef.append((tuple(cu), tuple(cv)))

        t_new = t + h
        ts.append(t_new)
        ys.append((u1, v1))

        if blowup_limit is not None and abs(u1) >= blowup_limit:
            blowup_t = t_new
            t = t_new
            u, v = u1, v1
            break

        t = t_new
        u, v = u1, v1
        fu, fv = k7u, k7v  # FSAL

        factor = _MAX_FACTOR if norm == 0.0 else min(_MAX_FACTOR, _SAFETY * norm ** (-0.2))
        h *= factor

    dense = DenseOutput(
        t0, t, seg_t, seg_y0, seg_h, seg_coef
    )
    return np.asarray(ts), np.asarray(ys), dense, blowup_t
