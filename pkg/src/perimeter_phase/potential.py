"""Double-well potential and the phase functions built from it.

The well is ``w(t) = (1 - t^2)^2`` inside [-1, 1] and zero outside, so it
vanishes exactly once the argument saturates.  Two antiderivative-style
maps come with it:

* ``h``: the signed area ``2 * integral_0^t sqrt(w)``, clamped at the
  saturation value +/- 4/3.  Its total rise ``2 * h(1)`` is the cost of one
  unit of interface, exposed as ``c0()``.
* ``h_tilde``: ``h`` rescaled to land on [-1, 1]; the discrete total
  variation of ``h_tilde`` composed with a state counts interfaces in
  multiples of 2 (one full swing from -1 to +1).

``h_tilde_inverse`` is the numerical inverse of the monotone cubic
``t * (3 - t^2) / 2`` on [-1, 1]; it is used when converting a target
phase value back into the amplitude variable.
"""

from __future__ import annotations

import numpy as np

# Total rise of h across the well: 2 * h(1) = 2 * (2 - 2/3) ... see c0().
C0 = 8.0 / 3.0


def _as_array(t):
    return np.asarray(t, dtype=float)


def _scalar_or_array(out: np.ndarray, like) -> float | np.ndarray:
    if np.ndim(like) == 0:
        return float(out)
    return out


def w(t):
    """Double-well density: (1 - t^2)^2 on [-1, 1], zero outside."""
    t = _as_array(t)
    inside = np.abs(t) <= 1.0
    out = np.where(inside, (1.0 - t * t) ** 2, 0.0)
    return _scalar_or_array(out, t)


def w_prime(t):
    """Derivative of ``w``: -4 t (1 - t^2) on [-1, 1], zero outside."""
    t = _as_array(t)
    inside = np.abs(t) <= 1.0
    out = np.where(inside, -4.0 * t * (1.0 - t * t), 0.0)
    return _scalar_or_array(out, t)


def h(t):
    """Signed well area 2t - (2/3) t^3, clamped to +/- 4/3 outside [-1, 1].

    Antiderivative of 2 * sqrt(w) with h(0) = 0.
    """
    t = _as_array(t)
    tc = np.clip(t, -1.0, 1.0)
    out = 2.0 * tc - (2.0 / 3.0) * tc**3
    return _scalar_or_array(out, t)


def h_tilde(t):
    """``h`` rescaled by its saturation value, mapping [-1, 1] onto [-1, 1].

    Closed form t * (3 - t^2) / 2 inside the well, clamped outside.
    """
    t = _as_array(t)
    tc = np.clip(t, -1.0, 1.0)
    out = 0.5 * tc * (3.0 - tc * tc)
    return _scalar_or_array(out, t)


def h_tilde_inverse(y):
    """Inverse of ``h_tilde`` restricted to [-1, 1].

    Bisection (48 rounds) followed by a guarded Newton polish.  The
    derivative (3/2)(1 - t^2) degenerates at the endpoints, so Newton
    steps are only applied where the slope is safely bounded away from
    zero, and the exact saturation inputs +/-1 map to +/-1 exactly.
    Absolute accuracy is better than 1e-12 except within a few ULPs of
    y = +/-1, where the vertical tangent of the inverse caps what any
    double-precision root finder can resolve.
    """
    y = _as_array(y)
    if np.any(np.abs(y) > 1.0 + 1e-12):
        raise ValueError("h_tilde_inverse requires values in [-1, 1]")
    yc = np.clip(y, -1.0, 1.0)

    lo = np.full(yc.shape, -1.0)
    hi = np.full(yc.shape, 1.0)
    for _ in range(48):
        mid = 0.5 * (lo + hi)
        fmid = 0.5 * mid * (3.0 - mid * mid)
        take_hi = fmid < yc
        lo = np.where(take_hi, mid, lo)
        hi = np.where(take_hi, hi, mid)
    t = 0.5 * (lo + hi)

    for _ in range(3):
        slope = 1.5 * (1.0 - t * t)
        safe = slope > 1e-6
        resid = 0.5 * t * (3.0 - t * t) - yc
        step = np.where(safe, resid / np.where(safe, slope, 1.0), 0.0)
        t = np.clip(t - step, -1.0, 1.0)

    t = np.where(yc == 1.0, 1.0, np.where(yc == -1.0, -1.0, t))
    return _scalar_or_array(t, y)


def c0() -> float:
    """Interface cost per unit perimeter: total rise of ``h`` = 8/3."""
    return C0
