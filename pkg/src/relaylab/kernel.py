"""Gaussian capacity primitives.

Every rate in the package is built from ``C(x) = 0.5 * log2(1 + x)`` (bits
per real channel use, unit noise variance) and its time-scaled form
``t * C(s / t)``.  The public functions validate their inputs; the
underscore-prefixed versions are unchecked, array-friendly and used on the
optimizer hot path.
"""

import math

import numpy as np

__all__ = [
    "DomainError",
    "c_gauss",
    "slot_term",
    "coherent_snr",
    "power_for_slot_rate",
]

_LN2 = math.log(2.0)


class DomainError(ValueError):
    """Input outside the domain of a capacity primitive."""


def _as_checked(name, value, *, allow_negative=False):
    arr = np.asarray(value, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} not finite")
    if not allow_negative and np.any(arr < 0):
        raise DomainError(f"{name} negative")
    return arr


def _unwrap(arr):
    return float(arr) if np.ndim(arr) == 0 else arr


# -- unchecked, vectorised ----------------------------------------------------

def _c(x):
    # log1p keeps precision in the low-SNR regime
    return np.log1p(x) / _LN2 * 0.5


# Positive slot lengths below this are divided as if they were this long, so
# s/t cannot overflow; the absolute rate error is below 1e-97 bits.
T_FLOOR = 1e-100


def _slot(t, s):
    """t*C(s/t) with the t -> 0 limit (zero) taken explicitly."""
    t = np.asarray(t, dtype=float)
    pos = t > 0
    # dividing by a stand-in 1 where t == 0 avoids 0/0 without errstate
    v = t * _c(s / np.where(pos, np.maximum(t, T_FLOOR), 1.0))
    return np.where(pos, v, 0.0)


def _slot_noisy(t, s, extra_noise):
    """t*C(s/(t + n)): slot rate with ``n`` units of interference energy."""
    t = np.asarray(t, dtype=float)
    pos = t > 0
    v = t * _c(s / np.where(pos, np.maximum(t, T_FLOOR) + extra_noise, 1.0))
    return np.where(pos, v, 0.0)


def _coherent(g1, p1, g2, p2):
    a = g1 * np.sqrt(p1) + g2 * np.sqrt(p2)
    return a * a


def _slot_inverse(t, gain_sq, rate):
    """Energy ``s`` such that t*C(gain_sq*s/t) == rate (0 where t or gain is 0)."""
    t = np.asarray(t, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        s = t * np.expm1(2.0 * _LN2 * rate / t) / gain_sq
    return np.where((t > 0) & (gain_sq > 0) & (rate > 0), s, 0.0)


# -- public, checked ----------------------------------------------------------

def c_gauss(snr):
    """Capacity of a real AWGN channel, ``0.5*log2(1 + snr)`` bits.

    Accepts a scalar or an array; raises :class:`DomainError` on negative or
    non-finite input.
    """
    return _unwrap(_c(_as_checked("snr", snr)))


def slot_term(t, s):
    """Rate of a slot of duration ``t`` carrying energy ``s``: ``t*C(s/t)``.

    The value at ``t == 0`` is the continuous limit 0.
    """
    t = _as_checked("t", t)
    if np.any(t > 1):
        raise DomainError("t outside [0, 1]")
    s = _as_checked("s", s)
    return _unwrap(_slot(t, s))


def coherent_snr(g1, p1, g2, p2):
    """Received SNR when two transmitters send the same codeword in phase."""
    args = [_as_checked(n, v) for n, v in (("g1", g1), ("p1", p1), ("g2", g2), ("p2", p2))]
    return _unwrap(_coherent(*args))


def power_for_slot_rate(t, gain_sq, rate):
    """Smallest energy giving ``rate`` bits in a slot: inverse of :func:`slot_term`."""
    t = _as_checked("t", t)
    g = _as_checked("gain_sq", gain_sq)
    r = _as_checked("rate", rate)
    if np.any((t == 0) & (r > 0)) or np.any((g == 0) & (r > 0)):
        raise DomainError("positive rate unreachable with zero slot or zero gain")
    return _unwrap(_slot_inverse(t, g, r))
