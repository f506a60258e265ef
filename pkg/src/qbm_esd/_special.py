"""Exponentially scaled exponential integrals for complex arguments.

Only the right half plane ``Re z >= 0`` is needed.  Both functions switch to
their asymptotic series for ``|z| >= 40``, where the truncation error of the
optimally cut series is below double precision.
"""
import math

import numpy as np
from scipy import special

_ASYMPTOTIC_RADIUS = 40.0
_N_TERMS = 40
_FACTORIALS = np.array([math.factorial(k) for k in range(_N_TERMS)], dtype=float)


def _series(z, sign):
    # (1/z) sum_k sign**k k! / z**k, summed Horner-style
    w = 1.0 / z
    acc = np.zeros_like(z)
    for k in range(_N_TERMS - 1, -1, -1):
        acc = acc * w + (sign**k) * _FACTORIALS[k]
    return acc * w


def e1_scaled(z):
    """``exp(z) E1(z)`` on the principal branch."""
    z = np.asarray(z, dtype=complex)
    out = np.empty_like(z)
    big = np.abs(z) >= _ASYMPTOTIC_RADIUS
    out[big] = _series(z[big], -1.0)
    small = ~big
    out[small] = np.exp(z[small]) * special.exp1(z[small])
    return out


def ei_scaled(z):
    """``exp(-z) Ei(z)`` continued analytically off the positive real axis.

    For real ``z`` this is the principal-value ``Ei``; elsewhere in the right
    half plane ``Ei(z) = -E1(-z) + i pi sgn(Im z)``.
    """
    z = np.asarray(z, dtype=complex)
    out = np.empty_like(z)
    sgn = np.sign(z.imag)
    big = np.abs(z) >= _ASYMPTOTIC_RADIUS
    zb = z[big]
    out[big] = _series(zb, 1.0) + 1j * np.pi * sgn[big] * np.exp(-zb)
    real = ~big & (z.imag == 0.0)
    xr = z[real].real
    out[real] = np.exp(-xr) * special.expi(xr)
    cplx = ~big & ~real
    zc = z[cplx]
    out[cplx] = np.exp(-zc) * (-special.exp1(-zc) + 1j * np.pi * sgn[cplx])
    return out
