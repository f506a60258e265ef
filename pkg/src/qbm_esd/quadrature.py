"""Panel quadrature for slowly decaying oscillatory integrals on [0, inf).

``fourier_integral`` splits the half line at the zeros of ``sin(w t)`` or
``cos(w t)``, integrates every panel with a vectorised adaptive
Gauss-Legendre rule, and accelerates the alternating sequence of partial
sums with Wynn's epsilon algorithm.
"""
from __future__ import annotations

import numpy as np
from scipy import integrate

from .errors import NumericalError

_NODES, _WEIGHTS = np.polynomial.legendre.leggauss(20)


def _gauss(f, lo, hi):
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    x = mid[:, None] + half[:, None] * _NODES[None, :]
    return half * (f(x) @ _WEIGHTS)


def panel_integrals(f, edges, rtol=1e-12, atol=0.0, max_depth=30):
    """Integrate vectorised ``f`` over each panel ``[edges[i], edges[i+1]]``.

    Each panel is bisected until a 20-point Gauss rule on the whole agrees
    with the sum over its halves.
    """
    edges = np.asarray(edges, dtype=float)
    lo, hi = edges[:-1], edges[1:]
    owner = np.arange(len(lo))
    out = np.zeros(len(lo))
    whole = _gauss(f, lo, hi)
    for _ in range(max_depth):
        mid = 0.5 * (lo + hi)
        left, right = _gauss(f, lo, mid), _gauss(f, mid, hi)
        halves = left + right
        done = np.abs(halves - whole) <= np.maximum(rtol * np.abs(halves), atol)
        np.add.at(out, owner[done], halves[done])
        keep = ~done
        if not keep.any():
            return out
        owner = np.concatenate([owner[keep], owner[keep]])
        whole = np.concatenate([left[keep], right[keep]])
        lo, hi = np.concatenate([lo[keep], mid[keep]]), np.concatenate([mid[keep], hi[keep]])
    raise NumericalError("adaptive panel quadrature did not converge")


def wynn_epsilon(partial_sums):
    """Wynn epsilon extrapolation of a sequence of partial sums."""
    s = np.asarray(partial_sums, dtype=float)
    n = len(s)
    if n < 3:
        return float(s[-1])
    prev = np.zeros(n + 1)
    curr = s.copy()
    best = float(s[-1])
    for k in range(1, n):
        diff = curr[1:] - curr[:-1]
        if np.any(diff == 0.0):
            return best
        nxt = prev[1 : len(curr)] + 1.0 / diff
        prev, curr = curr, nxt
        if k % 2 == 0:
            best = float(curr[-1])
        if len(curr) < 2:
            break
    return best


def fourier_integral(f, t, kind, start=0.0, structure=1.0, rtol=1e-10, atol=1e-15, chunk=32, max_panels=200_000):
    """``int_start^inf f(w) trig(w t) dw`` with trig = sin or cos, ``t > 0``.

    ``structure`` is a frequency beyond which ``f`` is assumed smooth and
    monotone, so the panel contributions alternate in sign from there on.
    """
    if t <= 0:
        raise ValueError("fourier_integral needs t > 0")
    trig = np.sin if kind == "sin" else np.cos
    offset = 0.0 if kind == "sin" else 0.5
    g = lambda w: f(w) * trig(w * t)

    step = np.pi / t
    k0 = int(np.floor(start / step - offset)) + 1
    first = (k0 + offset) * step
    total = 0.0 if first <= start else panel_integrals(g, [start, first], rtol, atol)[0]
    sums = []
    estimates = []
    k = k0
    while (k - k0) < max_panels:
        edges = (np.arange(k, k + chunk + 1) + offset) * step
        vals = panel_integrals(g, edges, rtol, atol)
        for v in vals:
            total += v
            sums.append(total)
        k += chunk
        if edges[-1] < 4.0 * structure:
            continue
        tail = sums[-min(len(sums), 24):]
        estimates.append(wynn_epsilon(tail))
        if len(estimates) >= 2:
            est = estimates[-1]
            if abs(est - estimates[-2]) <= max(rtol * abs(est), atol):
                return est
    raise NumericalError(f"Fourier tail did not converge (t={t})")


def half_line_integral(f, structure=1.0, rtol=1e-12, atol=1e-15):
    """Non-oscillatory ``int_0^inf f``, split at a few multiples of ``structure``."""
    points = structure * np.array([0.0, 0.5, 1.0, 2.0, 4.0, 16.0])
    head = panel_integrals(f, points, rtol, atol).sum()
    tail, err = integrate.quad(lambda w: float(f(np.array([w]))[0]), points[-1], np.inf,
                               epsabs=atol, epsrel=rtol, limit=400)
    return head + tail


def tail_integral(f, start, rtol=1e-12, atol=1e-15):
    """Non-oscillatory ``int_start^inf f``."""
    val, _ = integrate.quad(lambda w: float(f(np.array([w]))[0]), start, np.inf,
                            epsabs=atol, epsrel=rtol, limit=400)
    return val
