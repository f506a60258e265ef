"""Independent reference computations used by tests and ``validate``.

The kernel oracle integrates the defining spectral integrals with
QUADPACK (a finite head plus a QAWF Fourier tail), sharing nothing with the
pole path or with the panel-quadrature code in ``quadrature``.  The
separability oracle applies Simon's PPT determinant inequality.
"""
from __future__ import annotations

import numpy as np
from scipy import integrate

from .bath import PhysicalParams, im_alpha
from .covariance import CovarianceMatrix
from .errors import DivergenceError, DomainError, UnphysicalInputError

KINDS = ("G", "Gdot", "s", "sdot", "v2", "c")

_J = np.array([[0.0, 1.0], [-1.0, 0.0]])


def _weight(params: PhysicalParams):
    if params.temperature == 0.0:
        return lambda w: im_alpha(w, params)
    kT, hb = params.kT, params.hbar
    return lambda w: im_alpha(w, params) / np.tanh(hb * w / (2.0 * kT))


def _split(params: PhysicalParams) -> float:
    scale = params.frequency_scale()
    if params.temperature > 0:
        scale = max(scale, 2.0 * params.kT / params.hbar)
    return 4.0 * scale


def _head(f, a):
    val, _ = integrate.quad(f, 0.0, a, epsabs=1e-14, epsrel=1e-12, limit=2000)
    return val


def _plain_tail(f, a):
    val, _ = integrate.quad(f, a, np.inf, epsabs=1e-15, epsrel=1e-12, limit=400)
    return val


def _fourier_tail(f, a, t, kind):
    val, _ = integrate.quad(f, a, np.inf, weight=kind, wvar=t, epsabs=1e-15, limlst=400)
    return val


def quadrature_kernel_oracle(t: float, params: PhysicalParams, kind: str) -> float:
    """Slow ground truth for one kernel value at time ``t``."""
    if kind not in KINDS:
        raise ValueError(f"unknown kernel kind {kind!r}")
    if t < 0:
        raise DomainError("t must be non-negative")
    hb = params.hbar
    h = _weight(params)
    ia = lambda w: im_alpha(w, params)
    a = _split(params)

    if kind == "v2":
        if params.is_ohmic:
            raise DivergenceError("velocity variance diverges for an Ohmic bath")
        f = lambda w: w * w * h(w)
        return hb / np.pi * (_head(f, a) + _plain_tail(f, a))
    if kind == "G":
        if t == 0:
            return 0.0
        val = _head(lambda w: ia(w) * np.sin(w * t), a) + _fourier_tail(ia, a, t, "sin")
        return 2.0 / np.pi * val
    if kind == "Gdot":
        f = lambda w: w * ia(w)
        if t == 0:
            return 2.0 / np.pi * (_head(f, a) + _plain_tail(f, a))
        val = _head(lambda w: f(w) * np.cos(w * t), a) + _fourier_tail(f, a, t, "cos")
        return 2.0 / np.pi * val
    if kind == "s":
        if t == 0:
            return 0.0
        head = _head(lambda w: h(w) * 2.0 * np.sin(0.5 * w * t) ** 2, a)
        val = head + _plain_tail(h, a) - _fourier_tail(h, a, t, "cos")
        return 2.0 * hb / np.pi * val
    if kind == "sdot":
        if t == 0:
            return 0.0
        f = lambda w: w * h(w)
        val = _head(lambda w: f(w) * np.sin(w * t), a) + _fourier_tail(f, a, t, "sin")
        return 2.0 * hb / np.pi * val
    # kind == "c"
    if params.is_free:
        raise DomainError("position correlation needs omega0 > 0")
    if t == 0:
        return hb / np.pi * (_head(h, a) + _plain_tail(h, a))
    val = _head(lambda w: h(w) * np.cos(w * t), a) + _fourier_tail(h, a, t, "cos")
    return hb / np.pi * val


def sum_rule_integral(params: PhysicalParams) -> float:
    """``(2/pi) int_0^inf w Im alpha dw``, which should equal ``1/m``."""
    return quadrature_kernel_oracle(0.0, params, "Gdot")


def ppt_simon_oracle(M: CovarianceMatrix) -> bool:
    """Simon's separability test for a two-mode Gaussian state.

    Separable iff ``det A det B + (1/4 - |det C|)^2 - tr(A J C J B J C^T J)
    >= (det A + det B) / 4``, with vacuum covariance ``I/2``.
    """
    e = M.entries
    A, B, C = e[:2, :2], e[2:, 2:], e[:2, 2:]
    dA, dB, dC = np.linalg.det(A), np.linalg.det(B), np.linalg.det(C)
    if dA < 0.25 * (1 - 1e-9) or dB < 0.25 * (1 - 1e-9):
        raise UnphysicalInputError("local uncertainty relation violated")
    cross = np.trace(A @ _J @ C @ _J @ B @ _J @ C.T @ _J)
    lhs = dA * dB + (0.25 - abs(dC)) ** 2 - cross
    return bool(lhs >= 0.25 * (dA + dB))


def pt_symplectic_min(M: CovarianceMatrix) -> float:
    """Smallest symplectic eigenvalue of the partially transposed matrix."""
    e = np.array(M.entries)
    flip = np.diag([1.0, 1.0, 1.0, -1.0])
    sigma = np.kron(np.eye(2), _J)
    Vt = flip @ e @ flip
    return float(np.min(np.abs(np.linalg.eigvals(1j * sigma @ Vt))))


def standard_form(g, c, cprime) -> np.ndarray:
    M = np.diag([g, g, g, g]).astype(float)
    M[0, 2] = M[2, 0] = c
    M[1, 3] = M[3, 1] = cprime
    return M


def two_mode_squeezed(r: float) -> tuple:
    """``(g, c, c')`` of a two-mode squeezed vacuum."""
    return 0.5 * np.cosh(2 * r), 0.5 * np.sinh(2 * r), -0.5 * np.sinh(2 * r)


def random_symmetric_state(rng: np.random.Generator) -> tuple:
    """Random physical ``[[G, C], [C, G]]`` and the triple it was built from.

    The triple is drawn by rejection against the bona fide conditions
    ``(g -+ c)(g -+ c') >= 1/4`` and embedded with a random local symplectic
    map applied identically to both modes.
    """
    while True:
        g = rng.uniform(0.5, 5.0)
        c = rng.uniform(0.0, g)
        cp = rng.uniform(-c, c)
        if (g - c) * (g - cp) >= 0.25 and (g + c) * (g + cp) >= 0.25:
            break
    theta, phi = rng.uniform(0, np.pi, size=2)
    r = rng.uniform(-1.0, 1.0)
    rot = lambda a: np.array([[np.cos(a), -np.sin(a)], [np.sin(a), np.cos(a)]])
    S = rot(theta) @ np.diag([np.exp(r), np.exp(-r)]) @ rot(phi)
    SS = np.kron(np.eye(2), S)
    M = SS @ standard_form(g, c, cp) @ SS.T
    if rng.random() < 0.5:
        P = np.diag([1.0, 1.0, -1.0, -1.0])
        M = P @ M @ P
    return CovarianceMatrix(0.5 * (M + M.T)), (g, c, cp)
