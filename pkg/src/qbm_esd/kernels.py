"""Second-moment kernels of quantum Brownian motion.

All kernels are fluctuation-dissipation integrals over ``Im alpha``:

    G(t)    = (2/pi)    int Im a(w) sin(wt) dw
    s(t)    = (2 hb/pi) int Im a(w) coth(hb w/2kT) (1 - cos wt) dw
    <xd^2>  = (hb/pi)   int w^2 Im a(w) coth(hb w/2kT) dw
    c(t)    = (hb/pi)   int Im a(w) coth(hb w/2kT) cos(wt) dw

with ``coth = 1`` at zero temperature.  ``method="poles"`` evaluates G
exactly from the partial-fraction decomposition and, at T = 0, reduces the
remaining integrals to exponential-integral combinations; at T > 0 those
fall back to panel quadrature.  ``method="quadrature"`` uses panel
quadrature throughout.
"""
from __future__ import annotations

import logging
from functools import cached_property

import numpy as np

from . import quadrature
from ._special import e1_scaled, ei_scaled
from .bath import PhysicalParams, im_alpha
from .errors import DivergenceError, DomainError, NumericalError
from .poles import PoleSet, pole_decomposition

log = logging.getLogger(__name__)

METHODS = ("poles", "quadrature")


def _as_times(t):
    t = np.asarray(t, dtype=float)
    if np.any(t < 0) or not np.all(np.isfinite(t)):
        raise DomainError("times must be finite and non-negative")
    return t


class KernelSet:
    """Immutable evaluator of G, Gdot, s, sdot, c, <x^2> and <xdot^2>."""

    def __init__(self, params: PhysicalParams, method: str = "poles"):
        if method not in METHODS:
            raise ValueError(f"unknown method {method!r}")
        self.params = params
        self.poles: PoleSet | None = None
        if method == "poles":
            try:
                self.poles = pole_decomposition(params)
            except NumericalError as exc:
                log.warning("pole decomposition failed (%s); using quadrature", exc)
                method = "quadrature"
        self.method = method

    def __repr__(self):
        return f"KernelSet({self.params!r}, method={self.method!r})"

    @property
    def _closed_form(self) -> bool:
        return self.poles is not None and self.params.temperature == 0.0

    # -- spectral weights ------------------------------------------------
    def _weight(self, w):
        """``Im alpha(w) coth(hbar w / 2kT)``."""
        ia = im_alpha(w, self.params)
        if self.params.temperature == 0.0:
            return ia
        x = self.params.hbar * w / (2.0 * self.params.kT)
        return ia / np.tanh(x)

    @property
    def _structure(self) -> float:
        scale = self.params.frequency_scale()
        if self.params.temperature > 0:
            scale = max(scale, 2.0 * self.params.kT / self.params.hbar)
        return 8.0 * scale

    # -- Green function --------------------------------------------------
    def green(self, t):
        """Return ``(G, Gdot)`` at time(s) ``t``."""
        t = _as_times(t)
        if self.poles is not None:
            return self.poles.green(t), self.poles.green_dot(t)
        p = self.params
        G = np.vectorize(lambda tt: self._quad(lambda w: im_alpha(w, p), tt, "sin"))(t)
        Gd = np.vectorize(lambda tt: self._quad(lambda w: w * im_alpha(w, p), tt, "cos"))(t)
        return (2.0 / np.pi * G)[()], (2.0 / np.pi * Gd)[()]

    def _quad(self, f, t, kind):
        if t == 0.0:
            if kind == "sin":
                return 0.0
            return quadrature.half_line_integral(f, self._structure / 8.0)
        return quadrature.fourier_integral(f, t, kind, structure=self._structure)

    # -- mean square displacement ----------------------------------------
    def msd(self, t):
        """Return ``(s, sdot)``; finite for the free particle."""
        t = _as_times(t)
        if self._closed_form:
            s, sd = self._msd_poles(np.atleast_1d(t))
        else:
            s = np.array([self._msd_quad(tt) for tt in np.atleast_1d(t).ravel()])
            sd = np.array([self._msd_dot_quad(tt) for tt in np.atleast_1d(t).ravel()])
        return s.reshape(t.shape)[()], sd.reshape(t.shape)[()]

    def _msd_poles(self, t):
        hb = self.params.hbar
        zero = t == 0.0
        tt = np.where(zero, 1.0, t)
        acc = np.zeros(tt.shape, dtype=complex)
        acc_dot = np.zeros(tt.shape, dtype=complex)
        pol = self.poles
        if pol.static_term != 0.0:
            acc += pol.zero_residue * (np.euler_gamma + np.log(tt))
        for p, R in zip(pol.poles, pol.alpha_residues):
            beta = 1j * p
            z = beta * tt
            eis, e1s = ei_scaled(z), e1_scaled(z)
            phi = -0.5 * (eis - e1s)
            psi = (eis + e1s) / (2.0 * beta)
            acc += R * (-np.log(beta) - phi)
            acc_dot += R * p * p * psi
        s = np.where(zero, 0.0, (2.0 * hb / np.pi * (-1j) * acc).real)
        sd = np.where(zero, 0.0, (2.0 * hb / np.pi * (-1j) * acc_dot).real)
        return s, sd

    def _msd_quad(self, t):
        if t == 0.0:
            return 0.0
        f = self._weight
        step = np.pi / t
        # head up to a cos zero beyond the spectral structure, then
        # int h - int h cos on the remainder
        k = max(int(np.ceil(self._structure / step - 0.5)), 0)
        cut = (k + 0.5) * step
        edges = np.concatenate([[0.0], (np.arange(k + 1) + 0.5) * step])
        head = quadrature.panel_integrals(lambda w: f(w) * 2.0 * np.sin(0.5 * w * t) ** 2, edges, atol=1e-16).sum()
        plain = quadrature.tail_integral(f, cut)
        osc = quadrature.fourier_integral(f, t, "cos", start=cut, structure=self._structure)
        return 2.0 * self.params.hbar / np.pi * (head + plain - osc)

    def _msd_dot_quad(self, t):
        if t == 0.0:
            return 0.0
        val = self._quad(lambda w: w * self._weight(w), t, "sin")
        return 2.0 * self.params.hbar / np.pi * val

    # -- velocity variance -----------------------------------------------
    @cached_property
    def _v2(self) -> float:
        p = self.params
        if p.is_ohmic:
            raise DivergenceError("velocity variance diverges logarithmically for an Ohmic bath")
        if self._closed_form:
            pol = self.poles
            val = 1j * p.hbar / np.pi * np.sum(pol.alpha_residues * pol.poles**2 * np.log(1j * pol.poles))
            return float(val.real)
        val = quadrature.half_line_integral(lambda w: w * w * self._weight(w), self._structure / 8.0)
        return p.hbar / np.pi * val

    def velocity_variance(self) -> float:
        return self._v2

    # -- oscillator correlation ------------------------------------------
    @cached_property
    def _x2(self) -> float:
        p = self.params
        if self._closed_form:
            pol = self.poles
            val = (-1j) * p.hbar / np.pi * np.sum(pol.alpha_residues * -np.log(1j * pol.poles))
            return float(val.real)
        return p.hbar / np.pi * quadrature.half_line_integral(self._weight, self._structure / 8.0)

    def correlation(self, t):
        """Return ``(c, cdot, <x^2>)``; requires a bound particle."""
        if self.params.is_free:
            raise DomainError("position correlation needs omega0 > 0")
        t = _as_times(t)
        x2 = self._x2
        if self._closed_form:
            s, sd = self._msd_poles(np.atleast_1d(t))
            s, sd = s.reshape(t.shape)[()], sd.reshape(t.shape)[()]
            return x2 - 0.5 * s, -0.5 * sd, x2
        hb = self.params.hbar
        c = np.array([x2 if tt == 0 else hb / np.pi * self._quad(self._weight, tt, "cos")
                      for tt in np.atleast_1d(t).ravel()])
        cd = np.array([-hb / np.pi * self._quad(lambda w: w * self._weight(w), tt, "sin")
                       for tt in np.atleast_1d(t).ravel()])
        return c.reshape(t.shape)[()], cd.reshape(t.shape)[()], x2


def green_function(t, k: KernelSet):
    return k.green(t)


def msd(t, k: KernelSet):
    return k.msd(t)


def velocity_variance(k: KernelSet) -> float:
    return k.velocity_variance()


def oscillator_correlation(t, k: KernelSet):
    return k.correlation(t)
