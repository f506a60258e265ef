"""Exact partial-fraction inversion of the rational response function.

Clearing the factor ``1 - i omega tau`` turns ``alpha`` into ``N(omega) /
D(omega)`` with

    D = i m tau w**3 - m w**2 - i (zeta + m tau w0**2) w + m w0**2
    N = 1 - i tau w

so ``G(t) = sum_p r_p exp(-i p t) + static_term`` for ``t >= 0``, with
``r_p = -i Res_p alpha``.  For a free particle the zero-frequency pole is
split off exactly and appears as the plateau ``static_term = 1/zeta``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bath import PhysicalParams
from .errors import NumericalError

RESIDUAL_TOL = 1e-10
DEGENERACY_TOL = 1e-7


@dataclass(frozen=True)
class PoleSet:
    poles: np.ndarray
    residues: np.ndarray
    static_term: float = 0.0

    @property
    def alpha_residues(self) -> np.ndarray:
        """Residues of ``alpha`` itself at each pole (``i * residues``)."""
        return 1j * self.residues

    @property
    def zero_residue(self) -> complex:
        """Residue of ``alpha`` at the zero-frequency pole (0 if absent)."""
        return 1j * self.static_term

    def green(self, t):
        t = np.asarray(t, dtype=float)
        phase = np.exp(-1j * np.multiply.outer(t, self.poles))
        # the equal-time commutator vanishes exactly
        return np.where(t == 0.0, 0.0, (phase @ self.residues).real + self.static_term)[()]

    def green_dot(self, t):
        t = np.asarray(t, dtype=float)
        phase = np.exp(-1j * np.multiply.outer(t, self.poles))
        return (phase @ (-1j * self.poles * self.residues)).real[()]


def denominator_coefficients(params: PhysicalParams) -> np.ndarray:
    m, zeta, tau, w0 = params.m, params.zeta, params.tau, params.omega0
    if tau > 0:
        return np.array([1j * m * tau, -m, -1j * (zeta + m * tau * w0**2), m * w0**2])
    return np.array([-m, -1j * zeta, m * w0**2], dtype=complex)


def numerator_coefficients(params: PhysicalParams) -> np.ndarray:
    if params.tau > 0:
        return np.array([-1j * params.tau, 1.0])
    return np.array([1.0 + 0j])


def _polished_roots(coeffs: np.ndarray) -> np.ndarray:
    if len(coeffs) == 2:
        return np.array([-coeffs[1] / coeffs[0]])
    with np.errstate(all="ignore"):
        try:
            roots = np.roots(coeffs)
        except np.linalg.LinAlgError as exc:
            raise NumericalError(f"companion eigenvalues failed: {exc}") from None
        deriv = np.polyder(coeffs)
        roots = roots - np.polyval(coeffs, roots) / np.polyval(deriv, roots)
        powers = np.abs(roots)[:, None] ** np.arange(len(coeffs) - 1, -1, -1)
        scale = powers @ np.abs(coeffs)
        residual = np.abs(np.polyval(coeffs, roots))
    if not (np.all(np.isfinite(roots)) and np.all(np.isfinite(scale))):
        raise NumericalError("denominator roots overflow; memory time too short for the pole path")
    if np.any(residual > RESIDUAL_TOL * scale):
        raise NumericalError(f"root polish failed: residual {residual.max():.3e}")
    return roots


def pole_decomposition(params: PhysicalParams) -> PoleSet:
    """Factor the response denominator and compute residues.

    Raises NumericalError for near-degenerate roots (e.g. critical damping),
    where the residues lose all precision; callers should fall back to
    quadrature in that case.
    """
    denom = denominator_coefficients(params)
    numer = numerator_coefficients(params)
    reduced = denom[:-1] if params.is_free else denom
    roots = _polished_roots(reduced)

    # overdamped roots sit on the imaginary axis; drop round-off real parts
    snap = np.abs(roots.real) <= 1e-13 * np.abs(roots)
    roots = np.where(snap, 1j * roots.imag, roots)

    if np.any(roots.imag >= 0):
        raise NumericalError(f"non-causal pole in {roots}")
    if len(roots) > 1:
        gaps = np.abs(roots[:, None] - roots[None, :]) + np.diag(np.full(len(roots), np.inf))
        if gaps.min() < DEGENERACY_TOL * np.abs(roots).max():
            raise NumericalError(f"near-degenerate poles {roots}")

    d_denom = np.polyder(denom)
    alpha_res = np.polyval(numer, roots) / np.polyval(d_denom, roots)
    static = 0.0
    if params.is_free:
        # Res_0 alpha = N(0) / D'(0) = 1 / (-i zeta)
        static = float((-1j * (np.polyval(numer, 0.0) / np.polyval(d_denom, 0.0))).real)
    order = np.lexsort((roots.real, roots.imag))
    return PoleSet(poles=roots[order], residues=(-1j * alpha_res)[order], static_term=static)
