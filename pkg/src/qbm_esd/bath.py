"""Bath model: physical parameters, memory friction and response function.

The friction kernel is the single-relaxation-time memory
``mu(t) = (zeta/tau) exp(-t/tau)``, whose Fourier transform is
``zeta / (1 - i omega tau)``; ``tau = 0`` is the Ohmic limit.  The particle
response function is

    alpha(omega) = 1 / (m (omega0**2 - omega**2) - i omega mu(omega)).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError


@dataclass(frozen=True)
class PhysicalParams:
    """Particle and bath parameters.

    ``temperature`` is the dimensionless ratio ``kT / (hbar gamma)``.
    ``omega0 = 0`` selects the free particle, ``tau = 0`` the Ohmic bath.
    """

    m: float = 1.0
    hbar: float = 1.0
    zeta: float = 1.0
    tau: float = 0.0
    omega0: float = 0.0
    temperature: float = 0.0

    def __post_init__(self):
        for name in ("m", "hbar", "zeta"):
            value = getattr(self, name)
            if not (np.isfinite(value) and value > 0):
                raise DomainError(f"{name} must be positive, got {value!r}")
        for name in ("tau", "omega0", "temperature"):
            value = getattr(self, name)
            if not (np.isfinite(value) and value >= 0):
                raise DomainError(f"{name} must be non-negative, got {value!r}")

    @property
    def gamma(self) -> float:
        return self.zeta / self.m

    @property
    def kT(self) -> float:
        return self.temperature * self.hbar * self.gamma

    @property
    def is_free(self) -> bool:
        return self.omega0 == 0.0

    @property
    def is_ohmic(self) -> bool:
        return self.tau == 0.0

    def frequency_scale(self) -> float:
        """Largest natural frequency of the problem; used to place breakpoints."""
        scales = [self.gamma, self.omega0]
        if self.tau > 0:
            scales += [1.0 / self.tau, np.sqrt(self.zeta / (self.m * self.tau))]
        return float(max(scales))


def mu_tilde(omega, params: PhysicalParams):
    """Fourier transform of the memory function, ``zeta / (1 - i omega tau)``."""
    omega = np.asarray(omega, dtype=float)
    if params.tau == 0.0:
        return params.zeta * np.ones_like(omega, dtype=complex)[()]
    return (params.zeta / (1.0 - 1j * omega * params.tau))[()]


def response_alpha(omega, params: PhysicalParams):
    """Complex susceptibility ``alpha(omega)``.

    Raises DomainError at ``omega = 0`` for a free particle, where the
    response has its zero-frequency pole.
    """
    omega = np.asarray(omega, dtype=float)
    if params.is_free and np.any(omega == 0.0):
        raise DomainError("free-particle response is singular at omega = 0")
    denom = params.m * (params.omega0**2 - omega**2) - 1j * omega * mu_tilde(omega, params)
    return (1.0 / denom)[()]


def im_alpha(omega, params: PhysicalParams):
    """``Im alpha(omega)`` evaluated in real arithmetic.

    Written out as ``omega Re mu / |D|**2`` so that the rapidly decaying
    imaginary part keeps full relative accuracy at large ``omega``.
    """
    omega = np.asarray(omega, dtype=float)
    m, zeta, tau, w0 = params.m, params.zeta, params.tau, params.omega0
    damp = 1.0 / (1.0 + (omega * tau) ** 2)
    re_d = m * (w0**2 - omega**2) + zeta * tau * omega**2 * damp
    im_d = -zeta * omega * damp
    return (-im_d / (re_d**2 + im_d**2))[()]
