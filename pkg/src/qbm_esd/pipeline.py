"""Time evolution of the Duan quantity for one initial state."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .covariance import MeasurementSpec, UnitsSpec, assemble, free_block_dets, free_entries
from .duan import CrossingReport, SeparabilityVerdict, duan_lhs, esd_crossings, reduce_array, reduce_dets
from .kernels import KernelSet


@dataclass(frozen=True)
class Trajectory:
    gamma_t: np.ndarray
    g: np.ndarray
    c: np.ndarray
    cprime: np.ndarray
    lhs: np.ndarray
    matrices: np.ndarray

    @property
    def separable(self) -> np.ndarray:
        return self.lhs >= 0.5

    @property
    def verdicts(self):
        return [SeparabilityVerdict(float(x), bool(x >= 0.5)) for x in self.lhs]


class Evolution:
    """Bundle of kernels, measurement and units with vectorised evaluation."""

    def __init__(self, kernels: KernelSet, spec: MeasurementSpec, units: UnitsSpec | None = None):
        self.kernels = kernels
        self.spec = spec
        self.units = units or UnitsSpec.natural(kernels.params)

    @property
    def gamma(self) -> float:
        return self.kernels.params.gamma

    @property
    def closed_form(self) -> bool:
        return self.kernels.params.is_free and self.spec.symmetric

    def _free_kernels(self, t):
        k = self.kernels
        G, Gd = k.green(t)
        s, sd = k.msd(t)
        return G, Gd, s, sd, k.velocity_variance()

    def matrices(self, t):
        """Covariance matrices at physical times ``t``; shape ``(n, 4, 4)``."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        p = self.kernels.params
        if self.closed_form:
            return free_entries(*self._free_kernels(t), self.spec, self.units, p.m, p.hbar)
        return np.stack([assemble(tt, self.kernels, self.spec, self.units).entries for tt in t])

    def trajectory(self, gamma_t) -> Trajectory:
        gamma_t = np.atleast_1d(np.asarray(gamma_t, dtype=float))
        t = gamma_t / self.gamma
        p = self.kernels.params
        if self.closed_form:
            kern = self._free_kernels(t)
            Ms = free_entries(*kern, self.spec, self.units, p.m, p.hbar)
            g, c, cp = reduce_dets(*free_block_dets(*kern, self.spec, p.m, p.hbar))
        else:
            Ms = self.matrices(t)
            g, c, cp = reduce_array(Ms)
        return Trajectory(gamma_t, g, c, cp, np.atleast_1d(duan_lhs(g, c, cp)), Ms)

    def verdict(self, gamma_t: float) -> SeparabilityVerdict:
        lhs = float(self.trajectory([gamma_t]).lhs[0])
        return SeparabilityVerdict(lhs, lhs >= 0.5)

    def crossings(self, gamma_t, traj: Trajectory | None = None) -> CrossingReport:
        """Crossings in units of ``gamma t``; raises NoCrossingError if none."""
        traj = traj if traj is not None else self.trajectory(gamma_t)
        return esd_crossings(traj.gamma_t, traj.verdicts, self.verdict)
