"""Determinant-invariant reduction and the Duan separability inequality.

Local symplectic transformations bring ``[[G, C], [C, G]]`` to
``G = g 1``, ``C = diag(c, c')`` while preserving ``det G = g^2``,
``det C = c c'`` and ``det M = (g^2 - c^2)(g^2 - c'^2)``.  The state is
separable iff ``sqrt((g - c)(g + c')) >= 1/2``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy import optimize

from .covariance import CovarianceMatrix
from .errors import NoCrossingError, NumericalError, StructureError, UnphysicalInputError

BLOCK_TOL = 1e-12
CLAMP_TOL = 1e-10
DET_CROSSCHECK_TOL = 1e-10

ENTANGLED_TO_SEPARABLE = "entangled->separable"
SEPARABLE_TO_ENTANGLED = "separable->entangled"


@dataclass(frozen=True)
class ReducedForm:
    g: float
    c: float
    cprime: float

    def invariants(self):
        """``(det G, det C, det M)`` rebuilt from the reduced triple."""
        g2 = self.g**2
        return g2, self.c * self.cprime, (g2 - self.c**2) * (g2 - self.cprime**2)


@dataclass(frozen=True)
class SeparabilityVerdict:
    lhs: float
    separable: bool

    @property
    def margin(self) -> float:
        return self.lhs - 0.5


@dataclass(frozen=True)
class CrossingReport:
    crossings: list
    esd_time: float | None


def _det2(a):
    return a[..., 0, 0] * a[..., 1, 1] - a[..., 0, 1] * a[..., 1, 0]


def _block_dets(entries):
    e = np.asarray(entries, dtype=float)
    G, C = e[..., :2, :2], e[..., :2, 2:]
    return _det2(G), _det2(C), _det2(G + C), _det2(G - C)


def block_invariants_array(entries):
    """Vectorised ``(det G, det C, det M)`` over a stack of ``(..., 4, 4)``."""
    detG, detC, dplus, dminus = _block_dets(entries)
    return detG, detC, dplus * dminus


def _check_structure(M: CovarianceMatrix):
    scale = max(np.max(np.abs(M.entries)), 1.0)
    if M.block_defect() > BLOCK_TOL * scale:
        raise StructureError(f"block symmetry violated by {M.block_defect():.3e}")


def block_invariants(M: CovarianceMatrix):
    _check_structure(M)
    detG, detC, detM = (float(x) for x in block_invariants_array(M.entries))
    full = float(np.linalg.det(M.entries))
    # LU round-off grows with the Hadamard bound, not with det M itself
    bound = float(np.prod(np.linalg.norm(M.entries, axis=1)))
    if abs(full - detM) > DET_CROSSCHECK_TOL * max(abs(detM), 1e-6 * bound):
        raise NumericalError(f"4x4 determinant {full!r} disagrees with block formula {detM!r}")
    return detG, detC, detM


def _reduce_dets(detG, detC, dplus, dminus):
    # With one symplectic map acting on both modes, det(G +- C) are invariant
    # as well, so the reduced C has eigenvalues summing to
    # (det(G+C) - det(G-C)) / 2g and multiplying to det C.  Solving that
    # quadratic avoids the cancellation in S^2 - 4 det C^2.
    detG, detC, dplus, dminus = map(np.asarray, (detG, detC, dplus, dminus))
    if np.any(detG <= 0):
        raise UnphysicalInputError("det G must be positive")
    g = np.sqrt(detG)
    half_sum = (dplus - dminus) / (4.0 * g)
    disc = half_sum**2 - detC
    band = CLAMP_TOL * np.maximum(np.abs(detG), half_sum**2)
    if np.any(disc < -band):
        raise UnphysicalInputError("reduction quadratic has no real roots")
    # c is the larger eigenvalue magnitude; flipping the sign of one mode
    # makes it positive and leaves c' = det C / c
    c = np.abs(half_sum) + np.sqrt(np.maximum(disc, 0.0))
    with np.errstate(invalid="ignore", divide="ignore"):
        cprime = np.where(c > 0, detC / np.where(c > 0, c, 1.0), 0.0)
    return g, c, cprime


def reduce(M: CovarianceMatrix) -> ReducedForm:
    """Canonical triple with ``c >= |c'|`` and ``c'`` carrying the sign of det C."""
    _check_structure(M)
    block_invariants(M)
    g, c, cp = _reduce_dets(*_block_dets(M.entries))
    return ReducedForm(float(g), float(c), float(cp))


def reduce_array(entries):
    """Vectorised ``reduce`` returning arrays ``(g, c, cprime)``."""
    return _reduce_dets(*_block_dets(entries))


def reduce_dets(detG, detC, dplus, dminus):
    """Reduce from ``det G, det C, det(G+C), det(G-C)`` supplied directly."""
    return _reduce_dets(detG, detC, dplus, dminus)


def duan_lhs(g, c, cprime):
    g, c, cprime = map(np.asarray, (g, c, cprime))
    f1, f2 = g - c, g + cprime
    band = CLAMP_TOL * np.maximum(np.abs(g), 1.0)
    if np.any(f1 < -band) or np.any(f2 < -band):
        raise UnphysicalInputError("negative factor in the Duan inequality")
    return np.sqrt(np.maximum(f1, 0.0) * np.maximum(f2, 0.0))[()]


def duan_verdict(r: ReducedForm) -> SeparabilityVerdict:
    lhs = float(duan_lhs(r.g, r.c, r.cprime))
    return SeparabilityVerdict(lhs, lhs >= 0.5)


def esd_crossings(times: Sequence[float], trajectory: Sequence[SeparabilityVerdict],
                  refine: Callable[[float], SeparabilityVerdict], xtol: float = 1e-12) -> CrossingReport:
    """Locate every change of separability on the grid and refine it.

    Each bracket is refined by Brent's method on ``refine(t).margin``, which
    keeps the sign change inside the bracket at every step.
    """
    times = np.asarray(times, dtype=float)
    if np.any(np.diff(times) <= 0):
        raise ValueError("time grid must be strictly increasing")
    sep = np.array([v.separable for v in trajectory])
    flips = np.nonzero(sep[1:] != sep[:-1])[0]
    if len(flips) == 0:
        state = "separable" if sep[0] else "entangled"
        raise NoCrossingError(f"state stays {state} on [{times[0]}, {times[-1]}]")
    crossings = []
    for i in flips:
        lo, hi = times[i], times[i + 1]
        f = lambda t: refine(t).margin
        root = optimize.brentq(f, lo, hi, xtol=xtol, rtol=4 * np.finfo(float).eps, maxiter=200)
        direction = ENTANGLED_TO_SEPARABLE if sep[i + 1] else SEPARABLE_TO_ENTANGLED
        crossings.append((float(root), direction))
    esd = next((t for t, d in crossings if d == ENTANGLED_TO_SEPARABLE), None)
    return CrossingReport(crossings, esd)
