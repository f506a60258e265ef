"""Covariance matrix of the two-particle Gaussian state.

The Wigner characteristic function is written ``exp(-X.M.X/2)`` over the
dimensionless phase vector ``X = (L P1/hbar, Q1/L, L P2/hbar, Q2/L)``.  Two
routes produce ``M``: the closed-form free-particle entries
(``assemble_free``), and polarization of the exponent itself
(``extract_covariance``), which also covers the bound oscillator.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bath import PhysicalParams
from .errors import DomainError, NonQuadraticError, StructureError
from .kernels import KernelSet

QUADRATIC_TOL = 1e-10
PHYSICAL_TOL = 1e-9


@dataclass(frozen=True)
class MeasurementSpec:
    """Gaussian initial measurement ``exp(-(a11 x1^2 + 2 a12 x1 x2 + a22 x2^2)/4)``.

    Stored as dimensionless ``b`` coefficients with ``a = scale * b`` and
    ``scale = zeta / hbar``.  ``b22`` defaults to ``b11`` (symmetric case).
    """

    b11: float
    b12: float
    b22: float | None = None
    scale: float = 1.0

    def __post_init__(self):
        if self.b22 is None:
            object.__setattr__(self, "b22", self.b11)
        if not (self.scale > 0):
            raise DomainError("measurement scale must be positive")
        if not (self.b11 > 0 and self.b22 > 0):
            raise DomainError(f"b11 and b22 must be positive (got {self.b11}, {self.b22})")
        if not (self.det_b > 0):
            raise DomainError(f"a11 a22 - a12^2 must be positive (b11={self.b11}, b12={self.b12})")

    @classmethod
    def from_dimensionless(cls, b11, b12, b22=None, params: PhysicalParams | None = None):
        params = params or PhysicalParams()
        return cls(b11, b12, b22, scale=params.zeta / params.hbar)

    @property
    def symmetric(self) -> bool:
        return self.b22 == self.b11

    @property
    def a11(self) -> float:
        return self.scale * self.b11

    @property
    def a12(self) -> float:
        return self.scale * self.b12

    @property
    def a22(self) -> float:
        return self.scale * self.b22

    @property
    def det_b(self) -> float:
        if self.symmetric:
            return (self.b11 - self.b12) * (self.b11 + self.b12)
        return self.b11 * self.b22 - self.b12**2

    @property
    def det(self) -> float:
        """``a11 a22 - a12^2``; factored as a difference of squares when symmetric."""
        return self.scale**2 * self.det_b


@dataclass(frozen=True)
class UnitsSpec:
    L: float = 1.0

    def __post_init__(self):
        if not (self.L > 0 and np.isfinite(self.L)):
            raise DomainError(f"L must be positive, got {self.L!r}")

    @classmethod
    def natural(cls, params: PhysicalParams, factor: float = 1.0):
        """``L = factor * sqrt(hbar / zeta)``."""
        return cls(factor * np.sqrt(params.hbar / params.zeta))


class CovarianceMatrix:
    """Real symmetric 4x4 matrix ``[[G, C], [C^T, G']]``."""

    def __init__(self, entries):
        entries = np.array(entries, dtype=float)
        if entries.shape != (4, 4):
            raise StructureError(f"expected a 4x4 matrix, got shape {entries.shape}")
        if np.max(np.abs(entries - entries.T)) > 1e-14 * max(np.max(np.abs(entries)), 1.0):
            raise StructureError("covariance matrix is not symmetric")
        entries = 0.5 * (entries + entries.T)
        entries.setflags(write=False)
        self.entries = entries

    def __repr__(self):
        return f"CovarianceMatrix({self.entries.tolist()!r})"

    @property
    def Gblock(self) -> np.ndarray:
        return self.entries[:2, :2]

    @property
    def Cblock(self) -> np.ndarray:
        return self.entries[:2, 2:]

    def block_defect(self) -> float:
        """Max deviation from the symmetric form ``[[G, C], [C, G]]``."""
        e = self.entries
        return float(max(np.max(np.abs(e[2:, 2:] - e[:2, :2])), np.max(np.abs(e[:2, 2:] - e[:2, 2:].T))))

    def is_physical(self, tol=PHYSICAL_TOL) -> bool:
        return bool(np.all(np.diag(self.entries) > 0) and np.linalg.det(self.Gblock) >= 0.25 * (1 - tol))


# -- exponent evaluator ------------------------------------------------------

@dataclass(frozen=True)
class ExponentEvaluator:
    """Log of the Wigner characteristic function at one time.

    Holds the kernel values ``G, Gdot, s, sdot, v2`` (free particle) or
    ``G, Gdot, c, cdot, x2, v2`` (oscillator).  Call with ``(P1, Q1, P2, Q2)``.
    """

    spec: MeasurementSpec
    m: float
    hbar: float
    G: float
    Gdot: float
    v2: float
    s: float = 0.0
    sdot: float = 0.0
    c: float | None = None
    cdot: float = 0.0
    x2: float | None = None

    @property
    def free(self) -> bool:
        return self.x2 is None

    def __call__(self, point) -> float:
        P1, Q1, P2, Q2 = point
        a11, a12, a22 = self.spec.a11, self.spec.a12, self.spec.a22
        m, hb = self.m, self.hbar
        L1 = self.G * P1 + m * self.Gdot * Q1
        L2 = self.G * P2 + m * self.Gdot * Q2
        out = -(a11 * L1**2 + 2 * a12 * L1 * L2 + a22 * L2**2) / 8.0
        out -= m**2 * self.v2 * (Q1**2 + Q2**2) / (2 * hb**2)
        if self.free:
            out -= (a22 * P1**2 - 2 * a12 * P1 * P2 + a11 * P2**2) / (2 * hb**2 * self.spec.det)
            out -= sum(self.s * P**2 + m * self.sdot * P * Q for P, Q in ((P1, Q1), (P2, Q2))) / (2 * hb**2)
            return out
        x2 = self.x2
        K1 = (self.c * P1 + m * self.cdot * Q1) / x2
        K2 = (self.c * P2 + m * self.cdot * Q2) / x2
        out -= x2 * (P1**2 - K1**2 + P2**2 - K2**2) / (2 * hb**2)
        inv = 1.0 / x2
        det = (a11 + inv) * (a22 + inv) - a12**2
        out -= ((a22 + inv) * K1**2 - 2 * a12 * K1 * K2 + (a11 + inv) * K2**2) / (2 * hb**2 * det)
        return out


def make_exponent(t: float, k: KernelSet, spec: MeasurementSpec) -> ExponentEvaluator:
    p = k.params
    G, Gd = k.green(t)
    v2 = k.velocity_variance()
    if p.is_free:
        s, sd = k.msd(t)
        return ExponentEvaluator(spec, p.m, p.hbar, float(G), float(Gd), v2, s=float(s), sdot=float(sd))
    c, cd, x2 = k.correlation(t)
    return ExponentEvaluator(spec, p.m, p.hbar, float(G), float(Gd), v2, c=float(c), cdot=float(cd), x2=x2)


def exponent_eval(point, t: float, k: KernelSet, spec: MeasurementSpec) -> float:
    return make_exponent(t, k, spec)(point)


def extract_covariance(e, u: UnitsSpec, hbar: float | None = None) -> CovarianceMatrix:
    """Recover ``M`` from a quadratic exponent by polarization.

    ``M_ij = -[e(x_i + x_j) - e(x_i) - e(x_j)]`` on the physical points
    ``x_i`` that map to unit ``X`` vectors.
    """
    hb = getattr(e, "hbar", None) if hbar is None else hbar
    if hb is None:
        raise ValueError("hbar is needed to map X onto physical variables")
    to_phys = np.array([hb / u.L, u.L, hb / u.L, u.L])
    basis = np.diag(to_phys)

    origin = e(np.zeros(4))
    diag = np.array([e(basis[i]) for i in range(4)])
    scale = max(np.max(np.abs(diag)), 1e-300)
    if abs(origin) > QUADRATIC_TOL * scale:
        raise NonQuadraticError(f"exponent is {origin!r} at the origin")
    probes = list(basis) + [basis.sum(axis=0), basis[0] - basis[3]]
    for v in probes:
        ev, e2v, emv = e(v), e(2 * v), e(-v)
        if abs(e2v - 4 * ev) > QUADRATIC_TOL * max(abs(e2v), scale) or abs(ev - emv) > QUADRATIC_TOL * max(abs(ev), scale):
            raise NonQuadraticError("exponent fails the quadratic probe")

    M = np.empty((4, 4))
    for i in range(4):
        M[i, i] = -2.0 * diag[i]
        for j in range(i + 1, 4):
            M[i, j] = M[j, i] = -(e(basis[i] + basis[j]) - diag[i] - diag[j])
    return CovarianceMatrix(M)


# -- closed forms -------------------------------------------------------------

def free_entries(G, Gdot, s, sdot, v2, spec: MeasurementSpec, u: UnitsSpec, m=1.0, hbar=1.0):
    """Closed-form matrices for arrays of kernel values; shape ``(..., 4, 4)``."""
    if not spec.symmetric:
        raise DomainError("closed-form assembly needs a22 == a11")
    G, Gdot, s, sdot = np.broadcast_arrays(*map(np.asarray, (G, Gdot, s, sdot)))
    a11, a12 = spec.a11, spec.a12
    det = spec.det
    L2 = u.L**2
    hg = hbar * G / 2.0
    mg = m * Gdot / 2.0
    g11 = (a11 / det + hg**2 * a11 + s) / L2
    g12 = hg * mg * a11 + m * sdot / (2.0 * hbar)
    g22 = L2 * (m**2 * v2 / hbar**2 + mg**2 * a11)
    c11 = (-a12 / det + hg**2 * a12) / L2
    c12 = hg * mg * a12
    c22 = L2 * mg**2 * a12
    out = np.empty(G.shape + (4, 4))
    Gb = np.stack([np.stack([g11, g12], -1), np.stack([g12, g22], -1)], -2)
    Cb = np.stack([np.stack([c11, c12], -1), np.stack([c12, c22], -1)], -2)
    out[..., :2, :2] = Gb
    out[..., 2:, 2:] = Gb
    out[..., :2, 2:] = Cb
    out[..., 2:, :2] = Cb
    return out


def free_block_dets(G, Gdot, s, sdot, v2, spec: MeasurementSpec, m=1.0, hbar=1.0):
    """``(det G, det C, det(G+C), det(G-C))`` of the free-particle matrix.

    Each block is a rank-one term ``a vv^T`` plus a well-conditioned
    remainder ``R``, so ``det(a vv^T + R) = det R + a v^T adj(R) v`` avoids the
    cancellation that the assembled entries suffer when ``a12 ~ a11``.  No
    length scale enters: the result is exactly independent of ``L``.
    """
    if not spec.symmetric:
        raise DomainError("closed-form assembly needs a22 == a11")
    G, Gdot, s, sdot = np.broadcast_arrays(*map(np.asarray, (G, Gdot, s, sdot)))
    a11, a12 = spec.a11, spec.a12
    v1, v2_ = hbar * G / 2.0, m * Gdot / 2.0
    r12 = m * sdot / (2.0 * hbar)
    r22 = m**2 * v2 / hbar**2

    def rank_one_det(a, r11):
        return r11 * r22 - r12**2 + a * (v1**2 * r22 - 2.0 * v1 * v2_ * r12 + v2_**2 * r11)

    detG = rank_one_det(a11, a11 / spec.det + s)
    detC = -((a12 * v2_) ** 2) / spec.det
    # (a11 -+ a12) / det = 1 / (a11 +- a12)
    dplus = rank_one_det(a11 + a12, 1.0 / (a11 + a12) + s)
    dminus = rank_one_det(a11 - a12, 1.0 / (a11 - a12) + s)
    return detG, detC, dplus, dminus


def assemble_free(t: float, k: KernelSet, spec: MeasurementSpec, u: UnitsSpec) -> CovarianceMatrix:
    p = k.params
    if not p.is_free:
        raise DomainError("assemble_free needs a free particle (omega0 = 0)")
    G, Gd = k.green(t)
    s, sd = k.msd(t)
    return CovarianceMatrix(free_entries(G, Gd, s, sd, k.velocity_variance(), spec, u, p.m, p.hbar))


def initial_covariance(spec: MeasurementSpec, v2: float, u: UnitsSpec, params: PhysicalParams | None = None) -> CovarianceMatrix:
    """``M`` at t = 0 for the free particle; valid for asymmetric specs too."""
    p = params or PhysicalParams()
    m, hb = p.m, p.hbar
    det, L2 = spec.det, u.L**2
    q_var = m**2 * v2 / hb**2
    M = np.zeros((4, 4))
    M[0, 0] = spec.a22 / (L2 * det)
    M[2, 2] = spec.a11 / (L2 * det)
    M[0, 2] = M[2, 0] = -spec.a12 / (L2 * det)
    M[1, 1] = L2 * (spec.a11 / 4.0 + q_var)
    M[3, 3] = L2 * (spec.a22 / 4.0 + q_var)
    M[1, 3] = M[3, 1] = L2 * spec.a12 / 4.0
    return CovarianceMatrix(M)


def assemble(t: float, k: KernelSet, spec: MeasurementSpec, u: UnitsSpec) -> CovarianceMatrix:
    """Closed form for the symmetric free particle, polarization otherwise."""
    if k.params.is_free and spec.symmetric:
        return assemble_free(t, k, spec, u)
    return extract_covariance(make_exponent(t, k, spec), u)
