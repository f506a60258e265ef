"""Registry of reference checks behind the ``validate`` command.

Every check receives a :class:`Context` (kernel factory plus a seeded RNG)
and returns an :class:`OracleReport`.  Failures are reported, never raised.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import oracles
from .bath import PhysicalParams
from .covariance import CovarianceMatrix, MeasurementSpec, UnitsSpec, assemble_free, extract_covariance, initial_covariance, make_exponent
from .duan import ReducedForm, duan_lhs, duan_verdict, reduce
from .kernels import KernelSet
from .pipeline import Evolution

DEFAULT_SEED = 20100607
FIG1_CONFIGS = {"A": (5.0, 4.0), "B": (5000.0, 4999.0)}
FIG1_GAMMA_TAUS = (5.0, 0.2)


@dataclass(frozen=True)
class OracleReport:
    name: str
    max_rel_err: float
    max_abs_err: float
    passed: bool
    samples: int


@dataclass
class Context:
    kernel_factory: Callable[..., KernelSet] = KernelSet
    rng: np.random.Generator = field(default_factory=lambda: np.random.default_rng(DEFAULT_SEED))
    grid_points: int = 201


def relative_errors(values, reference, floor_fraction=1e-8):
    """Elementwise ``|v - r| / max(|r|, floor_fraction * max|r|)``."""
    values, reference = np.asarray(values, float), np.asarray(reference, float)
    floor = floor_fraction * max(np.max(np.abs(reference)), np.finfo(float).tiny)
    abs_err = np.abs(values - reference)
    return abs_err / np.maximum(np.abs(reference), floor), abs_err


def _report(name, rel, abs_err, tol, samples=None):
    rel, abs_err = np.atleast_1d(rel), np.atleast_1d(abs_err)
    mr, ma = float(np.max(rel, initial=0.0)), float(np.max(abs_err, initial=0.0))
    return OracleReport(name, mr, ma, bool(mr <= tol), int(samples if samples is not None else rel.size))


def random_params(rng, n):
    """Random valid single-relaxation-time baths in natural units."""
    out = []
    while len(out) < n:
        tau = float(10 ** rng.uniform(-1.5, 1.5))
        w0 = float(rng.choice([0.0, 10 ** rng.uniform(-1, 0.5)]))
        try:
            KernelSet(PhysicalParams(tau=tau, omega0=w0))
        except Exception:
            continue
        out.append(PhysicalParams(tau=tau, omega0=w0))
    return out


# -- checks -------------------------------------------------------------------

def check_sum_rule(ctx: Context) -> OracleReport:
    rels, abss = [], []
    for p in random_params(ctx.rng, 20):
        k = ctx.kernel_factory(p)
        target = 1.0 / p.m
        for val in (oracles.sum_rule_integral(p), float(k.green(0.0)[1])):
            rels.append(abs(val - target) / target)
            abss.append(abs(val - target))
    return _report("sum_rule", rels, abss, 1e-6, samples=20)


def check_ohmic_limit(ctx: Context) -> OracleReport:
    t = np.linspace(0.0, 20.0, ctx.grid_points)
    rels, abss = [], []
    for tau, tol in ((1e-4, 1e-3), (0.0, 1e-10)):
        p = PhysicalParams(tau=tau)
        G = ctx.kernel_factory(p).green(t)[0]
        ref = (1.0 - np.exp(-p.gamma * t)) / p.zeta
        rel, ab = relative_errors(G, ref)
        rels.append(np.max(rel) / tol)
        abss.append(np.max(ab))
    # errors are normalised by their own tolerance
    return _report("ohmic_limit", rels, abss, 1.0, samples=2 * len(t))


def check_kernel_paths(ctx: Context) -> OracleReport:
    t = np.linspace(0.0, 20.0, ctx.grid_points)
    rels, abss = [], []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for tau in FIG1_GAMMA_TAUS:
            p = PhysicalParams(tau=tau)
            k = ctx.kernel_factory(p)
            G, Gd = k.green(t)
            s, sd = k.msd(t)
            for kind, vals in (("G", G), ("Gdot", Gd), ("s", s), ("sdot", sd)):
                ref = [oracles.quadrature_kernel_oracle(tt, p, kind) for tt in t]
                rel, ab = relative_errors(vals, ref)
                rels.append(rel)
                abss.append(ab)
            ref = oracles.quadrature_kernel_oracle(0.0, p, "v2")
            rel, ab = relative_errors([k.velocity_variance()], [ref])
            rels.append(rel)
            abss.append(ab)
    return _report("kernel_paths", np.concatenate(rels), np.concatenate(abss), 1e-6)


def check_finite_differences(ctx: Context, h=1e-3) -> OracleReport:
    t = np.linspace(0.05, 20.0, 101)
    errs = []
    for tau in FIG1_GAMMA_TAUS:
        k = ctx.kernel_factory(PhysicalParams(tau=tau))
        Gp, Gm = k.green(t + h)[0], k.green(t - h)[0]
        sp, sm = k.msd(t + h)[0], k.msd(t - h)[0]
        errs.append(np.abs((Gp - Gm) / (2 * h) - k.green(t)[1]))
        errs.append(np.abs((sp - sm) / (2 * h) - k.msd(t)[1]))
    errs = np.concatenate(errs)
    return _report("finite_differences", errs, errs, 1e-4)


def check_covariance_paths(ctx: Context) -> OracleReport:
    rels = []
    kernels = {tau: ctx.kernel_factory(PhysicalParams(tau=tau)) for tau in FIG1_GAMMA_TAUS}
    for _ in range(100):
        tau = FIG1_GAMMA_TAUS[int(ctx.rng.integers(2))]
        k = kernels[tau]
        b11 = float(10 ** ctx.rng.uniform(-0.5, 3.5))
        spec = MeasurementSpec(b11, float(ctx.rng.uniform(-0.999, 0.999)) * b11)
        u = UnitsSpec(float(10 ** ctx.rng.uniform(-1, 1)))
        t = float(ctx.rng.uniform(0.0, 20.0))
        closed = assemble_free(t, k, spec, u).entries
        polar = extract_covariance(make_exponent(t, k, spec), u).entries
        rels.append(np.max(np.abs(closed - polar)) / np.max(np.abs(closed)))
    # t = 0 against the initial-state closed form
    for k in kernels.values():
        spec, u = MeasurementSpec(5.0, 4.0), UnitsSpec()
        a = assemble_free(0.0, k, spec, u).entries
        b = initial_covariance(spec, k.velocity_variance(), u).entries
        rels.append(np.max(np.abs(a - b)) / np.max(np.abs(b)) * 1e-10 / 1e-12)
    return _report("covariance_paths", rels, rels, 1e-10)


def fig1_trajectories(ctx: Context, n_points=2001):
    grid = np.linspace(0.0, 20.0, n_points)
    for tau in FIG1_GAMMA_TAUS:
        k = ctx.kernel_factory(PhysicalParams(tau=tau))
        for label, (b11, b12) in FIG1_CONFIGS.items():
            yield (tau, label), Evolution(k, MeasurementSpec(b11, b12)).trajectory(grid)


def check_ppt_agreement(ctx: Context, n_random=1000) -> OracleReport:
    mismatches, samples = 0, 0
    for _ in range(n_random):
        M, _ = oracles.random_symmetric_state(ctx.rng)
        v = duan_verdict(reduce(M))
        if abs(v.margin) <= 1e-9:
            continue
        samples += 1
        mismatches += v.separable != oracles.ppt_simon_oracle(M)
    for _, traj in fig1_trajectories(ctx):
        for M, lhs in zip(traj.matrices, traj.lhs):
            if abs(lhs - 0.5) <= 1e-9:
                continue
            samples += 1
            mismatches += (lhs >= 0.5) != oracles.ppt_simon_oracle(CovarianceMatrix(M))
    return _report("ppt_agreement", [mismatches], [mismatches], 0.0, samples=samples)


def check_l_invariance(ctx: Context) -> OracleReport:
    rels = []
    grid = np.linspace(0.0, 20.0, 41)
    for tau in FIG1_GAMMA_TAUS:
        k = ctx.kernel_factory(PhysicalParams(tau=tau))
        for b11, b12 in FIG1_CONFIGS.values():
            spec = MeasurementSpec(b11, b12)
            base = Evolution(k, spec, UnitsSpec(1.0)).trajectory(grid)
            for L in (0.1, 0.5, 2.0, 10.0):
                tr = Evolution(k, spec, UnitsSpec(L)).trajectory(grid)
                for a, b in ((tr.g, base.g), (tr.c, base.c), (tr.cprime, base.cprime)):
                    rels.append(np.max(np.abs(a - b) / np.abs(b)))
    return _report("l_invariance", rels, rels, 1e-12)


def check_physicality(ctx: Context) -> OracleReport:
    worst = []
    for _, traj in fig1_trajectories(ctx):
        G = traj.matrices[:, :2, :2]
        detG = G[:, 0, 0] * G[:, 1, 1] - G[:, 0, 1] ** 2
        worst.append(max(0.0, 0.25 * (1 - 1e-9) - float(detG.min())))
    return _report("physicality", [w > 0 for w in worst], worst, 0.0)


def check_squeezed(ctx: Context) -> OracleReport:
    rels, abss = [], []
    for r in (0.1, 0.5, 1.0):
        lhs = duan_verdict(ReducedForm(*oracles.two_mode_squeezed(r))).lhs
        ref = 0.5 * np.exp(-2 * r)
        abss.append(abs(lhs - ref))
        rels.append(abs(lhs - ref) / 1e-12)
    return _report("two_mode_squeezed", rels, abss, 1.0)


DEFAULT_REGISTRY = {
    "sum_rule": check_sum_rule,
    "ohmic_limit": check_ohmic_limit,
    "kernel_paths": check_kernel_paths,
    "finite_differences": check_finite_differences,
    "covariance_paths": check_covariance_paths,
    "ppt_agreement": check_ppt_agreement,
    "l_invariance": check_l_invariance,
    "physicality": check_physicality,
    "two_mode_squeezed": check_squeezed,
}


def reference_suite(registry=None, seed: int = DEFAULT_SEED, kernel_factory=KernelSet) -> list:
    """Run every registered check; reports come back sorted by name."""
    registry = DEFAULT_REGISTRY if registry is None else registry
    reports = []
    for name in sorted(registry):
        ctx = Context(kernel_factory=kernel_factory, rng=np.random.default_rng(seed))
        try:
            reports.append(registry[name](ctx))
        except Exception as exc:  # a crashing check is a failed check
            reports.append(OracleReport(f"{name} ({type(exc).__name__}: {exc})", np.inf, np.inf, False, 0))
    return reports


def format_reports(reports) -> str:
    lines = [f"{'check':<22} {'max_rel_err':>12} {'max_abs_err':>12} {'samples':>8}  status"]
    for r in reports:
        status = "PASS" if r.passed else "FAIL"
        lines.append(f"{r.name:<22} {r.max_rel_err:>12.3e} {r.max_abs_err:>12.3e} {r.samples:>8d}  {status}")
    return "\n".join(lines)
