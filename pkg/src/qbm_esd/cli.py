"""Command-line front end.

Commands: ``evolve``, ``esd``, ``fig1``, ``sweep``, ``kernels`` and ``validate``.
All runs use natural units m = hbar = zeta = 1, so time is reported as
``gamma t``.  Exit codes: 0 success, 1 configuration error, 2 numerical
failure, 3 no crossing found.
"""
from __future__ import annotations

import argparse
import dataclasses
import io
import logging
import sys
from dataclasses import dataclass, fields

import numpy as np

from .bath import PhysicalParams
from .covariance import MeasurementSpec, UnitsSpec
from .errors import ConfigError, DomainError, NoCrossingError, QBMError
from .kernels import METHODS, KernelSet
from .pipeline import Evolution

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL, EXIT_NO_CROSSING = 0, 1, 2, 3
SWEEP_KEYS = ("b12", "b11", "gamma_tau", "temperature")
FIG1_DEFAULTS = {"A": (5.0, 4.0), "B": (5000.0, 4999.0)}

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class RunConfig:
    b11: float = 5.0
    b12: float = 4.0
    gamma_tau: float = 5.0
    omega0_over_gamma: float = 0.0
    temperature: float = 0.0
    t_max: float = 20.0
    n_points: int = 2001
    L_scale: float = 1.0
    method: str = "poles"

    def __post_init__(self):
        checks = [
            ("b11", self.b11 > 0, "must be positive"),
            ("b12", self.b12**2 < self.b11**2, "requires b11^2 - b12^2 > 0 for a normalisable state"),
            ("gamma_tau", self.gamma_tau >= 0, "must be >= 0"),
            ("omega0_over_gamma", self.omega0_over_gamma >= 0, "must be >= 0"),
            ("temperature", self.temperature >= 0, "must be >= 0"),
            ("t_max", self.t_max > 0, "must be positive"),
            ("n_points", self.n_points >= 2, "must be at least 2"),
            ("L_scale", self.L_scale > 0, "must be positive"),
            ("method", self.method in METHODS, f"must be one of {', '.join(METHODS)}"),
        ]
        for key, ok, msg in checks:
            if not ok:
                raise ConfigError(key, f"got {getattr(self, key)!r}; {msg}")

    def params(self) -> PhysicalParams:
        return PhysicalParams(tau=self.gamma_tau, omega0=self.omega0_over_gamma,
                              temperature=self.temperature)

    def grid(self) -> np.ndarray:
        return np.linspace(0.0, self.t_max, self.n_points)

    def evolution(self, b11=None, b12=None) -> Evolution:
        p = self.params()
        spec = MeasurementSpec.from_dimensionless(self.b11 if b11 is None else b11,
                                                  self.b12 if b12 is None else b12, params=p)
        return Evolution(KernelSet(p, self.method), spec, UnitsSpec.natural(p, self.L_scale))


_FIELD_TYPES = {f.name: f.type for f in fields(RunConfig)}
_CASTS = {"float": float, "int": int, "str": str}
# accepted spellings in config files besides the field names
_ALIASES = {"omega0": "omega0_over_gamma", "l_scale": "L_scale"}


def _cast(key, raw):
    try:
        value = _CASTS[_FIELD_TYPES[key]](raw)
    except (TypeError, ValueError):
        raise ConfigError(key, f"cannot parse {raw!r} as {_FIELD_TYPES[key]}") from None
    if _FIELD_TYPES[key] == "int" and str(raw).strip() != str(value):
        raise ConfigError(key, f"expected an integer, got {raw!r}")
    return value


def read_config_file(path) -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ConfigError("config", f"cannot read config file {path}: {exc.strerror}") from None
    values = {}
    for lineno, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, raw = line.partition("=")
        key, raw = key.strip(), raw.strip()
        key = _ALIASES.get(key, key)
        if not sep or not key:
            raise ConfigError("config", f"{path}:{lineno}: expected 'key = value'")
        if key not in _FIELD_TYPES:
            raise ConfigError(key, f"{path}:{lineno}: unknown key {key!r}")
        values[key] = _cast(key, raw)
    return values


def parse_config(args: argparse.Namespace) -> RunConfig:
    """Merge defaults, the optional config file and explicit flags."""
    values = read_config_file(args.config) if getattr(args, "config", None) else {}
    for name in _FIELD_TYPES:
        flag = getattr(args, name, None)
        if flag is not None:
            values[name] = flag
    return RunConfig(**values)


# -- output -------------------------------------------------------------
def fmt(x) -> str:
    x = float(x)
    if np.isnan(x):
        return "nan"
    return format(x + 0.0, ".12g")


def write_csv(out, header, rows):
    out.write(",".join(header) + "\n")
    for row in rows:
        out.write(",".join(v if isinstance(v, str) else fmt(v) for v in row) + "\n")


class _Output:
    """stdout or a file path, opened lazily so config errors leave no file."""

    def __init__(self, path):
        self.path = path
        self.buffer = io.StringIO()

    def flush(self, stdout):
        text = self.buffer.getvalue()
        if self.path in (None, "-"):
            stdout.write(text)
            return
        try:
            with open(self.path, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
        except OSError as exc:
            raise OSError(f"cannot write {self.path}: {exc.strerror}") from None


def _render(kind, path, *args, **kwargs):
    from . import plotting

    try:
        getattr(plotting, kind)(*args, path=path, **kwargs)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror}") from None


# -- commands -----------------------------------------------------------
def run_evolve(cfg: RunConfig, out, args=None):
    ev = cfg.evolution()
    traj = ev.trajectory(cfg.grid())
    rows = ((t, g, c, cp, lhs, "1" if sep else "0")
            for t, g, c, cp, lhs, sep in zip(traj.gamma_t, traj.g, traj.c, traj.cprime,
                                             traj.lhs, traj.separable))
    write_csv(out, ["gamma_t", "g", "c", "cprime", "duan_lhs", "separable"], rows)
    if args is not None and args.figure:
        _render("duan_figure", args.figure, traj.gamma_t,
                {f"b11={fmt(cfg.b11)}, b12={fmt(cfg.b12)}": traj.lhs})
    return EXIT_OK


def esd_time(cfg: RunConfig, b11=None, b12=None) -> float:
    """First entangled-to-separable crossing in ``gamma t``; NoCrossingError if none."""
    ev = cfg.evolution(b11, b12)
    report = ev.crossings(cfg.grid())
    if report.esd_time is None:
        raise NoCrossingError("no entangled-to-separable crossing")
    return report.esd_time


def run_esd(cfg: RunConfig, out, args=None):
    try:
        t = esd_time(cfg)
    except NoCrossingError as exc:
        out.write("esd=none\n")
        log.info("%s", exc)
        return EXIT_NO_CROSSING
    out.write(f"esd_gamma_t={fmt(t)}\n")
    return EXIT_OK


def run_fig1(cfg: RunConfig, out, args=None, configs=None):
    configs = configs or FIG1_DEFAULTS
    grid = cfg.grid()
    curves, markers = {}, {}
    for label, (b11, b12) in configs.items():
        ev = cfg.evolution(b11, b12)
        traj = ev.trajectory(grid)
        key = f"{label}: b11={fmt(b11)}, b12={fmt(b12)}"
        curves[key] = traj.lhs
        try:
            markers[key] = ev.crossings(grid, traj).esd_time
        except NoCrossingError:
            markers[key] = None
    write_csv(out, ["gamma_t"] + [f"duan_lhs_{k}" for k in configs],
              zip(grid, *curves.values()))
    if args is not None and args.svg:
        _render("duan_figure", args.svg, grid, curves, markers=markers,
                title=f"gamma tau = {fmt(cfg.gamma_tau)}")
    return EXIT_OK


def run_sweep(cfg: RunConfig, out, key, start, stop, steps, figure=None, err=None):
    err = err or sys.stderr
    values = np.linspace(start, stop, steps)
    rows, ok = [], 0
    for v in values:
        try:
            point = dataclasses.replace(cfg, **{key: float(v)})
            t = esd_time(point)
            ok += 1
        except NoCrossingError:
            t = float("nan")
            err.write(f"warning: {key}={fmt(v)}: no crossing in [0, {fmt(cfg.t_max)}]\n")
        except (QBMError, DomainError) as exc:
            t = float("nan")
            err.write(f"warning: {key}={fmt(v)}: {exc}\n")
        rows.append((v, t))
    write_csv(out, ["param", "esd_gamma_t"], rows)
    if figure:
        _render("sweep_figure", figure, values, np.array([r[1] for r in rows]), key)
    return EXIT_OK if ok else EXIT_NO_CROSSING


def run_kernels(cfg: RunConfig, out, args=None):
    from .errors import DivergenceError

    k = KernelSet(cfg.params(), cfg.method)
    grid = cfg.grid()
    t = grid / cfg.params().gamma
    G, Gd = k.green(t)
    s, sd = k.msd(t)
    write_csv(out, ["gamma_t", "G", "Gdot", "s", "sdot"], zip(grid, G, Gd, s, sd))
    try:
        out.write(f"v2={fmt(k.velocity_variance())}\n")
    except DivergenceError:
        out.write("v2=inf\n")
    return EXIT_OK


def run_validate(out, seed=None):
    from .validation import DEFAULT_SEED, format_reports, reference_suite

    reports = reference_suite(seed=DEFAULT_SEED if seed is None else seed)
    out.write(format_reports(reports) + "\n")
    return EXIT_OK if all(r.passed for r in reports) else EXIT_NUMERICAL


# -- argument parsing ---------------------------------------------------
def _config_parent() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("run configuration (flags override --config)")
    g.add_argument("--config", metavar="FILE", help="file of 'key = value' lines")
    g.add_argument("--b11", type=float, help="diagonal measurement coefficient (default 5)")
    g.add_argument("--b12", type=float, help="cross measurement coefficient (default 4)")
    g.add_argument("--gamma-tau", dest="gamma_tau", type=float, help="bath memory gamma*tau (default 5)")
    g.add_argument("--omega0", dest="omega0_over_gamma", type=float,
                   help="oscillator frequency omega0/gamma (default 0, free particle)")
    g.add_argument("--temperature", type=float, help="kT/(hbar gamma) (default 0)")
    g.add_argument("--t-max", dest="t_max", type=float, help="upper end of the gamma*t grid (default 20)")
    g.add_argument("--n-points", dest="n_points", type=int, help="grid size (default 2001)")
    g.add_argument("--L-scale", "--l-scale", dest="L_scale", type=float,
                   help="length unit as a multiple of sqrt(hbar/zeta) (default 1)")
    g.add_argument("--method", choices=METHODS, help="kernel evaluation path (default poles)")
    p.add_argument("-o", "--output", metavar="PATH", help="write CSV here instead of stdout")
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qbm-esd", description=__doc__.split("\n\n")[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)
    parent = _config_parent()

    p = sub.add_parser("evolve", parents=[parent], help="trajectory of (g, c, c') and the Duan quantity")
    p.add_argument("--figure", metavar="PATH", help="also plot the Duan quantity (svg/png/pdf)")

    sub.add_parser("esd", parents=[parent], help="first entanglement sudden death time")

    p = sub.add_parser("fig1", parents=[parent], help="two-configuration comparison of the Duan quantity")
    p.add_argument("--svg", metavar="PATH", help="write the line chart to PATH")
    for label, (b11, b12) in FIG1_DEFAULTS.items():
        low = label.lower()
        p.add_argument(f"--b11-{low}", type=float, default=b11, help=f"b11 of curve {label} (default {b11:g})")
        p.add_argument(f"--b12-{low}", type=float, default=b12, help=f"b12 of curve {label} (default {b12:g})")

    p = sub.add_parser("sweep", parents=[parent], help="ESD time as one parameter varies")
    p.add_argument("--key", required=True, choices=SWEEP_KEYS)
    p.add_argument("--from", dest="start", type=float, required=True)
    p.add_argument("--to", dest="stop", type=float, required=True)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--figure", metavar="PATH", help="also plot ESD time against the parameter")

    sub.add_parser("kernels", parents=[parent], help="dump G, Gdot, s, sdot on the grid")

    p = sub.add_parser("validate", help="run the oracle reference suite")
    p.add_argument("--seed", type=int, help="random seed for sampled checks")
    p.add_argument("-o", "--output", metavar="PATH")
    return parser


def _dispatch(args, out, err):
    if args.command == "validate":
        return run_validate(out, args.seed)
    cfg = parse_config(args)
    if args.command == "evolve":
        return run_evolve(cfg, out, args)
    if args.command == "esd":
        return run_esd(cfg, out, args)
    if args.command == "fig1":
        configs = {}
        for label in FIG1_DEFAULTS:
            b11, b12 = getattr(args, f"b11_{label.lower()}"), getattr(args, f"b12_{label.lower()}")
            dataclasses.replace(cfg, b11=b11, b12=b12)  # validates the pair
            configs[label] = (b11, b12)
        return run_fig1(cfg, out, args, configs)
    if args.command == "sweep":
        if args.steps < 1:
            raise ConfigError("steps", "steps must be at least 1")
        return run_sweep(cfg, out, args.key, args.start, args.stop, args.steps, args.figure, err)
    if args.command == "kernels":
        return run_kernels(cfg, out, args)
    raise AssertionError(args.command)


def main(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=stderr)
    target = _Output(args.output)
    try:
        code = _dispatch(args, target.buffer, stderr)
        target.flush(stdout)
        return code
    except ConfigError as exc:
        stderr.write(f"config error: {exc}\n")
        return EXIT_CONFIG
    except DomainError as exc:
        stderr.write(f"config error: {exc}\n")
        return EXIT_CONFIG
    except QBMError as exc:
        stderr.write(f"numerical failure: {type(exc).__name__}: {exc}\n")
        return EXIT_NUMERICAL
    except (ArithmeticError, FloatingPointError) as exc:
        stderr.write(f"numerical failure: {exc}\n")
        return EXIT_NUMERICAL
    except OSError as exc:
        stderr.write(f"I/O error: {exc}\n")
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
