"""Parameter sweeps, figure presets, density design and CSV output."""

import csv
import datetime as dt
import io
import math
import os
from dataclasses import dataclass, replace

import numpy as np

from . import __version__
from .channel import NoTurbulence
from .coverage import (Metric, critical_radius, coverage, k_factor, required_density)
from .errors import ConfigError, DomainError, NumericalError
from .montecarlo import estimate_all
from .numerics import DEFAULT_QUADRATURE

CSV_HEADER = ("axis", "axis_value", "metric", "engine", "value", "std_error", "n_iterations")
AXES = ("lbd_density", "beta_db", "delta_s", "p_comm")
ENGINES = ("analytic", "montecarlo")

# 10 km^2 in m^2
TEN_KM2 = 1e7


@dataclass(frozen=True)
class RunManifest:
    command: str
    fingerprint: str
    tool_version: str = __version__
    seed: int | None = None
    timestamp: str = ""

    @classmethod
    def create(cls, command, fingerprint, seed=None):
        return cls(command, fingerprint, __version__, seed, utc_timestamp())

    def header_lines(self, notes=()):
        lines = [
            f"# command: {self.command}",
            f"# fingerprint: {self.fingerprint}",
            f"# tool_version: {self.tool_version}",
            f"# seed: {'none' if self.seed is None else self.seed}",
            f"# timestamp: {self.timestamp}",
        ]
        lines += [f"# note: {note}" for note in notes]
        return lines


def utc_timestamp():
    """Current UTC time, or ``SOURCE_DATE_EPOCH`` when set (reproducible output)."""
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    if epoch is not None:
        moment = dt.datetime.fromtimestamp(int(epoch), tz=dt.timezone.utc)
    else:
        moment = dt.datetime.now(tz=dt.timezone.utc).replace(microsecond=0)
    return moment.strftime("%Y-%m-%dT%H:%M:%SZ")


def resolve_engines(engine):
    if engine == "both":
        return ENGINES
    if engine not in ENGINES:
        raise ConfigError(f"unknown engine {engine!r}", key="engine")
    return (engine,)


def apply_axis(scenario, axis, value):
    """Copy of ``scenario`` with the swept parameter set to ``value``."""
    if axis == "lbd_density":
        return scenario.with_density(value)
    if axis == "beta_db":
        return replace(scenario, snr_threshold_beta=10.0 ** (value / 10.0))
    if axis == "delta_s":
        return scenario.with_channel(split_delta_s=value)
    if axis == "p_comm":
        return scenario.with_power(p_comm=value)
    raise ConfigError(f"unknown sweep axis {axis!r}; expected one of {', '.join(AXES)}",
                      key="axis")


def parse_grid(text):
    """``a,b,c`` or ``lin:start:stop:num`` or ``log:start:stop:num``."""
    text = text.strip()
    try:
        if text.startswith(("lin:", "log:")):
            kind, start, stop, num = text.split(":")
            start, stop, num = float(start), float(stop), int(num)
            if kind == "lin":
                grid = np.linspace(start, stop, num)
            else:
                grid = np.geomspace(start, stop, num)
            return [float(v) for v in grid]
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise ConfigError(f"bad grid {text!r}: {exc}", key="grid") from None


def check_grid(grid):
    if len(grid) == 0:
        raise ConfigError("grid is empty", key="grid")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ConfigError("grid must be strictly increasing", key="grid")


def _simulated_metric(metric):
    """Metric and turbulence override used for the Monte Carlo counterpart."""
    if metric is Metric.ENERGY_NO_TURBULENCE:
        return Metric.ENERGY, NoTurbulence()
    return metric, None


def run_sweep(scenario, axis, grid, metrics, engines=("analytic",), simulation=None,
              spec=DEFAULT_QUADRATURE, label=""):
    """One row per grid point, metric and engine, in that nesting order.

    Every grid point reuses ``simulation.seed``, so Monte Carlo curves share
    common random numbers. ``label`` is appended to the metric name.
    """
    check_grid(grid)
    metrics = [Metric(m) for m in metrics]
    if "montecarlo" in engines and simulation is None:
        raise ConfigError("Monte Carlo engine needs a simulation config", key="engine")
    rows = []
    for value in grid:
        try:
            point = apply_axis(scenario, axis, value)
            mc_cache = {}
            for metric in metrics:
                name = metric.value + label
                for engine in engines:
                    if engine == "analytic":
                        rows.append((axis, value, name, engine,
                                     coverage(point, metric, spec), None, None))
                        continue
                    sim_metric, turbulence = _simulated_metric(metric)
                    if turbulence not in mc_cache:
                        target = point if turbulence is None else replace(point, turbulence=turbulence)
                        mc_cache[turbulence] = estimate_all(target, simulation)
                    est = mc_cache[turbulence][sim_metric]
                    rows.append((axis, value, name, engine, est.estimate, est.std_error,
                                 est.iterations))
        except ConfigError as exc:
            raise ConfigError(f"sweep failed at {axis} = {value!r}: {exc.reason}",
                              key=exc.key) from exc
        except (NumericalError, DomainError) as exc:
            kind = NumericalError if isinstance(exc, NumericalError) else DomainError
            raise kind(f"sweep failed at {axis} = {value!r}: {exc}") from exc
    return rows


def format_value(value):
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_csv(rows, out, manifest, notes=()):
    """Manifest comment header, then the fixed-schema CSV."""
    buf = io.StringIO()
    for line in manifest.header_lines(notes):
        buf.write(line + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for row in rows:
        writer.writerow([format_value(v) for v in row])
    out.write(buf.getvalue())


def scenario_rows(scenario, metrics, engines, simulation=None, spec=DEFAULT_QUADRATURE):
    """Single-point rows for the ``analytic`` / ``montecarlo`` commands."""
    return run_sweep(scenario, "lbd_density", [scenario.density], metrics, engines,
                     simulation, spec)


def analytic_extras(scenario):
    """Critical radius and K factor rows accompanying an analytic run."""
    try:
        r_star = critical_radius(scenario)
    except DomainError:
        r_star = None
    rows = [
        ("lbd_density", scenario.density, "critical_radius_m", "analytic",
         math.nan if r_star is None else r_star, None, None),
        ("lbd_density", scenario.density, "k_factor", "analytic", k_factor(scenario),
         None, None),
    ]
    return rows


def run_density_design(scenario, target, metric=Metric.ENERGY, spec=DEFAULT_QUADRATURE):
    """Minimum LBD density for ``target`` coverage, as ``(field, value)`` pairs."""
    metric = Metric(metric)
    density = required_density(scenario, target, metric, spec)
    try:
        r_star = critical_radius(scenario)
    except DomainError:
        r_star = None
    achieved = coverage(scenario.with_density(density), metric, spec)
    return [
        ("metric", metric.value),
        ("target", target),
        ("density_per_m2", density),
        ("lbds_per_10km2", density * TEN_KM2),
        ("achieved_coverage", achieved),
        ("critical_radius_m", math.nan if r_star is None else r_star),
    ]


def write_report(pairs, out, manifest, notes=()):
    buf = io.StringIO()
    for line in manifest.header_lines(notes):
        buf.write(line + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(("field", "value"))
    for key, value in pairs:
        writer.writerow((key, format_value(value)))
    out.write(buf.getvalue())


# Figure presets: axis, grid, metric, and the curve family swept over.

FIG_ENERGY_GRID = [float(v) for v in np.geomspace(1e-8, 1e-5, 31)]
FIG_SNR_GRID = [float(v) for v in np.geomspace(1e-9, 1e-5, 41)]
FIG_JOINT_BETA_GRID = [float(v) for v in np.arange(30.0, 70.5, 1.0)]
FIG_JOINT_DELTA_GRID = ([float(v) for v in np.geomspace(1e-9, 1e-1, 33)]
                        + [0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.95, 0.99, 0.999])
FIG_DENSITIES = (1e-7, 0.52e-6, 1e-6)


def figure_energy(scenario):
    """Energy coverage vs density, with and without turbulence, p_comm in {10, 50} W."""
    curves = []
    for p_comm in (10.0, 50.0):
        s = scenario.with_power(p_comm=p_comm)
        curves.append((s, Metric.ENERGY_NO_TURBULENCE, f"[p_comm={p_comm:g}]"))
        curves.append((s, Metric.ENERGY, f"[p_comm={p_comm:g}]"))
    return "lbd_density", FIG_ENERGY_GRID, curves


def figure_snr(scenario):
    """SNR coverage vs density for several thresholds."""
    curves = [(replace(scenario, snr_threshold_beta=10.0 ** (b / 10.0)), Metric.SNR,
               f"[beta_db={b:g}]") for b in (50.0, 55.0, 60.0)]
    return "lbd_density", FIG_SNR_GRID, curves


def figure_joint_beta(scenario):
    """Joint coverage vs SNR threshold (dB) at delta_s = 1e-6."""
    base = scenario.with_channel(split_delta_s=1e-6)
    curves = [(base.with_density(lam), Metric.JOINT, f"[lbd_density={lam:g}]")
              for lam in FIG_DENSITIES]
    return "beta_db", FIG_JOINT_BETA_GRID, curves


def figure_joint_delta(scenario):
    """Joint coverage vs power-splitting factor at beta = 55 dB."""
    base = replace(scenario, snr_threshold_beta=10.0 ** 5.5)
    curves = [(base.with_density(lam), Metric.JOINT, f"[lbd_density={lam:g}]")
              for lam in FIG_DENSITIES]
    return "delta_s", FIG_JOINT_DELTA_GRID, curves


FIGURES = {
    "fig-energy": figure_energy,
    "fig-snr": figure_snr,
    "fig-joint-beta": figure_joint_beta,
    "fig-joint-delta": figure_joint_delta,
}


def run_figure(name, scenario, engines=("analytic",), simulation=None,
               spec=DEFAULT_QUADRATURE):
    axis, grid, curves = FIGURES[name](scenario)
    rows = []
    for curve_scenario, metric, label in curves:
        rows += run_sweep(curve_scenario, axis, grid, [metric], engines, simulation, spec,
                          label=label)
    return rows
