"""Analytic energy, SNR and joint coverage of a UAV served by its nearest LBD.

Every metric is a probability of the form P(h_t * p_rec(R) > T) for a
metric-specific power threshold T:

* energy:  T = (p_prop + p_comm) / (1 - delta_s)
* SNR:     T = 2 h nu df beta / (eta delta_s)
* joint:   the larger of the two, selected through the factor K.

R is the nearest-LBD horizontal distance, h_t the turbulence fading.
"""

import enum
import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import numerics
from ._backend import kernels
from ._kernels_py import SIGMA2_FLOOR
from .channel import (FsoChannelParams, LogNormalTurbulence, NoTurbulence,
                      TabulatedTurbulence, received_power_array)
from .errors import BracketError, ConfigError, DomainError, UncoverableError
from .numerics import DEFAULT_QUADRATURE
from .power import UavPowerModel, total_consumed_power

PLANCK = 6.62607015e-34
SPEED_OF_LIGHT = 2.99792458e8

DENSITY_BRACKET = (1e-12, 1e-2)
DENSITY_MAX_ITERATIONS = 200
DENSITY_TOLERANCE = 1e-6


class Metric(enum.Enum):
    ENERGY_NO_TURBULENCE = "energy-no-turbulence"
    ENERGY = "energy"
    SNR = "snr"
    JOINT = "joint"


@dataclass(frozen=True)
class NetworkModel:
    lbd_density_lambda: float = 0.52e-6
    altitude_H: float = 100.0

    def __post_init__(self):
        if not self.lbd_density_lambda > 0:
            raise ConfigError(f"must be > 0, got {self.lbd_density_lambda!r}",
                              key="lbd_density_lambda")
        if not self.altitude_H > 0:
            raise ConfigError(f"must be > 0, got {self.altitude_H!r}", key="altitude_H")


@dataclass(frozen=True)
class ReceiverParams:
    """Shot-noise-limited photodetector."""

    responsivity_eta: float = 0.5
    wavelength_lambda: float = 0.785e-6
    modulation_bandwidth_df: float = 1e9
    planck_h: float = PLANCK

    def __post_init__(self):
        for name, value in self.__dict__.items():
            if not value > 0:
                raise ConfigError(f"must be > 0, got {value!r}", key=name)

    @property
    def photon_frequency(self):
        return SPEED_OF_LIGHT / self.wavelength_lambda

    @property
    def noise_power(self):
        """2 h nu df: the SNR denominator (W per ampere of photocurrent)."""
        return 2.0 * self.planck_h * self.photon_frequency * self.modulation_bandwidth_df


@dataclass(frozen=True)
class Scenario:
    network: NetworkModel = field(default_factory=NetworkModel)
    channel: FsoChannelParams = field(default_factory=FsoChannelParams)
    turbulence: NoTurbulence | LogNormalTurbulence | TabulatedTurbulence = field(
        default_factory=LogNormalTurbulence)
    receiver: ReceiverParams = field(default_factory=ReceiverParams)
    power: UavPowerModel = field(default_factory=UavPowerModel)
    snr_threshold_beta: float = 1e5

    def __post_init__(self):
        if not self.snr_threshold_beta > 0:
            raise ConfigError(f"must be > 0, got {self.snr_threshold_beta!r}",
                              key="snr_threshold_beta")

    @property
    def density(self):
        return self.network.lbd_density_lambda

    @property
    def altitude(self):
        return self.network.altitude_H

    def with_density(self, density):
        return replace(self, network=replace(self.network, lbd_density_lambda=density))

    def with_channel(self, **changes):
        return replace(self, channel=replace(self.channel, **changes))

    def with_power(self, **changes):
        return replace(self, power=replace(self.power, **changes))


def consumed_power(scenario):
    return total_consumed_power(scenario.power)


def energy_threshold(scenario):
    """Received power above which the harvested share covers consumption."""
    delta = scenario.channel.split_delta_s
    if delta >= 1.0:
        return math.inf
    return consumed_power(scenario) / (1.0 - delta)


def snr_threshold_power(scenario):
    """Received power at which the detector SNR equals beta."""
    delta = scenario.channel.split_delta_s
    if delta <= 0.0:
        return math.inf
    rx = scenario.receiver
    return rx.noise_power * scenario.snr_threshold_beta / (rx.responsivity_eta * delta)


def _lambert_w0_of_exp(log_x):
    """W0(exp(log_x)) without overflowing exp."""
    if log_x < 700.0:
        return numerics.lambert_w0(math.exp(log_x))
    w = log_x - math.log(log_x)
    for _ in range(100):
        w_next = log_x - math.log(w)
        if abs(w_next - w) <= 1e-15 * w:
            return w_next
        w = w_next
    return w


def slant_distance_for_power(channel, target_power):
    """Slant distance at which the received power falls to ``target_power``.

    Solves X^2 exp(z X) = C for X = D + d dtheta, z = alpha / dtheta, whose
    root is X = (2/z) W0(z sqrt(C) / 2). Returns inf for a zero target.
    """
    if target_power <= 0.0:
        return math.inf
    D = channel.initial_beam_size_D
    dtheta = channel.angular_spread
    alpha = channel.attenuation_alpha
    if alpha == 0.0:
        return (math.sqrt(channel.power_scale / target_power) - D) / dtheta
    z = alpha / dtheta
    # log of z sqrt(C) / 2 with C = scale exp(z D) / target
    log_arg = (math.log(z / 2.0) + 0.5 * math.log(channel.power_scale / target_power)
               + 0.5 * z * D)
    return 2.0 / alpha * _lambert_w0_of_exp(log_arg) - D / dtheta


def horizontal_radius_for_power(channel, altitude, target_power):
    """Horizontal distance where p_rec equals ``target_power``; None if unreachable."""
    d = slant_distance_for_power(channel, target_power)
    if math.isinf(d):
        return math.inf
    if d < altitude:
        return None
    return math.sqrt((d - altitude) * (d + altitude))


def critical_radius(scenario):
    """Largest horizontal distance at which harvested power meets consumption.

    Returns None (no coverage) when even the overhead LBD cannot sustain the
    UAV, and inf when consumption is zero.

    Raises
    ------
    DomainError
        If ``split_delta_s == 1`` with positive consumption.
    """
    if scenario.channel.split_delta_s >= 1.0:
        if consumed_power(scenario) == 0.0:
            return math.inf
        raise DomainError("split_delta_s = 1 leaves no harvested power")
    return horizontal_radius_for_power(scenario.channel, scenario.altitude,
                                       energy_threshold(scenario))


def energy_coverage_no_turbulence(scenario):
    """1 - exp(-lambda pi R*^2). The scenario's turbulence model is ignored."""
    if scenario.channel.split_delta_s >= 1.0 and consumed_power(scenario) > 0.0:
        return 0.0
    r_star = critical_radius(scenario)
    if r_star is None:
        return 0.0
    if math.isinf(r_star):
        return 1.0
    return -math.expm1(-scenario.density * math.pi * r_star * r_star)


def _exceedance_breakpoints(scenario, threshold):
    """Horizontal distances where the conditional exceedance is non-smooth."""
    channel, altitude = scenario.channel, scenario.altitude
    turbulence = scenario.turbulence
    if isinstance(turbulence, TabulatedTurbulence):
        targets = [threshold / h for h in turbulence.h if h > 0]
    else:
        targets = [threshold]
    points = []
    for target in targets:
        r = horizontal_radius_for_power(channel, altitude, target)
        if r is not None and math.isfinite(r) and r > 0:
            points.append(r)
    if isinstance(turbulence, LogNormalTurbulence) and turbulence.distance == "horizontal":
        points.append((SIGMA2_FLOOR / turbulence.sigma2_coefficient) ** (6.0 / 11.0))
    return points


def exceedance_probability(scenario, threshold, spec=DEFAULT_QUADRATURE):
    """P(h_t p_rec(R) > threshold), averaged over the nearest-LBD distance."""
    if math.isinf(threshold):
        return 0.0
    channel, altitude = scenario.channel, scenario.altitude
    turbulence = scenario.turbulence
    if isinstance(turbulence, TabulatedTurbulence):
        def g(r):
            p = received_power_array(channel, r, altitude)
            with np.errstate(divide="ignore"):
                return 1.0 - turbulence.cdf_at(threshold / p)
    else:
        if isinstance(turbulence, LogNormalTurbulence):
            coef, slant = turbulence.sigma2_coefficient, turbulence.distance == "slant"
        else:
            coef, slant = 0.0, False

        def g(r):
            return kernels.exceedance(r, altitude, channel.power_scale,
                                      channel.initial_beam_size_D, channel.angular_spread,
                                      channel.attenuation_alpha, threshold, coef, slant)

    return numerics.integrate_expectation_over_nearest_distance(
        g, scenario.density, spec, breakpoints=_exceedance_breakpoints(scenario, threshold))


def energy_coverage(scenario, spec=DEFAULT_QUADRATURE):
    """Probability that turbulence-faded harvested power exceeds consumption."""
    return exceedance_probability(scenario, energy_threshold(scenario), spec)


def snr_coverage(scenario, spec=DEFAULT_QUADRATURE):
    """Probability that the detector SNR exceeds beta.

    SNR = delta_s eta h_t p_rec / (2 h nu df), on received (pre-split) power.
    """
    return exceedance_probability(scenario, snr_threshold_power(scenario), spec)


def k_factor(scenario):
    """eta delta_s (p_prop + p_comm) / (2 h nu df beta (1 - delta_s)).

    K > 1 means the energy condition is the binding one. inf at delta_s = 1.
    """
    delta = scenario.channel.split_delta_s
    if delta >= 1.0:
        return math.inf
    rx = scenario.receiver
    return (rx.responsivity_eta * delta * consumed_power(scenario)
            / (rx.noise_power * scenario.snr_threshold_beta * (1.0 - delta)))


def joint_coverage(scenario, spec=DEFAULT_QUADRATURE):
    """Probability of energy and SNR coverage on the same channel realisation."""
    if k_factor(scenario) > 1.0:
        return energy_coverage(scenario, spec)
    return snr_coverage(scenario, spec)


def coverage(scenario, metric, spec=DEFAULT_QUADRATURE):
    metric = Metric(metric)
    if metric is Metric.ENERGY_NO_TURBULENCE:
        return energy_coverage_no_turbulence(scenario)
    if metric is Metric.ENERGY:
        return energy_coverage(scenario, spec)
    if metric is Metric.SNR:
        return snr_coverage(scenario, spec)
    return joint_coverage(scenario, spec)


def required_density(scenario, target, metric=Metric.ENERGY, spec=DEFAULT_QUADRATURE):
    """Smallest LBD density (per m^2) at which ``metric`` reaches ``target``.

    The scenario's own density is ignored. Closed form for the
    turbulence-free energy metric; geometric bisection over
    ``DENSITY_BRACKET`` otherwise.

    Raises
    ------
    UncoverableError
        Energy metrics on a scenario with no critical radius.
    BracketError
        ``target`` is not reachable inside the density bracket.
    """
    metric = Metric(metric)
    if not 0.0 < target < 1.0:
        raise DomainError(f"target must lie in (0, 1), got {target!r}")
    if metric in (Metric.ENERGY, Metric.ENERGY_NO_TURBULENCE):
        try:
            r_star = critical_radius(scenario)
        except DomainError as exc:
            raise UncoverableError(str(exc)) from None
        if r_star is None or r_star == 0.0:
            raise UncoverableError(
                "harvested power is below consumption even directly above an LBD")
        if metric is Metric.ENERGY_NO_TURBULENCE:
            if math.isinf(r_star):
                raise DomainError("consumption is zero: coverage is 1 at every density")
            return -math.log1p(-target) / (math.pi * r_star * r_star)

    def f(density):
        return coverage(scenario.with_density(density), metric, spec) - target

    lo, hi = DENSITY_BRACKET
    f_lo, f_hi = f(lo), f(hi)
    if f_lo > 0:
        raise BracketError(
            f"{metric.value} coverage {f_lo + target:.6g} already exceeds target "
            f"{target} at the lower bracket density {lo:g}")
    if f_hi < 0:
        raise BracketError(
            f"{metric.value} coverage saturates at {f_hi + target:.6g} < target {target} "
            f"(density {hi:g} /m^2)")
    for _ in range(DENSITY_MAX_ITERATIONS):
        mid = math.sqrt(lo * hi)
        f_mid = f(mid)
        if abs(f_mid) <= DENSITY_TOLERANCE:
            return mid
        if f_mid < 0:
            lo = mid
        else:
            hi = mid
        if hi / lo - 1.0 < 1e-15:
            break
    raise BracketError(
        f"bisection stalled at density {mid:g} with residual {f_mid:.3g}")
