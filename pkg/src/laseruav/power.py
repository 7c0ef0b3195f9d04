"""UAV power consumption: propulsion plus communication payload."""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, DomainError

GRAVITY = 9.81


@dataclass(frozen=True)
class FixedWingParams:
    # c1 = 9.26e-4 reproduces 100 W at 30 m/s level flight with c2 = 2250
    c1: float = 9.26e-4
    c2: float = 2250.0
    mass_m: float = 5.0

    def __post_init__(self):
        for name in ("c1", "c2", "mass_m"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"must be > 0, got {getattr(self, name)!r}", key=name)


@dataclass(frozen=True)
class RotaryWingParams:
    """Rotary-wing constants. Defaults are typical small-quadrotor values."""

    blade_profile_P0: float = 80.0
    induced_Pi: float = 88.0
    tip_speed_Utip: float = 120.0
    mean_induced_v0: float = 4.03
    fuselage_drag_d0: float = 0.6
    rotor_solidity_s: float = 0.05
    air_density_rho: float = 1.225
    rotor_disc_area_A: float = 0.503

    def __post_init__(self):
        for name, value in self.__dict__.items():
            if not value > 0:
                raise ConfigError(f"must be > 0, got {value!r}", key=name)


@dataclass(frozen=True)
class FixedWing:
    params: FixedWingParams = field(default_factory=FixedWingParams)
    velocity: tuple = (30.0, 0.0, 0.0)
    acceleration: tuple = (0.0, 0.0, 0.0)


@dataclass(frozen=True)
class RotaryWing:
    params: RotaryWingParams = field(default_factory=RotaryWingParams)
    speed: float = 10.0

    def __post_init__(self):
        if not self.speed > 0:
            raise ConfigError(f"must be > 0, got {self.speed!r}", key="speed")


@dataclass(frozen=True)
class FixedDraw:
    """Propulsion pinned to a constant power draw."""

    p_prop: float = 100.0

    def __post_init__(self):
        if not self.p_prop >= 0:
            raise ConfigError(f"must be >= 0, got {self.p_prop!r}", key="p_prop")


@dataclass(frozen=True)
class UavPowerModel:
    propulsion: FixedWing | RotaryWing | FixedDraw = field(default_factory=FixedWing)
    p_comm: float = 10.0

    def __post_init__(self):
        if not self.p_comm >= 0:
            raise ConfigError(f"must be >= 0, got {self.p_comm!r}", key="p_comm")


def propulsion_power_fixed_wing(params, v, a):
    """Instantaneous fixed-wing propulsion power (W).

    |c1 |v|^3 + c2/|v| (1 + (|a|^2 - (a.v)^2/|v|^2) / g^2) + m a.v|
    """
    v = np.asarray(v, dtype=float)
    a = np.asarray(a, dtype=float)
    speed = float(np.linalg.norm(v))
    if speed == 0.0:
        raise DomainError("fixed-wing propulsion power is undefined at zero velocity")
    av = float(a @ v)
    lateral = float(a @ a) - av * av / (speed * speed)
    return abs(params.c1 * speed ** 3
               + params.c2 / speed * (1.0 + lateral / GRAVITY ** 2)
               + params.mass_m * av)


def propulsion_power_rotary(params, speed):
    """Rotary-wing propulsion power (W) at forward ``speed`` > 0."""
    if not speed > 0:
        raise DomainError(f"rotary-wing propulsion needs speed > 0, got {speed!r}")
    p = params
    return (p.blade_profile_P0 * (1.0 + 3.0 * speed ** 2 / p.tip_speed_Utip ** 2)
            + p.induced_Pi * p.mean_induced_v0 / speed
            + 0.5 * p.fuselage_drag_d0 * p.air_density_rho * p.rotor_solidity_s
            * p.rotor_disc_area_A * speed ** 3)


def propulsion_power(propulsion):
    if isinstance(propulsion, FixedDraw):
        return float(propulsion.p_prop)
    if isinstance(propulsion, FixedWing):
        return propulsion_power_fixed_wing(propulsion.params, propulsion.velocity,
                                           propulsion.acceleration)
    if isinstance(propulsion, RotaryWing):
        return propulsion_power_rotary(propulsion.params, propulsion.speed)
    raise TypeError(f"unknown propulsion model {propulsion!r}")


def total_consumed_power(model):
    """p_prop + p_comm (W)."""
    return propulsion_power(model.propulsion) + model.p_comm


def fixed_wing_optimal_speed(params):
    """Level-flight speed minimising fixed-wing propulsion power, (c2 / 3 c1)^(1/4)."""
    return math.pow(params.c2 / (3.0 * params.c1), 0.25)
