"""Flat ``key = value`` scenario files.

Blank lines and ``#`` comments are ignored. All quantities are SI; the SNR
threshold may be given linearly (``snr_threshold``) or in dB
(``snr_threshold_db``). Unspecified keys take the defaults in ``KEYS``.
"""

import hashlib
import json
import logging
import math
from dataclasses import dataclass, field

from .channel import (FsoChannelParams, LogNormalTurbulence, NoTurbulence,
                      load_tabulated_cdf)
from .coverage import NetworkModel, ReceiverParams, Scenario
from .errors import ConfigError
from .montecarlo import DirectNearest, SimulationConfig, WindowPpp
from .power import (FixedDraw, FixedWing, FixedWingParams, RotaryWing,
                    RotaryWingParams, UavPowerModel)

logger = logging.getLogger(__name__)


def _vector(text):
    parts = [p for p in text.replace(",", " ").split()]
    if len(parts) != 3:
        raise ValueError("expected three components")
    return tuple(float(p) for p in parts)


def _choice(*options):
    def parse(text):
        if text not in options:
            raise ValueError(f"expected one of {', '.join(options)}")
        return text
    return parse


def _unsigned(text):
    value = int(text, 0)
    if value < 0:
        raise ValueError("expected a non-negative integer")
    return value


# config key -> (parser, default). None defaults are derived or optional.
KEYS = {
    "lbd_density": (float, 0.52e-6),
    "altitude": (float, 100.0),
    "p_trans": (float, 600.0),
    "combined_aperture_efficiency": (float, 0.004),
    "initial_beam_size": (float, 0.1),
    "angular_spread": (float, 3.4e-5),
    "attenuation_alpha": (float, 1e-6),
    "split_delta_s": (float, 1e-5),
    "turbulence": (_choice("none", "lognormal", "tabulated"), "lognormal"),
    "refraction_index_cn2": (float, 0.5e-14),
    "optical_wavenumber": (float, None),
    "turbulence_distance": (_choice("horizontal", "slant"), "horizontal"),
    "turbulence_cdf_file": (str, None),
    "responsivity": (float, 0.5),
    "wavelength": (float, 0.785e-6),
    "bandwidth": (float, 1e9),
    "planck_h": (float, 6.62607015e-34),
    "snr_threshold": (float, None),
    "snr_threshold_db": (float, None),
    "uav_type": (_choice("fixed_wing", "rotary_wing", "fixed_draw"), "fixed_wing"),
    "p_prop": (float, 100.0),
    "c1": (float, 9.26e-4),
    "c2": (float, 2250.0),
    "mass": (float, 5.0),
    "velocity": (_vector, (30.0, 0.0, 0.0)),
    "acceleration": (_vector, (0.0, 0.0, 0.0)),
    "blade_profile_power": (float, 80.0),
    "induced_power": (float, 88.0),
    "tip_speed": (float, 120.0),
    "mean_induced_velocity": (float, 4.03),
    "fuselage_drag_ratio": (float, 0.6),
    "rotor_solidity": (float, 0.05),
    "air_density": (float, 1.225),
    "rotor_disc_area": (float, 0.503),
    "speed": (float, 10.0),
    "p_comm": (float, 10.0),
    "iterations": (_unsigned, 10_000),
    "seed": (_unsigned, 0),
    "sampling": (_choice("direct", "window"), "direct"),
    "window_half_width": (float, 150e3),
    "workers": (_unsigned, 1),
}

DEFAULT_SNR_THRESHOLD = 1e5

# dataclass field named in a ConfigError -> config key
_FIELD_TO_KEY = {
    "lbd_density_lambda": "lbd_density",
    "altitude_H": "altitude",
    "initial_beam_size_D": "initial_beam_size",
    "refraction_index_Cn2": "refraction_index_cn2",
    "optical_wavenumber_k": "optical_wavenumber",
    "distance": "turbulence_distance",
    "responsivity_eta": "responsivity",
    "wavelength_lambda": "wavelength",
    "modulation_bandwidth_df": "bandwidth",
    "mass_m": "mass",
    "blade_profile_P0": "blade_profile_power",
    "induced_Pi": "induced_power",
    "tip_speed_Utip": "tip_speed",
    "mean_induced_v0": "mean_induced_velocity",
    "fuselage_drag_d0": "fuselage_drag_ratio",
    "rotor_solidity_s": "rotor_solidity",
    "air_density_rho": "air_density",
    "rotor_disc_area_A": "rotor_disc_area",
    "half_width": "window_half_width",
}

# defaults that replace a misprinted literal; echoed whenever they are used
_CORRECTION_NOTES = {
    "c1": "c1 defaults to 9.26e-4 kg/m (the literal 9.26e4 would give ~2.5e9 W "
          "at 30 m/s instead of 100 W); set c1 explicitly to override",
    "refraction_index_cn2": "refraction_index_cn2 defaults to 0.5e-14 m^-2/3 "
                            "(the exponent read as negative); set it explicitly to override",
    "optical_wavenumber": "optical_wavenumber defaults to 2*pi/wavelength "
                          "(8.004e6 1/m at 0.785 um); set optical_wavenumber = 5.92e6 "
                          "to use the tabulated literal instead",
}


@dataclass
class LoadedConfig:
    scenario: Scenario
    simulation: SimulationConfig
    resolved: dict
    notes: list = field(default_factory=list)
    path: str = ""

    @property
    def fingerprint(self):
        return fingerprint(self.resolved)


def fingerprint(resolved):
    """SHA-256 of the resolved parameters, independent of key order."""
    payload = json.dumps(resolved, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(payload.encode()).hexdigest()


def parse_lines(lines, source="<config>"):
    """Parse ``key = value`` lines into ``{key: (value, line_number)}``."""
    entries = {}
    for lineno, raw in enumerate(lines, start=1):
        text = raw.split("#", 1)[0].strip()
        if not text:
            continue
        if "=" not in text:
            raise ConfigError(f"{source}: expected 'key = value'", line=lineno)
        key, _, value = text.partition("=")
        key, value = key.strip(), value.strip()
        if key not in KEYS:
            raise ConfigError(f"{source}: unknown key", key=key, line=lineno)
        if key in entries:
            raise ConfigError(f"{source}: duplicate key (first on line {entries[key][1]})",
                              key=key, line=lineno)
        parser = KEYS[key][0]
        try:
            entries[key] = (parser(value), lineno)
        except ValueError as exc:
            raise ConfigError(f"{source}: invalid value {value!r} ({exc})",
                              key=key, line=lineno) from None
    return entries


def build(entries, source="<config>"):
    """Resolve parsed entries against the defaults into a :class:`LoadedConfig`."""
    lines = {key: line for key, (_, line) in entries.items()}
    values = {key: default for key, (_, default) in KEYS.items()}
    values.update({key: value for key, (value, _) in entries.items()})
    relevant = set()
    if values["uav_type"] == "fixed_wing":
        relevant.add("c1")
    if values["turbulence"] == "lognormal":
        relevant.update(("refraction_index_cn2", "optical_wavenumber"))
    notes = [note for key, note in _CORRECTION_NOTES.items()
             if key in relevant and key not in entries]

    if "snr_threshold" in entries and "snr_threshold_db" in entries:
        raise ConfigError(f"{source}: give snr_threshold or snr_threshold_db, not both",
                          key="snr_threshold_db", line=lines["snr_threshold_db"])
    if values["snr_threshold_db"] is not None:
        values["snr_threshold"] = 10.0 ** (values["snr_threshold_db"] / 10.0)
    elif values["snr_threshold"] is None:
        values["snr_threshold"] = DEFAULT_SNR_THRESHOLD
    if values["optical_wavenumber"] is None and values["wavelength"] > 0:
        values["optical_wavenumber"] = 2.0 * math.pi / values["wavelength"]

    try:
        scenario = _scenario_from(values, source, lines)
        sampling = (WindowPpp(values["window_half_width"]) if values["sampling"] == "window"
                    else DirectNearest())
        simulation = SimulationConfig(iterations=values["iterations"], sampling=sampling,
                                      seed=values["seed"], workers=values["workers"])
    except ConfigError as exc:
        if exc.line is not None:
            raise
        key = _FIELD_TO_KEY.get(exc.key, exc.key)
        raise ConfigError(f"{source}: {exc.reason}", key=key, line=lines.get(key)) from None

    resolved = {k: (list(v) if isinstance(v, tuple) else v) for k, v in values.items()
                if v is not None and k != "snr_threshold_db"}
    if values["turbulence"] == "tabulated":
        t = scenario.turbulence
        resolved["turbulence_cdf_table"] = [list(t.h), list(t.cdf)]
    return LoadedConfig(scenario, simulation, resolved, notes, source)


def _scenario_from(values, source, lines):
    kind = values["turbulence"]
    if kind == "none":
        turbulence = NoTurbulence()
    elif kind == "lognormal":
        turbulence = LogNormalTurbulence(values["refraction_index_cn2"],
                                         values["optical_wavenumber"],
                                         values["turbulence_distance"])
    else:
        path = values["turbulence_cdf_file"]
        if path is None:
            raise ConfigError(f"{source}: missing required key (turbulence = tabulated)",
                              key="turbulence_cdf_file", line=lines.get("turbulence"))
        try:
            turbulence = load_tabulated_cdf(path)
        except OSError as exc:
            raise ConfigError(f"{source}: cannot read {path}: {exc.strerror}",
                              key="turbulence_cdf_file",
                              line=lines.get("turbulence_cdf_file")) from None

    uav = values["uav_type"]
    if uav == "fixed_draw":
        propulsion = FixedDraw(values["p_prop"])
    elif uav == "fixed_wing":
        propulsion = FixedWing(FixedWingParams(values["c1"], values["c2"], values["mass"]),
                               values["velocity"], values["acceleration"])
        if math.hypot(*values["velocity"]) == 0:
            raise ConfigError(f"{source}: fixed-wing velocity must be nonzero",
                              key="velocity", line=lines.get("velocity"))
    else:
        propulsion = RotaryWing(
            RotaryWingParams(values["blade_profile_power"], values["induced_power"],
                             values["tip_speed"], values["mean_induced_velocity"],
                             values["fuselage_drag_ratio"], values["rotor_solidity"],
                             values["air_density"], values["rotor_disc_area"]),
            values["speed"])

    return Scenario(
        network=NetworkModel(values["lbd_density"], values["altitude"]),
        channel=FsoChannelParams(values["p_trans"], values["combined_aperture_efficiency"],
                                 values["initial_beam_size"], values["angular_spread"],
                                 values["attenuation_alpha"], values["split_delta_s"]),
        turbulence=turbulence,
        receiver=ReceiverParams(values["responsivity"], values["wavelength"],
                                values["bandwidth"], values["planck_h"]),
        power=UavPowerModel(propulsion, values["p_comm"]),
        snr_threshold_beta=values["snr_threshold"],
    )


def load_config(path=None):
    """Load a scenario file; ``None`` gives the all-defaults configuration."""
    if path is None:
        return build({}, "<defaults>")
    try:
        with open(path) as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    loaded = build(parse_lines(lines, str(path)), str(path))
    loaded.path = str(path)
    return loaded


def load_scenario(path):
    """Fully resolved :class:`Scenario` from a config file; logs default corrections."""
    loaded = load_config(path)
    for note in loaded.notes:
        logger.info("%s", note)
    return loaded.scenario
