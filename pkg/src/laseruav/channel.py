"""FSO link budget and atmospheric turbulence models.

Received optical power at slant distance d from the serving LBD:

    p_rec = wA_chi * p_trans * exp(-alpha d) / (D + d * dtheta)^2

of which a fraction ``1 - delta_s`` is harvested and ``delta_s`` routed to
the photodetector. Turbulence multiplies it by a unit-mean fading h_t.
"""

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from ._backend import kernels
from ._kernels_py import SIGMA2_FLOOR
from .errors import ConfigError, DomainError


@dataclass(frozen=True)
class FsoChannelParams:
    """Laser link-budget constants.

    ``combined_aperture_efficiency`` is the product of harvester efficiency,
    receiver aperture area and optical efficiency (m^2).
    """

    p_trans: float = 600.0
    combined_aperture_efficiency: float = 0.004
    initial_beam_size_D: float = 0.1
    angular_spread: float = 3.4e-5
    attenuation_alpha: float = 1e-6
    split_delta_s: float = 1e-5

    def __post_init__(self):
        for name in ("p_trans", "combined_aperture_efficiency",
                     "initial_beam_size_D", "angular_spread"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"must be > 0, got {getattr(self, name)!r}", key=name)
        if not self.attenuation_alpha >= 0:
            raise ConfigError(f"must be >= 0, got {self.attenuation_alpha!r}",
                              key="attenuation_alpha")
        if not 0.0 <= self.split_delta_s <= 1.0:
            raise ConfigError(f"must lie in [0, 1], got {self.split_delta_s!r}",
                              key="split_delta_s")

    @property
    def power_scale(self):
        """wA_chi * p_trans, the numerator of the range equation (W m^2)."""
        return self.combined_aperture_efficiency * self.p_trans


@dataclass(frozen=True)
class Geometry:
    altitude_H: float
    horizontal_distance_r: float = 0.0

    def __post_init__(self):
        if not self.altitude_H > 0:
            raise DomainError(f"altitude must be > 0, got {self.altitude_H!r}")
        if not self.horizontal_distance_r >= 0:
            raise DomainError(
                f"horizontal distance must be >= 0, got {self.horizontal_distance_r!r}")


@dataclass(frozen=True)
class NoTurbulence:
    """Deterministic channel, h_t = 1."""


@dataclass(frozen=True)
class LogNormalTurbulence:
    """Unit-mean Log-Normal scintillation, ln h_t ~ N(-2 sigma^2, 4 sigma^2).

    sigma^2 = 0.3 k^(7/6) Cn^2 L^(11/6), where L is the horizontal distance
    (``distance="horizontal"``, the default) or the slant path
    (``distance="slant"``).
    """

    refraction_index_Cn2: float = 0.5e-14
    optical_wavenumber_k: float = 2.0 * math.pi / 0.785e-6
    distance: str = "horizontal"

    def __post_init__(self):
        if not self.refraction_index_Cn2 > 0:
            raise ConfigError(f"must be > 0, got {self.refraction_index_Cn2!r}",
                              key="refraction_index_Cn2")
        if not self.optical_wavenumber_k > 0:
            raise ConfigError(f"must be > 0, got {self.optical_wavenumber_k!r}",
                              key="optical_wavenumber_k")
        if self.distance not in ("horizontal", "slant"):
            raise ConfigError(f"must be 'horizontal' or 'slant', got {self.distance!r}",
                              key="distance")

    @property
    def sigma2_coefficient(self):
        """sigma^2 per metre^(11/6)."""
        return 0.3 * self.optical_wavenumber_k ** (7.0 / 6.0) * self.refraction_index_Cn2

    def sigma2_at(self, r, altitude):
        """Vectorised sigma^2 at horizontal distance(s) ``r``; 0 where the distance is 0."""
        r = np.asarray(r, dtype=float)
        dist = np.hypot(r, altitude) if self.distance == "slant" else r
        return self.sigma2_coefficient * np.power(dist, 11.0 / 6.0)


@dataclass(frozen=True)
class TabulatedTurbulence:
    """Arbitrary fading law given as a piecewise-linear CDF on (h, F) pairs.

    F is 0 below the grid and 1 above it; a first value ``F[0] > 0`` is a
    point mass at ``h[0]``.
    """

    h: tuple
    cdf: tuple
    source: str = field(default="", compare=False)

    def __post_init__(self):
        h = np.asarray(self.h, dtype=float)
        F = np.asarray(self.cdf, dtype=float)
        if h.ndim != 1 or h.shape != F.shape or len(h) < 2:
            raise ConfigError("tabulated CDF needs at least two (h, F) rows")
        if np.any(h < 0):
            raise ConfigError("tabulated h values must be >= 0")
        if np.any(np.diff(h) <= 0):
            raise ConfigError("tabulated h values must be strictly increasing")
        if np.any(np.diff(F) < 0) or F[0] < 0 or F[-1] > 1:
            raise ConfigError("tabulated F must be nondecreasing within [0, 1]")
        if F[-1] != 1.0:
            raise ConfigError(f"tabulated F must end at 1, got {F[-1]!r}")
        object.__setattr__(self, "h", tuple(h.tolist()))
        object.__setattr__(self, "cdf", tuple(F.tolist()))

    def cdf_at(self, x):
        x = np.asarray(x, dtype=float)
        h = np.asarray(self.h)
        out = np.interp(x, h, self.cdf, left=0.0, right=1.0)
        return np.where(x < h[0], 0.0, out)

    def quantile(self, u):
        """Generalised inverse of the interpolated CDF."""
        u = np.asarray(u, dtype=float)
        h = np.asarray(self.h)
        F = np.asarray(self.cdf)
        i = np.clip(np.searchsorted(F, u, side="left"), 1, len(F) - 1)
        f0, f1 = F[i - 1], F[i]
        with np.errstate(divide="ignore", invalid="ignore"):
            t = np.where(f1 > f0, (u - f0) / (f1 - f0), 1.0)
        out = h[i - 1] + np.clip(t, 0.0, 1.0) * (h[i] - h[i - 1])
        return np.where(u <= F[0], h[0], out)


TurbulenceModel = NoTurbulence | LogNormalTurbulence | TabulatedTurbulence


def load_tabulated_cdf(path):
    """Read a two-column ``h,F`` CSV with a header row."""
    rows = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or len(header) < 2:
            raise ConfigError(f"{path}: expected a header row 'h,F'")
        for lineno, row in enumerate(reader, start=2):
            if not row or not "".join(row).strip():
                continue
            if len(row) != 2:
                raise ConfigError(f"{path}: expected 2 columns", line=lineno)
            try:
                rows.append((float(row[0]), float(row[1])))
            except ValueError:
                raise ConfigError(f"{path}: non-numeric value", line=lineno) from None
    if not rows:
        raise ConfigError(f"{path}: no data rows")
    h, F = zip(*rows)
    return TabulatedTurbulence(h=h, cdf=F, source=str(path))


def path_length(geom):
    """Slant distance UAV to LBD."""
    return math.hypot(geom.horizontal_distance_r, geom.altitude_H)


def received_power(params, geom):
    """Total optical power collected from the serving LBD (W)."""
    d = path_length(geom)
    return (params.power_scale * math.exp(-params.attenuation_alpha * d)
            / (params.initial_beam_size_D + d * params.angular_spread) ** 2)


def harvested_power(params, geom):
    """Power routed to the energy harvester (W)."""
    return (1.0 - params.split_delta_s) * received_power(params, geom)


def received_power_array(params, r, altitude):
    """Vectorised :func:`received_power` over horizontal distances ``r``."""
    return kernels.received_power(np.asarray(r, dtype=float), altitude, params.power_scale,
                                  params.initial_beam_size_D, params.angular_spread,
                                  params.attenuation_alpha)


def scintillation_variance(model, horizontal_distance_r):
    """Log-Normal variance parameter sigma^2 at distance ``r`` (> 0).

    The distance convention is the caller's: pass the slant path when
    ``model.distance == "slant"``.
    """
    if not horizontal_distance_r > 0:
        raise DomainError(f"sigma^2 needs r > 0, got {horizontal_distance_r!r}")
    return model.sigma2_coefficient * horizontal_distance_r ** (11.0 / 6.0)


def turbulence_cdf(model, sigma2, h):
    """CDF of the fading h_t evaluated at ``h >= 0``."""
    if h < 0:
        raise DomainError(f"h must be >= 0, got {h!r}")
    if isinstance(model, NoTurbulence):
        return 1.0 if h >= 1.0 else 0.0
    if isinstance(model, TabulatedTurbulence):
        return float(model.cdf_at(h))
    if not sigma2 > 0:
        raise DomainError(f"Log-Normal CDF needs sigma2 > 0, got {sigma2!r}")
    if h == 0:
        return 0.0
    s = math.sqrt(sigma2)
    return 0.5 * math.erfc(-(math.log(h) + 2.0 * sigma2) / (2.0 * s * math.sqrt(2.0)))


def sample_turbulence(model, sigma2, rng, size=None):
    """Draw h_t from ``model``; ``sigma2`` may be an array matching ``size``.

    Log-Normal draws with sigma^2 below 1e-12 return exactly 1.
    """
    if isinstance(model, NoTurbulence):
        return 1.0 if size is None else np.ones(size)
    if isinstance(model, TabulatedTurbulence):
        out = model.quantile(rng.random(size))
        return float(out) if size is None else out
    sigma2 = np.asarray(sigma2, dtype=float)
    z = rng.standard_normal(size)
    tiny = sigma2 < SIGMA2_FLOOR
    s2 = np.where(tiny, 0.0, sigma2)
    out = np.where(tiny, 1.0, np.exp(-2.0 * s2 + 2.0 * np.sqrt(s2) * z))
    return float(out) if size is None else out
