"""Coverage analysis for laser-powered UAVs served by a Poisson network of
laser beam directors (LBDs).

Analytic energy, SNR and joint coverage probabilities, their Monte Carlo
counterparts, and the inverse problem of the LBD density needed for a
coverage target.
"""

__version__ = "0.1.0"

from ._backend import BACKEND
from .channel import (FsoChannelParams, Geometry, LogNormalTurbulence, NoTurbulence,
                      TabulatedTurbulence, harvested_power, load_tabulated_cdf,
                      path_length, received_power, sample_turbulence,
                      scintillation_variance, turbulence_cdf)
from .coverage import (Metric, NetworkModel, ReceiverParams, Scenario, critical_radius,
                       energy_coverage, energy_coverage_no_turbulence, joint_coverage,
                       k_factor, required_density, snr_coverage)
from .errors import (BracketError, ConfigError, DomainError, LaserUavError,
                     NumericalError, QuadratureError, UncoverableError)
from .montecarlo import (CoverageEstimate, DirectNearest, SimulationConfig, WindowPpp,
                         estimate_all, estimate_coverage, sample_nearest_distance)
from .numerics import (QuadratureSpec, integrate_expectation_over_nearest_distance,
                       lambert_w0, std_normal_cdf)
from .power import (FixedDraw, FixedWing, FixedWingParams, RotaryWing, RotaryWingParams,
                    UavPowerModel, propulsion_power_fixed_wing, propulsion_power_rotary,
                    total_consumed_power)
