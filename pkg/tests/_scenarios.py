"""Random scenario generators shared by the tests."""

import math
from dataclasses import replace

import numpy as np

from laseruav import (FixedDraw, FsoChannelParams, LogNormalTurbulence, NetworkModel,
                      NoTurbulence, Scenario, UavPowerModel, critical_radius,
                      energy_coverage, joint_coverage, snr_coverage)
from laseruav.channel import Geometry, received_power


def loguniform(rng, lo, hi):
    return float(math.exp(rng.uniform(math.log(lo), math.log(hi))))


def random_channel_scenario(rng, density=None):
    """Coverable-ish scenario with randomized link budget and constant draw."""
    channel = FsoChannelParams(
        p_trans=loguniform(rng, 100.0, 5000.0),
        combined_aperture_efficiency=loguniform(rng, 1e-3, 1e-2),
        initial_beam_size_D=rng.uniform(0.02, 0.5),
        angular_spread=loguniform(rng, 5e-6, 2e-4),
        attenuation_alpha=loguniform(rng, 1e-7, 1e-3),
        split_delta_s=loguniform(rng, 1e-9, 0.5),
    )
    network = NetworkModel(density if density is not None else loguniform(rng, 1e-8, 1e-5),
                           rng.uniform(20.0, 500.0))
    power = UavPowerModel(FixedDraw(rng.uniform(10.0, 300.0)), rng.uniform(0.0, 60.0))
    return Scenario(network=network, channel=channel, power=power)


def random_coverable_scenario(rng):
    while True:
        s = random_channel_scenario(rng)
        r = critical_radius(s)
        if r is not None and 0.0 < r < math.inf:
            return s, r


def random_moderate_scenario(rng, lo=0.02, hi=0.98):
    """Scenario whose energy, SNR and joint probabilities all lie in (lo, hi).

    The density is tuned from the critical radius so that energy coverage is
    not degenerate, and beta from the received power scale so that the SNR
    probability is not degenerate either.
    """
    while True:
        s, r_star = random_coverable_scenario(rng)
        turb = LogNormalTurbulence() if rng.random() < 0.8 else NoTurbulence()
        target = rng.uniform(0.15, 0.85)
        density = -math.log1p(-target) / (math.pi * r_star ** 2)
        delta = s.channel.split_delta_s
        rx = s.receiver
        # beta putting the SNR edge near a random multiple of r_star
        scale = loguniform(rng, 0.3, 3.0)
        p_edge = received_power(s.channel, Geometry(s.altitude, scale * r_star))
        beta = rx.responsivity_eta * delta * p_edge / rx.noise_power
        if not beta > 0:
            continue
        s = replace(s.with_density(density), turbulence=turb, snr_threshold_beta=beta)
        values = (energy_coverage(s), snr_coverage(s), joint_coverage(s))
        if all(lo < v < hi for v in values):
            return s


def draws(seed):
    return np.random.default_rng(seed)
