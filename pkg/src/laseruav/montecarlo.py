"""Monte Carlo estimation of energy, SNR and joint coverage.

Each realisation draws the nearest-LBD distance R, the scintillation
variance at R, and a fading sample h_t, then tests the coverage conditions
directly on that (R, h_t) pair:

* energy: h_t (1 - delta_s) p_rec(R) > p_prop + p_comm
* SNR:    delta_s eta h_t p_rec(R) / (2 h nu df) > beta
* joint:  both at once.

Iterations are split into fixed-size batches, each with its own Philox
stream keyed by (seed, batch index), so results do not depend on how many
workers process the batches.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ._backend import kernels
from .channel import LogNormalTurbulence, sample_turbulence
from .coverage import Metric, consumed_power
from .errors import ConfigError

BATCH_SIZE = 1 << 16
# cap on simultaneously materialised window points
_MAX_WINDOW_POINTS = 1 << 22


@dataclass(frozen=True)
class DirectNearest:
    """Inverse-CDF draw of the nearest-neighbour distance."""


@dataclass(frozen=True)
class WindowPpp:
    """Full PPP realisation in a square of half-width ``half_width`` (m)."""

    half_width: float = 150e3

    def __post_init__(self):
        if not self.half_width > 0:
            raise ConfigError(f"must be > 0, got {self.half_width!r}", key="half_width")


@dataclass(frozen=True)
class SimulationConfig:
    iterations: int = 10_000
    sampling: DirectNearest | WindowPpp = field(default_factory=DirectNearest)
    seed: int = 0
    workers: int = 1

    def __post_init__(self):
        if int(self.iterations) != self.iterations or self.iterations < 1:
            raise ConfigError(f"must be a positive integer, got {self.iterations!r}",
                              key="iterations")
        if not 0 <= int(self.seed) < 2 ** 64:
            raise ConfigError(f"must be an unsigned 64-bit integer, got {self.seed!r}",
                              key="seed")
        if self.workers < 1:
            raise ConfigError(f"must be >= 1, got {self.workers!r}", key="workers")


@dataclass(frozen=True)
class CoverageEstimate:
    metric: Metric
    estimate: float
    std_error: float
    iterations: int
    seed: int
    window_redraws: int = 0

    @classmethod
    def from_count(cls, metric, successes, iterations, seed, window_redraws=0):
        p = successes / iterations
        return cls(Metric(metric), p, math.sqrt(p * (1.0 - p) / iterations),
                   iterations, seed, window_redraws)


def batch_rng(seed, batch_index):
    """Independent generator for one batch."""
    ss = np.random.SeedSequence(int(seed), spawn_key=(int(batch_index),))
    return np.random.Generator(np.random.Philox(ss))


def check_window(network, sampling):
    minimum = 10.0 / math.sqrt(network.lbd_density_lambda * math.pi)
    if sampling.half_width < minimum:
        raise ConfigError(
            f"window half-width {sampling.half_width:g} m is below "
            f"10/sqrt(lambda pi) = {minimum:g} m", key="half_width")


def sample_nearest_distances(network, sampling, rng, size):
    """Draw ``size`` nearest-LBD horizontal distances.

    Returns ``(distances, redraws)``; ``redraws`` counts empty-window
    realisations that were discarded (always 0 for direct sampling).
    """
    lam = network.lbd_density_lambda
    if isinstance(sampling, DirectNearest):
        u = 1.0 - rng.random(size)          # (0, 1]
        return np.sqrt(-np.log(u) / (math.pi * lam)), 0
    check_window(network, sampling)
    w = sampling.half_width
    mean = lam * (2.0 * w) ** 2
    counts = rng.poisson(mean, size)
    redraws = 0
    empty = np.flatnonzero(counts == 0)
    while empty.size:
        redraws += empty.size
        counts[empty] = rng.poisson(mean, empty.size)
        empty = empty[counts[empty] == 0]
    out = np.empty(size)
    start = 0
    while start < size:
        # take realisations until the point budget is reached
        cum = np.cumsum(counts[start:])
        stop = start + max(1, int(np.searchsorted(cum, _MAX_WINDOW_POINTS, side="right")))
        chunk = counts[start:stop]
        xy = rng.uniform(-w, w, size=(int(chunk.sum()), 2))
        offsets = np.concatenate([[0], np.cumsum(chunk)])
        out[start:stop] = kernels.nearest_norms(xy[:, 0], xy[:, 1], offsets)
        start = stop
    return out, redraws


def sample_nearest_distance(network, config, rng):
    """One nearest-LBD distance draw under ``config.sampling``."""
    r, _ = sample_nearest_distances(network, config.sampling, rng, 1)
    return float(r[0])


def _run_batch(scenario, config, batch_index, n):
    rng = batch_rng(config.seed, batch_index)
    altitude = scenario.altitude
    r, redraws = sample_nearest_distances(scenario.network, config.sampling, rng, n)
    turbulence = scenario.turbulence
    sigma2 = turbulence.sigma2_at(r, altitude) if isinstance(turbulence, LogNormalTurbulence) else None
    h = sample_turbulence(turbulence, sigma2, rng, size=n)
    ch, rx = scenario.channel, scenario.receiver
    delta = ch.split_delta_s
    counts = kernels.mc_counts(
        r, h, altitude, ch.power_scale, ch.initial_beam_size_D, ch.angular_spread,
        ch.attenuation_alpha, 1.0 - delta, consumed_power(scenario),
        delta * rx.responsivity_eta / rx.noise_power, scenario.snr_threshold_beta)
    return counts, redraws


def estimate_all(scenario, config):
    """Energy, SNR and joint estimates from one shared set of draws."""
    n_total = int(config.iterations)
    sizes = [min(BATCH_SIZE, n_total - start) for start in range(0, n_total, BATCH_SIZE)]

    def job(i):
        return _run_batch(scenario, config, i, sizes[i])

    if config.workers > 1 and len(sizes) > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            results = list(pool.map(job, range(len(sizes))))
    else:
        results = [job(i) for i in range(len(sizes))]
    totals = np.sum([c for c, _ in results], axis=0, dtype=np.int64)
    redraws = sum(r for _, r in results)
    return {
        metric: CoverageEstimate.from_count(metric, int(k), n_total, config.seed, redraws)
        for metric, k in zip((Metric.ENERGY, Metric.SNR, Metric.JOINT), totals)
    }


def estimate_coverage(scenario, metric, config):
    """Monte Carlo estimate of one coverage metric.

    ``metric`` is energy, snr or joint; the draws are identical for all
    three, so the joint estimate is directly comparable to the others.
    """
    metric = Metric(metric)
    if metric is Metric.ENERGY_NO_TURBULENCE:
        raise ValueError("simulate energy coverage with a NoTurbulence scenario instead")
    return estimate_all(scenario, config)[metric]
