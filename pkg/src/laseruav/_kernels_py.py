"""Pure-numpy implementations of the array kernels.

Mirrors ``_kernels.pyx`` function for function; used when the compiled
extension is unavailable or ``LASERUAV_PURE_PYTHON`` is set.
"""

import math

import numpy as np
from scipy.special import erfc

# Below this scintillation variance h_t is treated as exactly 1.
SIGMA2_FLOOR = 1e-12

_BRANCH_POINT = -math.exp(-1.0)


def lambert_w0(x):
    """Principal-branch Lambert W by Halley iteration. NaN outside the domain."""
    x = float(x)
    if math.isnan(x) or x < _BRANCH_POINT:
        return math.nan
    if x == 0.0:
        return 0.0
    if math.isinf(x):
        return math.inf
    if x < -0.25:
        # series about the branch point in p = sqrt(2(ex + 1))
        p = math.sqrt(max(2.0 * (math.e * x + 1.0), 0.0))
        w = -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p
        if p < 1e-8:
            return w
    elif x < math.e:
        w = math.log1p(x)
    else:
        l1 = math.log(x)
        l2 = math.log(l1)
        w = l1 - l2 + l2 / l1
    for _ in range(64):
        ew = math.exp(w)
        f = w * ew - x
        w1 = w + 1.0
        if w1 == 0.0:
            break
        dw = f / (ew * w1 - (w + 2.0) * f / (2.0 * w1))
        w -= dw
        if abs(dw) <= 4e-16 * (1.0 + abs(w)):
            break
    return max(w, -1.0)


def received_power(r, altitude, base, beam, spread, alpha):
    d = np.sqrt(np.square(r) + altitude * altitude)
    return base * np.exp(-alpha * d) / np.square(beam + d * spread)


def exceedance(r, altitude, base, beam, spread, alpha, threshold, sigma_coef, slant):
    """P(h_t * p_rec(r) > threshold) under unit-mean Log-Normal h_t.

    ``sigma_coef * dist**(11/6)`` is the scintillation variance; ``dist`` is
    the slant path when ``slant`` is true, the horizontal distance otherwise.
    ``sigma_coef == 0`` gives the turbulence-free step.
    """
    r = np.asarray(r, dtype=float)
    p = received_power(r, altitude, base, beam, spread, alpha)
    with np.errstate(divide="ignore", invalid="ignore"):
        x = threshold / p
        dist = np.sqrt(np.square(r) + altitude * altitude) if slant else r
        s2 = sigma_coef * np.power(dist, 11.0 / 6.0)
        det = s2 < SIGMA2_FLOOR
        s = np.sqrt(np.where(det, 1.0, s2))
        z = (np.log(x) + 2.0 * s2) / (2.0 * s * math.sqrt(2.0))
        out = 0.5 * erfc(z)
    out = np.where(det, (x < 1.0).astype(float), out)
    return out


def mc_counts(r, h, altitude, base, beam, spread, alpha,
              harvest_fraction, consumption, snr_gain, beta):
    """Count energy, SNR and joint successes over paired (R, h_t) draws."""
    p = received_power(r, altitude, base, beam, spread, alpha)
    energy = h * harvest_fraction * p > consumption
    snr = snr_gain * h * p > beta
    return int(energy.sum()), int(snr.sum()), int((energy & snr).sum())


def nearest_norms(x, y, offsets):
    """Minimum point norm within each segment ``offsets[i]:offsets[i+1]``."""
    offsets = np.asarray(offsets, dtype=np.int64)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    norms = x * x + y * y
    starts = offsets[:-1]
    empty = offsets[1:] == starts
    out = np.full(len(starts), np.inf)
    if norms.size:
        nonempty = ~empty
        out[nonempty] = np.minimum.reduceat(norms, starts[nonempty])
    return np.sqrt(out)
