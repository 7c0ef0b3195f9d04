"""The compiled kernels and the numpy fallback must agree."""

import math
import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from laseruav._backend import BACKEND, compiled_kernels, python_kernels

needs_compiled = pytest.mark.skipif(compiled_kernels is None,
                                    reason="compiled extension not built")

BACKENDS = [pytest.param(python_kernels, id="python"),
            pytest.param(compiled_kernels, id="cython", marks=needs_compiled)]

CHANNEL = (100.0, 2.4, 0.1, 3.4e-5, 1e-6)


def test_backend_label():
    assert BACKEND in ("cython", "python")


def test_env_var_forces_fallback():
    code = "import laseruav; print(laseruav.BACKEND)"
    env = dict(os.environ, LASERUAV_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True,
                         text=True, check=True)
    assert out.stdout.strip() == "python"


@pytest.mark.parametrize("k", BACKENDS)
def test_lambert_w0(k):
    assert k.lambert_w0(0.0) == 0.0
    assert k.lambert_w0(1.0) == pytest.approx(0.5671432904097838, rel=1e-15)
    assert math.isnan(k.lambert_w0(-1.0))


@needs_compiled
@settings(max_examples=300)
@given(st.floats(-math.exp(-1.0), 1e300))
def test_lambert_agrees(x):
    a, b = python_kernels.lambert_w0(x), compiled_kernels.lambert_w0(x)
    assert a == pytest.approx(b, rel=1e-14, abs=1e-300)


@needs_compiled
@pytest.mark.parametrize("slant", [False, True])
def test_exceedance_agrees(slant):
    r = np.concatenate([[0.0], np.geomspace(1e-3, 1e5, 2000)])
    for threshold in (1e-3, 110.0, 1e4):
        for coef in (0.0, 5e-6, 1e-3):
            a = python_kernels.exceedance(r, *CHANNEL, threshold, coef, slant)
            b = compiled_kernels.exceedance(r, *CHANNEL, threshold, coef, slant)
            np.testing.assert_allclose(a, b, rtol=1e-13, atol=1e-16)


@needs_compiled
def test_received_power_agrees():
    r = np.geomspace(1e-3, 1e6, 500)
    np.testing.assert_allclose(python_kernels.received_power(r, *CHANNEL),
                               compiled_kernels.received_power(r, *CHANNEL), rtol=1e-14)


@needs_compiled
def test_mc_counts_agree():
    rng = np.random.default_rng(0)
    r = rng.uniform(0, 4000, 100_000)
    h = rng.lognormal(-0.1, 0.4, 100_000)
    args = (100.0, 2.4, 0.1, 3.4e-5, 1e-6, 1 - 1e-5, 110.0, 2.3e7, 1e5)
    assert tuple(python_kernels.mc_counts(r, h, *args)) == \
        tuple(compiled_kernels.mc_counts(r, h, *args))


@needs_compiled
def test_nearest_norms_agree():
    rng = np.random.default_rng(1)
    counts = rng.poisson(50, 300) + 1
    xy = rng.uniform(-1000, 1000, (counts.sum(), 2))
    offsets = np.concatenate([[0], np.cumsum(counts)])
    a = python_kernels.nearest_norms(xy[:, 0], xy[:, 1], offsets)
    b = compiled_kernels.nearest_norms(xy[:, 0], xy[:, 1], offsets)
    np.testing.assert_allclose(a, b, rtol=1e-15)
    first = np.hypot(xy[:counts[0], 0], xy[:counts[0], 1]).min()
    assert a[0] == first


@pytest.mark.parametrize("k", BACKENDS)
def test_exceedance_step_without_turbulence(k):
    r = np.array([0.0, 1000.0, 1396.0, 1397.0, 5000.0])
    out = k.exceedance(r, *CHANNEL, 110.0 / (1 - 1e-5), 0.0, False)
    assert out.tolist() == [1.0, 1.0, 1.0, 0.0, 0.0]


def test_full_pipeline_matches_between_backends():
    code = ("import laseruav as L; s=L.Scenario(); "
            "print(repr(L.energy_coverage(s)), repr(L.snr_coverage(s)), "
            "L.estimate_all(s, L.SimulationConfig(70000, seed=3))[L.Metric.JOINT].estimate)")
    results = []
    for flag in ("", "1"):
        env = dict(os.environ, LASERUAV_PURE_PYTHON=flag)
        if not flag:
            env.pop("LASERUAV_PURE_PYTHON")
        out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True,
                             text=True, check=True)
        results.append([float(v) for v in out.stdout.split()])
    np.testing.assert_allclose(results[0][:2], results[1][:2], rtol=1e-12)
    assert results[0][2] == results[1][2]
