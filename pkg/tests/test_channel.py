import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from laseruav import (ConfigError, DomainError, FsoChannelParams, Geometry,
                      LogNormalTurbulence, NoTurbulence, TabulatedTurbulence,
                      harvested_power, load_tabulated_cdf, path_length, received_power,
                      sample_turbulence, scintillation_variance, turbulence_cdf)
from laseruav.channel import received_power_array


def by_hand(params, r, altitude):
    d = math.sqrt(r * r + altitude * altitude)
    return (params.p_trans * params.combined_aperture_efficiency
            * math.exp(-params.attenuation_alpha * d)
            / (params.initial_beam_size_D + d * params.angular_spread) ** 2)


class TestLinkBudget:
    def test_defaults(self):
        p = FsoChannelParams()
        assert p.p_trans == 600.0
        assert p.combined_aperture_efficiency == 0.004
        assert p.power_scale == pytest.approx(2.4)

    def test_received_power_overhead(self):
        p = FsoChannelParams()
        expected = 2.4 * math.exp(-1e-6 * 100.0) / (0.1 + 100.0 * 3.4e-5) ** 2
        assert received_power(p, Geometry(100.0, 0.0)) == pytest.approx(expected, rel=1e-14)

    def test_path_length(self):
        assert path_length(Geometry(300.0, 400.0)) == 500.0

    def test_harvested_share(self):
        p = FsoChannelParams(split_delta_s=0.25)
        g = Geometry(100.0, 800.0)
        assert harvested_power(p, g) == pytest.approx(0.75 * received_power(p, g))

    def test_full_split_harvests_nothing(self):
        p = FsoChannelParams(split_delta_s=1.0)
        assert harvested_power(p, Geometry(100.0, 10.0)) == 0.0

    def test_array_matches_scalar(self):
        p = FsoChannelParams()
        r = np.array([0.0, 10.0, 1e3, 5e4])
        got = received_power_array(p, r, 120.0)
        assert got == pytest.approx([by_hand(p, x, 120.0) for x in r], rel=1e-13)

    @settings(max_examples=50)
    @given(st.floats(0.0, 1e5), st.floats(0.0, 1e5), st.floats(1.0, 1e3))
    def test_decreasing_in_distance(self, r1, r2, altitude):
        p = FsoChannelParams()
        lo, hi = sorted((r1, r2))
        assert (received_power(p, Geometry(altitude, lo))
                >= received_power(p, Geometry(altitude, hi)))

    @pytest.mark.parametrize("field,value", [
        ("p_trans", 0.0), ("combined_aperture_efficiency", 0.0), ("initial_beam_size_D", -1.0),
        ("angular_spread", 0.0), ("attenuation_alpha", -1e-6), ("split_delta_s", 1.5),
    ])
    def test_invalid_params_name_the_field(self, field, value):
        with pytest.raises(ConfigError) as info:
            FsoChannelParams(**{field: value})
        assert info.value.key == field

    def test_invalid_geometry(self):
        with pytest.raises(DomainError):
            Geometry(0.0, 10.0)
        with pytest.raises(DomainError):
            Geometry(100.0, -1.0)


class TestScintillation:
    def test_variance_formula(self):
        model = LogNormalTurbulence()
        k = 2 * math.pi / 0.785e-6
        expected = 0.3 * k ** (7 / 6) * 0.5e-14 * 1000.0 ** (11 / 6)
        assert scintillation_variance(model, 1000.0) == pytest.approx(expected, rel=1e-14)

    def test_variance_needs_positive_distance(self):
        with pytest.raises(DomainError):
            scintillation_variance(LogNormalTurbulence(), 0.0)

    def test_sigma2_slant(self):
        model = LogNormalTurbulence(distance="slant")
        assert model.sigma2_at(300.0, 400.0) == pytest.approx(
            model.sigma2_coefficient * 500.0 ** (11 / 6))

    def test_lognormal_cdf_median(self):
        # ln h ~ N(-2 s2, 4 s2): median exp(-2 s2)
        s2 = 0.1
        assert turbulence_cdf(LogNormalTurbulence(), s2, math.exp(-2 * s2)) == pytest.approx(0.5)

    def test_cdf_against_scipy(self):
        s2 = 0.07
        dist = stats.lognorm(s=2 * math.sqrt(s2), scale=math.exp(-2 * s2))
        for h in (0.2, 0.8, 1.0, 1.7, 4.0):
            assert turbulence_cdf(LogNormalTurbulence(), s2, h) == pytest.approx(
                dist.cdf(h), abs=1e-14)

    def test_no_turbulence_is_a_step(self):
        assert turbulence_cdf(NoTurbulence(), None, 0.999) == 0.0
        assert turbulence_cdf(NoTurbulence(), None, 1.0) == 1.0

    def test_cdf_errors(self):
        with pytest.raises(DomainError):
            turbulence_cdf(LogNormalTurbulence(), 0.1, -1.0)
        with pytest.raises(DomainError):
            turbulence_cdf(LogNormalTurbulence(), 0.0, 1.0)

    def test_sampler_unit_mean(self):
        rng = np.random.default_rng(1)
        h = sample_turbulence(LogNormalTurbulence(), np.full(200_000, 0.05), rng, 200_000)
        assert abs(h.mean() - 1.0) < 4 * h.std() / math.sqrt(h.size)

    def test_sampler_tiny_variance_is_exactly_one(self):
        rng = np.random.default_rng(1)
        h = sample_turbulence(LogNormalTurbulence(), np.full(10, 1e-15), rng, 10)
        assert np.all(h == 1.0)

    def test_sampler_scalar(self):
        rng = np.random.default_rng(3)
        assert isinstance(sample_turbulence(LogNormalTurbulence(), 0.1, rng), float)
        assert sample_turbulence(NoTurbulence(), None, rng) == 1.0

    @pytest.mark.parametrize("kwargs", [{"refraction_index_Cn2": 0.0},
                                        {"optical_wavenumber_k": -1.0},
                                        {"distance": "diagonal"}])
    def test_invalid_lognormal(self, kwargs):
        with pytest.raises(ConfigError):
            LogNormalTurbulence(**kwargs)


class TestTabulated:
    def table(self):
        return TabulatedTurbulence((0.5, 1.0, 1.5), (0.0, 0.5, 1.0))

    def test_cdf_interpolates(self):
        t = self.table()
        assert t.cdf_at(0.75) == pytest.approx(0.25)
        assert t.cdf_at(0.1) == 0.0 and t.cdf_at(9.0) == 1.0

    def test_quantile_inverts_cdf(self):
        t = self.table()
        u = np.linspace(0.01, 0.99, 50)
        assert t.cdf_at(t.quantile(u)) == pytest.approx(u)

    def test_sampler_matches_table(self):
        t = self.table()
        h = sample_turbulence(t, None, np.random.default_rng(5), 20_000)
        assert stats.kstest(h, t.cdf_at).pvalue > 0.01

    def test_point_mass_at_first_value(self):
        t = TabulatedTurbulence((0.0, 2.0), (0.4, 1.0))
        assert turbulence_cdf(t, None, 0.0) == pytest.approx(0.4)
        assert np.mean(t.quantile(np.random.default_rng(0).random(10_000)) == 0.0) == \
            pytest.approx(0.4, abs=0.02)

    @pytest.mark.parametrize("h,F", [((1.0,), (1.0,)), ((1.0, 0.5), (0.0, 1.0)),
                                     ((0.5, 1.0), (0.6, 0.5)), ((0.5, 1.0), (0.0, 0.9)),
                                     ((-1.0, 1.0), (0.0, 1.0))])
    def test_invalid_tables(self, h, F):
        with pytest.raises(ConfigError):
            TabulatedTurbulence(h, F)

    def test_load_csv(self, tmp_path):
        path = tmp_path / "cdf.csv"
        path.write_text("h,F\n0.5,0\n1.0,0.5\n1.5,1\n")
        t = load_tabulated_cdf(path)
        assert t.h == (0.5, 1.0, 1.5) and t.cdf == (0.0, 0.5, 1.0)
