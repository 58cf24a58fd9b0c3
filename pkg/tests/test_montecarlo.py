import math

import numpy as np
import pytest

from volboot.distributions import draw_innovations
from volboot.montecarlo import (
    Alternative,
    ExperimentConfig,
    FanChartTable,
    conditional_innovations,
    default_q_grid,
    generate_experiment_path,
    ks_distance,
    run_power_experiment,
    run_size_experiment,
)
from volboot.montecarlo import _alternative_sample
from volboot.rng import SeedPath
from volboot.volatility import GarchSpec, JumpSpec, SvSpec, garch_recovered_moduli

BENCH_GARCH = GarchSpec(kappa=5.0, sigma_bar=1.0, sigma_eta=math.sqrt(10.0))
BENCH_SV = SvSpec(kappa=5.0, sigma_bar=1.0, sigma_eta=math.sqrt(10.0))


def _config(**kwargs) -> ExperimentConfig:
    base = dict(
        dgp="gaussian",
        vol=BENCH_GARCH,
        stat="Tnull",
        n=100,
        n_paths=3,
        n_reps=40,
        master_seed=77,
        B=99,
    )
    base.update(kwargs)
    return ExperimentConfig(**base)


class TestConfig:
    def test_default_q_grid(self):
        q = default_q_grid()
        assert q.shape == (99,)
        assert q[0] == 0.01 and q[49] == 0.5 and q[-1] == 0.99

    def test_problem_follows_statistic(self):
        assert _config(stat="CS").problem == "cusum"
        assert _config(stat="R").problem == "unitroot"

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"n": 1},
            {"n_paths": 0},
            {"n_reps": 0},
            {"alpha": 0.0},
            {"stat": "Z"},
            {"threads": 0},
        ],
    )
    def test_validation(self, kwargs):
        with pytest.raises(ValueError):
            _config(**kwargs)

    def test_alternative_validation(self):
        with pytest.raises(ValueError):
            Alternative(kind="trend", c_grid=(0.0,))
        with pytest.raises(ValueError):
            Alternative(kind="location", c_grid=())
        with pytest.raises(ValueError):
            Alternative(kind="location", c_grid=(2.0, 1.0))
        with pytest.raises(ValueError):
            Alternative(kind="location", c_grid=(-1.0, 0.0))

    def test_to_dict_round_trips_key_fields(self):
        cfg = _config(alternative=Alternative(kind="location", c_grid=(0.0, 2.0)), stat="S")
        d = cfg.to_dict()
        assert d["vol"]["kind"] == "GarchSpec"
        assert d["alternative"]["c_grid"] == [0.0, 2.0]
        assert d["problem"] == "location"


class TestPathGeneration:
    def test_paths_reproducible_and_distinct(self):
        cfg = _config()
        a = generate_experiment_path(cfg, 1)
        b = generate_experiment_path(cfg, 1)
        c = generate_experiment_path(cfg, 2)
        assert np.array_equal(a.sigmas, b.sigmas)
        assert not np.array_equal(a.sigmas, c.sigmas)

    @pytest.mark.parametrize(
        "vol", [BENCH_GARCH, BENCH_SV, JumpSpec(omega0=0.0, omega1=1.0, lam=2.0)]
    )
    def test_all_volatility_models_produce_paths(self, vol):
        path = generate_experiment_path(_config(vol=vol), 1)
        assert path.n == 100
        assert np.all(path.sigmas > 0)


class TestConditionalInnovations:
    def test_garch_conditioning_preserves_moduli(self):
        cfg = _config()
        path = generate_experiment_path(cfg, 1)
        moduli = garch_recovered_moduli(cfg.vol, path)
        seed = SeedPath(cfg.master_seed).child("path", 1).child("rep", 1)
        draw = conditional_innovations("gaussian", path, seed)
        np.testing.assert_allclose(np.abs(draw.z[:-1]), moduli, rtol=1e-10)

    def test_garch_conditional_draws_vary_only_in_signs_and_tail(self):
        cfg = _config()
        path = generate_experiment_path(cfg, 1)
        seed = SeedPath(cfg.master_seed).child("path", 1)
        a = conditional_innovations("gaussian", path, seed.child("rep", 1))
        b = conditional_innovations("gaussian", path, seed.child("rep", 2))
        np.testing.assert_allclose(np.abs(a.z[:-1]), np.abs(b.z[:-1]), rtol=1e-10)
        assert not np.array_equal(a.z, b.z)

    def test_sv_conditioning_is_unconditional_draw(self):
        path = generate_experiment_path(_config(vol=BENCH_SV), 1)
        seed = SeedPath(5).child("rep", 1)
        draw = conditional_innovations("gaussian", path, seed)
        expected = draw_innovations("gaussian", path.n, seed.child("z"))
        np.testing.assert_array_equal(draw.z, expected.z)


class TestAlternativeSamples:
    def test_location_shift(self):
        eps = np.zeros(4)
        sample = _alternative_sample("location", 2.0, eps)
        np.testing.assert_allclose(sample.y, -1.0)
        assert sample.model == "location" and sample.theta_bar == 0.0

    def test_break_shifts_second_half(self):
        eps = np.zeros(6)
        sample = _alternative_sample("cusum_break", 3.0, eps)
        np.testing.assert_allclose(sample.y[:3], 0.0)
        np.testing.assert_allclose(sample.y[3:], 3.0 / math.sqrt(6.0))

    def test_near_unit_autoregression_matches_manual_recursion(self):
        eps = SeedPath(11).generator().standard_normal(20)
        c = 5.0
        sample = _alternative_sample("unitroot", c, eps)
        rho = 1.0 - c / 20.0
        y = np.empty(20)
        prev = 0.0
        for t in range(20):
            prev = rho * prev + eps[t]
            y[t] = prev
        np.testing.assert_allclose(sample.y, y, rtol=1e-12)

    def test_zero_noncentrality_recovers_null(self):
        eps = SeedPath(12).generator().standard_normal(15)
        sample = _alternative_sample("unitroot", 0.0, eps)
        np.testing.assert_allclose(sample.y, np.cumsum(eps), rtol=1e-12)
        np.testing.assert_allclose(
            _alternative_sample("location", 0.0, eps).y, eps
        )


class TestSizeExperiment:
    def test_fanchart_shape_and_monotonicity(self):
        table = run_size_experiment(_config())
        assert table.per_path_cdf.shape == (3, 99)
        assert np.all(np.diff(table.per_path_cdf, axis=1) >= 0.0)
        np.testing.assert_allclose(
            table.unconditional_cdf, table.per_path_cdf.mean(axis=0)
        )

    def test_rejects_alternative(self):
        cfg = _config(alternative=Alternative(kind="location", c_grid=(0.0,)), stat="S")
        with pytest.raises(ValueError, match="must not carry"):
            run_size_experiment(cfg)

    def test_thread_count_does_not_change_results(self):
        serial = run_size_experiment(_config(threads=1))
        threaded = run_size_experiment(_config(threads=4))
        np.testing.assert_array_equal(serial.per_path_cdf, threaded.per_path_cdf)

    def test_csv_round_trip(self, tmp_path):
        table = run_size_experiment(_config(n_paths=2, n_reps=10))
        out = tmp_path / "fanchart.csv"
        table.to_csv(out)
        back = FanChartTable.from_csv(out)
        np.testing.assert_array_equal(back.q_grid, np.asarray(table.q_grid))
        np.testing.assert_array_equal(back.per_path_cdf, table.per_path_cdf)
        np.testing.assert_array_equal(back.unconditional_cdf, table.unconditional_cdf)


class TestPowerExperiment:
    def test_power_increases_with_noncentrality(self):
        cfg = _config(
            stat="S",
            vol=BENCH_SV,
            n_paths=2,
            n_reps=60,
            alternative=Alternative(kind="location", c_grid=(0.0, 6.0)),
        )
        table = run_power_experiment(cfg)
        assert table.per_path_rejection.shape == (2, 2)
        assert np.all(table.per_path_rejection[:, 1] > table.per_path_rejection[:, 0])
        assert np.all(table.per_path_rejection[:, 1] > 0.9)

    def test_requires_matching_alternative(self):
        with pytest.raises(ValueError, match="requires an alternative"):
            run_power_experiment(_config(stat="S"))
        cfg = _config(
            stat="R", alternative=Alternative(kind="location", c_grid=(0.0,))
        )
        with pytest.raises(ValueError, match="does not match"):
            run_power_experiment(cfg)

    def test_power_csv_layout(self, tmp_path):
        cfg = _config(
            stat="CS",
            n_paths=2,
            n_reps=10,
            alternative=Alternative(kind="cusum_break", c_grid=(0.0, 10.0)),
        )
        table = run_power_experiment(cfg)
        out = tmp_path / "power.csv"
        table.to_csv(out)
        rows = out.read_text().strip().splitlines()
        assert rows[0] == "path_id,c,rejection_rate"
        assert len(rows) == 1 + 2 * 2


class TestKsDistance:
    def test_uniform_reference_zero_for_exact_cdf(self):
        grid = default_q_grid()
        assert ks_distance(grid.copy(), grid) == 0.0

    def test_detects_deviation(self):
        grid = np.array([0.2, 0.5, 0.8])
        assert ks_distance(np.array([0.2, 0.8, 0.8]), grid) == pytest.approx(0.3)

    def test_normal_reference(self):
        grid = np.array([-1.0, 0.0, 1.0])
        ecdf = np.array([0.16, 0.5, 0.84])
        assert ks_distance(ecdf, grid, reference="normalstd") < 0.002

    def test_callable_reference(self):
        grid = np.linspace(0.1, 0.9, 9)
        assert ks_distance(grid**2, grid, reference=lambda g: g**2) == 0.0

    def test_validation(self):
        with pytest.raises(ValueError):
            ks_distance(np.array([0.5]), np.array([0.1, 0.2]))
        with pytest.raises(ValueError):
            ks_distance(np.array([0.5, 0.4]), np.array([0.1, 0.2]))
        with pytest.raises(ValueError):
            ks_distance(np.array([0.5, 0.6]), np.array([0.1, 0.2]), reference="cauchy")
