import math

import numpy as np
import pytest

from volboot.distributions import InnovationDraw, draw_innovations
from volboot.rng import SeedPath
from volboot.volatility import (
    GarchSpec,
    JumpSpec,
    PathInversionError,
    SvSpec,
    VolatilityPath,
    garch_inverted_modulus,
    garch_recovered_moduli,
    gen_garch_path,
    gen_jump_path,
    gen_sv_path,
)

SEED = SeedPath(271828)

BENCH_GARCH = GarchSpec(kappa=5.0, sigma_bar=1.0, sigma_eta=math.sqrt(10.0))
BENCH_SV = SvSpec(kappa=5.0, sigma_bar=1.0, sigma_eta=math.sqrt(10.0))


class TestSpecs:
    def test_garch_coefficients_at_n_100(self):
        omega, alpha, beta = BENCH_GARCH.coefficients(100)
        assert omega == pytest.approx(0.05, rel=1e-14)
        assert alpha == pytest.approx(math.sqrt(10.0 / 200.0), rel=1e-14)
        assert beta == pytest.approx(1.0 - 0.05 - alpha, rel=1e-14)

    def test_garch_coefficients_invalid_at_small_n(self):
        # alpha_n + kappa/n exceeds 1 at n = 10, so beta_n would be negative
        with pytest.raises(ValueError, match="beta_n"):
            BENCH_GARCH.coefficients(10)

    def test_garch_initial_variance_defaults_to_long_run_level(self):
        assert BENCH_GARCH.var1 == 1.0
        assert GarchSpec(kappa=1.0, sigma_bar=2.0, sigma_eta=1.0).var1 == 4.0
        assert GarchSpec(kappa=1.0, sigma_bar=2.0, sigma_eta=1.0, initial_var=0.5).var1 == 0.5

    def test_sv_initial_log_variance_defaults_to_long_run_level(self):
        assert BENCH_SV.log_var0 == pytest.approx(0.0)
        assert SvSpec(kappa=1.0, sigma_bar=2.0, sigma_eta=1.0).log_var0 == pytest.approx(
            math.log(4.0)
        )

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"kappa": -1.0, "sigma_bar": 1.0, "sigma_eta": 1.0},
            {"kappa": 1.0, "sigma_bar": 0.0, "sigma_eta": 1.0},
            {"kappa": 1.0, "sigma_bar": 1.0, "sigma_eta": 0.0},
        ],
    )
    def test_spec_validation(self, kwargs):
        with pytest.raises(ValueError):
            SvSpec(**kwargs)
        with pytest.raises(ValueError):
            GarchSpec(**kwargs)

    def test_jump_spec_validation(self):
        with pytest.raises(ValueError):
            JumpSpec(omega0=0.0, omega1=1.0, lam=0.0)
        with pytest.raises(ValueError):
            JumpSpec(omega0=0.0, omega1=1.0, lam=2.0, jump_law="uniform")


class TestVolatilityPath:
    def test_rejects_nonpositive_sigma(self):
        with pytest.raises(ValueError):
            VolatilityPath(sigmas=np.array([1.0, 0.0]), n=2, spec=None, needs_z=False)

    def test_rejects_length_mismatch(self):
        with pytest.raises(ValueError):
            VolatilityPath(sigmas=np.ones(3), n=4, spec=None, needs_z=False)

    def test_csv_round_trip(self, tmp_path):
        path = gen_sv_path(BENCH_SV, 20, SEED.child("csv"))
        out = tmp_path / "path.csv"
        path.to_csv(out)
        rows = out.read_text().strip().splitlines()
        assert rows[0] == "t,sigma"
        values = np.array([float(r.split(",")[1]) for r in rows[1:]])
        assert np.array_equal(values, path.sigmas)


class TestSvPath:
    def test_reproducible_and_positive(self):
        a = gen_sv_path(BENCH_SV, 100, SEED.child("sv"))
        b = gen_sv_path(BENCH_SV, 100, SEED.child("sv"))
        assert np.array_equal(a.sigmas, b.sigmas)
        assert not a.needs_z

    def test_random_walk_log_variance_has_shock_scale_variance(self):
        # with kappa = 0 the log variance is a random walk whose time-n value
        # accumulates n shocks of variance sigma_eta^2 / n
        spec = SvSpec(kappa=0.0, sigma_bar=1.0, sigma_eta=1.5)
        ends = np.array(
            [
                np.log(gen_sv_path(spec, 50, SEED.child("rw", i)).sigmas[-1] ** 2)
                for i in range(4000)
            ]
        )
        assert ends.mean() == pytest.approx(0.0, abs=0.1)
        assert ends.var() == pytest.approx(spec.sigma_eta**2, rel=0.15)

    def test_tiny_shock_scale_pins_path_to_long_run_level(self):
        spec = SvSpec(kappa=3.0, sigma_bar=2.0, sigma_eta=1e-12)
        path = gen_sv_path(spec, 50, SEED.child("flat"))
        np.testing.assert_allclose(path.sigmas, 2.0, rtol=1e-10)


class TestGarchPath:
    def test_recursion_matches_manual_iteration(self):
        n = 50
        z = draw_innovations("gaussian", n, SEED.child("manual"))
        path = gen_garch_path(BENCH_GARCH, n, z)
        omega, alpha, beta = BENCH_GARCH.coefficients(n)
        var = [1.0]
        for t in range(1, n):
            var.append(omega + (alpha * z.z[t - 1] ** 2 + beta) * var[-1])
        np.testing.assert_allclose(path.sigmas**2, var, rtol=1e-14)
        assert path.needs_z

    def test_requires_enough_innovations(self):
        z = draw_innovations("gaussian", 5, SEED.child("short"))
        with pytest.raises(ValueError, match="shorter"):
            gen_garch_path(BENCH_GARCH, 10, z)

    def test_inversion_round_trip(self):
        n = 400
        z = draw_innovations("dgp3", n, SEED.child("invert"))
        path = gen_garch_path(BENCH_GARCH, n, z)
        moduli = garch_recovered_moduli(BENCH_GARCH, path)
        np.testing.assert_allclose(moduli, np.abs(z.z[: n - 1]), rtol=1e-10, atol=1e-12)

    def test_constant_path_recovers_unit_squared_innovation(self):
        # with kappa = 0 and sigma_1^2 = sigma_bar^2 a flat variance path is
        # generated exactly by z_t^2 = 1
        spec = GarchSpec(kappa=0.0, sigma_bar=1.0, sigma_eta=1.0)
        path = VolatilityPath(sigmas=np.ones(50), n=50, spec=spec, needs_z=True)
        np.testing.assert_allclose(garch_recovered_moduli(spec, path), 1.0, rtol=1e-14)

    def test_inconsistent_path_raises(self):
        spec = GarchSpec(kappa=0.0, sigma_bar=1.0, sigma_eta=1.0)
        sig = np.ones(10)
        sig[5] = 0.01  # drops faster than beta_n allows
        path = VolatilityPath(sigmas=sig, n=10, spec=spec, needs_z=True)
        with pytest.raises(PathInversionError):
            garch_recovered_moduli(spec, path)

    def test_single_modulus_accessor(self):
        n = 50
        z = draw_innovations("gaussian", n, SEED.child("single"))
        path = gen_garch_path(BENCH_GARCH, n, z)
        assert garch_inverted_modulus(BENCH_GARCH, path, 7) == pytest.approx(
            abs(z.z[6]), rel=1e-10
        )
        for bad in (0, n):
            with pytest.raises(IndexError):
                garch_inverted_modulus(BENCH_GARCH, path, bad)


class TestJumpPath:
    def test_no_jump_segments_are_flat(self):
        spec = JumpSpec(omega0=0.3, omega1=1.0, lam=2.0)
        path = gen_jump_path(spec, 200, SEED.child("jump"))
        log_sig = np.log(path.sigmas)
        changes = np.count_nonzero(np.diff(log_sig) != 0.0)
        assert changes <= 10  # lambda/n keeps jumps rare

    def test_mean_jump_count_matches_intensity(self):
        spec = JumpSpec(omega0=0.0, omega1=1.0, lam=2.0)
        counts = np.empty(20_000)
        for i in range(counts.shape[0]):
            path = gen_jump_path(spec, 50, SEED.child("count", i))
            log_sig = np.concatenate(([0.0], np.log(path.sigmas)))
            counts[i] = np.count_nonzero(np.diff(log_sig) != 0.0)
        # Binomial(n, lam/n) jump count: mean 2, se of the average ~ 0.01
        assert counts.mean() == pytest.approx(2.0, abs=0.04)

    def test_intensity_must_fit_sample_size(self):
        with pytest.raises(ValueError, match="exceeds 1"):
            gen_jump_path(JumpSpec(omega0=0.0, omega1=1.0, lam=5.0), 4, SEED)
