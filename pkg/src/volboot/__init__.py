"""Wild-bootstrap testing and Monte Carlo experiments under non-stationary
stochastic volatility."""

from .bootstrap import (
    BootstrapConfig,
    BootstrapRun,
    bootstrap_statistic,
    p_value,
    residuals_for,
    run_bootstrap,
    wild_resample,
)
from .distributions import (
    InnovationDraw,
    MixtureSpec,
    conditional_sign_redraw,
    draw_innovations,
    draw_multipliers,
    mixture_moments,
    mixture_pdf,
)
from .limitoracle import DiffusionSpec, LimitFunctionals, local_power_formula, simulate_limit
from .montecarlo import (
    Alternative,
    ExperimentConfig,
    FanChartTable,
    PowerTable,
    conditional_innovations,
    ks_distance,
    run_power_experiment,
    run_size_experiment,
)
from .rng import SeedPath
from .statistics import (
    PartialSumPair,
    Sample,
    StatValue,
    compute_statistic,
    partial_sums,
    stat_cusum,
    stat_location,
    stat_unitroot,
)
from .volatility import (
    GarchSpec,
    JumpSpec,
    SvSpec,
    VolatilityPath,
    garch_inverted_modulus,
    gen_garch_path,
    gen_jump_path,
    gen_sv_path,
)

__version__ = "0.1.0"
