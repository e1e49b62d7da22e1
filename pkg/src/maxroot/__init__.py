"""Batch greatest-root testing with Gumbel-calibrated critical values.

Public surface:

- ``painleve``: Tracy-Widom F1/F2 CDFs, density, quantiles and the Von
  Mises diagnostic, built on a Painleve II solution table.
- ``extremes``: Gumbel utilities, Lambert W, normalizing constants.
- ``centering``: logit-scale centering/scaling of the greatest root.
- ``matvar``: Gaussian/Wishart sampling and greatest roots of pencils.
- ``battest``: batch union-intersection tests and critical values.
- ``simlab``: Monte Carlo experiments (goodness of fit, power curves).
- ``cli``: the ``maxroot`` command-line tool.
"""

__version__ = "0.1.0"

from .battest import (
    BatchTestResult,
    CovPairSample,
    ManovaBatch,
    batch_test,
    cov_equality_statistic,
    critical_value,
    manova_matrices,
)
from .centering import (
    BetaDims,
    CenteringScaling,
    RegimeDiagnostics,
    centering_scaling,
    logit,
    reparametrize,
    standardize,
    validate_regime,
)
from .extremes import (
    NormalizingConstants,
    gumbel_cdf,
    gumbel_quantile,
    lambert_w0,
    norm_constants_asymptotic,
    norm_constants_exact,
    normalize_max,
)
from .matvar import (
    RngStream,
    greatest_root,
    greatest_roots_batch,
    sample_gaussian_matrix,
    sample_greatest_root_null,
    sample_greatest_roots_null,
    wishart_from_data,
)
from .painleve import (
    PainleveSolution,
    TracyWidomTable,
    build_table,
    default_table,
    load_table,
    save_table,
    solve_hastings_mcleod,
    tw1_cdf,
    tw1_pdf,
    tw1_quantile,
    tw1_tail,
    tw2_cdf,
    von_mises_ratio,
)
from .simlab import (
    KsReport,
    PowerCurve,
    gumbel_null_experiment,
    kolmogorov_sf,
    ks_test,
    max_tw_experiment,
    power_curve_cov,
    power_curve_manova,
)

__all__ = [name for name in dir() if not name.startswith("_")]
