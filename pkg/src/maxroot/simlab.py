"""Monte Carlo experiment engine: goodness-of-fit and power curves.

Experiments are deterministic: replication r of a run seeded by an
``RngStream`` draws from the child stream ``(seed, (stream_id, r))``, and
results land in pre-allocated per-replication slots, so outputs are
bit-identical for any worker count.  Across a gamma grid the same
replication reuses the same underlying normal draws (common random
numbers), which smooths the estimated power curves.

The covariance-equality study simulates the published design (m pairs of
(p/2) x p Gaussian data matrices, the second scaled by sqrt(gamma)) but
tests equality through the transposed cross-products X X^T: with fewer
rows than columns the textbook p-dimensional pencil is exactly
data-independent (its spectrum is {0, 1}), while the transposed pair is a
faithful covariance-equality problem at dimension p/2 with p and p
degrees of freedom, and reproduces the published power behavior.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import painleve
from .battest import critical_value
from .centering import BetaDims, centering_scaling, standardize, validate_regime
from .errors import DomainError
from .extremes import gumbel_cdf, gumbel_quantile, norm_constants_exact, normalize_max
from .matvar import RngStream, greatest_roots_batch


@dataclass(frozen=True)
class KsReport:
    """One-sample Kolmogorov-Smirnov outcome."""

    statistic: float
    p_value: float
    n: int


@dataclass(frozen=True)
class PowerCurve:
    """Estimated rejection probabilities over a grid of alternatives."""

    gamma_grid: np.ndarray
    power: np.ndarray
    mc_se: np.ndarray
    config: dict


def kolmogorov_sf(t: float) -> float:
    """Survival function of the asymptotic Kolmogorov statistic.

    Two complementary series; agrees with the classical tables to 1e-15.
    """
    if t <= 0.0:
        return 1.0
    if t < 1.0:
        # theta-function form, rapidly convergent for small t
        s = 0.0
        for k in range(1, 40):
            term = math.exp(-((2 * k - 1) ** 2) * math.pi**2 / (8.0 * t * t))
            s += term
            if term <= 1e-18 * s:
                break
        return min(1.0, max(0.0, 1.0 - math.sqrt(2.0 * math.pi) / t * s))
    s = 0.0
    sign = 1.0
    for j in range(1, 200):
        term = sign * math.exp(-2.0 * j * j * t * t)
        s += term
        if abs(term) <= 1e-18:
            break
        sign = -sign
    return min(1.0, max(0.0, 2.0 * s))


def ks_test(samples, cdf) -> KsReport:
    """One-sample KS test of ``samples`` against a vectorized CDF callable."""
    arr = np.sort(np.asarray(samples, dtype=float))
    if arr.ndim != 1 or arr.size == 0:
        raise DomainError("ks_test requires a nonempty 1-d sample")
    n = arr.size
    f = np.asarray(cdf(arr), dtype=float)
    i = np.arange(1, n + 1)
    d = max(float(np.max(i / n - f)), float(np.max(f - (i - 1) / n)), 0.0)
    return KsReport(statistic=d, p_value=kolmogorov_sf(math.sqrt(n) * d), n=n)


def max_tw_experiment(
    m: int,
    reps: int,
    rng: RngStream,
    table: painleve.TracyWidomTable | None = None,
):
    """Normalized maxima of m i.i.d. Tracy-Widom GOE variates vs Gumbel.

    Draws ``reps`` maxima (TW variates by quantile transform of uniforms,
    exact normalizing constants), and returns ``(samples, ks_report, qq)``
    where ``qq`` pairs theoretical Gumbel quantiles at (i - 1/2)/reps with
    the order statistics.
    """
    if reps < 1:
        raise DomainError(f"reps={reps} must be >= 1")
    table = table if table is not None else painleve.default_table()
    consts = norm_constants_exact(table, m)  # raises for m < 2
    u = np.empty((reps, m))
    for r in range(reps):
        u[r] = rng.child_generator(r).random(m)
    np.clip(u, 1e-300, None, out=u)
    variates = painleve.tw1_quantile(table, u)
    samples = normalize_max(variates, consts)
    report = ks_test(samples, gumbel_cdf)
    theo = gumbel_quantile((np.arange(1, reps + 1) - 0.5) / reps)
    qq = np.column_stack([theo, np.sort(samples)])
    return samples, report, qq


def gumbel_null_experiment(
    dims: BetaDims,
    m: int,
    reps: int,
    alpha: float,
    rng: RngStream,
    table: painleve.TracyWidomTable | None = None,
):
    """Null-calibration run of the global test at fixed dimensions.

    Each replication draws m independent greatest roots, standardizes,
    and records the Gumbel score and the alpha-level decision.  Returns
    ``(z_scores, rejection_rate, ks_report)`` with the KS test taken
    against the standard Gumbel law.
    """
    table = table if table is not None else painleve.default_table()
    cs = centering_scaling(dims)
    consts = norm_constants_exact(table, m)
    c_alpha = critical_value(alpha, cs, consts)
    z = np.empty(reps)
    rejects = np.empty(reps, dtype=bool)
    for r in range(reps):
        gen = rng.child_generator(r)
        x1 = gen.standard_normal((m, dims.n1, dims.p))
        x2 = gen.standard_normal((m, dims.n2, dims.p))
        a = np.einsum("kij,kil->kjl", x1, x1)
        b = np.einsum("kij,kil->kjl", x2, x2)
        th = greatest_roots_batch(a, b)
        z[r] = normalize_max(standardize(th, cs), consts)
        rejects[r] = th.max() > c_alpha
    return z, float(rejects.mean()), ks_test(z, gumbel_cdf)


def _mc_se(power: np.ndarray, reps: int) -> np.ndarray:
    return np.sqrt(power * (1.0 - power) / reps)


def _cov_rep(args) -> tuple[int, np.ndarray]:
    seed, stream_id, rep, m, n_rows, p, gammas, c_alpha = args
    gen = RngStream(seed, stream_id).child_generator(rep)
    z1 = gen.standard_normal((m, n_rows, p))
    z2 = gen.standard_normal((m, n_rows, p))
    # transposed (n_rows x n_rows) cross-products, df = p each
    g1 = np.einsum("kij,klj->kil", z1, z1)
    g2 = np.einsum("kij,klj->kil", z2, z2)
    rejected = np.empty(len(gammas), dtype=bool)
    for i, gamma in enumerate(gammas):
        th = greatest_roots_batch(g1, gamma * g2)
        rejected[i] = th.max() > c_alpha
    return rep, rejected


def _manova_rep(args) -> tuple[int, np.ndarray]:
    seed, stream_id, rep, m, r_groups, n_rep, p, gammas, c_alpha = args
    gen = RngStream(seed, stream_id).child_generator(rep)
    z = gen.standard_normal((m, r_groups, n_rep, p))
    zbar = z.mean(axis=2)  # (m, r, p)
    resid = z - zbar[:, :, None, :]
    a = np.einsum("krnp,krnq->kpq", resid, resid)  # gamma-independent
    levels = np.arange(1.0, r_groups + 1.0)
    rejected = np.empty(len(gammas), dtype=bool)
    for i, gamma in enumerate(gammas):
        ybar = zbar + (levels**gamma)[None, :, None]
        d = ybar - ybar.mean(axis=1)[:, None, :]
        b = n_rep * np.einsum("krp,krq->kpq", d, d)
        th = greatest_roots_batch(a, b)
        rejected[i] = th.max() > c_alpha
    return rep, rejected


def _run_reps(worker, arg_list, reps: int, n_gamma: int, workers: int) -> np.ndarray:
    rejections = np.empty((reps, n_gamma), dtype=bool)
    if workers <= 1:
        for args in arg_list:
            rep, rejected = worker(args)
            rejections[rep] = rejected
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for rep, rejected in pool.map(worker, arg_list, chunksize=max(1, reps // (8 * workers))):
                rejections[rep] = rejected
    return rejections


def power_curve_cov(
    gamma_grid,
    p: int,
    m: int,
    reps: int,
    alpha: float,
    rng: RngStream,
    table: painleve.TracyWidomTable | None = None,
    workers: int = 1,
) -> PowerCurve:
    """Power of the batch covariance-equality test against scale alternatives.

    For each gamma and replication: m pairs of (p/2) x p Gaussian data
    matrices, the second scaled by sqrt(gamma); per-pair greatest roots of
    the transposed cross-product pencil (dimension p/2, df p and p); the
    global test rejects when the max root exceeds the alpha-level critical
    value.  gamma = 1 is the null.
    """
    gammas = np.asarray(gamma_grid, dtype=float)
    if gammas.ndim != 1 or gammas.size == 0 or np.any(gammas < 1.0):
        raise DomainError("cov power grid must be a nonempty subset of [1, inf)")
    if reps < 1 or m < 2:
        raise DomainError(f"need reps >= 1 and m >= 2, got reps={reps}, m={m}")
    n_rows = p // 2
    if p % 2 == 1:
        import warnings

        warnings.warn(f"p = {p} is odd; using n1 = n2 = floor(p/2) = {n_rows}", stacklevel=2)
    table = table if table is not None else painleve.default_table()
    diag = validate_regime(BetaDims(p, n_rows, n_rows), m)
    dims = BetaDims(n_rows, p, p)  # transposed-pencil dimensions
    cs = centering_scaling(dims)
    consts = norm_constants_exact(table, m)
    c_alpha = critical_value(alpha, cs, consts)

    args = [
        (rng.seed, rng.stream_id, rep, m, n_rows, p, tuple(gammas), c_alpha)
        for rep in range(reps)
    ]
    rejections = _run_reps(_cov_rep, args, reps, gammas.size, workers)
    power = rejections.mean(axis=0)
    config = {
        "experiment": "cov-power",
        "p": p,
        "n1": n_rows,
        "n2": n_rows,
        "effective_dims": {"p": dims.p, "n1": dims.n1, "n2": dims.n2},
        "m": m,
        "reps": reps,
        "alpha": alpha,
        "gamma_grid": [float(g) for g in gammas],
        "seed": rng.seed,
        "stream_id": rng.stream_id,
        "regime_flags": list(diag.flags),
    }
    return PowerCurve(gamma_grid=gammas, power=power, mc_se=_mc_se(power, reps), config=config)


def power_curve_manova(
    gamma_grid,
    p: int,
    r: int,
    n: int,
    m: int,
    reps: int,
    alpha: float,
    rng: RngStream,
    table: painleve.TracyWidomTable | None = None,
    workers: int = 1,
) -> PowerCurve:
    """Power of the batch MANOVA test against group-mean alternatives.

    Each batch has r groups of n observations of N_p(l^gamma 1_p, I_p),
    l = 1..r; the within/between pencil is standardized with the triple
    (p, r - 1, r(n - 1)).  gamma = 0 makes all group means equal (null).
    """
    gammas = np.asarray(gamma_grid, dtype=float)
    if gammas.ndim != 1 or gammas.size == 0 or np.any((gammas < 0.0) | (gammas > 1.0)):
        raise DomainError("manova power grid must be a nonempty subset of [0, 1]")
    if r < 2 or n < 2:
        raise DomainError(f"need r >= 2 and n >= 2, got r={r}, n={n}")
    if reps < 1 or m < 2:
        raise DomainError(f"need reps >= 1 and m >= 2, got reps={reps}, m={m}")
    table = table if table is not None else painleve.default_table()
    dims = BetaDims(p, r - 1, r * (n - 1))
    diag = validate_regime(dims, m)
    cs = centering_scaling(dims)
    consts = norm_constants_exact(table, m)
    c_alpha = critical_value(alpha, cs, consts)

    args = [
        (rng.seed, rng.stream_id, rep, m, r, n, p, tuple(gammas), c_alpha)
        for rep in range(reps)
    ]
    rejections = _run_reps(_manova_rep, args, reps, gammas.size, workers)
    power = rejections.mean(axis=0)
    config = {
        "experiment": "manova-power",
        "p": p,
        "r": r,
        "n": n,
        "effective_dims": {"p": dims.p, "n1": dims.n1, "n2": dims.n2},
        "m": m,
        "reps": reps,
        "alpha": alpha,
        "gamma_grid": [float(g) for g in gammas],
        "seed": rng.seed,
        "stream_id": rng.stream_id,
        "regime_flags": list(diag.flags),
    }
    return PowerCurve(gamma_grid=gammas, power=power, mc_se=_mc_se(power, reps), config=config)
