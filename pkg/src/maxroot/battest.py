"""Union-intersection batch tests built on the greatest root statistic.

A global null composed of m independent sub-hypotheses is rejected when
the largest of the m greatest-root statistics exceeds a Gumbel-calibrated
critical value: on the logit scale,

    logit(c_alpha) = mu + sigma * (b_m + a_m * G^{-1}(1 - alpha)),

with (mu, sigma) the dimension-dependent centering/scaling and
(a_m, b_m) the extreme-value constants.  All m sub-hypotheses must share
one dimension triple; heterogeneous batches are rejected.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import matvar
from .centering import CenteringScaling, logit, standardize
from .errors import DataError, DomainError, NumericalError
from .extremes import NormalizingConstants, gumbel_quantile, normalize_max

_COV_FORMS = ("covariance", "crossprod")


@dataclass(frozen=True)
class CovPairSample:
    """One pair of covariance-type matrices to be tested for equality.

    ``form="covariance"`` means s1/s2 are (mean-normalized) covariance
    estimators, so the pencil uses n1*s1 and n2*s2; ``form="crossprod"``
    means they are raw X^T X cross-products that already carry their
    degrees of freedom.
    """

    s1: np.ndarray
    s2: np.ndarray
    n1: int
    n2: int
    form: str = "covariance"

    def __post_init__(self):
        s1 = np.asarray(self.s1, dtype=float)
        s2 = np.asarray(self.s2, dtype=float)
        if s1.ndim != 2 or s1.shape[0] != s1.shape[1] or s1.shape != s2.shape:
            raise DomainError(f"covariance pair must be square and same order, got {s1.shape} vs {s2.shape}")
        if self.form not in _COV_FORMS:
            raise DomainError(f"form must be one of {_COV_FORMS}, got {self.form!r}")
        if self.n1 < 1 or self.n2 < 1:
            raise DomainError("sample degrees of freedom must be >= 1")
        object.__setattr__(self, "s1", s1)
        object.__setattr__(self, "s2", s2)

    @property
    def order(self) -> int:
        return self.s1.shape[0]


@dataclass(frozen=True)
class ManovaBatch:
    """Balanced one-way layout: r groups x n replicates of p-vectors."""

    observations: np.ndarray  # shape (r, n, p)

    def __post_init__(self):
        obs = np.asarray(self.observations, dtype=float)
        if obs.ndim != 3:
            raise DomainError(f"observations must have shape (r, n, p), got {obs.shape}")
        r, n, _ = obs.shape
        if r < 2 or n < 2:
            raise DomainError(f"need r >= 2 groups and n >= 2 replicates, got r={r}, n={n}")
        object.__setattr__(self, "observations", obs)

    @property
    def r(self) -> int:
        return self.observations.shape[0]

    @property
    def n(self) -> int:
        return self.observations.shape[1]

    @property
    def p(self) -> int:
        return self.observations.shape[2]


@dataclass(frozen=True)
class BatchTestResult:
    """Outcome of a global max-root test; the three decision views agree."""

    thetas: np.ndarray
    theta_max: float
    z_score: float
    p_value: float
    alpha: float
    c_alpha: float
    reject: bool
    consts: NormalizingConstants
    cs: CenteringScaling


def cov_equality_statistic(pair: CovPairSample) -> float:
    """Greatest root of (n1 S1 + n2 S2)^{-1} n2 S2 for one pair."""
    if pair.form == "covariance":
        a = pair.n1 * pair.s1
        b = pair.n2 * pair.s2
    else:
        a = pair.s1
        b = pair.s2
    return matvar.greatest_root(a, b)


def manova_matrices(batch: ManovaBatch) -> tuple[np.ndarray, np.ndarray]:
    """Within-group and between-group matrices (A, B) of one batch.

    A sums (Y_li - Ybar_l)(...)^T over all observations; B is n times the
    spread of group means around their grand mean.  Under the null A is
    Wishart with r(n-1) df, independent of B with r-1 df.
    """
    y = batch.observations
    group_means = y.mean(axis=1)  # (r, p)
    grand = group_means.mean(axis=0)  # (p,)
    resid = y - group_means[:, None, :]
    a = np.einsum("rni,rnj->ij", resid, resid)
    d = group_means - grand
    b = batch.n * (d.T @ d)
    return (a + a.T) / 2.0, (b + b.T) / 2.0


def critical_value(alpha: float, cs: CenteringScaling, consts: NormalizingConstants) -> float:
    """Critical value c_alpha on the theta scale.

    Computed as the inverse logit of mu + sigma (b_m + a_m G^{-1}(1-alpha))
    and cross-checked against the equivalent direct form
    [1 + exp(sigma a_m log(-log(1-alpha)) - sigma b_m - mu)]^{-1}.
    """
    if not (0.0 < alpha < 1.0):
        raise DomainError(f"alpha={alpha} must be in (0, 1)")
    logit_c = cs.mu + cs.sigma * (consts.b_m + consts.a_m * gumbel_quantile(1.0 - alpha))
    c = 1.0 / (1.0 + math.exp(-logit_c))
    c_direct = 1.0 / (
        1.0
        + math.exp(
            cs.sigma * consts.a_m * math.log(-math.log1p(-alpha))
            - cs.sigma * consts.b_m
            - cs.mu
        )
    )
    if abs(c - c_direct) > 1e-12:
        raise NumericalError(
            f"critical value forms disagree: {c!r} vs {c_direct!r}"
        )
    return c


def batch_test(
    thetas,
    cs: CenteringScaling,
    consts: NormalizingConstants,
    alpha: float,
) -> BatchTestResult:
    """Global union-intersection test from per-hypothesis greatest roots."""
    arr = np.asarray(thetas, dtype=float)
    if arr.ndim != 1 or arr.size == 0:
        raise DomainError("thetas must be a nonempty 1-d collection")
    bad = ~((arr > 0.0) & (arr < 1.0))
    if bad.any():
        i = int(np.argmax(bad))
        raise DomainError(f"theta[{i}] = {arr[i]!r} outside (0, 1)")
    z = normalize_max(standardize(arr, cs), consts)
    p_value = -math.expm1(-math.exp(-z))
    c_alpha = critical_value(alpha, cs, consts)
    theta_max = float(arr.max())
    out = np.array(arr)
    out.setflags(write=False)
    return BatchTestResult(
        thetas=out,
        theta_max=theta_max,
        z_score=float(z),
        p_value=float(p_value),
        alpha=float(alpha),
        c_alpha=float(c_alpha),
        reject=bool(theta_max > c_alpha),
        consts=consts,
        cs=cs,
    )
