"""Logit-scale centering and scaling of the greatest root statistic.

For a matrix dimension / degrees-of-freedom triple ``(p, n1, n2)`` the
logit of the greatest root, ``T = log(theta / (1 - theta))``, is
approximately Tracy-Widom GOE after an affine standardization whose
location and scale come from two arcsine angles of the triple:

    phi   = 2 asin( sqrt( (2 max(p, n1) - 1) / (2 (n1 + n2 - 1)) ) )
    gamma = 2 asin( sqrt( (2 min(p, n1) - 1) / (2 (n1 + n2 - 1)) ) )
    mu    = 2 log tan((phi + gamma) / 2)
    sigma^3 = 16 / (n1 + n2 - 1)^2 / (sin^2(phi+gamma) sin phi sin gamma)

The formulas depend on (p, n1) only through min/max, so swapping those two
arguments changes nothing.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateRegimeError, DomainError


@dataclass(frozen=True)
class BetaDims:
    """Dimension triple: p-variate data, A-Wishart df n1, B-Wishart df n2."""

    p: int
    n1: int
    n2: int

    def __post_init__(self):
        for name in ("p", "n1", "n2"):
            v = getattr(self, name)
            if not isinstance(v, (int, np.integer)) or v < 1:
                raise DomainError(f"{name}={v!r} must be a positive integer")
        if self.n1 + self.n2 < self.p:
            raise DomainError(
                f"n1 + n2 = {self.n1 + self.n2} < p = {self.p}: A + B would be singular"
            )


@dataclass(frozen=True)
class CenteringScaling:
    """Location/scale for the logit greatest root, plus the two angles."""

    mu: float
    sigma: float
    phi: float
    gamma_angle: float
    dims: BetaDims


@dataclass(frozen=True)
class RegimeDiagnostics:
    """Asymptotic-regime ratios with advisory warning flags.

    Both candidate bulk ratios are reported (``ratio_min`` pairs p with n1
    as in the limit theorem's proof, ``ratio_min_alt`` pairs p with n2 as
    in its introduction); finite-sample use is allowed with warnings.
    """

    ratio_min: float
    ratio_pn: float
    ratio_mp: float
    ratio_min_alt: float
    flags: tuple[str, ...]


def centering_scaling(dims: BetaDims) -> CenteringScaling:
    """Compute (mu, sigma, phi, gamma) for a dimension triple.

    Raises DegenerateRegimeError when an arcsine argument leaves [0, 1] or
    when phi + gamma reaches pi (the logit location would be infinite).
    """
    p, n1, n2 = dims.p, dims.n1, dims.n2
    denom = n1 + n2 - 1
    if denom < 1:
        raise DegenerateRegimeError(f"n1 + n2 - 1 = {denom} < 1")
    hi = (2.0 * max(p, n1) - 1.0) / (2.0 * denom)
    lo = (2.0 * min(p, n1) - 1.0) / (2.0 * denom)
    if hi > 1.0:
        raise DegenerateRegimeError(
            f"(2 max(p, n1) - 1)/(n1 + n2 - 1) = {2 * hi:.6g} > 2: "
            f"max(p, n1) = {max(p, n1)} too large for n1 + n2 = {n1 + n2}"
        )
    if p % 2 == 1:
        warnings.warn(
            f"p = {p} is odd; the logit standardization is derived for even p "
            "and is used here as an approximation",
            stacklevel=2,
        )
    phi = 2.0 * math.asin(math.sqrt(hi))
    gamma = 2.0 * math.asin(math.sqrt(lo))
    half = 0.5 * (phi + gamma)
    if half >= 0.5 * math.pi - 1e-12:
        raise DegenerateRegimeError(
            f"phi + gamma = {phi + gamma:.6g} >= pi: tan((phi+gamma)/2) diverges "
            f"for dims (p={p}, n1={n1}, n2={n2})"
        )
    mu = 2.0 * math.log(math.tan(half))
    sigma3 = (16.0 / denom**2) / (
        math.sin(phi + gamma) ** 2 * math.sin(phi) * math.sin(gamma)
    )
    return CenteringScaling(
        mu=mu, sigma=sigma3 ** (1.0 / 3.0), phi=phi, gamma_angle=gamma, dims=dims
    )


def logit(theta):
    """``log(theta / (1 - theta))`` for theta strictly inside (0, 1).

    A theta of exactly 0 or 1 signals a degenerate eigenproblem upstream
    and raises a domain error.
    """
    arr = np.asarray(theta, dtype=float)
    if np.any(~((arr > 0.0) & (arr < 1.0))):
        raise DomainError("logit requires 0 < theta < 1 (theta at 0 or 1 is degenerate)")
    out = np.log(arr) - np.log1p(-arr)
    return out if out.ndim else float(out)


def standardize(theta, cs: CenteringScaling):
    """Standardized logit: ``(logit(theta) - mu) / sigma``."""
    out = (logit(theta) - cs.mu) / cs.sigma
    return out if np.ndim(out) else float(out)


def validate_regime(dims: BetaDims, m: int) -> RegimeDiagnostics:
    """Report the asymptotic-regime ratios and advisory warnings.

    Never raises: the approximations are routinely used outside the
    theorem's literal assumptions, so violations only produce flags.
    """
    p, n1, n2 = dims.p, dims.n1, dims.n2
    ratio_min = min(p, n1) / (n1 + n2)
    ratio_min_alt = min(p, n2) / (n1 + n2)
    ratio_pn = p / n2
    ratio_mp = m / p ** (2.0 / 3.0)
    flags = []
    if n1 < p:
        flags.append(f"n1 = {n1} < p = {p}: outside the n1 >= p assumption")
    if ratio_pn >= 1.0:
        flags.append(f"p/n2 = {ratio_pn:.4g} >= 1: outside the p/n2 < 1 regime")
    if ratio_min < 0.05:
        flags.append(f"min(p, n1)/(n1 + n2) = {ratio_min:.4g} < 0.05: near-degenerate bulk")
    if ratio_mp > 10.0:
        flags.append(
            f"m/p^(2/3) = {ratio_mp:.4g} > 10: too many sub-hypotheses for this dimension"
        )
    return RegimeDiagnostics(
        ratio_min=ratio_min,
        ratio_pn=ratio_pn,
        ratio_mp=ratio_mp,
        ratio_min_alt=ratio_min_alt,
        flags=tuple(flags),
    )


def reparametrize(dims: BetaDims) -> BetaDims:
    """Distributionally equivalent triple ``(n2, n1 + n2 - p, p)``.

    Applying the rule twice returns the original triple exactly.
    """
    if dims.n1 + dims.n2 - dims.p < 1:
        raise DomainError(
            f"reparametrization needs n1 + n2 - p >= 1, got {dims.n1 + dims.n2 - dims.p}"
        )
    return BetaDims(p=dims.n2, n1=dims.n1 + dims.n2 - dims.p, n2=dims.p)
