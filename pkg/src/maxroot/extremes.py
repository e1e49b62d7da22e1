"""Gumbel utilities, Lambert W, and extreme-value normalizing constants.

The location/scale pair ``(b_m, a_m)`` turns the maximum of ``m`` i.i.d.
Tracy-Widom GOE variables into an approximately standard Gumbel variable:
``b_m = F1^{-1}(1 - 1/m)`` and ``a_m = 1/(m F1'(b_m))``.  Exact constants
come from the numeric table; asymptotic ones from the Lambert-W (or pure
logarithm) closed forms, which converge only at log speed and are meant
for diagnostics rather than testing.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import painleve
from .errors import DomainError

_INV_E = math.exp(-1.0)


def lambert_w0(z):
    """Principal branch of the Lambert W function for real z >= -1/e.

    Halley iteration from a branch-appropriate start; relative accuracy
    1e-12 or better.  Accepts scalars or arrays.
    """
    z_arr = np.asarray(z, dtype=float)
    if np.any(z_arr < -_INV_E - 1e-15) or np.any(np.isnan(z_arr)):
        raise DomainError("lambert_w0 requires z >= -1/e")
    z_arr = np.maximum(z_arr, -_INV_E)

    w = np.empty(z_arr.shape)
    near_branch = z_arr < -0.25
    big = z_arr > 3.0
    mid = ~(near_branch | big)
    # series around the branch point z = -1/e
    p = np.sqrt(2.0 * (np.e * z_arr[near_branch] + 1.0))
    w[near_branch] = -1.0 + p - p**2 / 3.0 + 11.0 * p**3 / 72.0
    w[mid] = np.log1p(z_arr[mid])
    lz = np.log(z_arr[big])
    w[big] = lz - np.log(lz)

    for _ in range(100):
        ew = np.exp(w)
        f = w * ew - z_arr
        wp1 = w + 1.0
        # Halley step; the guards only matter exactly at the branch point,
        # where f = 0 and the step must be zero
        denom = ew * wp1 - (w + 2.0) * f / (2.0 * np.where(wp1 == 0.0, 1.0, wp1))
        dw = np.where(f == 0.0, 0.0, f / np.where(denom == 0.0, 1.0, denom))
        w -= dw
        if np.all(np.abs(dw) <= 1e-14 * (1.0 + np.abs(w))):
            break
    return w if w.ndim else float(w)


def gumbel_cdf(y):
    """Standard Gumbel CDF ``exp(-e^{-y})``."""
    y_arr = np.asarray(y, dtype=float)
    out = np.exp(-np.exp(-y_arr))
    return out if out.ndim else float(out)


def gumbel_quantile(u):
    """Standard Gumbel quantile ``-log(-log u)`` for 0 < u < 1."""
    u_arr = np.asarray(u, dtype=float)
    if np.any(~((u_arr > 0.0) & (u_arr < 1.0))):
        raise DomainError("gumbel_quantile requires 0 < u < 1")
    out = -np.log(-np.log(u_arr))
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class NormalizingConstants:
    """Location/scale pair for the max of m Tracy-Widom GOE variables."""

    m: int
    a_m: float
    b_m: float
    mode: str  # "exact" or "asymptotic"

    def __post_init__(self):
        if self.mode not in ("exact", "asymptotic"):
            raise DomainError(f"unknown mode {self.mode!r}")
        if not self.a_m > 0.0:
            raise DomainError(f"a_m={self.a_m} must be positive")


def norm_constants_exact(table: painleve.TracyWidomTable, m: int) -> NormalizingConstants:
    """Exact constants from the table: ``b_m = F1^{-1}(1 - 1/m)``, ``a_m = 1/(m F1'(b_m))``."""
    if m <= 1:
        raise DomainError(f"m={m}: need m >= 2 (b_1 would be the quantile at 0)")
    b_m = painleve.tw1_quantile(table, 1.0 - 1.0 / m)
    a_m = 1.0 / (m * painleve.tw1_pdf(table, b_m))
    return NormalizingConstants(m=int(m), a_m=a_m, b_m=b_m, mode="exact")


def norm_constants_asymptotic(m: int, lambert_form: bool = True) -> NormalizingConstants:
    """Asymptotic constants in closed form.

    ``b_m = [3/4 W(m^2/(12 pi))]^{2/3}`` (Lambert-W form, the default) or
    ``[3/4 log(m^2/(12 pi))]^{2/3}`` with ``lambert_form=False``;
    ``a_m = (4/3)^{1/2} (3/4)^{1/6} log^{-1/3}(m^2/(12 pi))``.

    The scale (and the pure-log location) need ``log(m^2/12pi) > 0``,
    i.e. m >= 7; smaller m raise a domain error.
    """
    if m <= 2:
        raise DomainError(f"m={m}: need m >= 3")
    arg = m * m / (12.0 * math.pi)
    log_arg = math.log(arg)
    if log_arg <= 0.0:
        raise DomainError(
            f"m={m}: asymptotic constants need m^2/(12 pi) > 1 (m >= 7); "
            "use exact constants for small m"
        )
    if lambert_form:
        b_m = (0.75 * lambert_w0(arg)) ** (2.0 / 3.0)
    else:
        b_m = (0.75 * log_arg) ** (2.0 / 3.0)
    a_m = math.sqrt(4.0 / 3.0) * (0.75 ** (1.0 / 6.0)) * log_arg ** (-1.0 / 3.0)
    return NormalizingConstants(m=int(m), a_m=a_m, b_m=b_m, mode="asymptotic")


def normalize_max(values, consts: NormalizingConstants) -> float:
    """Gumbel-standardize a batch maximum: ``(max(values) - b_m) / a_m``."""
    arr = np.asarray(values, dtype=float)
    if arr.size == 0:
        raise DomainError("normalize_max requires a nonempty batch")
    if arr.shape[-1] != consts.m:
        warnings.warn(
            f"batch has {arr.shape[-1]} values but constants were built for m={consts.m}",
            stacklevel=2,
        )
    out = (arr.max(axis=-1) - consts.b_m) / consts.a_m
    return out if np.ndim(out) else float(out)
