"""Tracy-Widom GOE/GUE distribution functions via Painleve II.

The Hastings-McLeod solution ``q`` of ``q'' = x q + 2 q^3`` with
``q(x) ~ Ai(x)`` as ``x -> +inf`` determines both Tracy-Widom laws:

    F2(x) = exp(-J(x)),            J(x) = int_x^inf (s - x) q(s)^2 ds
    F1(x) = sqrt(F2(x)) * E(x),    E(x) = exp(-(1/2) int_x^inf q(s) ds)

The solver marches the ODE right-to-left from an anchor ``x_right`` where
the Airy boundary data are essentially exact, carrying the three tail
integrals as extra state components so the CDFs need no separate
quadrature.  A built table is immutable and cheap to evaluate: the CDF,
density and quantile functions below all accept scalars or arrays.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.integrate import quad, solve_ivp
from scipy.interpolate import CubicHermiteSpline
from scipy.special import airy

from .errors import (
    DataError,
    DomainError,
    NumericalError,
    NumericalInstabilityError,
    PrecisionLossError,
)

DEFAULT_X_LEFT = -10.0
DEFAULT_X_RIGHT = 8.0
DEFAULT_TOL = 1e-10

_SQRT_PI = math.sqrt(math.pi)

# Marching below about -12 is hopeless in double precision: roundoff seeded
# near the bulk grows like exp((2*sqrt(2)/3)|x|^{3/2}) toward the left edge.
_LEFT_ASYMPTOTE_RTOL = 0.25


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class PainleveSolution:
    """Joint solution of the Painleve II problem on a grid.

    ``i_q``, ``i_q2`` and ``j_q2`` hold the tail integrals of ``q``,
    ``q^2`` and ``(s - x) q^2`` from each grid point to infinity.
    """

    grid: np.ndarray
    q: np.ndarray
    q_prime: np.ndarray
    i_q: np.ndarray
    i_q2: np.ndarray
    j_q2: np.ndarray
    x_right: float
    tol: float

    @property
    def x_left(self) -> float:
        return float(self.grid[0])


def _airy_tail_integrals(x: float) -> tuple[float, float, float]:
    """Tail integrals of Ai, Ai^2 and (s-x) Ai^2 from x to infinity.

    The quadratic tails have exact closed forms in Ai and Ai'; the linear
    one is integrated numerically (its absolute size at x >= 6 is below
    4e-6, so quadrature error is invisible in the CDFs).
    """
    ai, aip, _, _ = airy(x)
    i_q = quad(lambda s: airy(s)[0], x, np.inf, epsabs=1e-16, epsrel=1e-13)[0]
    i_q2 = aip**2 - x * ai**2
    j_q2 = (2.0 * x**2 * ai**2 - 2.0 * x * aip**2 - ai * aip) / 3.0
    return i_q, i_q2, j_q2


def _rhs(x, y):
    q = y[0]
    q2 = q * q
    return (y[1], x * q + 2.0 * q * q2, -q, -q2, -y[3])


def _event_blowup(x, y):
    return 2.0 + 1.5 * math.sqrt(max(0.0, -x) / 2.0) - y[0]


def _event_negative(x, y):
    return y[0] + 0.05


_event_blowup.terminal = True
_event_negative.terminal = True


def _default_grid(x_left: float, x_right: float) -> np.ndarray:
    pts = [x_left]

    def seg(a, b, h):
        if b <= a:
            return
        n = max(1, int(math.ceil((b - a) / h - 1e-9)))
        pts.extend(np.linspace(a, b, n + 1)[1:])

    bulk_lo, bulk_hi = max(x_left, -6.0), min(x_right, 4.0)
    if bulk_hi > bulk_lo:
        seg(x_left, bulk_lo, 0.02)
        seg(bulk_lo, bulk_hi, 0.01)
        seg(bulk_hi, x_right, 0.02)
    else:
        seg(x_left, x_right, 0.02)
    return np.asarray(pts)


def solve_hastings_mcleod(
    x_left: float = DEFAULT_X_LEFT,
    x_right: float = DEFAULT_X_RIGHT,
    tol: float = DEFAULT_TOL,
) -> PainleveSolution:
    """Integrate Painleve II with Airy boundary data at ``x_right``.

    Marches right-to-left with an adaptive embedded Runge-Kutta pair
    (DOP853); the unstable direction is left-to-right, so anchoring on the
    right keeps the Hastings-McLeod branch.  The local error per step is
    kept at or below ``tol`` (internally tightened to 1e-12 or better,
    which protects the left edge from error amplification).

    Raises
    ------
    DomainError
        If ``x_left >= x_right``, ``x_right < 6`` or ``tol <= 0``.
    NumericalInstabilityError
        If the solution leaves its safety envelope, which signals boundary
        data inconsistent with the Hastings-McLeod branch (in practice:
        ``x_left`` below about -12).
    """
    if not (x_left < x_right):
        raise DomainError(f"x_left={x_left} must be < x_right={x_right}")
    if x_right < 6.0:
        raise DomainError(f"x_right={x_right} too small; need x_right >= 6 for Airy boundary data")
    if not tol > 0.0:
        raise DomainError(f"tol={tol} must be positive")

    ai, aip, _, _ = airy(x_right)
    i_q0, i_q20, j_q20 = _airy_tail_integrals(x_right)
    y0 = np.array([ai, aip, i_q0, i_q20, j_q20])

    grid = _default_grid(x_left, x_right)
    # Always integrate at the tightest tolerance DOP853 accepts: leftward
    # error amplification eats ~6 digits by x = -10, and the cost of the
    # extra accuracy is negligible.  The requested tol stays the recorded
    # (and honored) upper bound on local error.  Error control is purely
    # relative (every state component is sign-definite): an absolute floor
    # would wreck the tiny Airy-sized components near the anchor, and that
    # relative loss blows up by the time the march reaches the left edge.
    sol = solve_ivp(
        _rhs,
        (x_right, x_left),
        y0,
        method="DOP853",
        t_eval=grid[::-1],
        rtol=2.3e-14,
        atol=1e-300,
        events=(_event_blowup, _event_negative),
    )
    if sol.status == 1:
        x_stop = min(float(t[0]) for t in sol.t_events if len(t))
        raise NumericalInstabilityError(
            f"Painleve II solution left the Hastings-McLeod envelope near x={x_stop:.3f}; "
            "boundary values inconsistent with the positive branch (x_left too negative?)"
        )
    if not sol.success:
        raise NumericalError(f"ODE integration failed: {sol.message}")

    y = sol.y[:, ::-1]
    q, qp, i_q, i_q2, j_q2 = y
    if np.any(q <= 0.0):
        raise NumericalInstabilityError(
            "computed q(x) is not positive everywhere; integration lost the "
            "Hastings-McLeod branch before reaching x_left"
        )
    if x_left <= -6.0:
        ratio = q[0] / math.sqrt(-x_left / 2.0)
        if abs(ratio - 1.0) > _LEFT_ASYMPTOTE_RTOL:
            raise NumericalInstabilityError(
                f"q({x_left}) deviates {abs(ratio - 1):.2%} from the left asymptote "
                "sqrt(-x/2); left edge is beyond the reach of double precision"
            )

    return PainleveSolution(
        grid=_readonly(grid),
        q=_readonly(q),
        q_prime=_readonly(qp),
        i_q=_readonly(i_q),
        i_q2=_readonly(i_q2),
        j_q2=_readonly(j_q2),
        x_right=float(x_right),
        tol=float(tol),
    )


@dataclass(frozen=True)
class TracyWidomTable:
    """Immutable evaluation table for F1/F2 built from a Painleve solution.

    Interpolation is cubic Hermite on each log-CDF, with the exact nodal
    derivatives supplied by the ODE state, so interpolated CDFs stay
    monotone and consistent with the density to well below 1e-8.
    """

    solution: PainleveSolution
    interpolation_order: int = 3
    log_f1: np.ndarray = field(init=False, repr=False)
    log_f2: np.ndarray = field(init=False, repr=False)
    r1: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        s = self.solution
        log_f1 = -0.5 * (s.i_q + s.j_q2)
        log_f2 = -s.j_q2
        r1 = 0.5 * (s.q + s.i_q2)
        r1_prime = 0.5 * (s.q_prime - s.q**2)
        # d/dx of r1' = (q'' - 2 q q')/2 with q'' from the ODE itself
        r1_second = 0.5 * (s.grid * s.q + 2.0 * s.q**3 - 2.0 * s.q * s.q_prime)
        object.__setattr__(self, "log_f1", _readonly(log_f1))
        object.__setattr__(self, "log_f2", _readonly(log_f2))
        object.__setattr__(self, "r1", _readonly(r1))
        object.__setattr__(self, "_spl_log_f1", CubicHermiteSpline(s.grid, log_f1, r1))
        object.__setattr__(self, "_spl_log_f2", CubicHermiteSpline(s.grid, log_f2, s.i_q2))
        object.__setattr__(self, "_spl_r1", CubicHermiteSpline(s.grid, r1, r1_prime))
        object.__setattr__(self, "_spl_r1_prime", CubicHermiteSpline(s.grid, r1_prime, r1_second))

    @property
    def x_left(self) -> float:
        return self.solution.x_left

    @property
    def x_right(self) -> float:
        return self.solution.x_right


def build_table(
    x_left: float = DEFAULT_X_LEFT,
    x_right: float = DEFAULT_X_RIGHT,
    tol: float = DEFAULT_TOL,
) -> TracyWidomTable:
    """Solve the ODE and wrap the result as an evaluation table."""
    return TracyWidomTable(solution=solve_hastings_mcleod(x_left, x_right, tol))


def tw1_tail(x):
    """Leading right-tail asymptote of 1 - F1.

    ``exp(-(2/3) x^{3/2}) / (4 sqrt(pi) x^{3/4})`` for x > 0.
    """
    x_arr = np.asarray(x, dtype=float)
    if np.any(x_arr <= 0.0) or np.any(np.isnan(x_arr)):
        raise DomainError("tw1_tail requires x > 0")
    out = np.exp(-(2.0 / 3.0) * x_arr**1.5) / (4.0 * _SQRT_PI * x_arr**0.75)
    return out if out.ndim else float(out)


def _tail_pdf(x: np.ndarray) -> np.ndarray:
    # derivative of 1 - tw1_tail(x)
    return np.exp(-(2.0 / 3.0) * x**1.5) / (4.0 * _SQRT_PI * x**0.75) * (np.sqrt(x) + 0.75 / x)


def tw1_cdf(table: TracyWidomTable, x):
    """CDF of the Tracy-Widom GOE law.

    Inside the table range this is ``exp(log F1)`` from the Hermite
    interpolant; below it decays log-linearly toward 0 and above it the
    right-tail asymptote takes over (clamped to keep the CDF monotone).
    """
    x_arr = np.asarray(x, dtype=float)
    out = np.empty(x_arr.shape)
    xl, xr = table.x_left, table.x_right
    log_f1_left = table.log_f1[0]
    f1_right = math.exp(table.log_f1[-1])

    below = x_arr < xl
    above = x_arr > xr
    mid = ~(below | above)
    if mid.any():
        out[mid] = np.exp(table._spl_log_f1(x_arr[mid]))
    if below.any():
        out[below] = np.exp(log_f1_left + table.r1[0] * (x_arr[below] - xl))
    if above.any():
        out[above] = np.maximum(f1_right, 1.0 - tw1_tail(x_arr[above]))
    return out if out.ndim else float(out)


def tw2_cdf(table: TracyWidomTable, x):
    """CDF of the Tracy-Widom GUE law, ``F2(x) = exp(-J(x))``.

    Above the table range ``J`` is continued by its closed Airy form.
    """
    x_arr = np.asarray(x, dtype=float)
    out = np.empty(x_arr.shape)
    xl, xr = table.x_left, table.x_right
    f2_right = math.exp(table.log_f2[-1])

    below = x_arr < xl
    above = x_arr > xr
    mid = ~(below | above)
    if mid.any():
        out[mid] = np.exp(table._spl_log_f2(x_arr[mid]))
    if below.any():
        out[below] = np.exp(table.log_f2[0] + table.solution.i_q2[0] * (x_arr[below] - xl))
    if above.any():
        xa = x_arr[above]
        ai, aip, _, _ = airy(xa)
        j = (2.0 * xa**2 * ai**2 - 2.0 * xa * aip**2 - ai * aip) / 3.0
        out[above] = np.maximum(f2_right, np.exp(-j))
    return out if out.ndim else float(out)


def tw1_pdf(table: TracyWidomTable, x):
    """Density of the GOE law: ``F1(x) R1(x)`` with ``R1 = (q + int q^2)/2``."""
    x_arr = np.asarray(x, dtype=float)
    out = np.empty(x_arr.shape)
    xl, xr = table.x_left, table.x_right

    below = x_arr < xl
    above = x_arr > xr
    mid = ~(below | above)
    if mid.any():
        xm = x_arr[mid]
        out[mid] = np.exp(table._spl_log_f1(xm)) * table._spl_r1(xm)
    if below.any():
        out[below] = (
            np.exp(table.log_f1[0] + table.r1[0] * (x_arr[below] - xl)) * table.r1[0]
        )
    if above.any():
        out[above] = _tail_pdf(x_arr[above])
    out = np.maximum(out, 0.0)
    return out if out.ndim else float(out)


def _lambert_w0_large(z: np.ndarray) -> np.ndarray:
    # principal branch for z >= e, Newton in w-space; used by the tail quantile
    w = np.log(z)
    w -= np.log(w)
    for _ in range(6):
        e = np.exp(w)
        w -= (w * e - z) / (e * (w + 1.0))
    return w


def _tail_quantile(eps: np.ndarray) -> np.ndarray:
    """Invert tw1_tail: x with tail(x) = eps, for eps small.

    Starts from the exact Lambert-W inversion of the tail formula and
    polishes with Newton on log tail(x) - log eps.
    """
    z = 1.0 / (12.0 * math.pi * eps**2)
    x = (0.75 * _lambert_w0_large(z)) ** (2.0 / 3.0)
    log_eps = np.log(eps)
    for _ in range(4):
        g = -(2.0 / 3.0) * x**1.5 - 0.75 * np.log(x) - math.log(4.0 * _SQRT_PI) - log_eps
        x -= g / (-(np.sqrt(x) + 0.75 / x))
    return x


def tw1_quantile(table: TracyWidomTable, u):
    """Inverse of ``tw1_cdf`` with residual |F1(x) - u| <= 1e-10.

    Uses monotone bracketing on the table plus Newton steps with the
    density; for ``u`` beyond the table's right end the analytic tail
    inversion (Lambert-W form) is used and refined.
    """
    u_arr = np.asarray(u, dtype=float)
    if np.any(~((u_arr > 0.0) & (u_arr < 1.0))):
        raise DomainError("quantile requires 0 < u < 1")
    log_u = np.log(u_arr)
    out = np.empty(u_arr.shape)
    xl = table.x_left
    log_f1_left = table.log_f1[0]
    log_f1_right = table.log_f1[-1]

    below = log_u <= log_f1_left
    above = u_arr >= math.exp(log_f1_right)
    mid = ~(below | above)
    if below.any():
        out[below] = xl + (log_u[below] - log_f1_left) / table.r1[0]
    if above.any():
        out[above] = _tail_quantile(1.0 - u_arr[above])
    if mid.any():
        lu = log_u[mid]
        x = np.interp(lu, table.log_f1, table.solution.grid)
        for _ in range(6):
            x = np.clip(x - (table._spl_log_f1(x) - lu) / table._spl_r1(x), xl, table.x_right)
        out[mid] = x
    return out if out.ndim else float(out)


def von_mises_ratio(table: TracyWidomTable, x):
    """Von Mises ratio ``L(x) = (1 - F1) F1'' / (F1')^2``.

    Computed from ``F1' = F1 R1`` and ``R1' = (q' - q^2)/2``; tends to -1
    as x grows, certifying the Gumbel domain of attraction.
    """
    x_arr = np.asarray(x, dtype=float)
    xl, xr = table.x_left, table.x_right
    if np.any(~((x_arr > xl) & (x_arr < xr))):
        raise DomainError(f"von_mises_ratio requires x inside the grid interior ({xl}, {xr})")
    log_f1 = table._spl_log_f1(x_arr)
    one_minus_f1 = -np.expm1(log_f1)
    if np.any(one_minus_f1 <= 0.0):
        x_bad = np.min(np.asarray(x_arr)[one_minus_f1 <= 0.0])
        raise PrecisionLossError(
            f"1 - F1(x) underflows at x={x_bad:g}; the ratio is unreliable beyond that point"
        )
    r1 = table._spl_r1(x_arr)
    r1_prime = table._spl_r1_prime(x_arr)
    out = one_minus_f1 * (r1**2 + r1_prime) / (np.exp(log_f1) * r1**2)
    return out if out.ndim else float(out)


# ---------------------------------------------------------------------------
# Table persistence: versioned text format, bit-exact round trip
# ---------------------------------------------------------------------------

def save_table(solution: PainleveSolution, path) -> None:
    """Write a solution as ``twtable v1`` text (full-precision decimal)."""
    s = solution
    lines = [f"twtable v1 {s.x_left!r} {s.x_right!r} {s.tol!r} {len(s.grid)}"]
    for row in zip(s.grid, s.q, s.q_prime, s.i_q, s.i_q2, s.j_q2):
        lines.append(" ".join(repr(float(v)) for v in row))
    Path(path).write_text("\n".join(lines) + "\n")


def load_table(path) -> PainleveSolution:
    """Reload a ``twtable v1`` file bit-exactly."""
    text = Path(path).read_text().strip().splitlines()
    head = text[0].split()
    if len(head) != 6 or head[0] != "twtable" or head[1] != "v1":
        raise DataError(f"{path}: not a twtable v1 file")
    x_left, x_right, tol = float(head[2]), float(head[3]), float(head[4])
    n = int(head[5])
    if len(text) - 1 != n:
        raise DataError(f"{path}: expected {n} rows, found {len(text) - 1}")
    data = np.array([[float(v) for v in line.split()] for line in text[1:]])
    if data.shape != (n, 6):
        raise DataError(f"{path}: malformed rows")
    grid, q, qp, i_q, i_q2, j_q2 = data.T
    if abs(grid[0] - x_left) > 0:
        raise DataError(f"{path}: grid start {grid[0]} disagrees with header {x_left}")
    return PainleveSolution(
        grid=_readonly(grid),
        q=_readonly(q),
        q_prime=_readonly(qp),
        i_q=_readonly(i_q),
        i_q2=_readonly(i_q2),
        j_q2=_readonly(j_q2),
        x_right=x_right,
        tol=tol,
    )


_DEFAULT_TABLE: TracyWidomTable | None = None


def cache_dir() -> Path:
    env = os.environ.get("MAXROOT_CACHE_DIR")
    if env:
        return Path(env)
    return Path.home() / ".cache" / "maxroot"


def default_table() -> TracyWidomTable:
    """The default table (x in [-10, 8], tol 1e-10), built once and cached.

    The first call builds the table (a couple of seconds) and stores it
    under the cache directory (``MAXROOT_CACHE_DIR`` overrides the
    location); later calls reload it bit-exactly.
    """
    global _DEFAULT_TABLE
    if _DEFAULT_TABLE is not None:
        return _DEFAULT_TABLE
    d = cache_dir()
    fname = d / f"twtable_{DEFAULT_X_LEFT:g}_{DEFAULT_X_RIGHT:g}_{DEFAULT_TOL:g}.txt"
    if fname.exists():
        _DEFAULT_TABLE = TracyWidomTable(solution=load_table(fname))
        return _DEFAULT_TABLE
    sol = solve_hastings_mcleod(DEFAULT_X_LEFT, DEFAULT_X_RIGHT, DEFAULT_TOL)
    try:
        d.mkdir(parents=True, exist_ok=True)
        save_table(sol, fname)
    except OSError:
        pass  # cache is best-effort
    _DEFAULT_TABLE = TracyWidomTable(solution=sol)
    return _DEFAULT_TABLE
