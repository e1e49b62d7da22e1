"""Gaussian data matrices, Wishart cross-products, and greatest roots.

The greatest root of a Wishart pair (A, B) is the top eigenvalue of the
symmetric-definite pencil (B, A + B), computed by reducing against the
Cholesky factor of A + B (never forming an explicit inverse).  A batched
variant handles stacks of pairs; it is the fast path used by the
simulation engine and is tested against the scalar reference.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .centering import BetaDims
from .errors import DomainError, NumericalWarning, SingularPencilError

_CLAMP_WARN = 1e-8


@dataclass(frozen=True)
class RngStream:
    """Deterministic, splittable random stream.

    Identical ``(seed, stream_id)`` reproduce identical draws on every run
    and under any parallel layout; per-replication child generators are
    derived from the spawn key ``(stream_id, index)``.
    """

    seed: int
    stream_id: int = 0

    def generator(self) -> np.random.Generator:
        return np.random.default_rng(
            np.random.SeedSequence(entropy=self.seed, spawn_key=(self.stream_id,))
        )

    def child_generator(self, index: int) -> np.random.Generator:
        return np.random.default_rng(
            np.random.SeedSequence(entropy=self.seed, spawn_key=(self.stream_id, index))
        )


def _as_generator(rng) -> np.random.Generator:
    if isinstance(rng, RngStream):
        return rng.generator()
    if isinstance(rng, np.random.Generator):
        return rng
    raise DomainError(f"expected RngStream or numpy Generator, got {type(rng).__name__}")


def sample_gaussian_matrix(rows: int, p: int, rng) -> np.ndarray:
    """rows x p matrix of independent standard normal entries."""
    if rows < 1 or p < 1:
        raise DomainError(f"rows={rows}, p={p} must both be >= 1")
    return _as_generator(rng).standard_normal((rows, p))


def wishart_from_data(x: np.ndarray) -> np.ndarray:
    """Cross-product matrix X^T X, exactly symmetric."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 2 or x.shape[0] < 1:
        raise DomainError("need a 2-d data matrix with at least one row")
    w = x.T @ x
    return (w + w.T) / 2.0


def _clamp_unit(theta, context: str):
    worst = max(float(np.max(theta)) - 1.0, -float(np.min(theta)))
    if worst > _CLAMP_WARN:
        warnings.warn(
            f"{context}: eigenvalue clamped to [0, 1] by {worst:.3g}",
            NumericalWarning,
            stacklevel=3,
        )
    return np.clip(theta, 0.0, 1.0)


def greatest_root(a: np.ndarray, b: np.ndarray) -> float:
    """Largest eigenvalue theta of the pencil det[B - theta (A + B)] = 0.

    Requires A + B positive definite (decided by Cholesky success plus a
    zero-pivot tolerance of order machine epsilon times the matrix scale);
    B should be positive semidefinite.  A itself may be singular, in which
    case theta = 1 is an exact eigenvalue.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape or a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DomainError(f"A and B must be square with equal shape, got {a.shape} vs {b.shape}")
    m = a + b
    try:
        chol = scipy.linalg.cholesky(m, lower=True)
    except scipy.linalg.LinAlgError as exc:
        raise SingularPencilError(f"A + B is not positive definite: {exc}") from exc
    pivot_floor = np.sqrt(8.0 * np.finfo(float).eps * np.abs(np.diag(m)).max())
    if np.diag(chol).min() <= pivot_floor:
        raise SingularPencilError(
            "A + B is numerically singular (Cholesky pivot below epsilon scale)"
        )
    z = scipy.linalg.solve_triangular(chol, b, lower=True)
    c = scipy.linalg.solve_triangular(chol, z.T, lower=True)
    c = (c + c.T) / 2.0
    top = scipy.linalg.eigvalsh(c)[-1]
    return float(_clamp_unit(top, "greatest_root"))


def greatest_roots_batch(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Greatest roots for stacks of pairs, shapes (..., p, p) -> (...).

    Same reduction as ``greatest_root`` using numpy's batched
    factorizations; used by the simulation engine.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape or a.shape[-1] != a.shape[-2]:
        raise DomainError(f"stacks must match and be square, got {a.shape} vs {b.shape}")
    m = a + b
    try:
        chol = np.linalg.cholesky(m)
    except np.linalg.LinAlgError as exc:
        raise SingularPencilError(f"some A + B in the batch is not positive definite: {exc}") from exc
    z = np.linalg.solve(chol, b)
    c = np.linalg.solve(chol, np.swapaxes(z, -1, -2))
    c = (c + np.swapaxes(c, -1, -2)) / 2.0
    top = np.linalg.eigvalsh(c)[..., -1]
    return _clamp_unit(top, "greatest_roots_batch")


def sample_greatest_root_null(dims: BetaDims, rng) -> float:
    """One draw of the null greatest root at the given dimensions.

    A and B come from explicit n1 x p and n2 x p standard Gaussian data
    matrices (identity scale matrix drops out of the statistic).
    """
    gen = _as_generator(rng)
    a = wishart_from_data(sample_gaussian_matrix(dims.n1, dims.p, gen))
    b = wishart_from_data(sample_gaussian_matrix(dims.n2, dims.p, gen))
    return greatest_root(a, b)


def sample_greatest_roots_null(dims: BetaDims, count: int, rng, chunk: int = 256) -> np.ndarray:
    """Vector of ``count`` independent null greatest roots (batched)."""
    if count < 1:
        raise DomainError(f"count={count} must be >= 1")
    gen = _as_generator(rng)
    out = np.empty(count)
    done = 0
    while done < count:
        k = min(chunk, count - done)
        x1 = gen.standard_normal((k, dims.n1, dims.p))
        x2 = gen.standard_normal((k, dims.n2, dims.p))
        a = np.einsum("kij,kil->kjl", x1, x1)
        b = np.einsum("kij,kil->kjl", x2, x2)
        out[done : done + k] = greatest_roots_batch(a, b)
        done += k
    return out
