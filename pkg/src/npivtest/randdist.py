"""Probability kernels: normal CDF/quantile, chi-square quantiles, MVN sampling,
and splittable deterministic RNG streams for reproducible parallel Monte Carlo.

Streams are counter-based (Philox) and keyed on (master_seed, stream_id), so
replication r of any experiment is reproducible in isolation and runs of the
same experiment are bit-identical regardless of worker scheduling.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.random import Generator, Philox
from scipy import special

from .errors import InputError
from .linalg import frobenius_norm

__all__ = [
    "RngStream",
    "CovarianceSpec",
    "std_normal_cdf",
    "std_normal_quantile",
    "chisq_quantile",
    "chisq_sf",
    "mvn_sample",
]

_U64 = np.uint64


@dataclass(frozen=True)
class RngStream:
    """Deterministic stream keyed on (master_seed, stream_id).

    Each stream is owned by exactly one worker at a time; create a fresh
    stream per replication instead of sharing one mid-sequence.
    """

    master_seed: int
    stream_id: int = 0

    def __post_init__(self):
        if self.stream_id < 0:
            raise InputError(f"stream_id must be nonnegative, got {self.stream_id}")

    def generator(self) -> Generator:
        """Fresh generator positioned at the start of this stream."""
        key = np.array([self.master_seed % 2**64, self.stream_id % 2**64], dtype=_U64)
        return Generator(Philox(key=key))

    def substream(self, stream_id: int) -> "RngStream":
        return RngStream(self.master_seed, stream_id)


@dataclass(frozen=True)
class CovarianceSpec:
    """Symmetric PSD covariance with a validated Cholesky factor."""

    matrix: np.ndarray
    dim: int = field(init=False)

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise InputError(f"covariance must be square, got shape {m.shape}")
        if not np.all(np.isfinite(m)):
            raise InputError("covariance contains non-finite entries")
        if np.max(np.abs(m - m.T)) > 1e-10 * max(frobenius_norm(m), 1e-300):
            raise InputError("covariance is not symmetric")
        object.__setattr__(self, "matrix", 0.5 * (m + m.T))
        object.__setattr__(self, "dim", m.shape[0])

    def cholesky(self) -> np.ndarray:
        try:
            return np.linalg.cholesky(self.matrix)
        except np.linalg.LinAlgError as exc:
            raise InputError("covariance is not positive definite (Cholesky failed)") from exc


def std_normal_cdf(x):
    """Standard normal distribution function Phi."""
    return special.ndtr(x)


def std_normal_quantile(p):
    """Inverse of Phi on (0, 1)."""
    p_arr = np.asarray(p, dtype=float)
    if np.any((p_arr <= 0.0) | (p_arr >= 1.0)):
        raise InputError(f"quantile level must lie strictly inside (0, 1), got {p}")
    out = special.ndtri(p_arr)
    return float(out) if np.isscalar(p) or p_arr.ndim == 0 else out


def chisq_quantile(a: float, k: int) -> float:
    """Upper-a quantile of chi-square with k degrees of freedom.

    Returns q with P(chi2_k <= q) = 1 - a, via the regularized lower
    incomplete gamma inverse.
    """
    if not 0.0 < a < 1.0:
        raise InputError(f"tail level a must lie strictly inside (0, 1), got {a}")
    if k < 1 or int(k) != k:
        raise InputError(f"degrees of freedom must be a positive integer, got {k}")
    return float(2.0 * special.gammaincinv(0.5 * k, 1.0 - a))


def chisq_sf(x: float, k: int) -> float:
    """Upper tail P(chi2_k > x); x below 0 gives 1."""
    if k < 1 or int(k) != k:
        raise InputError(f"degrees of freedom must be a positive integer, got {k}")
    if x <= 0.0:
        return 1.0
    return float(special.gammaincc(0.5 * k, 0.5 * x))


def mvn_sample(cov: CovarianceSpec, rng: RngStream | Generator, n: int) -> np.ndarray:
    """n mean-zero draws (n x dim) with the requested covariance."""
    if n < 1:
        raise InputError(f"sample size must be positive, got {n}")
    chol = cov.cholesky()
    gen = rng.generator() if isinstance(rng, RngStream) else rng
    z = gen.standard_normal((n, cov.dim))
    return z @ chol.T
