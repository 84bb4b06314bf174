"""Shared summary containers for Gaussian posteriors and ensembles."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._validation import as_float_vector, check_symmetric

__all__ = ["GaussianSummary"]


@dataclass(frozen=True)
class GaussianSummary:
    """Mean and covariance of a (possibly approximate) Gaussian law.

    Attributes
    ----------
    mean : ndarray of shape (d,)
    cov : ndarray of shape (d, d)
        Symmetric within 1e-12; eigenvalues below -1e-10 are rejected,
        small negative ones are clamped to zero.
    exact : bool
        True when the summarized distribution is exactly Gaussian rather
        than a moment-matched approximation.
    """

    mean: np.ndarray
    cov: np.ndarray
    exact: bool = False

    def __post_init__(self):
        mean = as_float_vector(self.mean, "mean")
        cov = check_symmetric(self.cov, "cov")
        if cov.shape[0] != mean.shape[0]:
            raise ValueError(
                f"cov has shape {cov.shape}, incompatible with mean of "
                f"length {mean.shape[0]}"
            )
        eigvals, eigvecs = np.linalg.eigh(cov)
        if eigvals.min() < -1e-10:
            raise ValueError(
                f"cov must be PSD, min eigenvalue {eigvals.min():.3e}"
            )
        if eigvals.min() < 0.0:
            cov = (eigvecs * np.clip(eigvals, 0.0, None)) @ eigvecs.T
            cov = 0.5 * (cov + cov.T)
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)

    @property
    def dim(self) -> int:
        return self.mean.shape[0]

    def sample(self, rng: np.random.Generator, size: int | None = None) -> np.ndarray:
        """Draw from N(mean, cov)."""
        return rng.multivariate_normal(self.mean, self.cov, size=size, method="eigh")
