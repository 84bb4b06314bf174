"""Small input-validation helpers shared across the package."""

from __future__ import annotations

import numpy as np


def as_float_vector(x, name: str, dim: int | None = None) -> np.ndarray:
    """Coerce x to a 1-D float64 array, optionally checking its length."""
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim == 0:
        arr = arr.reshape(1)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be a vector, got shape {arr.shape}")
    if dim is not None and arr.shape[0] != dim:
        raise ValueError(f"{name} must have length {dim}, got {arr.shape[0]}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite entries")
    return arr


def as_float_matrix(x, name: str) -> np.ndarray:
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be a matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite entries")
    return arr


def check_symmetric(mat: np.ndarray, name: str, tol: float = 1e-12) -> np.ndarray:
    """Validate symmetry within tol and return the symmetrized matrix."""
    mat = as_float_matrix(mat, name)
    if mat.shape[0] != mat.shape[1]:
        raise ValueError(f"{name} must be square, got shape {mat.shape}")
    scale = max(1.0, float(np.max(np.abs(mat))))
    if np.max(np.abs(mat - mat.T)) > tol * scale:
        raise ValueError(f"{name} is not symmetric within {tol}")
    return 0.5 * (mat + mat.T)


def check_spd(mat: np.ndarray, name: str, min_eig: float = 1e-12) -> np.ndarray:
    """Validate that mat is symmetric positive definite."""
    mat = check_symmetric(mat, name)
    eigvals = np.linalg.eigvalsh(mat)
    if eigvals.min() <= min_eig:
        raise ValueError(
            f"{name} must be positive definite (min eigenvalue "
            f"{eigvals.min():.3e} <= {min_eig:.0e})"
        )
    return mat


def check_positive(value: float, name: str) -> float:
    value = float(value)
    if not np.isfinite(value) or value <= 0:
        raise ValueError(f"{name} must be a positive finite number, got {value}")
    return value


def check_positive_int(value, name: str) -> int:
    if not float(value) == int(value):
        raise ValueError(f"{name} must be an integer, got {value}")
    value = int(value)
    if value < 1:
        raise ValueError(f"{name} must be >= 1, got {value}")
    return value
