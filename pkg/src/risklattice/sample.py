"""Finite empirical samples on equal-weight atom spaces.

A sample is a 1-D vector of real losses (positive values are losses).  Every
functional in this package treats the vector as the uniform distribution on
``n`` equally weighted atoms, so the value of any law-invariant functional is
unchanged by permuting the entries.  ``as_sample`` is the single validation
gate: entries must be finite (no NaN or infinities) and ``n >= 1``.
"""

from __future__ import annotations

import numpy as np

from .errors import DimensionError, DomainError

__all__ = ["as_sample", "as_batch", "pointwise_meet_join"]


def as_sample(x) -> np.ndarray:
    """Coerce ``x`` to a validated 1-D float64 loss vector."""
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim != 1:
        raise DomainError(f"sample must be 1-D, got shape {arr.shape}")
    if arr.size < 1:
        raise DomainError("sample must contain at least one loss")
    if not np.all(np.isfinite(arr)):
        raise DomainError("sample entries must be finite (no NaN or infinity)")
    return arr


def as_batch(X) -> np.ndarray:
    """Coerce ``X`` to a validated 2-D array of samples (one per row)."""
    arr = np.asarray(X, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr[None, :]
    if arr.ndim != 2:
        raise DomainError(f"batch must be 2-D, got shape {arr.shape}")
    if arr.shape[1] < 1:
        raise DomainError("samples must contain at least one loss")
    if not np.all(np.isfinite(arr)):
        raise DomainError("sample entries must be finite (no NaN or infinity)")
    return arr


def pointwise_meet_join(x, y) -> tuple[np.ndarray, np.ndarray]:
    """Entrywise minimum and maximum of two samples on the same atom space.

    Returns ``(meet, join)`` with ``meet[i] = min(x[i], y[i])`` and
    ``join[i] = max(x[i], y[i])``; the lattice identity
    ``meet + join == x + y`` holds exactly in floating point.
    """
    xa, ya = as_sample(x), as_sample(y)
    if xa.shape != ya.shape:
        raise DimensionError(
            f"samples live on different atom spaces: {xa.size} vs {ya.size}"
        )
    return np.minimum(xa, ya), np.maximum(xa, ya)
