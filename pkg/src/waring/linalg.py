"""Numerical rank and kernel helpers with one shared tolerance convention.

Everywhere in the package a singular value counts as zero when it is below
``rtol`` times the largest singular value of the same matrix.  The default
``RANK_RTOL`` can be overridden per call.
"""

from __future__ import annotations

import numpy as np

RANK_RTOL = 1e-10


def numerical_rank(matrix, rtol: float | None = None) -> int:
    """Number of singular values above rtol times the largest one."""
    rtol = RANK_RTOL if rtol is None else rtol
    a = np.atleast_2d(np.asarray(matrix, dtype=complex))
    if a.size == 0:
        return 0
    s = np.linalg.svd(a, compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.count_nonzero(s > rtol * s[0]))


def kernel_basis(matrix, rtol: float | None = None) -> np.ndarray:
    """Orthonormal basis (as columns) of the numerical right null space."""
    rtol = RANK_RTOL if rtol is None else rtol
    a = np.atleast_2d(np.asarray(matrix, dtype=complex))
    _, s, vh = np.linalg.svd(a, full_matrices=True)
    if s.size == 0 or s[0] == 0.0:
        rank = 0
    else:
        rank = int(np.count_nonzero(s > rtol * s[0]))
    return vh[rank:, :].conj().T


def span_frames(vectors, rtol: float | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Orthonormal frames (basis, complement) for the span of the columns."""
    rtol = RANK_RTOL if rtol is None else rtol
    a = np.atleast_2d(np.asarray(vectors, dtype=complex))
    u, s, _ = np.linalg.svd(a, full_matrices=True)
    if s.size == 0 or s[0] == 0.0:
        rank = 0
    else:
        rank = int(np.count_nonzero(s > rtol * s[0]))
    return u[:, :rank], u[:, rank:]
