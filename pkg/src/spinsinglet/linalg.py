"""Small dense complex linear algebra used by every model builder.

Everything is a plain numpy array of complex128.  All matrices in this
project are tiny (dim <= 64), so the routines favour explicit contract
checks over performance.  Values are treated as immutable: none of the
functions mutates its arguments, which makes them safe to share across
parallel sweep workers.
"""

from __future__ import annotations

import numpy as np

# Construction-time tolerance for matrices that are Hermitian by design.
HERMITIAN_ATOL = 1e-12

# Looser tolerance accepted by the eigensolver (inputs may have been
# assembled from long chains of floating-point products).
EIG_HERMITIAN_ATOL = 1e-9

MAX_DIM = 64


def as_square(a) -> np.ndarray:
    """Coerce to a square complex matrix, raising on anything else."""
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    return a


def as_vector(v) -> np.ndarray:
    v = np.asarray(v, dtype=complex)
    if v.ndim != 1:
        raise ValueError(f"expected a vector, got shape {v.shape}")
    return v


def require_same_dim(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")


def kron(a, b) -> np.ndarray:
    """Kronecker product; the left factor carries the slower index."""
    return np.kron(as_square(a), as_square(b))


def kron_all(*mats) -> np.ndarray:
    """Kronecker product of several square factors, left to right."""
    out = as_square(mats[0])
    for m in mats[1:]:
        out = np.kron(out, as_square(m))
    return out


def adjoint(a) -> np.ndarray:
    """Conjugate transpose."""
    return as_square(a).conj().T


def hermiticity_defect(a) -> float:
    """max |A - A^dagger| entrywise."""
    a = as_square(a)
    return float(np.max(np.abs(a - a.conj().T)))


def require_hermitian(a, atol: float = HERMITIAN_ATOL) -> np.ndarray:
    a = as_square(a)
    defect = hermiticity_defect(a)
    if defect > atol:
        raise ValueError(f"matrix is not Hermitian: defect {defect:.3e} > {atol:.1e}")
    return a


def eig_hermitian(a, atol: float = EIG_HERMITIAN_ATOL):
    """Eigendecomposition of a Hermitian matrix.

    Returns (w, v): eigenvalues ascending, eigenvectors as the columns
    of v, orthonormal.  Raises on non-Hermitian input or dim > 64.
    """
    a = require_hermitian(a, atol=atol)
    if a.shape[0] > MAX_DIM:
        raise ValueError(f"dim {a.shape[0]} exceeds supported maximum {MAX_DIM}")
    w, v = np.linalg.eigh(a)
    return w, v


def normalized(v, atol: float = 1e-10) -> np.ndarray:
    """Validate that a state vector has unit norm; returns it unchanged."""
    v = as_vector(v)
    n = np.vdot(v, v).real
    if abs(n - 1.0) > atol:
        raise ValueError(f"state norm^2 deviates from 1 by {abs(n - 1.0):.3e}")
    return v


def overlap(u, v) -> complex:
    """<u|v> with dimension checking."""
    u = as_vector(u)
    v = as_vector(v)
    require_same_dim(u, v)
    return complex(np.vdot(u, v))
