"""Small dense Hermitian helpers used across modules."""

import numpy as np

from .errors import EigenFailure

#: eigenvalue lambda counts as nonnegative when lambda >= -PSD_TOL * max(1, ||T||)
PSD_TOL = 1e-8
HERMITIAN_TOL = 1e-12


def spectral_norm(A) -> float:
    A = np.asarray(A)
    if A.size == 0:
        return 0.0
    return float(np.linalg.norm(A, 2))


def hermitize(A):
    A = np.asarray(A, dtype=complex)
    return 0.5 * (A + A.conj().T)


def hermitian_defect(A) -> float:
    """Max-norm distance of A from its adjoint, relative to ``1 + ||A||_max``."""
    A = np.asarray(A)
    if A.size == 0:
        return 0.0
    return float(np.max(np.abs(A - A.conj().T)) / (1.0 + np.max(np.abs(A))))


def eigh(A):
    try:
        w, U = np.linalg.eigh(hermitize(A))
    except np.linalg.LinAlgError as exc:
        raise EigenFailure(str(exc)) from exc
    return w, U


def eigvalsh(A):
    try:
        return np.linalg.eigvalsh(hermitize(A))
    except np.linalg.LinAlgError as exc:
        raise EigenFailure(str(exc)) from exc


def psd_threshold(norm: float, tol: float = PSD_TOL) -> float:
    return tol * max(1.0, norm)


def hermitian_function(A, fn):
    """``U fn(w) U*`` for the eigendecomposition ``A = U diag(w) U*``."""
    w, U = eigh(A)
    return (U * fn(w)) @ U.conj().T


def pinv_hermitian(w, U, cutoff):
    """Pseudo-inverse from an eigendecomposition, dropping ``|w| <= cutoff``."""
    inv = np.zeros_like(w)
    keep = np.abs(w) > cutoff
    inv[keep] = 1.0 / w[keep]
    return (U * inv) @ U.conj().T


def unit_vectors(rng, count, dim, complex_=True):
    """``count`` iid uniformly distributed unit vectors, shape ``(count, dim)``."""
    z = rng.standard_normal((count, dim))
    if complex_:
        z = z + 1j * rng.standard_normal((count, dim))
    z /= np.linalg.norm(z, axis=1, keepdims=True)
    return z
