"""Regularized block lower-triangular factorization ``T ~ X X*``.

Per block row ``i`` the factor is built as

    Y_ij = (T_ij - sum_{l<j} X_il X_jl*) D_j^{-1}      (j < i)
    D_i  = (T_ii + eps_i I - sum_{l<i} X_il X_il*)^{1/2}

with ``X_ii = D_i``. The pivot under the square root is the Schur-updated
diagonal; using ``T_ii^{1/2}`` itself (``pivot="diagonal"``) leaves the
diagonal of ``X X*`` off by ``sum_{l<i} X_il X_il*`` and is kept only for
comparison. A block is regularized (``eps_i > 0``) when ``(T_ii)^{1/2}`` has
condition number at least ``1/delta``; each refinement pass moves one step
down the schedule. The factor is accepted when ``||T - X X*||_2 < delta``.
"""

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from . import _linalg as la
from .blockmat import BlockMatrix, BlockPartition
from .errors import (
    CrossBoundViolation,
    IndefinitePivot,
    NotPSD,
    NotPSDDiagonal,
    ResidualNotConverged,
)

KAPPA_ZERO = 1e-30
NEAR_THRESHOLD = 1e-2


def matrix_sqrt_psd(A, clip_tol: float = 1e-10):
    """Principal square root of a Hermitian PSD matrix.

    Eigenvalues in ``[-clip_tol * max(1, ||A||), 0)`` are clipped to zero;
    anything lower raises :class:`NotPSD`.
    """
    w, U = la.eigh(A)
    root = _sqrt_from_eig(w, U, clip_tol)
    if root is None:
        raise NotPSD(f"eigenvalue {w[0]:.3e} below the clip band")
    return root


def _sqrt_from_eig(w, U, clip_tol):
    norm = float(np.max(np.abs(w))) if w.size else 0.0
    if w.size and w[0] < -clip_tol * max(1.0, norm):
        return None
    r = np.sqrt(np.clip(w, 0.0, None))
    return (U * r) @ U.conj().T


def condition_number(D) -> float:
    s = np.linalg.svd(np.asarray(D), compute_uv=False)
    if s[-1] < KAPPA_ZERO:
        return np.inf
    return float(s[0] / s[-1])


@dataclass
class RegularizationSchedule:
    eps: Tuple[float, ...] = (1e-2, 1e-4, 1e-6, 1e-8, 1e-10, 1e-12)
    kappa_limit: Optional[float] = None
    max_iterations: int = 8

    def __post_init__(self):
        eps = tuple(float(e) for e in self.eps)
        if not eps:
            raise ValueError("schedule needs at least one epsilon")
        if any(e <= 0 for e in eps) or any(b >= a for a, b in zip(eps, eps[1:])):
            raise ValueError(f"schedule must be strictly decreasing and positive: {eps}")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be positive")
        self.eps = eps


@dataclass
class GramFactor:
    partition: BlockPartition
    X: np.ndarray
    diagonal_regularizations: List[float]
    residual_norm: float
    threshold_events: List[Tuple[int, int, float]] = field(default_factory=list)
    ops: Dict[str, int] = field(default_factory=dict)
    residual_history: List[Tuple[int, float]] = field(default_factory=list)

    def block(self, i, j):
        p = self.partition
        return self.X[p.slice(i), p.slice(j)]

    def product(self) -> np.ndarray:
        return self.X @ self.X.conj().T


def _needs_regularization(w_diag, delta, eps):
    """True when ``(T_ii + eps I)^{1/2}`` has condition number >= 1/delta."""
    r = np.sqrt(np.clip(w_diag + eps, 0.0, None))
    if r[-1] < KAPPA_ZERO:
        return True
    return r[0] <= delta * r[-1]


def _one_pass(T, eps_per_block, delta, M, pivot, clip_tol):
    part = T.partition
    n = part.n
    X = np.zeros((part.total, part.total), dtype=complex)
    blk = lambda i, j: X[part.slice(i), part.slice(j)]  # noqa: E731
    Dinv = [None] * n
    events = []
    mults = 0
    for i in range(n):
        for j in range(i):
            acc = np.array(T.block(i, j))
            for l in range(j):
                acc -= blk(i, l) @ blk(j, l).conj().T
                mults += 1
            Y = acc @ Dinv[j]
            mults += 1
            norm = la.spectral_norm(Y)
            if norm > M:
                raise CrossBoundViolation(i, j, norm)
            if norm > NEAR_THRESHOLD * M:
                events.append((i, j, norm))
            X[part.slice(i), part.slice(j)] = Y
        P = np.array(T.block(i, i)) + eps_per_block[i] * np.eye(part.sizes[i])
        if pivot == "schur":
            for l in range(i):
                P -= blk(i, l) @ blk(i, l).conj().T
                mults += 1
        w, U = la.eigh(P)
        D = _sqrt_from_eig(w, U, clip_tol)
        if D is None:
            raise IndefinitePivot(i, float(w[0]))
        r = np.sqrt(np.clip(w, 0.0, None))
        Dinv[i] = la.pinv_hermitian(r, U, delta * (r[-1] if r.size else 0.0))
        X[part.slice(i), part.slice(i)] = D
    R = T.entries - X @ X.conj().T
    return X, la.spectral_norm(R), events, mults


def gram_factor(
    T: BlockMatrix,
    delta: float = 1e-8,
    schedule: Optional[RegularizationSchedule] = None,
    M: Optional[float] = None,
    pivot: str = "schur",
    clip_tol: float = 1e-10,
) -> GramFactor:
    """Block lower-triangular ``X`` with ``||T - X X*||_2 < delta``.

    Raises :class:`CrossBoundViolation` when a column entry exceeds ``M``
    (default ``1e6 * max(1, ||T||)``), :class:`IndefinitePivot` when an
    updated pivot is indefinite, and :class:`ResidualNotConverged` (carrying
    the best factor found) when the schedule is exhausted.
    """
    if delta <= 0:
        raise ValueError("delta must be positive")
    if pivot not in ("schur", "diagonal"):
        raise ValueError("pivot must be 'schur' or 'diagonal'")
    schedule = schedule or RegularizationSchedule()
    kappa_limit = schedule.kappa_limit or 1.0 / delta
    kdelta = 1.0 / kappa_limit
    norm = T.norm()
    M = 1e6 * max(1.0, norm) if M is None else M
    if M <= 0:
        raise ValueError("M must be positive")
    thr = la.psd_threshold(norm)
    n = T.n
    diag_eigs = []
    for i in range(n):
        w = la.eigvalsh(T.block(i, i))
        if w[0] < -thr:
            raise NotPSDDiagonal(i, float(w[0]))
        diag_eigs.append(w)

    needs = [_needs_regularization(w, kdelta, 0.0) for w in diag_eigs]
    n_passes = 1 if not any(needs) else min(schedule.max_iterations, len(schedule.eps))
    best = None
    history = []
    total_mults = 0
    sqrt_count = 0
    for p in range(n_passes):
        eps_used = [0.0] * n
        exhausted = False
        for i in range(n):
            if needs[i]:
                # a smaller eps only worsens conditioning, so stop refining here
                exhausted = _needs_regularization(diag_eigs[i], kdelta, schedule.eps[p])
                if exhausted:
                    break
                eps_used[i] = schedule.eps[p]
        if exhausted:
            break
        X, res, events, mults = _one_pass(T, eps_used, delta, M, pivot, clip_tol)
        total_mults += mults
        sqrt_count += n
        history.append((p, res))
        ops = {"sqrt": sqrt_count, "block_mult": total_mults, "passes": p + 1,
               "sqrt_per_pass": n, "block_mult_per_pass": mults}
        factor = GramFactor(T.partition, X, eps_used, res, events, ops, list(history))
        if best is None or res < best.residual_norm:
            best = factor
        if res < delta:
            return factor
    if best is None:
        raise ResidualNotConverged(np.inf, None)
    best.residual_history = list(history)
    raise ResidualNotConverged(best.residual_norm, best)


def block_mult_count(n: int, pivot: str = "schur") -> int:
    """Block products one pass performs for ``n`` blocks."""
    columns = (n + 1) * n * (n - 1) // 6
    pivots = n * (n - 1) // 2 if pivot == "schur" else 0
    return columns + pivots
