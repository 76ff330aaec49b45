"""Solving ``AX = C`` through the regularized family ``X_eps = A*(AA* + eps I)^{-1} C``.

The majorization ``CC* <= lambda AA*`` bounds every ``||X_eps||`` by
``sqrt(lambda)``, and ``A X_eps = P_eps C`` tends to ``P C`` with ``P`` the
projection onto ``range(A)``. In finite dimensions the limit is ``A^+ C``.
"""

from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from . import _linalg as la
from ._rng import keyed_rng
from .errors import NotASolution, ShapeMismatch

DEFAULT_TOL = 1e-8
DEFAULT_SCHEDULE = (1e-2, 1e-4, 1e-6, 1e-8)
#: singular values within this factor of the rank cutoff trigger a warning
NEAR_RANK_FACTOR = 1e2


@dataclass(frozen=True, eq=False)
class DouglasInstance:
    A: np.ndarray
    C: np.ndarray

    def __post_init__(self):
        A = np.atleast_2d(np.asarray(self.A, dtype=complex))
        C = np.asarray(self.C, dtype=complex)
        if C.ndim == 1:
            C = C[:, None]
        if A.shape[0] != C.shape[0]:
            raise ShapeMismatch(f"A has {A.shape[0]} rows but C has {C.shape[0]}")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "C", C)


class _Ranges:
    def __init__(self, A, tol):
        U, s, Vh = np.linalg.svd(A)
        self.s = s
        cutoff = tol * s[0] if s.size and s[0] > 0 else 0.0
        self.rank = int(np.sum(s > cutoff)) if s.size and s[0] > 0 else 0
        self.Q = U[:, : self.rank]
        self.sr = s[: self.rank]
        self.Vr = Vh[: self.rank].conj().T
        self.kernel = Vh[self.rank:].conj().T
        self.near = bool(np.any((s > cutoff / NEAR_RANK_FACTOR) & (s <= cutoff * NEAR_RANK_FACTOR))) \
            if self.rank else False


def regularized_solution(inst: DouglasInstance, epsilon: float) -> np.ndarray:
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    A, C = inst.A, inst.C
    w, W = la.eigh(A @ A.conj().T)
    resolvent_C = (W / (np.clip(w, 0.0, None) + epsilon)) @ (W.conj().T @ C)
    return A.conj().T @ resolvent_C


def range_inclusion_check(inst: DouglasInstance, tol: float = DEFAULT_TOL) -> Tuple[bool, float]:
    """Whether ``range(C)`` lies in the numerical range of ``A``, plus the residual ``||(I - QQ*) C||``."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    rg = _Ranges(inst.A, tol)
    C = inst.C
    residual = la.spectral_norm(C - rg.Q @ (rg.Q.conj().T @ C))
    return residual <= tol * max(1.0, la.spectral_norm(C)), residual


def majorization_lambda(inst: DouglasInstance, tol: float = DEFAULT_TOL) -> float:
    """Smallest ``lambda`` with ``lambda AA* - CC*`` PSD, or ``inf``."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    rg = _Ranges(inst.A, tol)
    C = inst.C
    normC = la.spectral_norm(C)
    if normC == 0.0:
        return 0.0
    proj = rg.Q.conj().T @ C
    if la.spectral_norm(C - rg.Q @ proj) > tol * normC:
        return np.inf
    # (AA*)^{+1/2} C = Q diag(1/s) Q* C
    return la.spectral_norm(proj / rg.sr[:, None]) ** 2


@dataclass
class DouglasReport:
    lambda_star: float
    range_included: bool
    range_residual: float
    table: List[Tuple[float, float, float, float]]
    X_limit: np.ndarray
    limit_residual: float
    kernel_basis: np.ndarray
    rank: int
    consistent: bool
    conditioning_warning: bool
    notes: List[str] = field(default_factory=list)

    @property
    def residuals(self):
        return [row[2] for row in self.table]


TABLE_HEADER = ("epsilon", "norm_X_eps", "residual", "projected_residual")


def solve(inst: DouglasInstance, eps_schedule: Sequence[float] = DEFAULT_SCHEDULE,
          tol: float = DEFAULT_TOL) -> DouglasReport:
    """Regularized solutions down the schedule plus the limit ``A^+ C``.

    Table rows are ``(eps, ||X_eps||, ||A X_eps - C||, ||A X_eps - P C||)``.
    Solvability is reported, never raised.
    """
    if not eps_schedule:
        raise ValueError("eps_schedule must be nonempty")
    A, C = inst.A, inst.C
    rg = _Ranges(A, tol)
    included, range_res = range_inclusion_check(inst, tol)
    lam = majorization_lambda(inst, tol)
    PC = rg.Q @ (rg.Q.conj().T @ C)
    table = []
    for eps in eps_schedule:
        X = regularized_solution(inst, float(eps))
        AX = A @ X
        table.append((float(eps), la.spectral_norm(X), la.spectral_norm(AX - C), la.spectral_norm(AX - PC)))
    # pseudo-inverse on the numerical range
    X_limit = rg.Vr @ ((rg.Q.conj().T @ C) / rg.sr[:, None])
    limit_res = la.spectral_norm(A @ X_limit - C)
    notes = []
    scaled_tol = tol * max(1.0, la.spectral_norm(C))
    consistent = included == np.isfinite(lam)
    if not consistent:
        notes.append("range inclusion and majorization disagree numerically")
    if included:
        if limit_res > scaled_tol:
            consistent = False
            notes.append(f"limit residual {limit_res:.3e} exceeds {scaled_tol:.1e}")
        if np.isfinite(lam) and la.spectral_norm(X_limit) > np.sqrt(lam) + scaled_tol:
            consistent = False
            notes.append("limit norm exceeds sqrt(lambda*)")
    else:
        notes.append(f"range not included: A X_eps tends to P C, leaving ||(I-P)C|| = {range_res:.6g}")
    if rg.near:
        notes.append("a singular value of A lies near the rank cutoff")
    return DouglasReport(lam, included, range_res, table, X_limit, limit_res, rg.kernel, rg.rank,
                         consistent, rg.near, notes)


def solution_set_sample(inst: DouglasInstance, X0, count: int = 5, seed: int = 0,
                        tol: float = DEFAULT_TOL) -> List[np.ndarray]:
    """``X0 + K W`` for seeded Gaussian ``W``, ``K`` an orthonormal basis of ``ker A``."""
    X0 = np.asarray(X0, dtype=complex)
    if X0.ndim == 1:
        X0 = X0[:, None]
    A, C = inst.A, inst.C
    res = la.spectral_norm(A @ X0 - C)
    if res > tol * max(1.0, la.spectral_norm(C)):
        raise NotASolution(f"||A X0 - C|| = {res:.3e}")
    K = _Ranges(A, tol).kernel
    if K.shape[1] == 0:
        return [X0.copy()]
    rng = keyed_rng(seed, "solution-set", *A.shape)
    out = []
    for _ in range(count):
        W = rng.standard_normal((K.shape[1], X0.shape[1])) + 1j * rng.standard_normal((K.shape[1], X0.shape[1]))
        out.append(X0 + K @ W)
    return out
