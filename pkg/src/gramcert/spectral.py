"""Coercivity and semigroup decay for ``H = [[A, B], [B*, C]]``.

With ``A >= aI``, ``C >= cI`` and ``|<By, x>|^2 <= gamma <Ax,x><Cy,y>`` for
some ``gamma < 1``, ``H >= delta I`` where
``delta = min(a, c) (1 - sqrt(gamma))^2``, hence ``||exp(-tH)|| <= exp(-delta t)``.
Every certificate re-checks ``lambda_min(H) >= delta`` with the eigen oracle.
"""

from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from . import _linalg as la
from .errors import (
    CertificateRefused,
    GammaOutOfRange,
    InvalidBound,
    ShapeMismatch,
    SingularDiagonal,
)

GAP_TOL = 1e-8
DECAY_RTOL = 1e-10
BOUND_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class CoercivityInstance:
    """The diagonal bounds ``a``, ``c`` default to ``lambda_min(A)``, ``lambda_min(C)``."""

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    a: Optional[float] = None
    c: Optional[float] = None

    def __post_init__(self):
        A = la.hermitize(np.atleast_2d(self.A))
        C = la.hermitize(np.atleast_2d(self.C))
        B = np.atleast_2d(np.asarray(self.B, dtype=complex))
        if B.shape != (A.shape[0], C.shape[0]):
            raise ShapeMismatch(f"B has shape {B.shape}, expected {(A.shape[0], C.shape[0])}")
        lam_a = float(la.eigvalsh(A)[0])
        lam_c = float(la.eigvalsh(C)[0])
        a = lam_a if self.a is None else float(self.a)
        c = lam_c if self.c is None else float(self.c)
        if lam_a < a - BOUND_TOL or lam_c < c - BOUND_TOL:
            raise InvalidBound(f"claimed bounds a={a}, c={c} exceed lambda_min {lam_a:.6g}, {lam_c:.6g}")
        if a <= 0 or c <= 0:
            raise InvalidBound(f"bounds must be positive, got a={a}, c={c}")
        for name, v in (("A", A), ("B", B), ("C", C), ("a", a), ("c", c)):
            object.__setattr__(self, name, v)

    def H(self) -> np.ndarray:
        return np.block([[self.A, self.B], [self.B.conj().T, self.C]])


def _inv_sqrt(M, name):
    w, U = la.eigh(M)
    if w[0] <= 1e-14 * max(1.0, abs(w[-1])):
        raise SingularDiagonal(f"{name} is not invertible at working precision")
    return (U / np.sqrt(w)) @ U.conj().T


def gamma_exact(inst: CoercivityInstance) -> float:
    """``||A^{-1/2} B C^{-1/2}||_2^2``, the sharp constant in the cross bound."""
    G = _inv_sqrt(inst.A, "A") @ inst.B @ _inv_sqrt(inst.C, "C")
    return la.spectral_norm(G) ** 2


def cross_ratio(inst: CoercivityInstance, x, y):
    """``|<By, x>|^2 / (<Ax,x> <Cy,y>)`` for rows of ``x`` and ``y``."""
    x = np.atleast_2d(x)
    y = np.atleast_2d(y)
    num = np.abs(np.einsum("ni,ij,nj->n", x.conj(), inst.B, y)) ** 2
    ax = np.einsum("ni,ij,nj->n", x.conj(), inst.A, x).real
    cy = np.einsum("ni,ij,nj->n", y.conj(), inst.C, y).real
    return num / (ax * cy)


def coercivity_delta(a: float, c: float, gamma: float) -> float:
    if a <= 0 or c <= 0:
        raise InvalidBound("a and c must be positive")
    if not 0.0 <= gamma < 1.0:
        raise GammaOutOfRange(f"gamma must lie in [0, 1), got {gamma}")
    return min(a, c) * (1.0 - np.sqrt(gamma)) ** 2


def two_term_lower_bound(inst: CoercivityInstance, gamma: float, x, y):
    """``(1 - sqrt(g c/a)) <Ax,x> + (1 - sqrt(g a/c)) <Cy,y>`` for rows of ``x``, ``y``."""
    a, c = inst.a, inst.c
    ax = np.einsum("ni,ij,nj->n", np.conj(x), inst.A, x).real
    cy = np.einsum("ni,ij,nj->n", np.conj(y), inst.C, y).real
    rg = np.sqrt(gamma)
    return (1 - rg * np.sqrt(c / a)) * ax + (1 - rg * np.sqrt(a / c)) * cy


def quadratic_form_H(inst: CoercivityInstance, x, y):
    xy = np.concatenate([np.atleast_2d(x), np.atleast_2d(y)], axis=1)
    return np.einsum("ni,ij,nj->n", xy.conj(), inst.H(), xy).real


def semigroup(H, t: float) -> np.ndarray:
    """``exp(-tH)`` for Hermitian ``H`` by spectral calculus."""
    return la.hermitian_function(H, lambda w: np.exp(-t * w))


@dataclass
class GapCertificate:
    gamma: float
    delta: float
    lambda_min_H: float
    a: float
    c: float
    decay_checks: List[Tuple[float, float, float]] = field(default_factory=list)

    @property
    def decay_ok(self) -> bool:
        return all(norm <= bound * (1 + DECAY_RTOL) for _, norm, bound in self.decay_checks)


DECAY_HEADER = ("t", "norm_exp_minus_tH", "bound")


def gap_certificate(inst: CoercivityInstance, t_grid: Sequence[float] = (0.0, 0.1, 1.0, 10.0)) -> GapCertificate:
    gamma = gamma_exact(inst)
    delta = coercivity_delta(inst.a, inst.c, gamma)
    H = inst.H()
    lam = float(la.eigvalsh(H)[0])
    diagnostics = {"gamma": gamma, "delta": delta, "lambda_min_H": lam, "a": inst.a, "c": inst.c}
    if lam < delta - GAP_TOL:
        raise CertificateRefused(
            f"lambda_min(H) = {lam:.12g} is below delta = {delta:.12g}", diagnostics)
    checks = []
    for t in t_grid:
        t = float(t)
        if t < 0:
            raise ValueError("t_grid entries must be nonnegative")
        norm = la.spectral_norm(semigroup(H, t))
        checks.append((t, norm, float(np.exp(-delta * t))))
    cert = GapCertificate(gamma, delta, lam, inst.a, inst.c, checks)
    if not cert.decay_ok:
        raise CertificateRefused("semigroup norm exceeded exp(-delta t)", {**diagnostics, "decay": checks})
    return cert
