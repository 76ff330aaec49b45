"""Mixed-Schwarz constants.

For a factor pair ``f(t) g(t) = t`` the constant is

    C_{T,alpha}(f, g) = sup_{|x|=|y|=1} |<Tx, y>| / (|f(|T|^alpha) x| |g(|T*|^alpha) y|)

In finite dimensions it equals ``sigma_1^(1 - alpha)`` for every admissible
pair, attained at the top singular pair ``x = v_1``, ``y = u_1``. This module
evaluates the quotient directly (so the closed form can be checked against
sampling) and probes perturbation continuity.
"""

from dataclasses import dataclass, field
from typing import Dict, Optional, Sequence, Tuple, Union

import numpy as np

from . import _linalg as la
from ._rng import keyed_rng
from .errors import NotUnitVector, ZeroOperator

DENOMINATOR_FLOOR = 1e-30


@dataclass(frozen=True)
class PowerPair:
    """``f(t) = t^s``, ``g(t) = t^(1-s)``; ``0^s := 0`` for ``s != 0``."""

    s: float

    def f(self, t):
        return _power(t, self.s)

    def g(self, t):
        return _power(t, 1.0 - self.s)


def _power(t, s):
    t = np.asarray(t, dtype=float)
    if s == 0:
        return np.ones_like(t)
    out = np.zeros_like(t)
    pos = t > 0
    out[pos] = t[pos] ** s
    return out


@dataclass(frozen=True)
class TabulatedPair:
    """``f`` given at positive points, linearly interpolated; ``g = t / f``."""

    points: Tuple[Tuple[float, float], ...]

    def __post_init__(self):
        pts = tuple(sorted((float(t), float(v)) for t, v in self.points))
        if not pts:
            raise ValueError("a tabulated pair needs at least one point")
        if any(t <= 0 or v <= 0 for t, v in pts):
            raise ValueError("tabulated points need t > 0 and f(t) > 0")
        object.__setattr__(self, "points", pts)

    @classmethod
    def from_function(cls, fn, ts):
        return cls(tuple((float(t), float(fn(t))) for t in ts if t > 0))

    def f(self, t):
        t = np.asarray(t, dtype=float)
        ts, vs = np.array(self.points).T
        out = np.interp(t, ts, vs)
        return np.where(t > 0, out, 0.0)

    def g(self, t):
        t = np.asarray(t, dtype=float)
        fv = self.f(t)
        out = np.zeros_like(t)
        pos = t > 0
        out[pos] = t[pos] / fv[pos]
        return out


FactorPair = Union[PowerPair, TabulatedPair]


@dataclass(frozen=True, eq=False)
class SchwarzProblem:
    T: np.ndarray
    alpha: float

    def __post_init__(self):
        object.__setattr__(self, "T", np.atleast_2d(np.asarray(self.T, dtype=complex)))
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must lie in [0, 1], got {self.alpha}")


@dataclass
class SchwarzResult:
    constant: float
    attaining_x: Optional[np.ndarray]
    attaining_y: Optional[np.ndarray]
    method: str
    sigma1: float = float("nan")
    infinite_points: int = 0


class _Calculus:
    """Cached SVD and the denominators ``f(|T|^a) x``, ``g(|T*|^a) y``.

    Everything is evaluated in singular-vector coordinates ``a = V* x``,
    ``b = U* y``, so ``<Tx, y> = sum_k s_k a_k conj(b_k)`` uses the same
    numbers as the denominators. Singular values at roundoff level
    (``<= max(m, n) * eps * s_1``) are treated as exact zeros.
    """

    def __init__(self, problem: SchwarzProblem):
        T = problem.T
        m, n = T.shape
        U, s, Vh = np.linalg.svd(T)
        s = s.copy()
        if s.size and s[0] > 0:
            s[s <= max(m, n) * np.finfo(float).eps * s[0]] = 0.0
        self.T, self.U, self.s, self.V = T, U, s, Vh.conj().T
        self.alpha = problem.alpha
        # eigenvalues of |T| on the columns of V and of |T*| on the columns of U
        self.abs_T = np.zeros(n)
        self.abs_T[: s.size] = s
        self.abs_Tstar = np.zeros(m)
        self.abs_Tstar[: s.size] = s

    def quotients(self, pair: FactorPair, X, Y):
        """Rows of ``X`` (n) and ``Y`` (m) are unit vectors; returns the quotients."""
        a = self.alpha
        fx = pair.f(self.abs_T**a)
        gy = pair.g(self.abs_Tstar**a)
        A = X @ self.V.conj()
        B = Y @ self.U.conj()
        r = self.s.size
        num = np.abs((A[:, :r] * B[:, :r].conj()) @ self.s)
        # |V diag(f) V* x| = |diag(f) V* x|
        den = np.linalg.norm(A * fx, axis=1) * np.linalg.norm(B * gy, axis=1)
        out = np.full(num.shape, np.inf)
        ok = den >= DENOMINATOR_FLOOR
        out[ok] = num[ok] / den[ok]
        return out, den

    def probe_vectors(self):
        """All pairs ``(v_j, u_l)`` of singular vectors."""
        V, U = self.V.T, self.U.T
        X = np.repeat(V, U.shape[0], axis=0)
        Y = np.tile(U, (V.shape[0], 1))
        return X, Y


def schwarz_quotient(problem: SchwarzProblem, pair: FactorPair, x, y) -> float:
    x = np.asarray(x, dtype=complex).ravel()
    y = np.asarray(y, dtype=complex).ravel()
    for name, v in (("x", x), ("y", y)):
        if abs(np.linalg.norm(v) - 1.0) > 1e-10:
            raise NotUnitVector(f"{name} has norm {np.linalg.norm(v):.12g}")
    q, _ = _Calculus(problem).quotients(pair, x[None], y[None])
    return float(q[0])


def schwarz_constant_exact(problem: SchwarzProblem) -> SchwarzResult:
    """``sigma_1^(1 - alpha)`` with the top singular pair as attaining vectors."""
    U, s, Vh = np.linalg.svd(problem.T)
    if s.size == 0 or s[0] == 0.0:
        raise ZeroOperator("the constant is undefined for the zero operator")
    sigma1 = float(s[0])
    return SchwarzResult(sigma1 ** (1.0 - problem.alpha), Vh[0].conj(), U[:, 0], "closed-form", sigma1)


def sampled_constant(problem: SchwarzProblem, pair: FactorPair, samples: int, seed: int = 0,
                     probes: bool = True) -> SchwarzResult:
    """Largest finite quotient over probes and seeded random unit pairs."""
    calc = _Calculus(problem)
    m, n = problem.T.shape
    parts = []
    if probes:
        parts.append(calc.probe_vectors())
    if samples > 0:
        rng = keyed_rng(seed, "schwarz-sample", m, n)
        parts.append((la.unit_vectors(rng, samples, n), la.unit_vectors(rng, samples, m)))
    X = np.concatenate([p[0] for p in parts])
    Y = np.concatenate([p[1] for p in parts])
    q, _ = calc.quotients(pair, X, Y)
    finite = np.isfinite(q)
    if not finite.any():
        return SchwarzResult(np.inf, None, None, "sampled", float(calc.s[0]), int((~finite).sum()))
    best = int(np.argmax(np.where(finite, q, -np.inf)))
    return SchwarzResult(float(q[best]), X[best], Y[best], "sampled", float(calc.s[0]),
                         int((~finite).sum()))


@dataclass
class SOptimization:
    values: Dict[float, float]
    spread: float
    sigma1: float
    alpha: float
    infinite_points: Dict[float, int] = field(default_factory=dict)

    def best(self) -> Tuple[float, float]:
        s = min(self.values, key=self.values.get)
        return s, self.values[s]


def optimize_s(problem: SchwarzProblem, s_grid: Sequence[float], samples: int = 1000,
               seed: int = 0) -> SOptimization:
    """Estimate the constant for each power pair ``(t^s, t^(1-s))`` on the grid."""
    if len(s_grid) == 0:
        raise ValueError("s_grid must be nonempty")
    values, infinite = {}, {}
    sigma1 = float(np.linalg.svd(problem.T, compute_uv=False)[0])
    for s in s_grid:
        res = sampled_constant(problem, PowerPair(float(s)), samples, seed)
        values[float(s)] = res.constant
        infinite[float(s)] = res.infinite_points
    vals = np.array(list(values.values()))
    return SOptimization(values, float(vals.max() - vals.min()), sigma1, problem.alpha, infinite)


@dataclass
class ContinuityReport:
    difference: float
    distance: float
    floor: float
    bound: float
    constant_T: float
    constant_S: float
    sigma1_T: float
    sigma1_S: float
    consistent: bool


def _top_sigma(A):
    return float(np.linalg.svd(A, compute_uv=False)[0])


def continuity_probe(T, perturbation_scale: float, alpha: float, pair: FactorPair = PowerPair(0.5),
                     seed: int = 0, direction=None, samples: int = 256) -> ContinuityReport:
    """Compare constants of ``T`` and ``S = T + scale E`` with ``||E||_2 = 1``.

    Each constant is evaluated as the quotient at the top singular pair
    (using ``pair``) and cross-checked against ``sigma_1^(1-alpha)``.
    ``floor`` is the smallest denominator product seen over the singular
    vector probes and ``samples`` random pairs for ``T``; ``bound`` is
    ``|sigma_1(T)^(1-alpha) - sigma_1(S)^(1-alpha)|``.
    """
    if perturbation_scale < 0:
        raise ValueError("perturbation_scale must be nonnegative")
    T = np.atleast_2d(np.asarray(T, dtype=complex))
    if direction is None:
        rng = keyed_rng(seed, "continuity", *T.shape)
        E = rng.standard_normal(T.shape) + 1j * rng.standard_normal(T.shape)
    else:
        E = np.asarray(direction, dtype=complex)
    E = E / la.spectral_norm(E)
    S = T + perturbation_scale * E
    consts = []
    for A in (T, S):
        prob = SchwarzProblem(A, alpha)
        exact = schwarz_constant_exact(prob)
        q = schwarz_quotient(prob, pair, exact.attaining_x, exact.attaining_y)
        consts.append((q, exact.constant, exact.sigma1))
    (cT, eT, sT), (cS, eS, sS) = consts
    calc = _Calculus(SchwarzProblem(T, alpha))
    X, Y = calc.probe_vectors()
    rng = keyed_rng(seed, "continuity-floor", *T.shape)
    X = np.concatenate([X, la.unit_vectors(rng, samples, T.shape[1])])
    Y = np.concatenate([Y, la.unit_vectors(rng, samples, T.shape[0])])
    _, den = calc.quotients(pair, X, Y)
    bound = abs(sT ** (1 - alpha) - sS ** (1 - alpha))
    diff = abs(cT - cS)
    consistent = (abs(cT - eT) <= 1e-10 * max(1.0, eT) and abs(cS - eS) <= 1e-10 * max(1.0, eS)
                  and diff <= bound + 1e-10)
    return ContinuityReport(diff, la.spectral_norm(S - T), float(den.min()), bound,
                            cT, cS, sT, sS, bool(consistent))


def truncate_rank(T, r: int) -> np.ndarray:
    """Best rank-``r`` approximation of ``T`` from its SVD."""
    U, s, Vh = np.linalg.svd(np.asarray(T, dtype=complex), full_matrices=False)
    s = s.copy()
    s[r:] = 0.0
    return (U * s) @ Vh
