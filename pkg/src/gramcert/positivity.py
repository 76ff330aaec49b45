"""Positivity verdicts for Hermitian block matrices.

Three independent routes are available:

* the dense eigen oracle (:func:`min_eig_oracle`), the ground truth;
* cross-entry ratios ``p_ij^2 / (F_i F_j)`` (:func:`cross_entry_check`), with
  ``p_ij = ||<T_ij x_j, x_i>||`` and ``F_i = ||<T_ii x_i, x_i>||``;
* sequential elimination on ``T + eps I`` (:func:`schur_chain`).

:func:`positivity_verdict` combines them into a certificate. Pairwise
ratios ``<= 1`` are necessary for ``T >= 0`` and sufficient when ``n = 2``,
but not when ``n >= 3``: the matrix ``[[1,1,-1],[1,1,1],[-1,1,1]]`` has every
ratio equal to 1 and eigenvalue -1. For ``n >= 3`` only the slack condition
``sum_{j != i} sqrt(r_ij) <= 1`` (for every row ``i``) is used as a
certificate; it bounds the normalized coupling ``D^{-1} (T - diag) D^{-1}``
by its largest block row sum.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import _linalg as la
from ._rng import keyed_rng
from .blockmat import BlockMatrix, ModuleVector, quadratic_form
from .errors import DiagonalNotPSD, GramCertError, SingularPivot

DEFAULT_EPS_SCHEDULE = (1e-2, 1e-4, 1e-6, 1e-8)
#: slack allowed on a ratio that should be <= 1
RATIO_TOL = 1e-10
#: F_i counts as zero below this fraction of the local block scale
_ZERO_FORM = 1e-12
#: with a zero denominator, p_ij counts as nonzero above this fraction
_ZERO_CROSS = 1e-5
#: pivot eigenvalues in [-tol, _SINGULAR_PIVOT * max(1, ||T||)] are too close to call
_SINGULAR_PIVOT = 1e-12


class Verdict(str, Enum):
    POSITIVE = "CertifiedPositive"
    NOT_POSITIVE = "CertifiedNotPositive"
    INCONCLUSIVE = "Inconclusive"


METHODS = ("eigen-oracle", "schur-chain", "cross-entry-2x2", "cross-entry-slack", "gram-factor")


def min_eig_oracle(T: BlockMatrix) -> float:
    return float(la.eigvalsh(T.entries)[0])


def min_eig_vector(T: BlockMatrix):
    w, U = la.eigh(T.entries)
    return float(w[0]), U[:, 0]


# ---------------------------------------------------------------- cross entries


def _spectral_norms(M):
    if M.shape[-1] == 1 and M.shape[-2] == 1:
        return np.abs(M[..., 0, 0])
    return np.linalg.norm(M, 2, axis=(-2, -1))


def _canonical(X):
    flat = X.reshape(X.shape[0], -1)
    lead = flat[np.arange(flat.shape[0]), np.argmax(np.abs(flat), axis=1)]
    lead = np.where(lead == 0, 1.0, lead)
    return X / lead[:, None, None]


def _batch_ratios(Tii, Tjj, Tij, Xi, Xj):
    """Ratios for stacked candidates ``Xi (N, d_i, k)``, ``Xj (N, d_j, k)``."""
    scale = max(la.spectral_norm(Tii), la.spectral_norm(Tjj), la.spectral_norm(Tij))
    N = Xi.shape[0]
    if scale == 0.0:
        return np.zeros(N)
    # the ratio is invariant under scaling either slot; dividing by the largest
    # entry makes scalar blocks exact instead of off by unit-phase roundoff
    Xi = _canonical(Xi)
    Xj = _canonical(Xj)
    ni = _spectral_norms(Xi)
    nj = _spectral_norms(Xj)
    Xih = np.conj(np.swapaxes(Xi, -1, -2))
    Xjh = np.conj(np.swapaxes(Xj, -1, -2))
    p = _spectral_norms(Xih @ Tij @ Xj)
    Fi = _spectral_norms(Xih @ Tii @ Xi)
    Fj = _spectral_norms(Xjh @ Tjj @ Xj)
    out = np.zeros(N)
    degenerate = (ni == 0) | (nj == 0)
    zero_den = (Fi <= _ZERO_FORM * scale * ni**2) | (Fj <= _ZERO_FORM * scale * nj**2)
    zero_den &= ~degenerate
    big = p > _ZERO_CROSS * scale * ni * nj
    out[zero_den & big] = np.inf
    ok = ~zero_den & ~degenerate
    out[ok] = p[ok] ** 2 / (Fi[ok] * Fj[ok])
    return out


def cross_ratio(T: BlockMatrix, i: int, j: int, x_i, x_j) -> float:
    """``p_ij(x_i, x_j)^2 / (F_i(x_i) F_j(x_j))`` with ``0/0 := 0``.

    A clearly nonzero ``p_ij`` over a numerically zero denominator gives
    ``inf``: the 2x2 compression of ``T`` onto ``(x_i, x_j)`` is then not PSD.
    """
    x_i = np.asarray(x_i, dtype=complex)
    x_j = np.asarray(x_j, dtype=complex)
    if x_i.ndim == 1:
        x_i = x_i[:, None]
    if x_j.ndim == 1:
        x_j = x_j[:, None]
    return float(_batch_ratios(T.block(i, i), T.block(j, j), T.block(i, j), x_i[None], x_j[None])[0])


@dataclass
class CrossEntryReport:
    """Worst tested ratio per pair ``i < j`` with the vectors attaining it."""

    ratios: Dict[Tuple[int, int], float]
    witnesses: Dict[Tuple[int, int], Tuple[np.ndarray, np.ndarray]]
    samples: int
    module_rank: int
    rank_one_coefficients: Optional[Dict[Tuple[int, int], float]] = None

    def ratio(self, i: int, j: int) -> float:
        return self.ratios[(min(i, j), max(i, j))]

    def slack(self, n: int) -> List[float]:
        """Row sums ``sum_{j != i} sqrt(r_ij)``."""
        return [sum(np.sqrt(self.ratio(i, j)) for j in range(n) if j != i) for i in range(n)]


def _kernel_and_pinv_sqrt(A, scale):
    w, U = la.eigh(A)
    cutoff = _ZERO_FORM * scale
    keep = w > cutoff
    inv_sqrt = np.zeros_like(w)
    inv_sqrt[keep] = 1.0 / np.sqrt(w[keep])
    return (U * inv_sqrt) @ U.conj().T, U[:, ~keep], U


def _top_pair(M):
    if M.size == 0 or not np.any(M):
        return None
    U, s, Vh = np.linalg.svd(M)
    if s[0] == 0.0:
        return None
    return U[:, 0], Vh[0].conj()


def _probes(Tii, Tjj, Tij):
    """Deterministic candidate pairs (as plain vectors)."""
    scale = max(la.spectral_norm(Tii), la.spectral_norm(Tjj), la.spectral_norm(Tij), 1e-300)
    Pi, Ki, Ui = _kernel_and_pinv_sqrt(Tii, scale)
    Pj, Kj, Uj = _kernel_and_pinv_sqrt(Tjj, scale)
    pairs = [(Ui[:, a], Uj[:, b]) for a in range(Ui.shape[1]) for b in range(Uj.shape[1])]
    # top singular pair of the normalized coupling attains the supremum
    top = _top_pair(Pi @ Tij @ Pj)
    if top is not None:
        xi, xj = Pi @ top[0], Pj @ top[1]
        if np.any(xi) and np.any(xj):
            pairs.append((xi, xj))
    # rank-one directions of the block itself
    top = _top_pair(Tij)
    if top is not None:
        pairs.append(top)
    # coupling into the kernel of a diagonal block
    if Ki.shape[1]:
        top = _top_pair(Ki @ Ki.conj().T @ Tij)
        if top is not None:
            pairs.append(top)
    if Kj.shape[1]:
        top = _top_pair(Tij @ Kj @ Kj.conj().T)
        if top is not None:
            pairs.append(top)
    return pairs


def _embed(vectors, k):
    """Put plain vectors into the first column of ``d x k`` slots."""
    V = np.stack(vectors)
    out = np.zeros(V.shape + (k,), dtype=complex)
    out[..., 0] = V
    return out


def _unit_slots(rng, count, d, k):
    Z = rng.standard_normal((count, d, k)) + 1j * rng.standard_normal((count, d, k))
    return Z / _spectral_norms(Z)[:, None, None]


def rank_one_coefficients(T: BlockMatrix, rank_tol: float = 1e-12):
    """``c_ij = ||u||^2 ||v||^2 / (lmin(T_ii) lmin(T_jj))`` when all couplings are rank one.

    Returns ``None`` if some off-diagonal block has rank above one.
    """
    n = T.n
    lmin = [float(la.eigvalsh(T.block(i, i))[0]) for i in range(n)]
    out = {}
    for i in range(n):
        for j in range(i + 1, n):
            s = np.linalg.svd(T.block(i, j), compute_uv=False)
            if s.size > 1 and s[1] > rank_tol * s[0]:
                return None
            top = float(s[0]) if s.size else 0.0
            if top == 0.0:
                out[(i, j)] = 0.0
                continue
            den = lmin[i] * lmin[j]
            out[(i, j)] = top**2 / den if den > 0 else np.inf
    return out


def cross_entry_check(
    T: BlockMatrix,
    samples: int = 64,
    seed: int = 0,
    module_rank: Optional[int] = None,
    tol: float = la.PSD_TOL,
) -> CrossEntryReport:
    """Evaluate the pairwise cross-entry bound on random and probe vectors.

    Random slots come from a stream keyed by ``(seed, i, j)``. The probes
    include the top singular pair of ``T_ii^{+1/2} T_ij T_jj^{+1/2}``, which
    attains the supremum of the ratio when the diagonals are invertible, so
    the reported ratios are exact in that case rather than sampled lower bounds.
    """
    k = T.module_rank if module_rank is None else int(module_rank)
    thr = la.psd_threshold(T.norm(), tol)
    for i in range(T.n):
        lam = float(la.eigvalsh(T.block(i, i))[0])
        if lam < -thr:
            raise DiagonalNotPSD(i, lam)
    ratios, witnesses = {}, {}
    for i in range(T.n):
        for j in range(i + 1, T.n):
            Tii, Tjj, Tij = T.block(i, i), T.block(j, j), T.block(i, j)
            probes = _probes(Tii, Tjj, Tij)
            Xi = _embed([p[0] for p in probes], k)
            Xj = _embed([p[1] for p in probes], k)
            if samples > 0:
                rng = keyed_rng(seed, "cross-entry", i, j)
                Xi = np.concatenate([Xi, _unit_slots(rng, samples, Tii.shape[0], k)])
                Xj = np.concatenate([Xj, _unit_slots(rng, samples, Tjj.shape[0], k)])
            r = _batch_ratios(Tii, Tjj, Tij, Xi, Xj)
            best = int(np.argmax(r))
            ratios[(i, j)] = float(r[best])
            witnesses[(i, j)] = (Xi[best], Xj[best])
    return CrossEntryReport(ratios, witnesses, samples, k, rank_one_coefficients(T))


# ------------------------------------------------------------------ Schur chain


@dataclass
class SchurChainResult:
    epsilon: float
    complements: List[np.ndarray]
    positive: bool
    failed_block: Optional[int] = None
    witness: Optional[np.ndarray] = None
    min_pivot_eigs: List[float] = field(default_factory=list)


def schur_chain(T: BlockMatrix, epsilon: float, tol: float = la.PSD_TOL) -> SchurChainResult:
    """Block elimination in order ``0..n-1`` on ``T`` with ``T_ii -> T_ii + eps I``.

    ``complements[k]`` is the pivot left at step ``k`` once blocks ``0..k-1``
    are eliminated. The chain stops at the first pivot with an eigenvalue
    below ``-tol * max(1, ||T||)`` and returns a vector ``x`` with
    ``x* (T + eps I) x`` equal to that eigenvalue.
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    n = T.n
    norm = T.norm()
    thr = la.psd_threshold(norm, tol)
    sing = _SINGULAR_PIVOT * max(1.0, norm)
    part = T.partition
    work = [[np.array(T.block(i, j)) for j in range(n)] for i in range(n)]
    for i in range(n):
        work[i][i] = work[i][i] + epsilon * np.eye(part.sizes[i])
    L = {}
    complements, mins = [], []
    for k in range(n):
        S = la.hermitize(work[k][k])
        complements.append(S)
        w, U = la.eigh(S)
        mins.append(float(w[0]))
        if w[0] < -thr:
            return SchurChainResult(epsilon, complements, False, k,
                                    _chain_witness(L, part, k, U[:, 0]), mins)
        if w[0] <= sing:
            raise SingularPivot(k, float(w[0]), epsilon)
        Sinv = (U / w) @ U.conj().T
        for i in range(k + 1, n):
            L[(i, k)] = work[i][k] @ Sinv
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                work[i][j] = work[i][j] - L[(i, k)] @ work[k][j]
    return SchurChainResult(epsilon, complements, True, None, None, mins)


def _chain_witness(L, part, k, w):
    """Solve ``L* x = e_k w`` for the unit lower block factor ``L``."""
    slots = [np.zeros(d, dtype=complex) for d in part.sizes]
    slots[k] = w
    for j in range(k - 1, -1, -1):
        acc = np.zeros(part.sizes[j], dtype=complex)
        for i in range(j + 1, k + 1):
            acc += L[(i, j)].conj().T @ slots[i]
        slots[j] = -acc
    x = np.concatenate(slots)
    return x / np.linalg.norm(x)


# --------------------------------------------------------------------- verdict


@dataclass
class PositivityCertificate:
    verdict: Verdict
    method: str
    witness: Optional[ModuleVector] = None
    witness_form: Optional[float] = None
    ratios: Dict[Tuple[int, int], float] = field(default_factory=dict)
    min_eig: Optional[float] = None
    slack: Optional[List[float]] = None
    factor: object = None
    bound: Optional[str] = None
    notes: List[str] = field(default_factory=list)


def witness_form(T: BlockMatrix, x: ModuleVector) -> float:
    """Smallest eigenvalue of ``<Tx, x>`` for a unit witness."""
    return float(la.eigvalsh(quadratic_form(T, x))[0])


def _witness(T, vector):
    x = ModuleVector.from_stacked(vector / np.linalg.norm(vector), T.partition, T.module_rank)
    return x, witness_form(T, x)


def positivity_verdict(
    T: BlockMatrix,
    eps_schedule: Sequence[float] = DEFAULT_EPS_SCHEDULE,
    tol: float = la.PSD_TOL,
    samples: int = 64,
    seed: int = 0,
    use_oracle: bool = True,
) -> PositivityCertificate:
    """Run the decision ladder and return a certificate.

    Order: diagonal check; exact 2x2 cross bound (``n = 2``); slack
    condition (``n >= 3``); Schur chain over the schedule; Gram factor;
    eigen oracle. Certificates of non-positivity always carry a unit witness
    with a negative quadratic form. With ``use_oracle=False`` the last step
    is skipped and undecided inputs come back ``Inconclusive``.
    """
    if not eps_schedule:
        raise ValueError("eps_schedule must be nonempty")
    schedule = sorted((float(e) for e in eps_schedule), reverse=True)
    if schedule[-1] <= 0:
        raise ValueError("eps_schedule entries must be positive")
    norm = T.norm()
    thr = la.psd_threshold(norm, tol)
    notes = []

    def finish(cert):
        if use_oracle:
            lam, vec = min_eig_vector(T)
            cert.min_eig = lam
            if cert.verdict is Verdict.NOT_POSITIVE:
                # the most negative direction is the strongest witness
                cert.witness, cert.witness_form = _witness(T, vec)
        cert.notes = notes
        return cert

    def negative(method, vector, ratios=None):
        x, form = _witness(T, vector)
        if form >= -thr and not use_oracle:
            notes.append(f"{method} witness too weak ({form:.3e})")
            return None
        return finish(PositivityCertificate(Verdict.NOT_POSITIVE, method, x, form, ratios or {}))

    lmins = []
    for i in range(T.n):
        w, U = la.eigh(T.block(i, i))
        lmins.append(float(w[0]))
        if w[0] < -thr:
            vec = np.zeros(T.partition.total, dtype=complex)
            vec[T.partition.slice(i)] = U[:, 0]
            notes.append(f"diagonal block {i} has eigenvalue {w[0]:.3e}")
            cert = negative("eigen-oracle", vec)
            if cert is not None:
                return cert
    if T.n == 1:
        return finish(PositivityCertificate(Verdict.POSITIVE, "eigen-oracle", min_eig=lmins[0]))

    report = cross_entry_check(T, samples=samples, seed=seed, tol=tol)
    ratios = report.ratios
    pd = min(lmins) > 1e-9 * max(1.0, norm)
    slack = report.slack(T.n)
    if pd and T.n == 2 and ratios[(0, 1)] <= 1.0 + RATIO_TOL:
        return finish(PositivityCertificate(Verdict.POSITIVE, "cross-entry-2x2", ratios=ratios, slack=slack))
    if pd and T.n >= 3 and max(slack) <= 1.0 + RATIO_TOL:
        return finish(PositivityCertificate(Verdict.POSITIVE, "cross-entry-slack", ratios=ratios, slack=slack))
    if not pd:
        notes.append("a diagonal block is singular; cross-entry certificates skipped")

    chain_ok = True
    for eps in schedule:
        try:
            res = schur_chain(T, eps, tol)
        except SingularPivot as exc:
            notes.append(str(exc))
            chain_ok = False
            break
        if not res.positive:
            cert = negative("schur-chain", res.witness, ratios)
            if cert is not None:
                cert.slack = slack
                return cert
            chain_ok = False
            break
    if chain_ok:
        if schedule[-1] <= thr:
            return finish(PositivityCertificate(Verdict.POSITIVE, "schur-chain", ratios=ratios, slack=slack))
        notes.append(f"chain positive down to eps={schedule[-1]:.1e}, above the tolerance {thr:.1e}")

    from .gramfactor import gram_factor  # local: gramfactor imports nothing from here

    try:
        factor = gram_factor(T, delta=thr)
    except GramCertError as exc:
        notes.append(f"gram factor failed: {exc}")
    else:
        return finish(PositivityCertificate(Verdict.POSITIVE, "gram-factor", ratios=ratios,
                                            slack=slack, factor=factor))

    if use_oracle:
        lam, vec = min_eig_vector(T)
        if lam >= -thr:
            return finish(PositivityCertificate(Verdict.POSITIVE, "eigen-oracle", ratios=ratios, slack=slack))
        x, form = _witness(T, vec)
        return finish(PositivityCertificate(Verdict.NOT_POSITIVE, "eigen-oracle", x, form, ratios, slack=slack))
    return finish(PositivityCertificate(
        Verdict.INCONCLUSIVE, "schur-chain", ratios=ratios, slack=slack,
        bound=f"row slack max {max(slack):.6g} > 1 and no chain/factor certificate at tolerance {thr:.1e}",
    ))
