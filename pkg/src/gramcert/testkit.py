"""Seeded instance generators with ground truth, and small brute-force oracles.

Each :class:`InstanceSpec` maps to one instance through streams keyed by
``(seed, kind, draw site)``, so equal specs give bit-identical instances.
``generate`` checks each instance against its kind's defining property
before returning it.

``sizes`` means, per kind:

- block kinds (``psd-from-factor``, ``indefinite-shifted``, ``rank-one-coupled``):
  the block dimensions ``d_1..d_n``;
- ``normal``: ``[d]``; ``single-singular-value``: ``[m, p]`` (T is m x p);
- ``douglas-*``: ``[m, p, q]`` with A m x p and C m x q;
- ``coercive-pair``: ``[d1, d2]``.
"""

import json
import os
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from . import _linalg as la
from ._rng import keyed_rng
from .blockmat import BlockMatrix, BlockPartition, assemble
from .douglas import DouglasInstance, range_inclusion_check
from .errors import GramCertError, InvalidSpec
from .schwarz import SchwarzProblem
from .spectral import CoercivityInstance, gamma_exact

KINDS = (
    "psd-from-factor",
    "indefinite-shifted",
    "rank-one-coupled",
    "normal",
    "single-singular-value",
    "douglas-solvable",
    "douglas-unsolvable",
    "coercive-pair",
)
BLOCK_KINDS = KINDS[:3]
_SIZE_COUNT = {"normal": 1, "single-singular-value": 2, "douglas-solvable": 3,
               "douglas-unsolvable": 3, "coercive-pair": 2}

EXAMPLE41 = {
    "diagonals": ((2.0, 1.0), (1.0, 3.0), (4.0, 2.0)),
    "u": {(0, 1): (0.5, 0.3), (0, 2): (0.6, 0.1), (1, 2): (0.2, 0.7)},
    "v": {(0, 1): (0.4, 0.2), (0, 2): (0.3, 0.5), (1, 2): (0.1, 0.6)},
}


@dataclass(frozen=True)
class InstanceSpec:
    seed: int
    kind: str
    n: Optional[int] = None
    sizes: Optional[Tuple[int, ...]] = None
    module_rank: int = 1
    params: Dict[str, Any] = field(default_factory=dict)

    def to_json(self) -> Dict[str, Any]:
        d = asdict(self)
        d["sizes"] = None if self.sizes is None else list(self.sizes)
        return d

    @classmethod
    def from_json(cls, obj) -> "InstanceSpec":
        sizes = obj.get("sizes")
        return cls(int(obj["seed"]), obj["kind"], obj.get("n"), None if sizes is None else tuple(sizes),
                   int(obj.get("module_rank", 1)), dict(obj.get("params", {})))


def _complex_gaussian(rng, shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def _haar_unitary(rng, d):
    Q, R = np.linalg.qr(_complex_gaussian(rng, (d, d)))
    ph = np.diag(R)
    return Q * (ph / np.abs(ph))


def _resolve_sizes(spec: InstanceSpec) -> Tuple[int, ...]:
    if spec.kind not in KINDS:
        raise InvalidSpec(f"unknown kind {spec.kind!r}")
    if spec.module_rank < 1:
        raise InvalidSpec("module_rank must be positive")
    if spec.sizes is not None:
        sizes = tuple(int(d) for d in spec.sizes)
        if not sizes or any(d < 1 for d in sizes):
            raise InvalidSpec(f"sizes must be positive, got {spec.sizes}")
        if spec.n is not None and spec.kind in BLOCK_KINDS and spec.n != len(sizes):
            raise InvalidSpec(f"n = {spec.n} but {len(sizes)} sizes given")
    else:
        rng = keyed_rng(spec.seed, spec.kind, 0)
        if spec.kind in BLOCK_KINDS:
            n = spec.n if spec.n is not None else int(rng.integers(2, 7))
            if n < 1:
                raise InvalidSpec("n must be positive")
            sizes = tuple(int(d) for d in rng.integers(1, 6, size=n))
        else:
            sizes = tuple(int(d) for d in rng.integers(1, 9, size=_SIZE_COUNT[spec.kind]))
    want = _SIZE_COUNT.get(spec.kind)
    if want is not None and len(sizes) != want:
        raise InvalidSpec(f"kind {spec.kind} needs {want} sizes, got {len(sizes)}")
    return sizes


# ------------------------------------------------------------------ kinds


def _psd_from_factor(spec, sizes):
    part = BlockPartition(sizes)
    total = part.total
    rank = int(spec.params.get("rank", total))
    if not 1 <= rank <= total:
        raise InvalidSpec(f"rank must lie in 1..{total}")
    rng = keyed_rng(spec.seed, spec.kind, 1)
    X = _complex_gaussian(rng, (total, rank)) / np.sqrt(2 * rank)
    shift = float(spec.params.get("shift", 0.0))
    if shift < 0:
        raise InvalidSpec("shift must be nonnegative")
    # mirror the lower triangle so T is exactly Hermitian
    G = X @ X.conj().T + shift * np.eye(total)
    G = np.tril(G) + np.tril(G, -1).conj().T
    G[np.diag_indices(total)] = G.diagonal().real
    T = BlockMatrix.from_dense(G, part, spec.module_rank)
    return T, {"X": X, "rank": rank, "shift": shift, "min_eig": _min_eig(T), "psd": True}


def _indefinite_shifted(spec, sizes):
    base, truth = _psd_from_factor(InstanceSpec(spec.seed, "psd-from-factor", None, sizes,
                                                spec.module_rank, spec.params), sizes)
    rng = keyed_rng(spec.seed, spec.kind, 2)
    margin = float(spec.params.get("margin", rng.uniform(0.1, 1.0)))
    if margin <= 0.1:
        raise InvalidSpec("margin must exceed 0.1")
    mu = truth["min_eig"] + margin
    T = base.shifted(-mu)
    return T, {"X": truth["X"], "mu": mu, "min_eig": _min_eig(T), "psd": False}


def _rank_one_coupled(spec, sizes):
    coupling = float(spec.params.get("coupling", 1.0))
    if spec.params.get("preset") == "example41":
        if tuple(sizes) != (2, 2, 2):
            raise InvalidSpec("the example41 preset has sizes (2, 2, 2)")
        diag = [np.diag(np.array(d, dtype=complex)) for d in EXAMPLE41["diagonals"]]
        us = {k: np.array(v, dtype=complex) for k, v in EXAMPLE41["u"].items()}
        vs = {k: np.array(v, dtype=complex) for k, v in EXAMPLE41["v"].items()}
    else:
        rng = keyed_rng(spec.seed, spec.kind, 1)
        diag = [np.diag(rng.uniform(0.5, 4.0, size=d)).astype(complex) for d in sizes]
        us, vs = {}, {}
        n = len(sizes)
        for i in range(n):
            for j in range(i + 1, n):
                r = keyed_rng(spec.seed, spec.kind, 2, i, j)
                us[(i, j)] = _complex_gaussian(r, sizes[i]) / np.sqrt(2 * sizes[i])
                vs[(i, j)] = _complex_gaussian(r, sizes[j]) / np.sqrt(2 * sizes[j])
    blocks = {(i, i): d for i, d in enumerate(diag)}
    for (i, j), u in us.items():
        # T_ij = c u v* above the diagonal, stored as its adjoint below
        blocks[(j, i)] = (coupling * np.outer(u, vs[(i, j)].conj())).conj().T
    T = assemble(blocks, BlockPartition(tuple(sizes)), spec.module_rank)
    lmin = [float(np.min(d.diagonal().real)) for d in diag]
    coeffs = {k: (coupling**2 * np.linalg.norm(us[k]) ** 2 * np.linalg.norm(vs[k]) ** 2) / (lmin[k[0]] * lmin[k[1]])
              for k in us}
    lam = _min_eig(T)
    return T, {"u": us, "v": vs, "coupling": coupling, "coefficients": coeffs, "min_eig": lam,
               "psd": lam >= -la.psd_threshold(T.norm())}


def _normal(spec, sizes):
    (d,) = sizes
    rng = keyed_rng(spec.seed, spec.kind, 1)
    lam = _complex_gaussian(rng, d)
    U = _haar_unitary(rng, d)
    T = (U * lam) @ U.conj().T
    alpha = float(spec.params.get("alpha", 0.5))
    sigma1 = float(np.max(np.abs(lam)))
    return SchwarzProblem(T, alpha), {"eigenvalues": lam, "sigma1": sigma1, "constant": sigma1 ** (1 - alpha)}


def _single_singular_value(spec, sizes):
    m, p = sizes
    rng = keyed_rng(spec.seed, spec.kind, 1)
    r = int(spec.params.get("rank", min(m, p)))
    if not 1 <= r <= min(m, p):
        raise InvalidSpec(f"rank must lie in 1..{min(m, p)}")
    sigma = float(spec.params.get("sigma", rng.uniform(0.5, 3.0)))
    if sigma <= 0:
        raise InvalidSpec("sigma must be positive")
    U = _haar_unitary(rng, m)[:, :r]
    V = _haar_unitary(rng, p)[:, :r]
    alpha = float(spec.params.get("alpha", 0.5))
    return SchwarzProblem(sigma * U @ V.conj().T, alpha), {"sigma1": sigma, "rank": r,
                                                          "constant": sigma ** (1 - alpha)}


def _douglas_A(rng, m, p, r):
    s = rng.uniform(0.5, 2.0, size=r)
    U = _haar_unitary(rng, m)
    V = _haar_unitary(rng, p)
    return (U[:, :r] * s) @ V[:, :r].conj().T, U, s


def _douglas(spec, sizes):
    m, p, q = sizes
    solvable = spec.kind == "douglas-solvable"
    rng = keyed_rng(spec.seed, spec.kind, 1)
    max_rank = min(m, p) if solvable else min(m - 1, p)
    if max_rank < 1:
        raise InvalidSpec("douglas-unsolvable needs m >= 2 so range(A) has a complement")
    r = int(spec.params.get("rank", rng.integers(1, max_rank + 1)))
    if not 1 <= r <= max_rank:
        raise InvalidSpec(f"rank must lie in 1..{max_rank}")
    A, U, s = _douglas_A(rng, m, p, r)
    X0 = _complex_gaussian(rng, (p, q)) / np.sqrt(2)
    C = A @ X0
    truth = {"rank": r, "singular_values": s, "X0": X0}
    if not solvable:
        W = U[:, r:]
        N = W @ _complex_gaussian(rng, (m - r, q)) / np.sqrt(2)
        N *= float(spec.params.get("offset", rng.uniform(0.5, 2.0))) / la.spectral_norm(N)
        C = C + N
        truth = {"rank": r, "singular_values": s, "orthogonal_residual": la.spectral_norm(N)}
    return DouglasInstance(A, C), truth


def _coercive_pair(spec, sizes):
    d1, d2 = sizes
    rng = keyed_rng(spec.seed, spec.kind, 1)
    a = float(spec.params.get("a", rng.uniform(0.1, 5.0)))
    c = float(spec.params.get("c", rng.uniform(0.1, 5.0)))
    gamma = float(spec.params.get("gamma", rng.uniform(0.0, 0.99)))
    if a <= 0 or c <= 0 or not 0.0 <= gamma < 1.0:
        raise InvalidSpec("need a, c > 0 and 0 <= gamma < 1")

    def hermitian_with_min(lo, d):
        w = lo + np.concatenate([[0.0], rng.uniform(0.0, 3.0, size=d - 1)])
        Q = _haar_unitary(rng, d)
        return (Q * w) @ Q.conj().T

    A = la.hermitize(hermitian_with_min(a, d1))
    C = la.hermitize(hermitian_with_min(c, d2))
    G = _complex_gaussian(rng, (d1, d2))
    G *= np.sqrt(gamma) / la.spectral_norm(G)
    B = la.hermitian_function(A, np.sqrt) @ G @ la.hermitian_function(C, np.sqrt)
    inst = CoercivityInstance(A, B, C, a, c)
    return inst, {"a": a, "c": c, "gamma": gamma}


_BUILDERS = {
    "psd-from-factor": _psd_from_factor,
    "indefinite-shifted": _indefinite_shifted,
    "rank-one-coupled": _rank_one_coupled,
    "normal": _normal,
    "single-singular-value": _single_singular_value,
    "douglas-solvable": _douglas,
    "douglas-unsolvable": _douglas,
    "coercive-pair": _coercive_pair,
}


def _min_eig(T: BlockMatrix) -> float:
    return float(la.eigvalsh(T.entries)[0])


def _verify(spec, inst, truth):
    kind = spec.kind
    if kind == "psd-from-factor":
        return truth["min_eig"] >= -1e-10 * max(1.0, inst.norm())
    if kind == "indefinite-shifted":
        return truth["min_eig"] < -0.1
    if kind == "rank-one-coupled":
        T = inst
        return all(np.linalg.matrix_rank(T.block(i, j)) <= 1 for i in range(T.n) for j in range(i))
    if kind in ("normal", "single-singular-value"):
        s = np.linalg.svd(inst.T, compute_uv=False)
        ok = abs(s[0] - truth["sigma1"]) <= 1e-10 * max(1.0, truth["sigma1"])
        if kind == "normal":
            ok &= la.spectral_norm(inst.T @ inst.T.conj().T - inst.T.conj().T @ inst.T) <= 1e-10 * max(1.0, s[0] ** 2)
        else:
            ok &= bool(np.all(np.abs(s[: truth["rank"]] - truth["sigma1"]) <= 1e-10 * truth["sigma1"]))
        return ok
    if kind == "douglas-solvable":
        return la.spectral_norm(inst.A @ truth["X0"] - inst.C) <= 1e-10 * max(1.0, la.spectral_norm(inst.C))
    if kind == "douglas-unsolvable":
        return not range_inclusion_check(inst)[0]
    if kind == "coercive-pair":
        return abs(gamma_exact(inst) - truth["gamma"]) <= 1e-9
    return False


def generate(spec: InstanceSpec):
    """Return ``(instance, truth)`` for ``spec``, after the kind's own oracle check."""
    sizes = _resolve_sizes(spec)
    try:
        inst, truth = _BUILDERS[spec.kind](spec, sizes)
    except InvalidSpec:
        raise
    except (GramCertError, ValueError, np.linalg.LinAlgError) as exc:
        raise InvalidSpec(f"could not build {spec.kind}: {exc}") from exc
    truth = {"kind": spec.kind, "sizes": list(sizes), **truth}
    if not _verify(spec, inst, truth):
        raise InvalidSpec(f"generated {spec.kind} instance failed its ground-truth check")
    return inst, truth


def positivity_corpus(count: int, seed: int = 0) -> List[InstanceSpec]:
    """Mixed PSD / indefinite block instances with ``n <= 6``, ``d_i <= 5``, ``k in {1, 2}``."""
    out = []
    for idx in range(count):
        rng = keyed_rng(seed, "positivity-corpus", idx)
        n = int(rng.integers(1, 7))
        sizes = tuple(int(d) for d in rng.integers(1, 6, size=n))
        k = int(rng.integers(1, 3))
        total = sum(sizes)
        pick = rng.uniform()
        if pick < 0.4:
            rank = total if rng.uniform() < 0.7 else int(rng.integers(1, total + 1))
            spec = InstanceSpec(idx, "psd-from-factor", n, sizes, k, {"rank": rank})
        elif pick < 0.8:
            spec = InstanceSpec(idx, "indefinite-shifted", n, sizes, k)
        else:
            spec = InstanceSpec(idx, "rank-one-coupled", n, sizes, k,
                                {"coupling": float(rng.choice([0.5, 1.0, 2.0, 4.0]))})
        out.append(spec)
    return out


def numerical_radius_sampled(T, samples: int, seed: int = 0, trace: bool = False):
    """Running maximum of ``|<Tx, x>|`` over seeded unit vectors (a lower bound on ``w(T)``)."""
    if samples < 1:
        raise ValueError("samples must be at least 1")
    T = np.atleast_2d(np.asarray(T, dtype=complex))
    rng = keyed_rng(seed, "numerical-radius", T.shape[0])
    X = la.unit_vectors(rng, samples, T.shape[0])
    vals = np.abs(np.einsum("ni,ij,nj->n", X.conj(), T, X))
    running = np.maximum.accumulate(vals)
    return running if trace else float(running[-1])


# ----------------------------------------------------------------- corpus


def _truth_to_json(v):
    from .serialize import encode_matrix, number
    if isinstance(v, np.ndarray):
        if v.ndim == 1:
            return {"vector": [[float(z.real), float(z.imag)] for z in v.astype(complex)]}
        return {"matrix": encode_matrix(v)}
    if isinstance(v, dict):
        return {(",".join(str(i + 1) for i in k) if isinstance(k, tuple) else str(k)): _truth_to_json(x)
                for k, x in v.items()}
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (float, np.floating)):
        return number(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (list, tuple)):
        return [_truth_to_json(x) for x in v]
    return v


def instance_to_json(inst) -> Dict[str, Any]:
    from . import serialize as ser
    if isinstance(inst, BlockMatrix):
        return ser.blockmatrix_to_json(inst)
    if isinstance(inst, SchwarzProblem):
        return {"matrix": ser.encode_matrix(inst.T), "alpha": inst.alpha}
    if isinstance(inst, DouglasInstance):
        return ser.douglas_input_to_json(inst)
    if isinstance(inst, CoercivityInstance):
        return ser.coercivity_input_to_json(inst)
    raise TypeError(f"cannot serialize {type(inst).__name__}")


def instance_from_json(kind: str, obj):
    from . import serialize as ser
    if kind in BLOCK_KINDS:
        return ser.blockmatrix_from_json(obj)
    if kind in ("normal", "single-singular-value"):
        return SchwarzProblem(ser.dense_from_json(obj), float(obj.get("alpha", 0.5)))
    if kind.startswith("douglas"):
        return ser.douglas_from_json(obj)
    if kind == "coercive-pair":
        return ser.coercivity_from_json(obj)
    raise InvalidSpec(f"unknown kind {kind!r}")


def export_corpus(specs, directory: str) -> List[str]:
    """Write ``NNNN.json`` (instance) and ``NNNN.truth.json`` (spec plus ground truth) per spec."""
    from .serialize import dumps
    os.makedirs(directory, exist_ok=True)
    names = []
    for idx, spec in enumerate(specs):
        inst, truth = generate(spec)
        name = f"{idx:04d}"
        with open(os.path.join(directory, name + ".json"), "w") as fh:
            fh.write(dumps(instance_to_json(inst)))
        with open(os.path.join(directory, name + ".truth.json"), "w") as fh:
            fh.write(dumps({"spec": spec.to_json(), "truth": _truth_to_json(truth)}))
        names.append(name)
    return names


def import_corpus(directory: str):
    """Yield ``(spec, instance, truth_json)`` for each exported entry, in name order."""
    from .serialize import loads
    for fname in sorted(os.listdir(directory)):
        if not fname.endswith(".truth.json"):
            continue
        base = fname[: -len(".truth.json")]
        with open(os.path.join(directory, fname)) as fh:
            side = loads(fh.read())
        with open(os.path.join(directory, base + ".json")) as fh:
            obj = loads(fh.read())
        spec = InstanceSpec.from_json(side["spec"])
        yield spec, instance_from_json(spec.kind, obj), side["truth"]


def spec_from_json_text(text: str) -> InstanceSpec:
    try:
        return InstanceSpec.from_json(json.loads(text))
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidSpec(f"bad spec: {exc}") from None
