"""Partitioned Hermitian matrices and M_k-valued module vectors.

Block indices in the Python API are 0-based. The JSON format (see
:mod:`gramcert.serialize`) uses 1-based ``"i,j"`` keys.

A module vector ``x = (x_1, ..., x_n)`` over the algebra ``M_k`` stores each
slot as a ``d_i x k`` complex matrix; its inner product with ``y`` is the
``k x k`` matrix ``sum_i x_i* y_i``. ``k = 1`` recovers ordinary vectors.
"""

from dataclasses import dataclass, field
from typing import Mapping, Sequence, Tuple

import numpy as np

from ._linalg import HERMITIAN_TOL, hermitian_defect, spectral_norm
from .errors import (
    BlockIndexError,
    NotHermitian,
    NotHermitianDiagonal,
    PartitionMismatch,
    ShapeMismatch,
)


@dataclass(frozen=True)
class BlockPartition:
    sizes: Tuple[int, ...]
    offsets: Tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        sizes = tuple(int(d) for d in self.sizes)
        if not sizes:
            raise ShapeMismatch("a partition needs at least one block")
        if any(d < 1 for d in sizes):
            raise ShapeMismatch(f"block sizes must be positive, got {sizes}")
        object.__setattr__(self, "sizes", sizes)
        object.__setattr__(self, "offsets", tuple(np.concatenate([[0], np.cumsum(sizes)]).tolist()))

    @property
    def n(self) -> int:
        return len(self.sizes)

    @property
    def total(self) -> int:
        return self.offsets[-1]

    def slice(self, i: int) -> slice:
        if not 0 <= i < self.n:
            raise BlockIndexError(f"block index {i} outside 0..{self.n - 1}")
        return slice(self.offsets[i], self.offsets[i + 1])


def _as_partition(partition) -> BlockPartition:
    if isinstance(partition, BlockPartition):
        return partition
    return BlockPartition(tuple(partition))


@dataclass(frozen=True, eq=False)
class BlockMatrix:
    """Dense Hermitian matrix with explicit block boundaries.

    ``entries`` is one read-only column-major array; :meth:`block` returns
    views into it.
    """

    partition: BlockPartition
    entries: np.ndarray
    hermitian_checked: bool = False
    module_rank: int = 1

    def __post_init__(self):
        entries = np.asfortranarray(np.array(self.entries, dtype=complex))
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)
        total = self.partition.total
        if entries.shape != (total, total):
            raise ShapeMismatch(f"entries shape {entries.shape} does not match partition total {total}")
        if int(self.module_rank) < 1:
            raise ShapeMismatch("module_rank must be positive")

    @classmethod
    def from_dense(cls, entries, partition, module_rank=1, tol=HERMITIAN_TOL) -> "BlockMatrix":
        """Wrap a full dense matrix after checking it is Hermitian."""
        entries = np.asarray(entries, dtype=complex)
        defect = hermitian_defect(entries)
        if defect > tol:
            raise NotHermitian(f"matrix is not Hermitian (relative defect {defect:.2e})")
        return cls(_as_partition(partition), entries, True, module_rank)

    @property
    def n(self) -> int:
        return self.partition.n

    def block(self, i: int, j: int) -> np.ndarray:
        return self.entries[self.partition.slice(i), self.partition.slice(j)]

    def diagonal_blocks(self):
        return [self.block(i, i) for i in range(self.n)]

    def norm(self) -> float:
        return spectral_norm(self.entries)

    def shifted(self, epsilon: float) -> "BlockMatrix":
        """The matrix with every diagonal block ``T_ii`` replaced by ``T_ii + eps I``."""
        shifted = np.array(self.entries) + epsilon * np.eye(self.partition.total)
        return BlockMatrix(self.partition, shifted, self.hermitian_checked, self.module_rank)

    def lower_blocks(self):
        """``{(i, j): T_ij}`` for ``i >= j``; copies, not views."""
        return {(i, j): np.array(self.block(i, j)) for i in range(self.n) for j in range(i + 1)}


def assemble(blocks: Mapping[Tuple[int, int], np.ndarray], partition, module_rank: int = 1) -> BlockMatrix:
    """Build the full Hermitian matrix from its lower-triangular blocks.

    Missing blocks are zero. Upper blocks are filled with adjoints, so
    ``T_ij = T_ji*`` holds exactly for ``i < j``.
    """
    partition = _as_partition(partition)
    total = partition.total
    entries = np.zeros((total, total), dtype=complex, order="F")
    for (i, j), blk in blocks.items():
        if not (0 <= i < partition.n and 0 <= j < partition.n):
            raise BlockIndexError(f"block ({i},{j}) outside a {partition.n}-block partition")
        if i < j:
            raise BlockIndexError(f"only lower blocks (i >= j) may be supplied, got ({i},{j})")
        blk = np.atleast_2d(np.asarray(blk, dtype=complex))
        want = (partition.sizes[i], partition.sizes[j])
        if blk.shape != want:
            raise ShapeMismatch(f"block ({i},{j}) has shape {blk.shape}, expected {want}")
        if i == j:
            defect = hermitian_defect(blk)
            if defect > HERMITIAN_TOL:
                raise NotHermitianDiagonal(f"diagonal block {i} not Hermitian (defect {defect:.2e})")
        entries[partition.slice(i), partition.slice(j)] = blk
        if i != j:
            entries[partition.slice(j), partition.slice(i)] = blk.conj().T
    return BlockMatrix(partition, entries, True, module_rank)


@dataclass(frozen=True, eq=False)
class RankOneBlock:
    """The outer product ``u v*``."""

    u: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "u", np.asarray(self.u, dtype=complex).ravel())
        object.__setattr__(self, "v", np.asarray(self.v, dtype=complex).ravel())

    def matrix(self) -> np.ndarray:
        return np.outer(self.u, self.v.conj())

    def norm(self) -> float:
        return float(np.linalg.norm(self.u) * np.linalg.norm(self.v))


@dataclass(frozen=True, eq=False)
class ModuleVector:
    partition: BlockPartition
    module_rank: int
    slots: Tuple[np.ndarray, ...]

    def __post_init__(self):
        k = int(self.module_rank)
        slots = []
        for i, s in enumerate(self.slots):
            s = np.asarray(s, dtype=complex)
            if s.ndim == 1:
                s = s[:, None]
            if s.shape != (self.partition.sizes[i], k):
                raise ShapeMismatch(
                    f"slot {i} has shape {s.shape}, expected {(self.partition.sizes[i], k)}"
                )
            s = s.copy()
            s.setflags(write=False)
            slots.append(s)
        if len(slots) != self.partition.n:
            raise ShapeMismatch(f"{len(slots)} slots for a {self.partition.n}-block partition")
        object.__setattr__(self, "slots", tuple(slots))

    @classmethod
    def from_stacked(cls, X, partition, module_rank=None) -> "ModuleVector":
        """Split a ``total x k`` matrix (or a length-``total`` vector) into slots."""
        partition = _as_partition(partition)
        X = np.asarray(X, dtype=complex)
        if X.ndim == 1:
            X = X[:, None]
        k = X.shape[1] if module_rank is None else module_rank
        if X.shape[1] < k:
            X = np.hstack([X, np.zeros((X.shape[0], k - X.shape[1]), dtype=complex)])
        return cls(partition, k, tuple(X[partition.slice(i)] for i in range(partition.n)))

    def stacked(self) -> np.ndarray:
        return np.vstack(self.slots)

    def norm(self) -> float:
        """``||<x, x>||^{1/2}``."""
        return float(np.sqrt(spectral_norm(inner_product(self, self))))


def inner_product(x: ModuleVector, y: ModuleVector) -> np.ndarray:
    if x.partition != y.partition or x.module_rank != y.module_rank:
        raise PartitionMismatch("module vectors live on different partitions or ranks")
    return sum(a.conj().T @ b for a, b in zip(x.slots, y.slots))


def quadratic_form(T: BlockMatrix, x: ModuleVector) -> np.ndarray:
    """The ``k x k`` matrix ``<Tx, x>``."""
    if x.partition != T.partition:
        raise PartitionMismatch("vector partition differs from the matrix partition")
    X = x.stacked()
    Q = X.conj().T @ T.entries @ X
    return 0.5 * (Q + Q.conj().T)


def cross_entry_value(T: BlockMatrix, i: int, j: int, x_i, x_j) -> float:
    """``||<T_ij x_j, x_i>|| = ||x_i* T_ij x_j||_2``."""
    if i == j:
        raise BlockIndexError("cross entries need i != j")
    Tij = T.block(i, j)
    x_i = np.asarray(x_i, dtype=complex)
    x_j = np.asarray(x_j, dtype=complex)
    if x_i.ndim == 1:
        x_i = x_i[:, None]
    if x_j.ndim == 1:
        x_j = x_j[:, None]
    if x_i.shape[0] != Tij.shape[0] or x_j.shape[0] != Tij.shape[1] or x_i.shape[1] != x_j.shape[1]:
        raise ShapeMismatch(
            f"slots {x_i.shape}, {x_j.shape} do not fit block ({i},{j}) of shape {Tij.shape}"
        )
    return spectral_norm(x_i.conj().T @ Tij @ x_j)


def block_diag(blocks: Sequence[np.ndarray], module_rank: int = 1) -> BlockMatrix:
    return assemble({(i, i): b for i, b in enumerate(blocks)},
                    [np.atleast_2d(b).shape[0] for b in blocks], module_rank)
