#!/usr/bin/env python3
"""
Dense Hermitian operators, density matrices and product vectors.

Every operator carries the dimensions of its subsystems. Values are immutable
after construction: entries are stored in read-only arrays and all operations
return new objects.
"""

import logging
import string
from dataclasses import dataclass
from enum import Enum
from functools import reduce
from typing import Iterable, Optional, Sequence, Tuple, Union

import numpy as np
import scipy.linalg as spla

from gme_config import tolerances
from gme_errors import (
    DimensionMismatchError,
    InvalidParameterError,
    NonFiniteError,
    NotHermitianError,
    NotPositiveError,
    SubsystemError,
)

logger = logging.getLogger(__name__)

_LETTERS = string.ascii_letters


class Field(str, Enum):
    """Number field of a product vector."""

    COMPLEX = "complex"
    REAL = "real"


def _readonly(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class HermitianOperator:
    """Square complex matrix equal to its conjugate transpose, with subsystem dimensions."""

    entries: np.ndarray
    subsystem_dims: Tuple[int, ...]

    def __post_init__(self):
        entries = np.array(self.entries, dtype=np.complex128)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
            raise DimensionMismatchError(f"Operator must be square, got shape {entries.shape}")
        if not np.all(np.isfinite(entries)):
            raise NonFiniteError("Operator has non-finite entries")

        dims = tuple(int(d) for d in self.subsystem_dims)
        if not dims or any(d < 1 for d in dims) or int(np.prod(dims)) != entries.shape[0]:
            raise DimensionMismatchError(
                f"Subsystem dims {dims} do not multiply to dimension {entries.shape[0]}"
            )

        deviation = float(np.max(np.abs(entries - entries.conj().T)))
        if deviation > tolerances().hermiticity:
            raise NotHermitianError(f"Operator deviates from Hermitian by {deviation:.3e}")
        # Exact symmetrization: later eigensolvers and contractions see a Hermitian array.
        entries = (entries + entries.conj().T) / 2

        object.__setattr__(self, "entries", _readonly(entries))
        object.__setattr__(self, "subsystem_dims", dims)

    @classmethod
    def from_array(cls, array, subsystem_dims: Optional[Sequence[int]] = None) -> "HermitianOperator":
        array = np.asarray(array)
        if subsystem_dims is None:
            subsystem_dims = (array.shape[0],)
        return cls(array, tuple(subsystem_dims))

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def trace(self) -> float:
        return float(np.trace(self.entries).real)

    def eigenvalues(self) -> np.ndarray:
        """Ascending real spectrum."""
        return spla.eigvalsh(self.entries)

    def is_psd(self, tol: Optional[float] = None) -> bool:
        tol = tolerances().psd if tol is None else tol
        return bool(self.eigenvalues()[0] >= -tol)

    def with_dims(self, subsystem_dims: Sequence[int]) -> "HermitianOperator":
        return HermitianOperator(self.entries, tuple(subsystem_dims))

    def conjugate_by(self, unitary: np.ndarray) -> "HermitianOperator":
        """U M U^dagger with the same subsystem structure."""
        unitary = np.asarray(unitary)
        return HermitianOperator(unitary @ self.entries @ unitary.conj().T, self.subsystem_dims)

    def _check_compatible(self, other: "HermitianOperator"):
        if self.subsystem_dims != other.subsystem_dims:
            raise DimensionMismatchError(
                f"Subsystem dims differ: {self.subsystem_dims} vs {other.subsystem_dims}"
            )

    def __add__(self, other):
        other = as_operator(other)
        self._check_compatible(other)
        return HermitianOperator(self.entries + other.entries, self.subsystem_dims)

    def __sub__(self, other):
        other = as_operator(other)
        self._check_compatible(other)
        return HermitianOperator(self.entries - other.entries, self.subsystem_dims)

    def __mul__(self, scalar):
        if not np.isrealobj(scalar):
            raise InvalidParameterError("Hermitian operators may only be scaled by real numbers")
        return HermitianOperator(float(scalar) * self.entries, self.subsystem_dims)

    __rmul__ = __mul__

    def __repr__(self):
        return f"HermitianOperator(dim={self.dim}, subsystem_dims={self.subsystem_dims})"


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Positive semidefinite unit-trace Hermitian operator."""

    op: HermitianOperator

    def __post_init__(self):
        tol = tolerances()
        if not isinstance(self.op, HermitianOperator):
            raise InvalidParameterError("DensityMatrix wraps a HermitianOperator")
        trace = np.trace(self.op.entries).real
        if abs(trace - 1.0) > tol.trace:
            raise InvalidParameterError(f"Density matrix trace is {trace!r}, expected 1")
        smallest = self.op.eigenvalues()[0]
        if smallest < -tol.psd:
            raise NotPositiveError(f"Density matrix has eigenvalue {smallest:.3e}")

    @classmethod
    def from_array(cls, array, subsystem_dims: Optional[Sequence[int]] = None) -> "DensityMatrix":
        return cls(HermitianOperator.from_array(array, subsystem_dims))

    @classmethod
    def from_pure(cls, vector, subsystem_dims: Optional[Sequence[int]] = None) -> "DensityMatrix":
        vector = np.asarray(vector, dtype=np.complex128)
        vector = vector / np.linalg.norm(vector)
        return cls.from_array(np.outer(vector, vector.conj()), subsystem_dims)

    @property
    def entries(self) -> np.ndarray:
        return self.op.entries

    @property
    def dim(self) -> int:
        return self.op.dim

    @property
    def subsystem_dims(self) -> Tuple[int, ...]:
        return self.op.subsystem_dims

    def trace(self) -> float:
        return self.op.trace()

    def eigenvalues(self) -> np.ndarray:
        return self.op.eigenvalues()

    def purity(self) -> float:
        return float(np.real(np.vdot(self.entries, self.entries)))

    def __repr__(self):
        return f"DensityMatrix(dim={self.dim}, subsystem_dims={self.subsystem_dims})"


OperatorLike = Union[HermitianOperator, DensityMatrix]


def as_operator(m: OperatorLike) -> HermitianOperator:
    if isinstance(m, DensityMatrix):
        return m.op
    if isinstance(m, HermitianOperator):
        return m
    raise InvalidParameterError(f"Expected an operator, got {type(m).__name__}")


def _rewrap(template: OperatorLike, op: HermitianOperator) -> OperatorLike:
    """Return ``op`` as a DensityMatrix when ``template`` was one."""
    if isinstance(template, DensityMatrix):
        return DensityMatrix(op)
    return op


@dataclass(frozen=True, eq=False)
class UnitVector:
    """Normalized vector; real-field vectors have exactly zero imaginary parts."""

    entries: np.ndarray
    field: Field = Field.COMPLEX

    def __post_init__(self):
        entries = np.array(self.entries, dtype=np.complex128)
        if entries.ndim != 1 or entries.size == 0:
            raise DimensionMismatchError("UnitVector entries must be a nonempty 1-D array")
        if not np.all(np.isfinite(entries)):
            raise NonFiniteError("UnitVector has non-finite entries")
        norm = np.linalg.norm(entries)
        if abs(norm - 1.0) > tolerances().unit_norm:
            raise InvalidParameterError(f"UnitVector norm is {norm!r}")
        field = Field(self.field)
        if field is Field.REAL and np.any(entries.imag != 0):
            raise InvalidParameterError("Real UnitVector has nonzero imaginary parts")
        object.__setattr__(self, "entries", _readonly(entries))
        object.__setattr__(self, "field", field)

    @classmethod
    def normalized(cls, array, field: Field = Field.COMPLEX) -> "UnitVector":
        array = np.asarray(array)
        if Field(field) is Field.REAL:
            if np.iscomplexobj(array) and np.any(array.imag != 0):
                raise InvalidParameterError("Cannot build a real UnitVector from complex entries")
            array = np.real(array).astype(np.float64)
        norm = np.linalg.norm(array)
        if norm == 0 or not np.isfinite(norm):
            raise InvalidParameterError("Cannot normalize a zero or non-finite vector")
        return cls(array / norm, field)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def __repr__(self):
        return f"UnitVector(dim={self.dim}, field={self.field.value})"


@dataclass(frozen=True, eq=False)
class ProductAnsatz:
    """
    One unit vector per party.

    ``grouping`` maps physical subsystems to parties: party k acts on the
    subsystems listed in ``grouping[k]``, in that order. ``None`` means one
    party per subsystem in natural order.
    """

    parties: Tuple[UnitVector, ...]
    grouping: Optional[Tuple[Tuple[int, ...], ...]] = None
    field: Field = Field.COMPLEX

    def __post_init__(self):
        parties = tuple(self.parties)
        if not parties:
            raise InvalidParameterError("ProductAnsatz needs at least one party")
        field = Field(self.field)
        if field is Field.REAL and any(p.field is not Field.REAL for p in parties):
            raise InvalidParameterError("Real ansatz requires real party vectors")
        grouping = self.grouping
        if grouping is not None:
            grouping = validate_grouping(grouping)
            if len(grouping) != len(parties):
                raise SubsystemError(f"Grouping has {len(grouping)} parties, ansatz has {len(parties)}")
        object.__setattr__(self, "parties", parties)
        object.__setattr__(self, "grouping", grouping)
        object.__setattr__(self, "field", field)

    @classmethod
    def from_arrays(
        cls,
        arrays: Iterable,
        grouping: Optional[Sequence[Sequence[int]]] = None,
        field: Field = Field.COMPLEX,
    ) -> "ProductAnsatz":
        """Normalize each array and build the ansatz."""
        field = Field(field)
        parties = tuple(UnitVector.normalized(a, field) for a in arrays)
        if grouping is not None:
            grouping = tuple(tuple(g) for g in grouping)
        return cls(parties, grouping, field)

    @property
    def dims(self) -> Tuple[int, ...]:
        return tuple(p.dim for p in self.parties)

    def vector(self) -> np.ndarray:
        """The full product vector in party order."""
        return reduce(np.kron, (p.entries for p in self.parties))

    def __repr__(self):
        return f"ProductAnsatz(dims={self.dims}, grouping={self.grouping}, field={self.field.value})"


def validate_grouping(grouping: Sequence[Sequence[int]]) -> Tuple[Tuple[int, ...], ...]:
    """Check that ``grouping`` covers subsystems 0..n-1 exactly once."""
    grouping = tuple(tuple(int(i) for i in group) for group in grouping)
    if not grouping or any(len(group) == 0 for group in grouping):
        raise SubsystemError("Grouping must consist of nonempty groups")
    flat = sorted(i for group in grouping for i in group)
    if flat != list(range(len(flat))):
        raise SubsystemError(f"Grouping {grouping} does not cover every subsystem exactly once")
    return grouping


def kron(a: OperatorLike, b: OperatorLike) -> OperatorLike:
    """Tensor product; density matrices stay density matrices."""
    op_a, op_b = as_operator(a), as_operator(b)
    result = HermitianOperator(np.kron(op_a.entries, op_b.entries), op_a.subsystem_dims + op_b.subsystem_dims)
    if isinstance(a, DensityMatrix) and isinstance(b, DensityMatrix):
        return DensityMatrix(result)
    return result


def partial_trace(m: OperatorLike, keep: Iterable[int]) -> OperatorLike:
    """Trace out every subsystem not listed in ``keep``; kept systems stay in ascending order."""
    op = as_operator(m)
    dims = op.subsystem_dims
    n = len(dims)
    keep = sorted(set(int(k) for k in keep))
    if not keep or keep[0] < 0 or keep[-1] >= n:
        raise SubsystemError(f"Invalid subsystem index set {keep} for {n} subsystems")

    rows = list(_LETTERS[:n])
    cols = list(_LETTERS[n:2 * n])
    for i in range(n):
        if i not in keep:
            cols[i] = rows[i]
    out = "".join(rows[i] for i in keep) + "".join(cols[i] for i in keep)
    tensor = op.entries.reshape(dims + dims)
    kept_dims = tuple(dims[i] for i in keep)
    size = int(np.prod(kept_dims))
    reduced = np.einsum(f"{''.join(rows)}{''.join(cols)}->{out}", tensor).reshape(size, size)
    return _rewrap(m, HermitianOperator(reduced, kept_dims))


def _check_permutation(perm: Sequence[int], n: int) -> Tuple[int, ...]:
    perm = tuple(int(p) for p in perm)
    if len(perm) != n:
        raise SubsystemError(f"Permutation of length {len(perm)} for {n} subsystems")
    if sorted(perm) != list(range(n)):
        raise SubsystemError(f"{perm} is not a permutation of 0..{n - 1}")
    return perm


def reorder_systems(m: OperatorLike, perm: Sequence[int]) -> OperatorLike:
    """New subsystem k is old subsystem ``perm[k]``."""
    op = as_operator(m)
    dims = op.subsystem_dims
    n = len(dims)
    perm = _check_permutation(perm, n)
    axes = list(perm) + [p + n for p in perm]
    new_dims = tuple(dims[p] for p in perm)
    reordered = op.entries.reshape(dims + dims).transpose(axes).reshape(op.dim, op.dim)
    return _rewrap(m, HermitianOperator(reordered, new_dims))


def group_systems(m: OperatorLike, grouping: Sequence[Sequence[int]]) -> OperatorLike:
    """Make each group contiguous and treat it as one party."""
    op = as_operator(m)
    grouping = validate_grouping(grouping)
    n = len(op.subsystem_dims)
    if sum(len(g) for g in grouping) != n:
        raise SubsystemError(f"Grouping {grouping} does not match {n} subsystems")
    perm = [i for group in grouping for i in group]
    reordered = as_operator(reorder_systems(op, perm))
    grouped_dims = tuple(int(np.prod([op.subsystem_dims[i] for i in group])) for group in grouping)
    return _rewrap(m, reordered.with_dims(grouped_dims))


def _fix_phase(vector: np.ndarray) -> np.ndarray:
    """Rotate the global phase so the largest-magnitude entry is real positive."""
    pivot = vector[np.argmax(np.abs(vector))]
    if pivot == 0:
        return vector
    return vector * (abs(pivot) / pivot)


def top_eigenpair_array(matrix: np.ndarray) -> Tuple[float, np.ndarray]:
    """Largest eigenvalue and its eigenvector for a Hermitian (or real symmetric) array."""
    if not np.all(np.isfinite(matrix)):
        raise NonFiniteError("Eigenproblem has non-finite entries")
    n = matrix.shape[0]
    values, vectors = spla.eigh(matrix, subset_by_index=[n - 1, n - 1])
    vector = vectors[:, 0]
    if np.iscomplexobj(vector):
        vector = _fix_phase(vector)
    elif vector[np.argmax(np.abs(vector))] < 0:
        vector = -vector
    return float(values[0]), vector


def top_eigenpair(m: OperatorLike) -> Tuple[float, UnitVector]:
    value, vector = top_eigenpair_array(as_operator(m).entries)
    return value, UnitVector.normalized(vector)


def _check_local_dim(d: int) -> int:
    if int(d) != d or d < 2:
        raise InvalidParameterError(f"Local dimension must be an integer >= 2, got {d}")
    return int(d)


def basis_vector(d: int, index: int) -> np.ndarray:
    vector = np.zeros(d, dtype=np.complex128)
    vector[index] = 1.0
    return vector


def swap_operator(d: int) -> HermitianOperator:
    """The SWAP operator sum_ij |ji><ij| on d x d."""
    d = _check_local_dim(d)
    swap = np.zeros((d * d, d * d), dtype=np.complex128)
    for i in range(d):
        for j in range(d):
            swap[j * d + i, i * d + j] = 1.0
    return HermitianOperator(swap, (d, d))


def sym_projector(d: int) -> HermitianOperator:
    d = _check_local_dim(d)
    return HermitianOperator((np.eye(d * d) + swap_operator(d).entries) / 2, (d, d))


def antisym_projector(d: int) -> HermitianOperator:
    d = _check_local_dim(d)
    return HermitianOperator((np.eye(d * d) - swap_operator(d).entries) / 2, (d, d))


def phi_plus_vector(d: int) -> np.ndarray:
    """(1/sqrt d) sum_i |ii>."""
    d = _check_local_dim(d)
    return np.eye(d, dtype=np.complex128).reshape(d * d) / np.sqrt(d)


def phi_plus_state(d: int) -> DensityMatrix:
    """Normalized maximally entangled state; see channel_duality for the unnormalized operator."""
    return DensityMatrix.from_pure(phi_plus_vector(d), (d, d))


def product_expectation(rho: OperatorLike, ansatz: ProductAnsatz) -> float:
    """<a_1,...,a_N| rho |a_1,...,a_N> for the ansatz's grouping of ``rho``."""
    op = as_operator(rho)
    if ansatz.grouping is not None:
        op = as_operator(group_systems(op, ansatz.grouping))
    if ansatz.dims != op.subsystem_dims:
        raise DimensionMismatchError(f"Ansatz dims {ansatz.dims} do not match operator dims {op.subsystem_dims}")
    vector = ansatz.vector()
    value = np.vdot(vector, op.entries @ vector)
    return float(value.real)


def haar_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary via QR of a Ginibre matrix with phase correction."""
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    q, r = spla.qr(z)
    diagonal = np.diag(r)
    return q * (diagonal / np.abs(diagonal))


def haar_orthogonal(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random real orthogonal matrix via QR with sign correction."""
    q, r = spla.qr(rng.standard_normal((d, d)))
    return q * np.sign(np.diag(r))


def random_unit_vector(d: int, rng: np.random.Generator, field: Field = Field.COMPLEX) -> np.ndarray:
    """Uniform on the complex (or real) unit sphere."""
    if Field(field) is Field.REAL:
        vector = rng.standard_normal(d)
    else:
        vector = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return vector / np.linalg.norm(vector)


def random_density_matrix(
    d: int,
    rng: np.random.Generator,
    rank: Optional[int] = None,
    subsystem_dims: Optional[Sequence[int]] = None,
) -> DensityMatrix:
    """Ginibre-induced random state of the given rank (full rank by default)."""
    rank = d if rank is None else rank
    if rank < 1 or rank > d:
        raise InvalidParameterError(f"Rank must lie in 1..{d}, got {rank}")
    g = rng.standard_normal((d, rank)) + 1j * rng.standard_normal((d, rank))
    rho = g @ g.conj().T
    return DensityMatrix.from_array(rho / np.trace(rho).real, subsystem_dims)
