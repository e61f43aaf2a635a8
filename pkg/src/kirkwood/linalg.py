"""Validated linear-algebra types for finite-dimensional quantum states.

Matrices are plain ``numpy`` complex arrays. The types below wrap them
together with the invariants they must satisfy; each invariant is checked
once at construction and the stored arrays are made read-only afterwards.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DimMismatch,
    NotComplete,
    NotHermitian,
    NotIdempotent,
    NotNormalized,
    NotOrthogonal,
    NotPositive,
    NotUnitTrace,
    ValidationError,
)

__all__ = [
    "Tolerances", "DEFAULT_TOL",
    "StateVector", "DensityMatrix", "Projector", "PVM", "OrthonormalBasis",
    "validate_density", "pvm_from_basis", "pvm_from_observable", "overlap_matrix",
    "max_abs", "hermiticity_defect",
]


@dataclass(frozen=True)
class Tolerances:
    """Numerical tolerances shared by every check in the package."""

    herm: float = 1e-10
    norm: float = 1e-10
    psd: float = 1e-10
    degeneracy: float = 1e-8
    prob: float = 1e-12
    overlap: float = 1e-8
    recon: float = 1e-8

    def replace(self, **changes) -> "Tolerances":
        return dataclasses.replace(self, **changes)

    def as_dict(self) -> dict[str, float]:
        return dataclasses.asdict(self)


DEFAULT_TOL = Tolerances()


def _frozen(a, dtype=np.complex128) -> np.ndarray:
    out = np.array(a, dtype=dtype, copy=True)
    out.setflags(write=False)
    return out


def max_abs(a) -> float:
    """Entrywise max norm; 0 for empty input."""
    a = np.asarray(a)
    return float(np.max(np.abs(a))) if a.size else 0.0


def hermiticity_defect(m) -> float:
    m = np.asarray(m)
    return max_abs(m - m.conj().T)


def _require_square(m: np.ndarray, what: str) -> None:
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
        raise DimMismatch(f"{what} must be a non-empty square matrix, got shape {m.shape}")


def _check_density(m: np.ndarray, tol: Tolerances) -> None:
    _require_square(m, "density matrix")
    defect = hermiticity_defect(m)
    if defect > tol.herm:
        raise NotHermitian("density matrix is not hermitian", defect)
    h = 0.5 * (m + m.conj().T)
    tr = np.trace(h).real
    if abs(tr - 1.0) > tol.norm:
        raise NotUnitTrace("density matrix trace differs from 1", abs(tr - 1.0))
    lowest = float(np.linalg.eigvalsh(h)[0])
    if lowest < -tol.psd:
        raise NotPositive("density matrix has a negative eigenvalue", -lowest)


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian, unit-trace, positive semidefinite matrix.

    Direct construction validates at the default tolerances without any
    hermitization; use :func:`validate_density` to control both.
    """

    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=np.complex128)
        _check_density(m, DEFAULT_TOL)
        object.__setattr__(self, "matrix", _frozen(m))

    @classmethod
    def _unchecked(cls, matrix) -> "DensityMatrix":
        # Bypasses validation; used for internally constructed states whose
        # invariants hold by construction, and by the verify fault injector.
        obj = object.__new__(cls)
        object.__setattr__(obj, "matrix", _frozen(matrix))
        return obj

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @classmethod
    def maximally_mixed(cls, dim: int) -> "DensityMatrix":
        return cls._unchecked(np.eye(dim) / dim)

    @classmethod
    def from_vector(cls, psi) -> "DensityMatrix":
        if isinstance(psi, StateVector):
            psi = psi.amplitudes
        return validate_density(np.outer(psi, np.conj(psi)))


def validate_density(matrix, tol: Tolerances = DEFAULT_TOL) -> DensityMatrix:
    """Check a matrix against the density-matrix invariants.

    Returns the hermitized matrix ``(M + M^H) / 2`` wrapped as a
    :class:`DensityMatrix`.

    Raises
    ------
    NotHermitian, NotUnitTrace, NotPositive
        With the measured violation attached as ``magnitude``.
    """
    m = np.asarray(matrix, dtype=np.complex128)
    _check_density(m, tol)
    return DensityMatrix._unchecked(0.5 * (m + m.conj().T))


@dataclass(frozen=True, eq=False)
class StateVector:
    amplitudes: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.amplitudes, dtype=np.complex128)
        if v.ndim != 1 or v.size < 1:
            raise DimMismatch(f"state vector must be 1-d, got shape {v.shape}")
        err = abs(np.linalg.norm(v) - 1.0)
        if err > DEFAULT_TOL.norm:
            raise NotNormalized("state vector is not normalized", err)
        object.__setattr__(self, "amplitudes", _frozen(v))

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def projector(self) -> "Projector":
        return Projector(np.outer(self.amplitudes, self.amplitudes.conj()))


@dataclass(frozen=True, eq=False)
class Projector:
    """Orthogonal projector; ``rank`` is the rounded trace."""

    matrix: np.ndarray
    rank: int = field(init=False)

    def __post_init__(self):
        p = np.asarray(self.matrix, dtype=np.complex128)
        _require_square(p, "projector")
        tol = DEFAULT_TOL
        defect = hermiticity_defect(p)
        if defect > tol.herm:
            raise NotHermitian("projector is not hermitian", defect)
        defect = max_abs(p @ p - p)
        if defect > tol.herm:
            raise NotIdempotent("projector is not idempotent", defect)
        tr = np.trace(p).real
        rank = int(round(tr))
        if rank < 1 or abs(tr - rank) > tol.norm:
            raise ValidationError(f"projector trace {tr!r} is not a positive integer")
        object.__setattr__(self, "matrix", _frozen(p))
        object.__setattr__(self, "rank", rank)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def complement(self) -> np.ndarray:
        return np.eye(self.dim) - self.matrix


@dataclass(frozen=True, eq=False)
class PVM:
    """Complete family of mutually orthogonal projectors.

    ``labels`` optionally carries the eigenvalue belonging to each projector.
    ``stack`` is the ``(N_a, dim, dim)`` array of projector matrices.
    """

    projectors: tuple[Projector, ...]
    labels: tuple[float, ...] | None = None
    stack: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        projs = tuple(p if isinstance(p, Projector) else Projector(p) for p in self.projectors)
        if not projs:
            raise DimMismatch("a PVM needs at least one projector")
        dim = projs[0].dim
        if any(p.dim != dim for p in projs):
            raise DimMismatch("projectors of a PVM must share one dimension")
        if len(projs) > dim:
            raise DimMismatch(f"{len(projs)} projectors exceed dimension {dim}")
        tol = DEFAULT_TOL
        stack = np.stack([p.matrix for p in projs])
        worst = 0.0
        for i in range(len(projs)):
            for j in range(i + 1, len(projs)):
                worst = max(worst, max_abs(stack[i] @ stack[j]))
        if worst > tol.herm:
            raise NotOrthogonal("PVM projectors are not mutually orthogonal", worst)
        defect = max_abs(stack.sum(axis=0) - np.eye(dim))
        if defect > tol.herm:
            raise NotComplete("PVM projectors do not sum to the identity", defect)
        labels = self.labels
        if labels is not None:
            labels = tuple(float(x) for x in labels)
            if len(labels) != len(projs):
                raise DimMismatch("one label per projector is required")
        object.__setattr__(self, "projectors", projs)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "stack", _frozen(stack))

    @property
    def dim(self) -> int:
        return self.stack.shape[1]

    @property
    def ranks(self) -> tuple[int, ...]:
        return tuple(p.rank for p in self.projectors)

    def __len__(self) -> int:
        return len(self.projectors)

    def __getitem__(self, m: int) -> Projector:
        return self.projectors[m]


@dataclass(frozen=True, eq=False)
class OrthonormalBasis:
    """``dim`` orthonormal vectors, stored as the rows of ``vectors``."""

    vectors: np.ndarray

    def __post_init__(self):
        rows = self.vectors
        if isinstance(rows, (list, tuple)) and rows and isinstance(rows[0], StateVector):
            rows = [v.amplitudes for v in rows]
        v = np.asarray(rows, dtype=np.complex128)
        if v.ndim != 2 or v.shape[0] != v.shape[1] or v.shape[0] < 1:
            raise DimMismatch(f"a basis needs dim vectors of length dim, got shape {v.shape}")
        defect = max_abs(v.conj() @ v.T - np.eye(v.shape[0]))
        if defect > DEFAULT_TOL.herm:
            raise NotOrthogonal("basis vectors are not orthonormal", defect)
        object.__setattr__(self, "vectors", _frozen(v))

    @classmethod
    def standard(cls, dim: int) -> "OrthonormalBasis":
        return cls(np.eye(dim))

    @classmethod
    def from_columns(cls, u) -> "OrthonormalBasis":
        """Basis made of the columns of a unitary matrix."""
        return cls(np.asarray(u).T)

    @property
    def dim(self) -> int:
        return self.vectors.shape[0]

    @property
    def states(self) -> tuple[StateVector, ...]:
        return tuple(StateVector(v) for v in self.vectors)

    def __len__(self) -> int:
        return self.dim


def pvm_from_basis(basis: OrthonormalBasis) -> PVM:
    """Rank-1 projectors ``|v_m><v_m|`` in basis order."""
    return PVM(tuple(Projector(np.outer(v, v.conj())) for v in basis.vectors))


def pvm_from_observable(matrix, degeneracy_tol: float | None = None,
                        tol: Tolerances = DEFAULT_TOL) -> PVM:
    """Spectral projectors of a hermitian matrix.

    Sorted eigenvalues are split into clusters wherever two neighbours differ
    by more than ``degeneracy_tol``. Each cluster yields one projector
    labelled with the cluster's mean eigenvalue, so labels increase strictly.
    """
    m = np.asarray(matrix, dtype=np.complex128)
    _require_square(m, "observable")
    defect = hermiticity_defect(m)
    if defect > tol.herm:
        raise NotHermitian("observable is not hermitian", defect)
    if degeneracy_tol is None:
        degeneracy_tol = tol.degeneracy
    w, v = np.linalg.eigh(0.5 * (m + m.conj().T))
    cuts = np.flatnonzero(np.diff(w) > degeneracy_tol) + 1
    projectors, labels = [], []
    for idx in np.split(np.arange(w.size), cuts):
        block = v[:, idx]
        projectors.append(Projector(block @ block.conj().T))
        labels.append(float(np.mean(w[idx])))
    return PVM(tuple(projectors), tuple(labels))


def overlap_matrix(a: OrthonormalBasis, b: OrthonormalBasis) -> np.ndarray:
    """Matrix of inner products, entry ``(k, m) = <a_k|b_m>``."""
    if a.dim != b.dim:
        raise DimMismatch(f"bases of dimension {a.dim} and {b.dim}")
    return a.vectors.conj() @ b.vectors.T

