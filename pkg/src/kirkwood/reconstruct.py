"""State reconstruction from a Kirkwood table over two complementary bases."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import DimMismatch, InvalidDimension, NotComplementary, NotPhysical, ValidationError
from .linalg import (
    DEFAULT_TOL,
    PVM,
    DensityMatrix,
    OrthonormalBasis,
    Tolerances,
    _frozen,
    max_abs,
    overlap_matrix,
    pvm_from_basis,
    validate_density,
)
from .quasiprob import KirkwoodTable, kirkwood

__all__ = [
    "BasisPair", "Complementarity",
    "check_complementary", "check_mub", "schwinger_pair", "min_overlap",
    "reassemble", "reconstruct_density", "reconstruct_fourier", "kirkwood_rebase",
]


@dataclass(frozen=True, eq=False)
class BasisPair:
    """Two orthonormal bases with their overlap matrix ``<a_k|b_m>``."""

    a: OrthonormalBasis
    b: OrthonormalBasis
    overlaps: np.ndarray = field(init=False, repr=False)
    a_pvm: PVM = field(init=False, repr=False)
    b_pvm: PVM = field(init=False, repr=False)

    def __post_init__(self):
        o = overlap_matrix(self.a, self.b)
        defect = max_abs(o.conj().T @ o - np.eye(self.a.dim))
        if defect > DEFAULT_TOL.herm:
            raise ValidationError(f"overlap matrix is not unitary ({defect:.3e})")
        object.__setattr__(self, "overlaps", _frozen(o))
        object.__setattr__(self, "a_pvm", pvm_from_basis(self.a))
        object.__setattr__(self, "b_pvm", pvm_from_basis(self.b))

    @property
    def dim(self) -> int:
        return self.a.dim


class Complementarity(NamedTuple):
    complementary: bool
    offending: list[tuple[int, int]]

    def __bool__(self) -> bool:
        return self.complementary


def check_complementary(pair: BasisPair, tol_overlap: float | None = None) -> Complementarity:
    """Whether no overlap ``|<a_k|b_m>|`` is at or below ``tol_overlap``.

    Bases with a vanishing overlap necessarily share a vector, so this is the
    "no common vectors" test. The offending ``(k, m)`` are returned in
    row-major order.
    """
    if tol_overlap is None:
        tol_overlap = DEFAULT_TOL.overlap
    small = np.argwhere(np.abs(pair.overlaps) <= tol_overlap)
    offending = [(int(k), int(m)) for k, m in small]
    return Complementarity(not offending, offending)


def check_mub(pair: BasisPair, tol: float = 1e-10) -> bool:
    """Whether every overlap modulus equals ``1/sqrt(N)`` within ``tol``."""
    target = 1.0 / np.sqrt(pair.dim)
    return bool(np.all(np.abs(np.abs(pair.overlaps) - target) <= tol))


def min_overlap(pair: BasisPair) -> float:
    """Smallest overlap modulus; the inversion divides by these numbers."""
    return float(np.abs(pair.overlaps).min())


def _schwinger_kernel(n: int) -> np.ndarray:
    k = np.arange(n)
    return np.exp(2j * np.pi * np.outer(k, k) / n) / np.sqrt(n)


def schwinger_pair(n: int) -> BasisPair:
    """Standard basis paired with the discrete-Fourier basis.

    ``<a_m|b_n> = exp(2 pi i m n / N) / sqrt(N)`` with indices from zero.
    """
    if n < 2:
        raise InvalidDimension(f"Schwinger bases need N >= 2, got {n}")
    kernel = _schwinger_kernel(n)
    # component m of b_n is <a_m|b_n>; the kernel is symmetric
    return BasisPair(OrthonormalBasis.standard(n), OrthonormalBasis(kernel.T))


def _require_over_pair(table: KirkwoodTable, pair: BasisPair, tol: Tolerances) -> None:
    if table.shape != (pair.dim, pair.dim):
        raise DimMismatch(f"table shape {table.shape} does not fit a dimension-{pair.dim} pair")
    if (max_abs(table.a_pvm.stack - pair.a_pvm.stack) > tol.herm
            or max_abs(table.b_pvm.stack - pair.b_pvm.stack) > tol.herm):
        raise DimMismatch("table was not built over the projectors of this basis pair")


def _to_density(matrix_in_b: np.ndarray, b: OrthonormalBasis) -> np.ndarray:
    v = b.vectors.T
    return v @ matrix_in_b @ v.conj().T


def reassemble(table: KirkwoodTable, pair: BasisPair,
               tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Apply the inversion sum without any hermitization or validation.

    ``<b_m|rho|b_n> = sum_k <a_k|b_n> / <a_k|b_m> * K[k, m]``; the result is
    returned in the computational basis.
    """
    comp = check_complementary(pair, tol.overlap)
    if not comp:
        raise NotComplementary("bases share a vector", comp.offending)
    _require_over_pair(table, pair, tol)
    o = pair.overlaps
    in_b = (table.entries / o).T @ o
    return _to_density(in_b, pair.b)


def _physical(matrix: np.ndarray, tol: Tolerances) -> DensityMatrix:
    try:
        return validate_density(matrix, tol)
    except ValidationError as exc:
        raise NotPhysical(f"reconstructed matrix is not a state: {exc}") from exc


def reconstruct_density(table: KirkwoodTable, pair: BasisPair,
                        tol: Tolerances = DEFAULT_TOL) -> DensityMatrix:
    """Density matrix determined by a Kirkwood table over a complementary pair.

    Raises
    ------
    NotComplementary
        Some overlap vanishes; carries the offending index pairs.
    DimMismatch
        The table was not built over ``pair``.
    NotPhysical
        The reassembled matrix is not a density matrix (inconsistent table).
    """
    return _physical(reassemble(table, pair, tol), tol)


def reconstruct_fourier(table: KirkwoodTable, n: int,
                        tol: Tolerances = DEFAULT_TOL) -> DensityMatrix:
    """Inversion for the Schwinger pair as a discrete Fourier transform.

    ``<b_m|rho|b_n> = sum_k exp(2 pi i k (n - m) / N) K[k, m]``.
    """
    pair = schwinger_pair(n)
    _require_over_pair(table, pair, tol)
    k = np.arange(n)
    omega = np.exp(2j * np.pi * np.outer(k, k) / n)
    # exp(2 pi i k (n - m) / N) = omega[k, n] * conj(omega[k, m])
    in_b = (table.entries * omega.conj()).T @ omega
    return _physical(_to_density(in_b, pair.b), tol)


def kirkwood_rebase(table: KirkwoodTable, source: BasisPair, target: BasisPair,
                    tol: Tolerances = DEFAULT_TOL) -> KirkwoodTable:
    """Kirkwood table of the same state over a different basis pair."""
    rho = reconstruct_density(table, source, tol)
    return kirkwood(rho, target.a_pvm, target.b_pvm, tol)
