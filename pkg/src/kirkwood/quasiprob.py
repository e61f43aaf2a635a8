"""Kirkwood quasiprobabilities and their measurement-disturbance decomposition.

Rows of every table index the first (A) measurement, columns the second (B).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimMismatch, ValidationError
from .linalg import DEFAULT_TOL, PVM, DensityMatrix, Projector, Tolerances, _frozen
from .measurement import (
    _check_index,
    _same_dim,
    lueders_nonselective,
    lueders_selective,
    phase_rotation,
    rotate_projector,
)

__all__ = [
    "KirkwoodTable", "DisturbanceDecomposition",
    "kirkwood_entries", "kirkwood", "margenau_hill", "combine_disturbance", "decompose",
    "kirkwood_after_nonselective", "kirkwood_after_selective",
]


@dataclass(frozen=True, eq=False)
class KirkwoodTable:
    """Complex table ``P(a_m, b_n) = Tr(rho A_m B_n)`` with its two PVMs.

    Construction checks the state-independent invariants: the table sums to
    one and both marginals are real.
    """

    entries: np.ndarray
    a_pvm: PVM
    b_pvm: PVM
    tol: Tolerances = field(default=DEFAULT_TOL, repr=False)

    def __post_init__(self):
        e = np.asarray(self.entries, dtype=np.complex128)
        if e.shape != (len(self.a_pvm), len(self.b_pvm)):
            raise DimMismatch(f"table shape {e.shape} does not match the PVMs")
        if self.a_pvm.dim != self.b_pvm.dim:
            raise DimMismatch("PVMs act on different dimensions")
        total = e.sum()
        if abs(total - 1.0) > self.tol.norm:
            raise ValidationError(f"Kirkwood table sums to {total!r}")
        imag = max(np.abs(e.sum(axis=1).imag).max(), np.abs(e.sum(axis=0).imag).max())
        if imag > self.tol.norm:
            raise ValidationError(f"Kirkwood marginals have imaginary part {imag:.3e}")
        object.__setattr__(self, "entries", _frozen(e))

    @property
    def shape(self) -> tuple[int, int]:
        return self.entries.shape

    @property
    def row_marginals(self) -> np.ndarray:
        """Sums over B outcomes: the A distribution."""
        return self.entries.sum(axis=1).real

    @property
    def column_marginals(self) -> np.ndarray:
        return self.entries.sum(axis=0).real

    @property
    def real(self) -> np.ndarray:
        return self.entries.real.copy()

    @property
    def imag(self) -> np.ndarray:
        return self.entries.imag.copy()


def kirkwood_entries(rho, a_stack, b_stack) -> np.ndarray:
    """Raw ``Tr(rho A_m B_n)`` over stacks of projector matrices, unvalidated."""
    rho = np.asarray(rho)
    return np.einsum("ij,mjk,nki->mn", rho, a_stack, b_stack)


def kirkwood(rho: DensityMatrix, a_pvm: PVM, b_pvm: PVM,
             tol: Tolerances = DEFAULT_TOL) -> KirkwoodTable:
    """Kirkwood distribution of ``rho`` over the pair ``(a_pvm, b_pvm)``."""
    _same_dim(rho, a_pvm, b_pvm)
    return KirkwoodTable(kirkwood_entries(rho.matrix, a_pvm.stack, b_pvm.stack),
                         a_pvm, b_pvm, tol)


def margenau_hill(rho: DensityMatrix, a_pvm: PVM, b_pvm: PVM) -> np.ndarray:
    """Real part of the Kirkwood distribution. Entries may be negative."""
    _same_dim(rho, a_pvm, b_pvm)
    return kirkwood_entries(rho.matrix, a_pvm.stack, b_pvm.stack).real


@dataclass(frozen=True)
class DisturbanceDecomposition:
    """One Kirkwood entry split into a joint probability and two disturbances.

    ``kirkwood_value == wigner_term + real_disturbance + 1j * imag_disturbance``.
    """

    wigner_term: float
    real_disturbance: float
    imag_disturbance: float
    kirkwood_value: complex

    @property
    def reassembled(self) -> complex:
        return complex(self.wigner_term + self.real_disturbance, self.imag_disturbance)

    @property
    def residual(self) -> float:
        return abs(self.reassembled - self.kirkwood_value)


def combine_disturbance(wigner: float, b_before: float, b_after: float,
                        rotated_before: float, rotated_after: float) -> tuple[float, float, float]:
    """Assemble ``(wigner_term, real_disturbance, imag_disturbance)``.

    Inputs are the probabilities of ``B`` and of its phase-rotated partner,
    before and after a nonselective measurement of ``A_m``. They may be
    exact traces or sampled frequencies.
    """
    return wigner, 0.5 * (b_before - b_after), 0.5 * (rotated_before - rotated_after)


def decompose(rho: DensityMatrix, a_pvm: PVM, index: int, b_proj: Projector,
              tol: Tolerances = DEFAULT_TOL) -> DisturbanceDecomposition:
    """Split ``Tr(rho A_m B)`` into its operational pieces.

    With ``rho'`` the state after a nonselective measurement of ``A_m``:

    * ``wigner_term = Tr(rho A_m B A_m)``, the successive-measurement probability,
    * ``real_disturbance = Tr((rho - rho') B) / 2``,
    * ``imag_disturbance = Tr((rho - rho') B') / 2`` where ``B'`` is ``B``
      after the selective phase rotation by pi/2 on ``A_m``.

    Raises
    ------
    ValidationError
        If the three terms fail to reassemble the Kirkwood value within
        ``tol.herm`` (only possible for inputs that bypassed validation).
    """
    _same_dim(rho, a_pvm, b_proj)
    _check_index(a_pvm, index)
    r = rho.matrix
    a = a_pvm.stack[index]
    b = b_proj.matrix
    after = lueders_nonselective(rho, a_pvm[index]).matrix
    b_rot = rotate_projector(phase_rotation(a_pvm, index, np.pi / 2), b_proj).matrix

    def tr(x, y):
        return float(np.trace(x @ y).real)

    wigner, re_dist, im_dist = combine_disturbance(
        wigner=float(np.trace(r @ a @ b @ a).real),
        b_before=tr(r, b), b_after=tr(after, b),
        rotated_before=tr(r, b_rot), rotated_after=tr(after, b_rot),
    )
    out = DisturbanceDecomposition(wigner, re_dist, im_dist, complex(np.trace(r @ a @ b)))
    if out.residual > tol.herm:
        raise ValidationError(f"disturbance terms miss the Kirkwood value by {out.residual:.3e}")
    return out


def kirkwood_after_nonselective(rho: DensityMatrix, a_pvm: PVM, index: int, b_pvm: PVM,
                                tol: Tolerances = DEFAULT_TOL) -> KirkwoodTable:
    """Kirkwood table of the state left by a nonselective measurement of ``A_index``.

    Row ``index`` coincides with the Wigner-formula row: real and nonnegative.
    """
    _same_dim(rho, a_pvm, b_pvm)
    _check_index(a_pvm, index)
    return kirkwood(lueders_nonselective(rho, a_pvm[index]), a_pvm, b_pvm, tol)


def kirkwood_after_selective(rho: DensityMatrix, a_pvm: PVM, index: int, b_pvm: PVM,
                             tol: Tolerances = DEFAULT_TOL) -> KirkwoodTable:
    """Kirkwood table of the state conditioned on outcome ``A_index``.

    Only row ``index`` is nonzero; it is the Wigner-formula row divided by
    the outcome probability.
    """
    _same_dim(rho, a_pvm, b_pvm)
    _check_index(a_pvm, index)
    return kirkwood(lueders_selective(rho, a_pvm[index], tol), a_pvm, b_pvm, tol)
