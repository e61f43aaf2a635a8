"""Born probabilities, Lüders state reduction and the Wigner formula."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimMismatch, IndexOutOfRange, ZeroProbabilityBranch, ValidationError
from .linalg import (
    DEFAULT_TOL,
    PVM,
    DensityMatrix,
    Projector,
    Tolerances,
    _frozen,
    max_abs,
)

__all__ = [
    "JointProbabilityTable", "PhaseRotation",
    "born_probabilities", "lueders_nonselective", "nonselective_full",
    "lueders_selective", "conditional_probability", "wigner_joint",
    "phase_rotation", "rotate_projector", "randomization_identity_check",
]


def _same_dim(*objs) -> int:
    dims = {o.dim for o in objs}
    if len(dims) != 1:
        raise DimMismatch(f"operands have dimensions {sorted(dims)}")
    return dims.pop()


def _check_index(pvm: PVM, m: int) -> None:
    if not 0 <= m < len(pvm):
        raise IndexOutOfRange(f"projector index {m} outside 0..{len(pvm) - 1}")


def _hermitize(m: np.ndarray) -> np.ndarray:
    return 0.5 * (m + m.conj().T)


@dataclass(frozen=True, eq=False)
class JointProbabilityTable:
    """Probabilities ``P(a_m, b_n)`` of successive outcomes; rows index A."""

    entries: np.ndarray
    a_pvm: PVM
    b_pvm: PVM
    tol: Tolerances = field(default=DEFAULT_TOL, repr=False)

    def __post_init__(self):
        e = np.asarray(self.entries, dtype=float)
        if e.shape != (len(self.a_pvm), len(self.b_pvm)):
            raise DimMismatch(f"table shape {e.shape} does not match the PVMs")
        lowest = float(e.min())
        if lowest < -self.tol.psd:
            raise ValidationError(f"negative joint probability {lowest:.3e}")
        total = float(e.sum())
        if abs(total - 1.0) > self.tol.norm:
            raise ValidationError(f"joint probabilities sum to {total!r}")
        object.__setattr__(self, "entries", _frozen(e, float))

    @property
    def probabilities(self) -> np.ndarray:
        """Entries with roundoff negatives clamped to zero."""
        return np.clip(self.entries, 0.0, None)

    @property
    def shape(self) -> tuple[int, int]:
        return self.entries.shape


def born_probabilities(rho: DensityMatrix, pvm: PVM) -> np.ndarray:
    """Outcome probabilities ``Tr(rho A_m)`` for every projector of ``pvm``."""
    _same_dim(rho, pvm)
    return np.einsum("ij,mji->m", rho.matrix, pvm.stack).real


def lueders_nonselective(rho: DensityMatrix, proj: Projector) -> DensityMatrix:
    """State after a two-outcome measurement of ``proj`` when both outcomes are kept."""
    _same_dim(rho, proj)
    p, q = proj.matrix, proj.complement
    r = rho.matrix
    return DensityMatrix._unchecked(_hermitize(p @ r @ p + q @ r @ q))


def nonselective_full(rho: DensityMatrix, pvm: PVM) -> DensityMatrix:
    """Nonselective reduction by a full observable, ``sum_m A_m rho A_m``.

    Obtained by applying the two-outcome rule once per projector; the
    cross terms cancel because the projectors are mutually orthogonal.
    """
    _same_dim(rho, pvm)
    out = rho
    for proj in pvm.projectors:
        out = lueders_nonselective(out, proj)
    return out


def lueders_selective(rho: DensityMatrix, proj: Projector,
                      tol: Tolerances = DEFAULT_TOL) -> DensityMatrix:
    """Conditional state ``P rho P / Tr(rho P)`` given the outcome ``proj``.

    Raises
    ------
    ZeroProbabilityBranch
        If ``Tr(rho P) <= tol.prob``.
    """
    _same_dim(rho, proj)
    p = proj.matrix
    prob = float(np.trace(rho.matrix @ p).real)
    if prob <= tol.prob:
        raise ZeroProbabilityBranch(f"outcome has probability {prob:.3e}")
    return DensityMatrix._unchecked(_hermitize(p @ rho.matrix @ p) / prob)


def conditional_probability(rho: DensityMatrix, a_proj: Projector, b_proj: Projector,
                            tol: Tolerances = DEFAULT_TOL) -> float:
    """Probability of ``b_proj`` after a selective measurement of ``a_proj``."""
    _same_dim(rho, a_proj, b_proj)
    collapsed = lueders_selective(rho, a_proj, tol)
    return float(np.trace(collapsed.matrix @ b_proj.matrix).real)


def wigner_joint(rho: DensityMatrix, a_pvm: PVM, b_pvm: PVM,
                 tol: Tolerances = DEFAULT_TOL) -> JointProbabilityTable:
    """Joint probabilities ``Tr(rho A_m B_n A_m)`` of measuring A, then B.

    Row sums are the Born probabilities of A on ``rho``; column sums are the
    Born probabilities of B on ``nonselective_full(rho, a_pvm)``.
    """
    _same_dim(rho, a_pvm, b_pvm)
    a, b = a_pvm.stack, b_pvm.stack
    # Tr(rho A B A) = Tr((A rho A) B)
    reduced = np.einsum("mij,jk,mkl->mil", a, rho.matrix, a)
    entries = np.einsum("mij,nji->mn", reduced, b).real
    return JointProbabilityTable(entries, a_pvm, b_pvm, tol)


@dataclass(frozen=True, eq=False)
class PhaseRotation:
    """Unitary ``1 + (exp(i*angle) - 1) A_index`` for one projector of a PVM."""

    dim: int
    index: int
    angle: float
    matrix: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "matrix", _frozen(self.matrix))


def phase_rotation(a_pvm: PVM, index: int, angle: float) -> PhaseRotation:
    """Selective phase rotation acting only on the range of ``a_pvm[index]``."""
    _check_index(a_pvm, index)
    dim = a_pvm.dim
    r = np.eye(dim) + (np.exp(1j * angle) - 1.0) * a_pvm.stack[index]
    return PhaseRotation(dim, index, float(angle), r)


def rotate_projector(r: PhaseRotation, proj: Projector) -> Projector:
    """Projector ``R^H P R``.

    Measuring the result on ``rho`` has the statistics of measuring ``proj``
    on the rotated state ``R rho R^H``.
    """
    _same_dim(r, proj)
    u = r.matrix
    return Projector(_hermitize(u.conj().T @ proj.matrix @ u))


def randomization_identity_check(rho: DensityMatrix, a_pvm: PVM, index: int) -> float:
    """Max-norm gap between the Lüders state and the averaged phase flip.

    Compares ``lueders_nonselective(rho, A_m)`` with
    ``(rho + R rho R^H) / 2`` for the rotation by pi on ``A_m``.
    """
    _same_dim(rho, a_pvm)
    _check_index(a_pvm, index)
    reduced = lueders_nonselective(rho, a_pvm[index]).matrix
    u = phase_rotation(a_pvm, index, np.pi).matrix
    averaged = 0.5 * (rho.matrix + u @ rho.matrix @ u.conj().T)
    return max_abs(reduced - averaged)
