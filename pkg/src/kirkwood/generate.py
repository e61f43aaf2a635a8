"""Seeded random states, bases and PVMs.

All generators draw from a :class:`numpy.random.Generator`; :func:`make_rng`
derives one from a master seed plus any number of integer stream keys so
that independent consumers never share a stream.
"""

from __future__ import annotations

import numpy as np

from .errors import InvalidDimension
from .linalg import (
    DEFAULT_TOL,
    PVM,
    DensityMatrix,
    OrthonormalBasis,
    Projector,
    validate_density,
)
from .reconstruct import BasisPair, check_complementary

__all__ = [
    "make_rng", "ginibre", "random_unitary", "random_basis", "random_density",
    "random_pvm", "random_complementary_pair", "shared_vector_pair", "commuting_pvms",
    "STATE_KINDS",
]

STATE_KINDS = ("pure", "mixed", "maximally_mixed")


def make_rng(seed: int, *keys: int) -> np.random.Generator:
    """Philox generator keyed by ``(seed, *keys)``."""
    if seed < 0:
        raise ValueError("seeds are unsigned 64-bit integers")
    ss = np.random.SeedSequence([int(seed), *(int(k) for k in keys)])
    return np.random.Generator(np.random.Philox(ss))


def ginibre(rows: int, cols: int, rng: np.random.Generator) -> np.ndarray:
    return rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary from the QR factorization of a Gaussian matrix."""
    q, r = np.linalg.qr(ginibre(dim, dim, rng))
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def random_basis(dim: int, rng: np.random.Generator) -> OrthonormalBasis:
    return OrthonormalBasis.from_columns(random_unitary(dim, rng))


def random_density(dim: int, rng: np.random.Generator, kind: str = "mixed") -> DensityMatrix:
    """Random state of the given kind.

    ``pure`` is the projector on a normalized Gaussian vector, ``mixed`` is
    ``G G^H / Tr(G G^H)`` for a square Gaussian ``G``.
    """
    if dim < 1:
        raise InvalidDimension(f"dimension must be positive, got {dim}")
    if kind == "maximally_mixed":
        return DensityMatrix.maximally_mixed(dim)
    if kind == "pure":
        v = ginibre(dim, 1, rng)[:, 0]
        v /= np.linalg.norm(v)
        return validate_density(np.outer(v, v.conj()))
    if kind == "mixed":
        g = ginibre(dim, dim, rng)
        m = g @ g.conj().T
        return validate_density(m / np.trace(m).real)
    raise ValueError(f"unknown state kind {kind!r}; expected one of {STATE_KINDS}")


def _random_composition(dim: int, rng: np.random.Generator) -> list[int]:
    cuts = np.flatnonzero(rng.random(dim - 1) < 0.5) + 1
    return np.diff(np.concatenate([[0], cuts, [dim]])).tolist()


def _grouped_pvm(u: np.ndarray, ranks) -> PVM:
    projs, start = [], 0
    for r in ranks:
        block = u[:, start:start + r]
        projs.append(Projector(block @ block.conj().T))
        start += r
    return PVM(tuple(projs))


def random_pvm(dim: int, rng: np.random.Generator, ranks=None) -> PVM:
    """PVM of a random eigenbasis grouped into blocks of the given ranks.

    Without ``ranks`` a random composition of ``dim`` is drawn, so degenerate
    projectors appear regularly.
    """
    if ranks is None:
        ranks = _random_composition(dim, rng)
    if sum(ranks) != dim or min(ranks) < 1:
        raise ValueError(f"ranks {ranks} do not partition dimension {dim}")
    return _grouped_pvm(random_unitary(dim, rng), ranks)


def random_complementary_pair(dim: int, rng: np.random.Generator,
                              tol_overlap: float = DEFAULT_TOL.overlap) -> BasisPair:
    """Two Haar-random bases, redrawn on the (measure-zero) shared-vector event."""
    while True:
        pair = BasisPair(random_basis(dim, rng), random_basis(dim, rng))
        if check_complementary(pair, tol_overlap):
            return pair


def shared_vector_pair(dim: int, rng: np.random.Generator, shared: int = 0) -> BasisPair:
    """Pair whose second basis keeps vector ``shared`` of the first and
    mixes the remaining ones by a random unitary."""
    if dim < 2:
        raise InvalidDimension("a shared-vector pair needs dim >= 2")
    a = random_basis(dim, rng)
    cols = a.vectors.T
    rest = [i for i in range(dim) if i != shared]
    mixed = cols[:, rest] @ random_unitary(dim - 1, rng)
    b_cols = np.empty_like(cols)
    b_cols[:, shared] = cols[:, shared]
    b_cols[:, rest] = mixed
    return BasisPair(a, OrthonormalBasis.from_columns(b_cols))


def commuting_pvms(dim: int, rng: np.random.Generator) -> tuple[PVM, PVM]:
    """Two PVMs diagonal in one random basis, each a random coarse-graining of it."""
    u = random_unitary(dim, rng)
    a = _grouped_pvm(u, _random_composition(dim, rng))
    perm = rng.permutation(dim)
    b = _grouped_pvm(u[:, perm], _random_composition(dim, rng))
    return a, b
