"""Randomized verification of the algebraic identities.

Each family draws seeded random instances, measures the worst residual of
one identity and compares it with a fixed threshold. :func:`run_suite`
bundles all families into the report emitted by ``kirkwood verify``.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import KirkwoodError, NotComplementary
from .generate import (
    commuting_pvms,
    ginibre,
    make_rng,
    random_complementary_pair,
    random_density,
    random_pvm,
    shared_vector_pair,
)
from .linalg import DEFAULT_TOL, PVM, DensityMatrix, Tolerances, max_abs
from .measurement import (
    born_probabilities,
    lueders_nonselective,
    nonselective_full,
    randomization_identity_check,
    wigner_joint,
)
from .quasiprob import (
    decompose,
    kirkwood,
    kirkwood_after_nonselective,
    kirkwood_after_selective,
    kirkwood_entries,
    margenau_hill,
)
from .reconstruct import BasisPair, reconstruct_density, reconstruct_fourier, schwinger_pair

__all__ = [
    "FAULTS", "FamilyResult", "Instance", "WitnessResult",
    "random_instances", "check_marginals", "check_decomposition", "check_randomization",
    "check_post_measurement", "check_commuting", "check_round_trip", "check_fourier",
    "search_mh_witness", "run_suite",
]

FAULTS = ("skip-hermitization",)

# stream keys, one per consumer of the master seed
_STREAM_INSTANCES, _STREAM_DEGENERATE, _STREAM_COMMUTING = 101, 102, 103
_STREAM_ROUND_TRIP, _STREAM_FOURIER, _STREAM_WITNESS = 104, 105, 106

_EXACT = 1e-10
_COMMUTING = 1e-12


@dataclass
class FamilyResult:
    name: str
    passed: bool
    worst_residual: float
    threshold: float
    instances: int
    status: str = ""
    detail: str = ""

    def __post_init__(self):
        if not self.status:
            self.status = "pass" if self.passed else "fail"

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class Instance:
    rho: DensityMatrix
    a_pvm: PVM
    b_pvm: PVM


def _faulty_state(dim: int, rng: np.random.Generator) -> DensityMatrix:
    # a noisy estimate whose hermitization step was skipped
    g = ginibre(dim, dim, rng)
    m = g @ g.conj().T
    m = m / np.trace(m).real + 1e-6 * ginibre(dim, dim, rng)
    return DensityMatrix._unchecked(m)


def random_instances(dims, count: int, seed: int, fault: str | None = None) -> list[Instance]:
    """``count`` random ``(rho, A, B)`` triples cycling through ``dims``.

    States alternate between pure and mixed; PVMs are random coarse-grainings
    of random bases, so degenerate projectors occur.
    """
    if fault is not None and fault not in FAULTS:
        raise ValueError(f"unknown fault {fault!r}")
    out = []
    for i in range(count):
        dim = dims[i % len(dims)]
        rng = make_rng(seed, _STREAM_INSTANCES, i)
        if fault == "skip-hermitization":
            rho = _faulty_state(dim, rng)
        else:
            rho = random_density(dim, rng, "pure" if i % 2 else "mixed")
        out.append(Instance(rho, random_pvm(dim, rng), random_pvm(dim, rng)))
    return out


def _guarded(name: str, threshold: float, count: int, fn) -> FamilyResult:
    try:
        worst, detail = fn()
    except KirkwoodError as exc:
        return FamilyResult(name, False, float("inf"), threshold, count,
                            detail=f"{type(exc).__name__}: {exc}")
    return FamilyResult(name, bool(worst <= threshold), float(worst), threshold, count,
                        detail=detail)


def check_marginals(instances, threshold: float = _EXACT) -> FamilyResult:
    """Kirkwood row/column sums against Born probabilities, imaginary parts zero."""
    def run():
        worst = 0.0
        for inst in instances:
            k = kirkwood_entries(inst.rho.matrix, inst.a_pvm.stack, inst.b_pvm.stack)
            rows, cols = k.sum(axis=1), k.sum(axis=0)
            worst = max(worst,
                        max_abs(rows.real - born_probabilities(inst.rho, inst.a_pvm)),
                        max_abs(cols.real - born_probabilities(inst.rho, inst.b_pvm)),
                        max_abs(rows.imag), max_abs(cols.imag))
        return worst, ""
    return _guarded("marginals", threshold, len(instances), run)


def check_decomposition(instances, threshold: float = _EXACT) -> FamilyResult:
    """Every entry rebuilt from the Wigner term and the two disturbances."""
    loose = DEFAULT_TOL.replace(herm=np.inf)

    def run():
        worst = 0.0
        for inst in instances:
            k = kirkwood_entries(inst.rho.matrix, inst.a_pvm.stack, inst.b_pvm.stack)
            for m in range(len(inst.a_pvm)):
                for n, b in enumerate(inst.b_pvm.projectors):
                    d = decompose(inst.rho, inst.a_pvm, m, b, loose)
                    worst = max(worst, abs(d.reassembled - k[m, n]))
        return worst, ""
    return _guarded("decomposition", threshold, len(instances), run)


def _degenerate_pvms(dim: int, rng: np.random.Generator) -> list[PVM]:
    pvms = [random_pvm(dim, rng)]
    if dim >= 5:
        pvms.append(random_pvm(dim, rng, [2, 3] + [1] * (dim - 5)))
    if dim >= 4:
        pvms.append(random_pvm(dim, rng, [2] + [1] * (dim - 2)))
    return pvms


def check_randomization(instances, seed: int = 0, threshold: float = _EXACT) -> FamilyResult:
    """Lüders reduction equals the average over a pi phase flip, every projector."""
    def run():
        worst = 0.0
        for i, inst in enumerate(instances):
            rng = make_rng(seed, _STREAM_DEGENERATE, i)
            for pvm in [inst.a_pvm, *_degenerate_pvms(inst.rho.dim, rng)]:
                for m in range(len(pvm)):
                    worst = max(worst, randomization_identity_check(inst.rho, pvm, m))
        return worst, ""
    return _guarded("randomization", threshold, len(instances), run)


def check_post_measurement(instances, threshold: float = _EXACT,
                           tol: Tolerances = DEFAULT_TOL) -> FamilyResult:
    """Kirkwood tables after nonselective and selective reduction.

    The measured row must equal the Wigner row (nonselective) or the Wigner
    row over ``P(a_m)`` with all other rows zero (selective).
    """
    def run():
        worst = 0.0
        for inst in instances:
            w = wigner_joint(inst.rho, inst.a_pvm, inst.b_pvm, tol).entries
            p = born_probabilities(inst.rho, inst.a_pvm)
            for m in range(len(inst.a_pvm)):
                after = kirkwood_after_nonselective(inst.rho, inst.a_pvm, m, inst.b_pvm, tol)
                direct = kirkwood(lueders_nonselective(inst.rho, inst.a_pvm[m]),
                                  inst.a_pvm, inst.b_pvm, tol)
                worst = max(worst, max_abs(after.entries[m] - w[m]),
                            max_abs(after.entries - direct.entries))
                if p[m] <= tol.prob:
                    continue
                sel = kirkwood_after_selective(inst.rho, inst.a_pvm, m, inst.b_pvm, tol).entries
                others = np.delete(sel, m, axis=0)
                worst = max(worst, max_abs(sel[m] - w[m] / p[m]), max_abs(others))
            full = nonselective_full(inst.rho, inst.a_pvm)
            worst = max(worst, max_abs(w.sum(axis=0) - born_probabilities(full, inst.b_pvm)))
        return worst, ""
    return _guarded("post_measurement", threshold, len(instances), run)


def check_commuting(dims, count: int, seed: int, threshold: float = _COMMUTING) -> FamilyResult:
    """Kirkwood tables over commuting PVMs are real and nonnegative."""
    def run():
        worst = 0.0
        for i in range(count):
            dim = dims[i % len(dims)]
            rng = make_rng(seed, _STREAM_COMMUTING, i)
            a, b = commuting_pvms(dim, rng)
            k = kirkwood(random_density(dim, rng), a, b).entries
            worst = max(worst, max_abs(k.imag), max(0.0, -float(k.real.min())))
        return worst, ""
    return _guarded("commuting", threshold, count, run)


def check_round_trip(dims, per_dim: int, seed: int,
                     tol: Tolerances = DEFAULT_TOL) -> FamilyResult:
    """State to Kirkwood table and back, over Schwinger and random pairs.

    Also requires that a pair sharing one vector is rejected.
    """
    def run():
        worst = 0.0
        for dim in dims:
            schwinger = schwinger_pair(dim)
            for i in range(per_dim):
                rng = make_rng(seed, _STREAM_ROUND_TRIP, dim, i)
                rho = random_density(dim, rng, "pure" if i % 2 else "mixed")
                for pair in (schwinger, random_complementary_pair(dim, rng, tol.overlap)):
                    table = kirkwood(rho, pair.a_pvm, pair.b_pvm, tol)
                    back = reconstruct_density(table, pair, tol)
                    worst = max(worst, float(np.linalg.norm(back.matrix - rho.matrix)))
            rng = make_rng(seed, _STREAM_ROUND_TRIP, dim, per_dim)
            bad = shared_vector_pair(dim, rng)
            table = kirkwood(random_density(dim, rng), bad.a_pvm, bad.b_pvm, tol)
            try:
                reconstruct_density(table, bad, tol)
            except NotComplementary:
                continue
            return float("inf"), f"shared-vector pair in dimension {dim} was not rejected"
        return worst, ""
    return _guarded("round_trip", tol.recon, len(dims) * per_dim, run)


def check_fourier(dims, per_dim: int, seed: int, threshold: float = _EXACT) -> FamilyResult:
    """Fourier inversion against the general inversion on Schwinger pairs."""
    def run():
        worst = 0.0
        for dim in dims:
            pair = schwinger_pair(dim)
            for i in range(per_dim):
                rng = make_rng(seed, _STREAM_FOURIER, dim, i)
                table = kirkwood(random_density(dim, rng), pair.a_pvm, pair.b_pvm)
                worst = max(worst, max_abs(reconstruct_fourier(table, dim).matrix
                                           - reconstruct_density(table, pair).matrix))
        return worst, ""
    return _guarded("fourier", threshold, len(dims) * per_dim, run)


@dataclass
class WitnessResult:
    """Two states with equal Margenau-Hill tables but different Kirkwood tables."""

    found: bool
    dim: int | None = None
    pair: BasisPair | None = field(default=None, repr=False)
    rho_1: DensityMatrix | None = field(default=None, repr=False)
    rho_2: DensityMatrix | None = field(default=None, repr=False)
    state_distance: float = 0.0
    mh_difference: float = float("inf")
    imag_difference: float = 0.0


def _hermitian_basis(dim: int) -> list[np.ndarray]:
    basis = []
    for i in range(dim):
        e = np.zeros((dim, dim), complex)
        e[i, i] = 1
        basis.append(e)
    for i in range(dim):
        for j in range(i + 1, dim):
            s = np.zeros((dim, dim), complex)
            s[i, j] = s[j, i] = 1 / np.sqrt(2)
            a = np.zeros((dim, dim), complex)
            a[i, j], a[j, i] = 1j / np.sqrt(2), -1j / np.sqrt(2)
            basis += [s, a]
    return basis


def search_mh_witness(dims=(2, 3), seed: int = 0, min_distance: float = 1e-3,
                      mh_tol: float = 1e-10) -> WitnessResult:
    """Look for two states that the Margenau-Hill table cannot tell apart.

    For each dimension and candidate pair (Schwinger, then a random
    complementary pair) the real-linear map from hermitian matrices to
    Margenau-Hill tables is assembled and its null space computed. A null
    direction ``D`` is added to and subtracted from a full-rank state, scaled
    to keep both results positive. Success requires state distance of at
    least ``min_distance`` with tables equal to ``mh_tol``.
    """
    best = WitnessResult(False)
    for dim in dims:
        rng = make_rng(seed, _STREAM_WITNESS, dim)
        herm = _hermitian_basis(dim)
        for pair in (schwinger_pair(dim), random_complementary_pair(dim, rng)):
            a, b = pair.a_pvm.stack, pair.b_pvm.stack
            lin = np.array([kirkwood_entries(h, a, b).real.ravel() for h in herm]).T
            _, s, vt = np.linalg.svd(lin)
            rank = int(np.sum(s > 1e-12 * s[0]))
            for d in vt[rank:]:
                delta = sum(c * h for c, h in zip(d, herm))
                base = random_density(dim, rng, "mixed")
                room = float(np.linalg.eigvalsh(base.matrix)[0])
                t = 0.5 * room / float(np.linalg.norm(delta, 2))
                rho_1 = DensityMatrix(base.matrix + t * delta)
                rho_2 = DensityMatrix(base.matrix - t * delta)
                distance = float(np.linalg.norm(rho_1.matrix - rho_2.matrix))
                mh_diff = max_abs(margenau_hill(rho_1, pair.a_pvm, pair.b_pvm)
                                  - margenau_hill(rho_2, pair.a_pvm, pair.b_pvm))
                imag_diff = max_abs(kirkwood(rho_1, pair.a_pvm, pair.b_pvm).imag
                                    - kirkwood(rho_2, pair.a_pvm, pair.b_pvm).imag)
                cand = WitnessResult(distance >= min_distance and mh_diff <= mh_tol
                                     and imag_diff > mh_tol,
                                     dim, pair, rho_1, rho_2, distance, mh_diff, imag_diff)
                if cand.found:
                    return cand
                if cand.state_distance > best.state_distance:
                    best = cand
    return best


def run_suite(dims=tuple(range(2, 9)), instances: int = 50, seed: int = 0,
              fault: str | None = None, tol: Tolerances = DEFAULT_TOL) -> list[FamilyResult]:
    """Run every family; ``instances`` is the per-family random sample size."""
    if instances < 1:
        raise ValueError("instances must be positive")
    dims = list(dims)
    if not dims or min(dims) < 2:
        raise ValueError("dimensions must be at least 2")
    sample = random_instances(dims, instances, seed, fault)
    per_dim = max(1, -(-instances // len(dims)))
    results = [
        check_marginals(sample),
        check_decomposition(sample),
        check_randomization(sample, seed),
        check_post_measurement(sample, tol=tol),
        check_commuting(dims, instances, seed),
        check_round_trip(dims, per_dim, seed, tol),
        check_fourier(dims, per_dim, seed),
    ]
    witness = search_mh_witness(seed=seed)
    results.append(FamilyResult(
        "mh_witness", witness.found, witness.mh_difference, 1e-10, 1,
        status="pass" if witness.found else "inconclusive",
        detail=(f"dim {witness.dim}: state distance {witness.state_distance:.3e}, "
                f"imaginary parts differ by {witness.imag_difference:.3e}"),
    ))
    return results
