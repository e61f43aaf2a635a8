"""Monte-Carlo simulation of successive projective measurements.

Every trial starts from a fresh copy of the prepared state. Trials are
processed in fixed-size blocks; block ``k`` of arm ``j`` draws from the
Philox stream keyed by ``(seed, j, k)``, so results do not depend on how
blocks are scheduled across threads.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .generate import make_rng
from .linalg import DEFAULT_TOL, PVM, DensityMatrix, Projector, Tolerances, _frozen
from .measurement import (
    _check_index,
    _same_dim,
    born_probabilities,
    lueders_selective,
    phase_rotation,
    rotate_projector,
)
from .quasiprob import combine_disturbance

__all__ = [
    "BLOCK_SIZE", "JointCountTable", "KirkwoodEstimate",
    "inverse_cdf", "simulate_direct", "simulate_successive", "estimate_kirkwood",
]

BLOCK_SIZE = 1 << 16

# stream keys of the estimation arms
_ARM_SUCCESSIVE, _ARM_DIRECT, _ARM_ROTATED, _ARM_ROTATED_SUCCESSIVE = 1, 2, 3, 4


@dataclass(frozen=True, eq=False)
class JointCountTable:
    """Outcome counts of successive measurements; rows index the first PVM."""

    counts: np.ndarray
    trials: int
    seed: int

    def __post_init__(self):
        c = np.asarray(self.counts, dtype=np.int64)
        if c.ndim != 2 or (c < 0).any():
            raise ValidationError("counts must be a 2-d table of nonnegative integers")
        if int(c.sum()) != self.trials:
            raise ValidationError(f"counts sum to {int(c.sum())}, expected {self.trials}")
        object.__setattr__(self, "counts", _frozen(c, np.int64))

    @property
    def frequencies(self) -> np.ndarray:
        return self.counts / self.trials


@dataclass(frozen=True)
class KirkwoodEstimate:
    """Sampled Kirkwood value with per-component standard errors.

    ``wigner_term``, ``real_disturbance`` and ``imag_disturbance`` are the
    sampled counterparts of :class:`~kirkwood.quasiprob.DisturbanceDecomposition`.
    """

    value: complex
    std_error_re: float
    std_error_im: float
    trials_per_arm: int
    seed: int
    wigner_term: float
    real_disturbance: float
    imag_disturbance: float


def inverse_cdf(probs, uniforms) -> np.ndarray:
    """Map uniforms in ``[0, 1)`` to outcome indices.

    ``probs`` is a vector, or a ``(trials, K)`` array giving one distribution
    per uniform. Negative roundoff is clamped to zero, and mass missing from
    the cumulative sum is absorbed by the last outcome of nonzero probability.
    """
    p = np.clip(np.asarray(probs, dtype=float), 0.0, None)
    u = np.asarray(uniforms, dtype=float)
    cdf = np.cumsum(p, axis=-1)
    if p.ndim == 1:
        idx = np.searchsorted(cdf, u, side="right")
        last = np.flatnonzero(p > 0)[-1]
    else:
        idx = (u[:, None] >= cdf).sum(axis=1)
        k = p.shape[-1]
        last = k - 1 - np.argmax((p > 0)[:, ::-1], axis=1)
    return np.minimum(idx, last)


def _blocks(trials: int, block_size: int) -> list[tuple[int, int]]:
    return [(k, min(block_size, trials - start))
            for k, start in enumerate(range(0, trials, block_size))]


def _run_blocks(fn, trials: int, block_size: int, workers: int) -> np.ndarray:
    blocks = _blocks(trials, block_size)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda b: fn(*b), blocks))
    else:
        parts = [fn(*b) for b in blocks]
    return np.sum(parts, axis=0)


def _check_budget(trials: int) -> None:
    if int(trials) < 1:
        raise ValueError(f"need at least one trial, got {trials}")


def _first_outcome_probs(rho: DensityMatrix, pvm: PVM, tol: Tolerances) -> np.ndarray:
    p = born_probabilities(rho, pvm)
    # branches below tol.prob have no well-defined collapsed state
    return np.where(p > tol.prob, p, 0.0)


def simulate_direct(rho: DensityMatrix, pvm: PVM, trials: int, seed: int, *,
                    arm: int = 0, block_size: int = BLOCK_SIZE, workers: int = 1,
                    tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Counts of a single measurement of ``pvm`` repeated ``trials`` times."""
    _same_dim(rho, pvm)
    _check_budget(trials)
    p = _first_outcome_probs(rho, pvm, tol)

    def block(k, n):
        u = make_rng(seed, arm, k).random(n)
        return np.bincount(inverse_cdf(p, u), minlength=len(pvm))

    return _run_blocks(block, int(trials), block_size, workers).astype(np.int64)


def simulate_successive(rho: DensityMatrix, a_pvm: PVM, b_pvm: PVM, trials: int, seed: int, *,
                        arm: int = 0, block_size: int = BLOCK_SIZE, workers: int = 1,
                        tol: Tolerances = DEFAULT_TOL) -> JointCountTable:
    """Measure ``a_pvm``, keep the collapsed state, then measure ``b_pvm``.

    Each trial draws ``m`` from the Born distribution of A, replaces the
    state by its selective Lüders reduction on ``A_m`` and draws ``n`` from
    the Born distribution of B on that state. The result is a deterministic
    function of the inputs and ``seed`` for any ``workers``.
    """
    _same_dim(rho, a_pvm, b_pvm)
    _check_budget(trials)
    p_a = _first_outcome_probs(rho, a_pvm, tol)
    cond = np.zeros((len(a_pvm), len(b_pvm)))
    for m in np.flatnonzero(p_a):
        cond[m] = born_probabilities(lueders_selective(rho, a_pvm[m], tol), b_pvm)
    cond[p_a == 0] = 1.0 / len(b_pvm)  # never drawn, keeps inverse_cdf well defined
    n_b = len(b_pvm)

    def block(k, n):
        rng = make_rng(seed, arm, k)
        u_first, u_second = rng.random(n), rng.random(n)
        m = inverse_cdf(p_a, u_first)
        j = inverse_cdf(cond[m], u_second)
        return np.bincount(m * n_b + j, minlength=len(a_pvm) * n_b)

    flat = _run_blocks(block, int(trials), block_size, workers)
    return JointCountTable(flat.reshape(len(a_pvm), n_b), int(trials), int(seed))


def _two_outcome(proj: Projector) -> PVM:
    if proj.rank == proj.dim:
        return PVM((proj,))
    return PVM((proj, Projector(proj.complement)))


def estimate_kirkwood(rho: DensityMatrix, a_pvm: PVM, index: int, b_proj: Projector,
                      trials_per_arm: int, seed: int, *, block_size: int = BLOCK_SIZE,
                      workers: int = 1, tol: Tolerances = DEFAULT_TOL) -> KirkwoodEstimate:
    """Estimate ``Tr(rho A_m B)`` from four simulated experiments.

    1. ``A_m`` then ``B``: the joint "yes, yes" frequency and the
       probability of ``B`` after the intervening measurement.
    2. ``B`` alone.
    3. The phase-rotated projector ``B'`` alone.
    4. ``A_m`` then ``B'``.

    All measurements are two-outcome projector measurements. Standard errors
    use the multinomial variance of each arm, including the covariance of
    the two quantities taken from arm 1.
    """
    _same_dim(rho, a_pvm, b_proj)
    _check_index(a_pvm, index)
    _check_budget(trials_per_arm)
    t = int(trials_per_arm)
    opts = dict(block_size=block_size, workers=workers, tol=tol)
    a2 = _two_outcome(a_pvm[index])
    b2 = _two_outcome(b_proj)
    rotated = rotate_projector(phase_rotation(a_pvm, index, np.pi / 2), b_proj)
    r2 = _two_outcome(rotated)

    joint = simulate_successive(rho, a2, b2, t, seed, arm=_ARM_SUCCESSIVE, **opts).frequencies
    direct = simulate_direct(rho, b2, t, seed, arm=_ARM_DIRECT, **opts) / t
    rot_direct = simulate_direct(rho, r2, t, seed, arm=_ARM_ROTATED, **opts) / t
    rot_joint = simulate_successive(rho, a2, r2, t, seed,
                                    arm=_ARM_ROTATED_SUCCESSIVE, **opts).frequencies

    f_yes_yes = joint[0, 0]
    f_no_yes = joint[1, 0] if len(a2) > 1 else 0.0
    p_b, q_b = direct[0], f_yes_yes + f_no_yes
    p_r, q_r = rot_direct[0], rot_joint[:, 0].sum()
    wigner, re_dist, im_dist = combine_disturbance(f_yes_yes, p_b, q_b, p_r, q_r)

    # wigner + (p_b - q_b)/2 = (f_yes_yes - f_no_yes)/2 + p_b/2, arms independent
    var_re = 0.25 * (f_yes_yes + f_no_yes - (f_yes_yes - f_no_yes) ** 2) + 0.25 * p_b * (1 - p_b)
    var_im = 0.25 * (p_r * (1 - p_r) + q_r * (1 - q_r))
    return KirkwoodEstimate(
        value=complex(wigner + re_dist, im_dist),
        std_error_re=float(np.sqrt(var_re / t)),
        std_error_im=float(np.sqrt(var_im / t)),
        trials_per_arm=t,
        seed=int(seed),
        wigner_term=float(wigner),
        real_disturbance=float(re_dist),
        imag_disturbance=float(im_dist),
    )
