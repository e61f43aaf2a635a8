"""Kirkwood quasiprobabilities for successive projective measurements.

Lüders state reduction, the Wigner joint-probability formula, the complex
Kirkwood distribution with its disturbance decomposition, and density-matrix
reconstruction from Kirkwood tables over complementary bases.
"""

__version__ = "0.1.0"

from .errors import *  # noqa: E402,F401,F403
from .linalg import (  # noqa: E402
    DEFAULT_TOL,
    PVM,
    DensityMatrix,
    OrthonormalBasis,
    Projector,
    StateVector,
    Tolerances,
    overlap_matrix,
    pvm_from_basis,
    pvm_from_observable,
    validate_density,
)
from .measurement import (  # noqa: E402
    JointProbabilityTable,
    PhaseRotation,
    born_probabilities,
    conditional_probability,
    lueders_nonselective,
    lueders_selective,
    nonselective_full,
    phase_rotation,
    randomization_identity_check,
    rotate_projector,
    wigner_joint,
)
from .quasiprob import (  # noqa: E402
    DisturbanceDecomposition,
    KirkwoodTable,
    decompose,
    kirkwood,
    kirkwood_after_nonselective,
    kirkwood_after_selective,
    margenau_hill,
)
from .reconstruct import (  # noqa: E402
    BasisPair,
    check_complementary,
    check_mub,
    kirkwood_rebase,
    reconstruct_density,
    reconstruct_fourier,
    schwinger_pair,
)
from .sampling import (  # noqa: E402
    JointCountTable,
    KirkwoodEstimate,
    estimate_kirkwood,
    simulate_successive,
)
