"""Integrated information for finite quantum states, plus the collapse dynamics it drives.

The package computes a partition-based integration measure for density
matrices on a lattice of small sites, identifies the minimizing
partition, and integrates a nonlinear master equation whose damping
rates follow that measure. See the README for definitions and usage.
"""

from .collapse import (
    CouplingSpec,
    IntegratorConfig,
    LindbladBasis,
    RaceEntry,
    TrajectoryRecord,
    evolve,
    gell_mann_matrices,
    generator,
    half_coherence_time,
    l1_coherence,
    race,
    transverse_field,
)
from .densemat import (
    DensityMatrix,
    SitedSpace,
    SpectralDecomposition,
    fidelity,
    hermitian_eig,
    log2_on_support,
    partial_trace,
    permute_sites,
    purity,
    tensor_product,
    unitary_propagator,
)
from .entropy import (
    RelEntResult,
    product_of_marginals,
    rel_ent_to_marginals,
    relative_entropy,
    von_neumann_entropy,
)
from .errors import CapacityError, IntegrationFailureError
from .partitions import Partition, bipartitions_only, enumerate_partitions
from .qii import QiiResult, compute_qii, qii_profile
from .states import (
    StateSpec,
    basis_state,
    dicke,
    ghz,
    product_state,
    random_mixed,
    random_pure,
    w,
)

__version__ = "0.1.0"

__all__ = [
    "CapacityError",
    "CouplingSpec",
    "DensityMatrix",
    "IntegrationFailureError",
    "IntegratorConfig",
    "LindbladBasis",
    "Partition",
    "QiiResult",
    "RaceEntry",
    "RelEntResult",
    "SitedSpace",
    "SpectralDecomposition",
    "StateSpec",
    "TrajectoryRecord",
    "basis_state",
    "bipartitions_only",
    "compute_qii",
    "dicke",
    "enumerate_partitions",
    "evolve",
    "fidelity",
    "gell_mann_matrices",
    "generator",
    "ghz",
    "half_coherence_time",
    "hermitian_eig",
    "l1_coherence",
    "log2_on_support",
    "partial_trace",
    "permute_sites",
    "product_of_marginals",
    "product_state",
    "purity",
    "qii_profile",
    "race",
    "random_mixed",
    "random_pure",
    "rel_ent_to_marginals",
    "relative_entropy",
    "tensor_product",
    "transverse_field",
    "unitary_propagator",
    "von_neumann_entropy",
    "w",
]
