"""Jaynes-Cummings dynamics with an AC Stark term, line shapes, and cat-state discrimination."""

from .dynamics import (
    AtomInit,
    JointState,
    ModelParams,
    SectorPropagator,
    StarkValidityWarning,
    evolve,
    ground_weight,
    inversion,
    inversion_excited,
    inversion_ground,
    rabi_freq,
    sector_propagator,
    state_from,
)
from .lineshape import (
    ComplexAmplitudes,
    DiscriminationMap,
    LineShape,
    avg_inversion,
    avg_inversion_excited,
    avg_inversion_general,
    avg_inversion_ground,
    coherent_surface,
    discrimination_map,
    sweep,
)
from .oracle import (
    StepFailure,
    TruncatedHamiltonian,
    build_hamiltonian,
    inversion_numeric,
    propagate_numeric,
)
from .photon_stats import (
    DegenerateCat,
    FieldKind,
    FieldSpec,
    PhotonDistribution,
    TruncationPolicy,
    cat_distribution,
    cat_norm,
    coherent_distribution,
    distribution,
    fock_distribution,
)

__version__ = "0.1.0"
