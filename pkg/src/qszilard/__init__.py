"""Work extraction by a quantum Szilard engine with N ideal particles in 1D."""
from qszilard._kernels import BACKEND
from qszilard.engine import (
    CycleResult,
    EngineConfig,
    classical_reference,
    deviation_scaling_fit,
    equilibrium_position,
    expansion_work,
    generalized_force,
    insertion_work,
    perturbative_work,
    removal_work,
    total_work,
    work_deviation,
)
from qszilard.ensemble import (
    SplitPartition,
    Statistics,
    canonical_partition,
    crossover_parameters,
    f0_closed_form,
    split_partition,
)
from qszilard.errors import (
    CapacityError,
    ConfigError,
    DomainError,
    FitDomainError,
    InternalConsistencyError,
    NumericalLossError,
    PerturbativeRangeWarning,
    QSzilardError,
    TruncationError,
    UnsupportedOperationError,
)
from qszilard.spectra import (
    PartitionSum,
    PotentialKind,
    PotentialModel,
    eigenenergy,
    eigenenergy_length_derivative,
    single_partition,
)

__all__ = [name for name in dir() if not name.startswith("_")]
