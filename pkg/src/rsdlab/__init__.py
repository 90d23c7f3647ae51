"""Random serial dictatorship: exact simulation, Monte Carlo estimation and property checks."""
from .errors import (
    DuplicateSchoolInList,
    InstanceError,
    InstanceTooLarge,
    MoreSchoolsThanStudents,
    NotBindingSchool,
    RsdLabError,
    SchoolIndexOutOfRange,
    SpecInvalid,
    ZeroCapacity,
)
from .generators import (
    GeneratorSpec,
    generate_instance,
    lottery_model_permutation,
    sample_permutation,
    substream,
)
from .market import (
    UNMATCHED,
    Assignment,
    CutoffVector,
    DemandTrajectory,
    MarketInstance,
    Permutation,
    apply_transposition,
    cutoffs,
    decompose_into_transpositions,
    demand_trajectory,
    hamming_distance,
    insertion,
    run_rsd,
    validate_instance,
)

__version__ = "0.1.0"
