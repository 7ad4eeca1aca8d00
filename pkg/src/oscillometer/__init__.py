"""Cube-family oscillation norms for grid measures.

Layers: exact cube-mass queries on piecewise-constant grid measures, the
doubling-cube machinery along concentric chains, a scale-gap coefficient
for nested pairs, a greedy bounded-overlap point covering, and seven
oscillation-norm estimators evaluated over shared sampled cube families.
Hot integration kernels run compiled when the extension is built and fall
back to numpy otherwise (see ``oscillometer._kernels``).
"""

from ._kernels import BACKEND, USING_COMPILED
from .covering import CoverInstance, CoverResult, besicovitch_cover
from .errors import (
    FamilyMismatchError,
    InadmissibleCenterError,
    InvalidInputError,
    InvalidPairError,
    InvalidUseError,
    OscillometerError,
    SearchFailureError,
    ZeroMassMeanError,
)
from .geometry import (
    Cube,
    CubeChain,
    ChainSegment,
    biggest_doubling_contraction,
    chain_segment,
    contains,
    expansion_step_bound,
    in_Q,
    in_Q_ex,
    is_doubling,
    scale,
    smallest_doubling_expansion,
)
from .kcoeff import KResult, k_coefficient
from .measure import (
    DoublingConfig,
    GridMeasure,
    build_measure,
    estimate_growth_constant,
    load_measure,
    measure_of_cube,
)
from .norms import (
    CubeFamily,
    CubeRecord,
    FamilyEvaluation,
    FamilyParams,
    GridFunction,
    NormEntry,
    NormReport,
    PairRecord,
    WitnessAssignment,
    bmo_classical_norm,
    compute_norm_report,
    family_from_cubes,
    function_from_dict,
    load_function,
    mean,
    oscillation_term,
    rbmo1_norm,
    rbmo2_norm,
    rbmo3_norm,
    rbmo4_norm,
    rbmo_global_norm,
    rbmo_yang_norm,
    sample_family,
)

__version__ = "0.1.0"
