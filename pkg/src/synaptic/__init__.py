"""Sharp and fuzzy observables on the synaptic algebra of Hermitian matrices."""
from .config import DEFAULT_TOLERANCES, Tolerances, get_tolerances, tolerances
from .effect_algebra import (
    AxiomViolation,
    EAState,
    FiniteEffectAlgebra,
    StructureReport,
    boolean_algebra,
    chain,
    check_axioms,
    mo,
    verify_axioms,
)
from .errors import (
    AxiomViolationError,
    CertificationError,
    DimensionMismatch,
    FunctionUndefined,
    IdealMismatch,
    InvalidObservable,
    InvalidResolution,
    InvalidState,
    KernelViolation,
    MeetUndefined,
    NonCommuting,
    NonCommutingInput,
    NonCommutingRange,
    NonCommutingRanges,
    NotHermitian,
    NotPositive,
    NotProjection,
    NotSharp,
    OverlappingAtoms,
    RefusalError,
    SynapticError,
    UnknownOutcome,
    ValidationError,
)
from .matrix_core import (
    HermitianElement,
    Projection,
    SpectralResolution,
    absolute,
    carrier,
    commutes,
    element_from_resolution,
    functional_calculus,
    jordan_product,
    leq,
    order_unit_norm,
    quadratic_map,
    spectral_resolution,
    square_root,
)
from .observables import (
    Observable,
    RealObservable,
    element_of_observable,
    f_function,
    g_function,
    joint_spectral_measure,
    observable_of_element,
)
from .smearing import (
    LoomisSikorski,
    MarkovKernel,
    WeakMarkovKernel,
    decompose_commuting,
    finite_loomis_sikorski,
    integrate,
    kernel_equiv,
    pushforward,
    smear,
    validate_kernel,
)
from .states import DensityState, apply, distribution, expectation, norm_via_states, spanning_states

__version__ = "0.1.0"

__all__ = [
    "AxiomViolation",
    "AxiomViolationError",
    "CertificationError",
    "DEFAULT_TOLERANCES",
    "DensityState",
    "DimensionMismatch",
    "EAState",
    "FiniteEffectAlgebra",
    "FunctionUndefined",
    "HermitianElement",
    "IdealMismatch",
    "InvalidObservable",
    "InvalidResolution",
    "InvalidState",
    "KernelViolation",
    "LoomisSikorski",
    "MarkovKernel",
    "MeetUndefined",
    "NonCommuting",
    "NonCommutingInput",
    "NonCommutingRange",
    "NonCommutingRanges",
    "NotHermitian",
    "NotPositive",
    "NotProjection",
    "NotSharp",
    "Observable",
    "OverlappingAtoms",
    "Projection",
    "RealObservable",
    "RefusalError",
    "SpectralResolution",
    "StructureReport",
    "SynapticError",
    "Tolerances",
    "UnknownOutcome",
    "ValidationError",
    "WeakMarkovKernel",
    "absolute",
    "apply",
    "boolean_algebra",
    "carrier",
    "chain",
    "check_axioms",
    "commutes",
    "decompose_commuting",
    "distribution",
    "element_from_resolution",
    "element_of_observable",
    "expectation",
    "f_function",
    "finite_loomis_sikorski",
    "functional_calculus",
    "g_function",
    "get_tolerances",
    "integrate",
    "joint_spectral_measure",
    "jordan_product",
    "kernel_equiv",
    "leq",
    "mo",
    "norm_via_states",
    "observable_of_element",
    "order_unit_norm",
    "pushforward",
    "quadratic_map",
    "smear",
    "spanning_states",
    "spectral_resolution",
    "square_root",
    "tolerances",
    "validate_kernel",
    "verify_axioms",
]
