"""Exact simulation and certification of local subset identification.

A known orthogonal set of multipartite states is sampled k at a time and
the copies are handed to spatially separated parties; the task is to name
the subset (never the order) using local measurements and classical
messages. This package builds the state families, simulates measurement
protocols exactly, and issues machine-checked certificates for instances
where no protocol across a given bipartition can succeed.
"""

from .certificates import (
    CERTIFIED,
    CONDITION_FAILS,
    PREMISE_FAILS,
    Certificate,
    CertificateRequest,
    GenuineResult,
    all_bipartitions,
    certify_cut,
    certify_genuine,
    certify_basis_pairs,
    max_hypothesis_overlap,
)
from .engine import execute, render_structured, render_text
from .errors import (
    AmbiguityError,
    CoverageError,
    ExecutionError,
    LocalityError,
    NoConnectingUnitaryError,
    ResourceLimitError,
    ScriptError,
)
from .families import (
    bell,
    bell_basis,
    connecting_unitary,
    ges_basis,
    ges_state,
    ghz3,
    ghz3_basis,
    ghz4,
    ghz4_basis,
    named_states,
)
from .protocols import (
    PROTOCOLS,
    Classifier,
    Measurement,
    Protocol,
    ProtocolStep,
    SimulationReport,
    basis_measurement,
    builtin_bell32,
    builtin_bell32_variants,
    builtin_bell43,
    derive_classifier,
    format_transcript,
    order_blindness,
    order_blindness_verdict,
    perfect_identification,
    run_exact,
    validate,
)
from .script import Script, parse, serialize
from .statespace import (
    ATOL,
    Cut,
    DensityOperator,
    Factor,
    Layout,
    StateVector,
    is_maximally_entangled,
    partial_trace,
    qubit_layout,
    reduced_state,
    regroup,
    regroup_coefficients,
    schmidt_coefficients,
    tensor,
)
from .subsets import (
    MixedHypothesis,
    StateSet,
    SubsetTask,
    enumerate_subsets,
    hypothesis_ensemble,
    orderings,
    rho_subset,
    stacked_state,
)

__version__ = "0.1.0"

__all__ = [
    "ATOL",
    "AmbiguityError",
    "CERTIFIED",
    "CONDITION_FAILS",
    "Certificate",
    "CertificateRequest",
    "Classifier",
    "CoverageError",
    "Cut",
    "DensityOperator",
    "ExecutionError",
    "Factor",
    "GenuineResult",
    "Layout",
    "LocalityError",
    "Measurement",
    "MixedHypothesis",
    "NoConnectingUnitaryError",
    "PREMISE_FAILS",
    "PROTOCOLS",
    "Protocol",
    "ProtocolStep",
    "ResourceLimitError",
    "Script",
    "ScriptError",
    "SimulationReport",
    "StateSet",
    "StateVector",
    "SubsetTask",
    "all_bipartitions",
    "basis_measurement",
    "bell",
    "bell_basis",
    "builtin_bell32",
    "builtin_bell32_variants",
    "builtin_bell43",
    "certify_cut",
    "certify_genuine",
    "connecting_unitary",
    "certify_basis_pairs",
    "derive_classifier",
    "enumerate_subsets",
    "execute",
    "format_transcript",
    "ges_basis",
    "ges_state",
    "ghz3",
    "ghz3_basis",
    "ghz4",
    "ghz4_basis",
    "hypothesis_ensemble",
    "is_maximally_entangled",
    "max_hypothesis_overlap",
    "named_states",
    "order_blindness",
    "order_blindness_verdict",
    "orderings",
    "parse",
    "partial_trace",
    "perfect_identification",
    "qubit_layout",
    "reduced_state",
    "regroup",
    "regroup_coefficients",
    "render_structured",
    "render_text",
    "rho_subset",
    "run_exact",
    "schmidt_coefficients",
    "serialize",
    "stacked_state",
    "tensor",
    "validate",
]
