"""Geometric quantum discord of two-qubit states.

Three independent routes to the same quantity: the closed-form Bloch
computation, exact simulation of the multi-copy singlet-projector
measurement scheme, and finite-shot Monte-Carlo simulation of that scheme,
plus a state-tomography baseline for resource comparison.
"""

from .contraction import (
    OutcomeDistribution,
    build_u,
    build_v,
    expect_layout,
    expect_layout_dense_oracle,
    joint_distribution,
    pauli_exchange_sum,
)
from .errors import NumericalContractError, StateValidationError
from .estimator import (
    GqdEstimate,
    MomentAuditReport,
    MomentTriple,
    OutcomeVector,
    eigenvalues_from_moments,
    estimate_gqd,
    moments_from_outcomes,
    outcomes_exact,
    outcomes_sampled,
    permute_outcomes,
    verify_moment_formulas,
)
from .gqd_core import GqdValue, KMatrix, gqd_by_minimization, gqd_exact, k_matrix
from .pairing import (
    PairingLayout,
    PairOp,
    QubitSlot,
    Setting,
    render_layout,
    settings,
    standard_layouts,
)
from .qst_baseline import ResourceReport, qst_estimate, resource_report
from .statekit import (
    BlochForm,
    TwoQubitState,
    decompose,
    make_family,
    random_state,
    reconstruct,
    state_from_dict,
    state_from_json,
    state_to_dict,
    state_to_json,
)

__version__ = "0.1.0"

__all__ = [
    "BlochForm",
    "GqdEstimate",
    "GqdValue",
    "KMatrix",
    "MomentAuditReport",
    "MomentTriple",
    "NumericalContractError",
    "OutcomeDistribution",
    "OutcomeVector",
    "PairOp",
    "PairingLayout",
    "QubitSlot",
    "ResourceReport",
    "Setting",
    "StateValidationError",
    "TwoQubitState",
    "build_u",
    "build_v",
    "decompose",
    "eigenvalues_from_moments",
    "estimate_gqd",
    "expect_layout",
    "expect_layout_dense_oracle",
    "gqd_by_minimization",
    "gqd_exact",
    "joint_distribution",
    "k_matrix",
    "make_family",
    "moments_from_outcomes",
    "outcomes_exact",
    "outcomes_sampled",
    "pauli_exchange_sum",
    "permute_outcomes",
    "qst_estimate",
    "random_state",
    "reconstruct",
    "render_layout",
    "resource_report",
    "settings",
    "standard_layouts",
    "state_from_dict",
    "state_from_json",
    "state_to_dict",
    "state_to_json",
    "verify_moment_formulas",
]
