"""Numerical verification of uncertainty relations for N observables on pure states."""

__version__ = "0.1.0"

from .core import EigenPair, Observable, StateVector, commutator, eig_general, eig_hermitian, inner_product, make_observable, make_state
from .correlations import (
    CorrelationMatrix,
    build_correlation_matrix,
    classify_entanglement,
    corollary2_check,
    correlation_matrix_from_coefficients,
    feasibility_region,
    r3_closed_form,
    theorem2_check,
)
from .diagnostics import critical_report, reduced_sum_relations, sum_reduction
from .ensembles import EnsembleSpec, ObservableKind, pauli_matrices, random_hermitian, random_state, survey
from .errors import *  # noqa: F401,F403
from .intelligent import find_intelligent, is_intelligent, scan_z
from .moments import covariance, deviation_vector, expectation, joint_moments, moment_report, pearson
from .relations import CATALOG, RelationId, RelationVerdict, b3a_bound, evaluate, evaluate_all, lu3b_constraint
from .tolerances import Tolerances
