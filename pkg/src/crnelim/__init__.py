"""Reduction of stochastic reaction networks by eliminating non-interacting species."""

from .algebra import ReactionPair, Walk, leads_to, oplus, oplus_fold, walk_sum
from .elimination import (
    Condition1Violated,
    NotEliminable,
    NotNonInteracting,
    ReducedNetwork,
    check_condition1,
    check_condition2,
    check_weak_reversibility,
    classify,
    condition_report,
    produced_degraded,
    reduce,
)
from .markov import (
    ComponentSet,
    Distribution,
    check_complex_balance,
    check_detailed_balance,
    check_stationary,
    conditional_distribution,
    decompose_reduced_component,
    irreducible_component,
    poisson_product_form,
    stationary_distribution,
    verify_deterministic_complex_balance,
)
from .model import MassAction, Network, RateExpr, Reaction, eval_intensity, validate_network
from .netparse import parse_network, read_network, serialize_network
from .reduced_kinetics import (
    branch_probabilities,
    reduced_intensities,
    reduced_intensity,
    reduced_srn,
    truncated_walk_sum,
)
from .scaling import ScalingSpec, convergence_table, limit_distribution, limit_support, scale_kinetics, scaled_distribution
from .simulate import Trajectory, empirical_distribution, gillespie

__version__ = "0.1.0"
