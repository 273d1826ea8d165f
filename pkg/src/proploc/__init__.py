"""Exact facility-location mechanisms on a line, with axiom checkers."""

from .core import (
    Average,
    ContinuousFamilyError,
    Dictator,
    DomainMismatchError,
    ExpansionLimitError,
    IIDPhantomSpec,
    Infinite,
    Mechanism,
    MechanismError,
    Median,
    NEG_INF,
    OutcomeDistribution,
    POS_INF,
    Phantom,
    PhantomFormError,
    Profile,
    REAL_LINE,
    RandomizedMechanism,
    RankK,
    UNIT_INTERVAL,
    UniformPhantom,
    as_mixture,
    evaluate,
    format_point,
    grid_points,
    outcome_distribution,
    parse_point,
    to_phantom_form,
)
from .mechanisms import (
    MechanismSpec,
    average_or_random_rank,
    build_mechanism,
    format_mechanism,
    iid_phantom,
    parse_mechanism_spec,
    random_dictator,
    random_phantom,
    random_rank,
)
from .axioms import (
    AxiomVerdict,
    CheckDomain,
    ManipulationFinding,
    Witness,
    check_anonymity,
    check_efficiency,
    check_proportionality,
    check_spf,
    check_strategyproofness,
    check_strong_proportionality,
    recheck_witness,
    run_check,
    search_manipulation,
)
from .analysis import (
    ConstraintSystem,
    OrderStatSpec,
    Prop1Certificate,
    RankWeightResult,
    expected_agent_distances,
    expected_distance_to_point,
    expected_facility_location,
    numeric_expectation_oracle,
    oracle_group_bound_check,
    oracle_point_distance,
    order_stat_mean,
    order_stat_mc,
    prop1_grid_sweep,
    prop1_infeasibility,
    rank_phantom_marginals,
    solve_rank_weights,
    uniform_family_expected_distance,
    uniform_family_expected_location,
    uniform_order_stat_mean,
)

__version__ = "0.1.0"
