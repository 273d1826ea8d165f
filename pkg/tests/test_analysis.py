"""Closed forms, the weight solver, certificates, and the numeric oracle."""

import math
from fractions import Fraction as F

import pytest

import proploc.analysis as an
import proploc.axioms as ax
from proploc.core import (
    IIDPhantomSpec,
    MechanismError,
    Profile,
    REAL_LINE,
    RandomizedMechanism,
    RankK,
    UNIT_INTERVAL,
    ZERO,
)
from proploc.mechanisms import average_or_random_rank, random_phantom, random_rank


# ---------------------------------------------------------------------------
# order statistics
# ---------------------------------------------------------------------------


def test_order_stat_means_are_uniformly_spaced():
    for n in range(2, 11):
        for i in range(1, n):
            spec = an.OrderStatSpec(count=n - 1, index=i)
            assert an.uniform_order_stat_mean(spec) == F(i, n)
    assert an.order_stat_mean(1, 1) == F(1, 2)
    assert an.order_stat_mean(3, 2) == F(1, 2)
    assert an.order_stat_mean(4, 1) == F(1, 5)


def test_order_stat_spec_validation():
    with pytest.raises(MechanismError):
        an.OrderStatSpec(count=3, index=4)
    with pytest.raises(MechanismError):
        an.order_stat_mean(3, 0)
    discrete = IIDPhantomSpec(((F(1, 2), F(1)),))
    with pytest.raises(MechanismError):
        an.uniform_order_stat_mean(an.OrderStatSpec(2, 1, discrete))


def test_order_stat_monte_carlo_agrees():
    mean, three_se = an.order_stat_mc(4, 1, samples=200_000, seed=5)
    assert abs(mean - 0.2) <= three_se
    mean, three_se = an.order_stat_mc(1, 1, samples=200_000, seed=6)
    assert abs(mean - 0.5) <= three_se


# ---------------------------------------------------------------------------
# continuous-family closed forms
# ---------------------------------------------------------------------------


def _beta_moment_oracle(n, i, low, high):
    """Independent oracle: clamp the i-th of n-1 uniform order statistics.

    Uses the density (n-1)! / ((i-1)! (n-1-i)!) t^(i-1) (1-t)^(n-1-i),
    integrating term by term after a binomial expansion; no code shared
    with the piecewise-CDF implementation under test.
    """
    draws = n - 1
    scale = F(math.factorial(draws), math.factorial(i - 1) * math.factorial(draws - i))

    def cdf_terms(upper, moment):
        # integral of t^(i-1+moment) (1-t)^(draws-i) from 0 to upper
        total = F(0)
        for s in range(draws - i + 1):
            power = i - 1 + moment + s
            total += (
                F(math.comb(draws - i, s) * (-1) ** s, power + 1) * upper ** (power + 1)
            )
        return total * scale

    prob_below = cdf_terms(low, 0)
    prob_above = 1 - cdf_terms(high, 0)
    middle = cdf_terms(high, 1) - cdf_terms(low, 1)
    return low * prob_below + middle + high * prob_above


def test_two_valued_profiles_match_the_clamp_oracle():
    for n in (2, 3, 4, 5):
        mechanism = random_phantom(n)
        for low, high in ((F(0), F(1)), (F(1, 4), F(3, 4)), (F(1, 6), F(5, 6))):
            for high_count in range(1, n):
                locs = (low,) * (n - high_count) + (high,) * high_count
                profile = Profile(UNIT_INTERVAL, locs)
                clamp_mean = _beta_moment_oracle(n, high_count, low, high)
                assert an.expected_facility_location(mechanism, profile) == clamp_mean
                assert an.expected_distance_to_point(
                    mechanism, profile, high
                ) == high - clamp_mean


def test_wide_two_group_profile_expected_distance():
    profile = Profile.unit(F(1, 4), F(1, 4), F(3, 4))
    assert an.uniform_family_expected_distance(profile, F(3, 4)) == F(35, 96)
    assert F(35, 96) > F(2, 3) * F(1, 2)  # exceeds the group bound


def test_unanimous_profile_pins_the_facility():
    profile = Profile.unit(F(2, 5), F(2, 5))
    assert an.uniform_family_expected_distance(profile, F(2, 5)) == 0
    assert an.uniform_family_expected_location(profile) == F(2, 5)


def test_endpoint_profiles_match_order_stat_means():
    for n in (2, 3, 4, 6):
        for ones in range(1, n):
            locs = (F(0),) * (n - ones) + (F(1),) * ones
            profile = Profile(UNIT_INTERVAL, locs)
            assert an.uniform_family_expected_location(profile) == F(ones, n)


def test_mixture_expectations_combine_finite_and_continuous_parts():
    mechanism = average_or_random_rank(F(1, 2), 3)
    profile = Profile.unit(0, 0, F(1, 3))
    assert an.expected_facility_location(mechanism, profile) == F(1, 9)
    assert an.expected_distance_to_point(mechanism, profile, ZERO) == F(1, 9)
    distances = an.expected_agent_distances(mechanism, profile)
    assert distances[0] == distances[1] == F(1, 9)


# ---------------------------------------------------------------------------
# rank-mixture phantom marginals
# ---------------------------------------------------------------------------


def test_rank_mixture_marginals():
    for n in range(2, 9):
        marginals = an.rank_phantom_marginals(random_rank(n))
        assert [m.index for m in marginals] == list(range(1, n))
        for m in marginals:
            assert m.prob_top == F(m.index, n)
            assert m.prob_bottom == F(n - m.index, n)
            assert m.top_label == "1" and m.bottom_label == "0"


def test_rank_mixture_marginals_on_the_real_line():
    marginals = an.rank_phantom_marginals(random_rank(3, REAL_LINE))
    assert [m.prob_top for m in marginals] == [F(1, 3), F(2, 3)]
    assert marginals[0].top_label == "+inf"
    assert marginals[0].bottom_label == "-inf"


def test_degenerate_rank_mixture_marginal():
    mix = RandomizedMechanism(2, UNIT_INTERVAL, ((RankK(1), F(1)),))
    (marginal,) = an.rank_phantom_marginals(mix)
    assert marginal.prob_top == 1  # forced high phantom: group fairness must fail
    verdict = ax.check_strong_proportionality(mix, ax.CheckDomain(n=2, grid=4), ax.EXP)
    assert verdict.failed


def test_marginals_reject_interior_phantoms_and_averages():
    with pytest.raises(MechanismError):
        an.rank_phantom_marginals(average_or_random_rank(F(1, 2), 3))
    from proploc.core import Phantom

    mix = RandomizedMechanism(
        2, UNIT_INTERVAL, ((Phantom((F(0), F(1, 2), F(1))), F(1)),)
    )
    with pytest.raises(MechanismError):
        an.rank_phantom_marginals(mix)


def test_marginals_telescope_one_rank_step_at_a_time():
    for n in range(2, 9):
        marginals = an.rank_phantom_marginals(random_rank(n))
        bottoms = [F(1)] + [m.prob_bottom for m in marginals] + [F(0)]
        for step in range(n):
            assert bottoms[step] - bottoms[step + 1] == F(1, n)


# ---------------------------------------------------------------------------
# rank-weight solving
# ---------------------------------------------------------------------------


def test_two_agent_weights_solved_by_hand():
    # the only constraints are w_1 <= 1/2 and w_1 >= 1/2 with w_1 + w_2 = 1
    result = an.solve_rank_weights(2)
    assert result.status == "unique"
    assert result.weights == (F(1, 2), F(1, 2))


def test_uniform_weights_are_unique_up_to_six_agents():
    for n in range(2, 7):
        result = an.solve_rank_weights(n)
        assert result.status == "unique"
        assert result.weights == tuple(F(1, n) for _ in range(n))


def test_single_constraint_perturbations_break_the_solution():
    for n in range(2, 7):
        count = len(an.rank_weight_constraints(n).constraints)
        for index in range(count):
            for delta in (F(1, 100), F(-1, 100)):
                result = an.solve_rank_weights(n, perturb=(index, delta))
                assert result.status in ("infeasible", "non_unique")
                if result.status == "non_unique":
                    first, second = result.alternates
                    assert first != second
                    assert sum(first) == sum(second) == 1


def test_pinning_the_first_weight_to_zero_is_infeasible():
    result = an.solve_rank_weights(3, extra=(("eq", 1, F(0)),))
    assert result.status == "infeasible"
    assert result.conflict


def test_solved_weights_feed_back_into_a_fair_mixture():
    for n in (2, 3, 4):
        result = an.solve_rank_weights(n)
        mix = RandomizedMechanism(
            n,
            UNIT_INTERVAL,
            tuple((RankK(k + 1), w) for k, w in enumerate(result.weights)),
        )
        dom = ax.CheckDomain(n=n, grid=6)
        assert ax.check_strong_proportionality(mix, dom, ax.EXP).passed


def test_constraint_system_serialization():
    system = an.rank_weight_constraints(3, grid=4)
    data = system.to_json()
    assert data["n"] == 3
    assert all(c["multiplicity"] >= 1 for c in data["constraints"])


# ---------------------------------------------------------------------------
# deterministic impossibility certificates
# ---------------------------------------------------------------------------


def test_default_certificate_uses_the_midpoint_pair():
    cert = an.prop1_infeasibility()
    assert cert.first.forced == F(1, 4)
    assert cert.second.forced == F(1, 2)
    assert cert.manipulation is not None
    assert cert.manipulation["misreport"] == "1"
    assert an.prop1_grid_sweep(cert, 40) == 0


def test_single_placement_is_satisfiable():
    placement = an.ForcedPlacement(F(1, 2))
    triple = an.find_phantom_vector((placement,))
    assert triple is not None
    # the constant vector at the forced output works too
    constant = (F(1, 4), F(1, 4), F(1, 4))
    assert an.find_phantom_vector((placement,), constant) == constant


def test_interior_pair_is_infeasible():
    cert = an.prop1_infeasibility((F(1, 3), F(2, 3)))
    assert cert.first.report == F(1, 3)
    assert an.prop1_grid_sweep(cert, 24) == 0


def test_certificate_input_validation():
    with pytest.raises(MechanismError):
        an.prop1_infeasibility((F(1, 2),))
    with pytest.raises(MechanismError):
        an.prop1_infeasibility((F(1, 2), F(3, 2)))
    with pytest.raises(MechanismError):
        an.prop1_infeasibility((F(1, 2), F(1, 2)))


def test_certificate_serialization():
    data = an.prop1_infeasibility().to_json()
    assert data["instances"][0]["forced_output"] == "1/4"
    assert data["vectors_checked"] > 0


# ---------------------------------------------------------------------------
# numeric oracle
# ---------------------------------------------------------------------------


def test_quadrature_matches_closed_forms():
    mechanism = random_phantom(3)
    profile = Profile.unit(F(1, 4), F(1, 4), F(3, 4))
    exact = float(an.uniform_family_expected_distance(profile, F(3, 4)))
    estimate = an.oracle_point_distance(
        mechanism, profile, F(3, 4), mode="quadrature", tol=1e-8
    )
    assert abs(estimate.value - exact) <= estimate.error <= 1e-6


def test_monte_carlo_matches_closed_forms():
    mechanism = random_phantom(3)
    profile = Profile.unit(0, F(1, 2), F(5, 6))
    exact = float(an.uniform_family_expected_distance(profile, F(1, 2)))
    estimate = an.oracle_point_distance(
        mechanism, profile, F(1, 2), mode="monte_carlo", samples=400_000, seed=3
    )
    assert abs(estimate.value - exact) <= estimate.error
    assert estimate.seed == 3


def test_oracle_reports_are_tagged_inexact():
    mechanism = random_phantom(2)
    report = an.numeric_expectation_oracle(
        mechanism, Profile.unit(0, F(1, 2)), mode="quadrature", tol=1e-7
    )
    assert all(entry["inexact"] for entry in report["agent_distances"])


def test_oracle_requires_a_continuous_family():
    with pytest.raises(MechanismError):
        an.oracle_point_distance(random_rank(3), Profile.unit(0, 0, 1), F(0))
    with pytest.raises(MechanismError):
        an.oracle_point_distance(
            random_phantom(3), Profile.unit(0, 0, 1), F(0), mode="sorcery"
        )


def test_oracle_bound_checks_quarantine_tight_instances():
    mechanism = random_phantom(3)
    wide = Profile.unit(F(1, 4), F(1, 4), F(3, 4))
    status, estimate = an.oracle_group_bound_check(
        mechanism, wide, F(3, 4), F(1, 3), tol=1e-7
    )
    assert status == "fail"
    assert estimate.value - 1 / 3 > estimate.error
    endpoints = Profile.unit(0, 0, 1)
    status, _ = an.oracle_group_bound_check(
        mechanism, endpoints, F(0), F(2, 3), tol=1e-7
    )
    assert status == "pass"
    # the endpoint bound is met with equality: approximation may not decide
    status, _ = an.oracle_group_bound_check(
        mechanism, endpoints, F(0), F(1, 3), tol=1e-7
    )
    assert status == "inconclusive"
