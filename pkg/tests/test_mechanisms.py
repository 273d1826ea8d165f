"""Mechanism catalog constructors and spec-string parsing."""

import random
from fractions import Fraction as F
from itertools import combinations_with_replacement, product

import pytest

from proploc.core import (
    REAL_LINE,
    UNIT_INTERVAL,
    Average,
    Dictator,
    ExpansionLimitError,
    IIDPhantomSpec,
    MechanismError,
    Phantom,
    Profile,
    RankK,
    evaluate,
    mechanism_is_anonymous,
    outcome_distribution,
)
from proploc.mechanisms import (
    average_or_random_rank,
    build_mechanism,
    format_mechanism,
    iid_phantom,
    parse_mechanism_spec,
    random_dictator,
    random_phantom,
    random_rank,
)
from proploc.analysis import expected_distance_to_point, expected_facility_location


def test_random_rank_weights_and_components():
    mix = random_rank(3)
    assert [w for _, w in mix.components] == [F(1, 3)] * 3
    assert [m.k for m, _ in mix.components] == [1, 2, 3]


def test_random_rank_worked_example():
    dist = outcome_distribution(random_rank(3), Profile.unit(0, 0, F(1, 3)))
    assert dict(dist.atoms) == {F(0): F(2, 3), F(1, 3): F(1, 3)}
    assert dist.expected_location() == F(1, 9)


def test_random_rank_on_the_real_line():
    dist = outcome_distribution(random_rank(2, REAL_LINE), Profile.line(-5, 7))
    # both rank components evaluated by brute force: min and max
    assert dict(dist.atoms) == {F(-5): F(1, 2), F(7): F(1, 2)}


def test_rank_components_never_output_infinity_on_the_line():
    mix = random_rank(3, REAL_LINE)
    for locs in product([F(-2), F(0), F(3)], repeat=3):
        profile = Profile(REAL_LINE, locs)
        for mech, _ in mix.components:
            assert evaluate(mech, profile) in locs


def test_random_dictator_matches_random_rank_distributions():
    grid = [F(j, 4) for j in range(5)]
    for locs in combinations_with_replacement(grid, 3):
        profile = Profile(UNIT_INTERVAL, locs)
        lhs = outcome_distribution(random_dictator(3), profile)
        rhs = outcome_distribution(random_rank(3), profile)
        assert lhs == rhs


def test_random_dictator_components_are_not_anonymous():
    mix = random_dictator(3)
    assert all(not mechanism_is_anonymous(m) for m, _ in mix.components)


def test_average_mixture_validation_and_degenerate_weights():
    with pytest.raises(MechanismError):
        average_or_random_rank(F(6, 5), 3)
    pure_rank = average_or_random_rank(F(0), 3)
    assert pure_rank.components == random_rank(3).components
    pure_average = average_or_random_rank(F(1), 3)
    assert [type(m) for m, _ in pure_average.components] == [Average]


def test_average_mixture_worked_example():
    mix = average_or_random_rank(F(1, 2), 3)
    dist = outcome_distribution(mix, Profile.unit(0, 0, F(1, 3)))
    assert dict(dist.atoms) == {F(0): F(1, 3), F(1, 3): F(1, 6), F(1, 9): F(1, 2)}


def test_average_mixture_exact_costs_for_a_profitable_misreport():
    # frozen by exact enumeration over the three outcome atoms per report
    mix = average_or_random_rank(F(3, 5), 2)
    profile = Profile.unit(F(2, 5), 1)
    truthful = expected_distance_to_point(mix, profile, F(2, 5))
    assert truthful == F(3, 10)
    deviating = expected_distance_to_point(
        mix, profile.replace(1, F(3, 10)), F(2, 5)
    )
    assert deviating == F(29, 100)
    assert deviating < truthful


def test_average_mixture_group_distances_on_two_valued_profiles():
    # each co-located group's expected distance is exactly (n-s)/n * gap
    for n in (2, 3, 4):
        mix = average_or_random_rank(F(1, 2), n)
        points = [F(j, 4) for j in range(5)]
        for low_i, low in enumerate(points):
            for high in points[low_i + 1 :]:
                for size_low in range(1, n):
                    locs = (low,) * size_low + (high,) * (n - size_low)
                    profile = Profile(UNIT_INTERVAL, locs)
                    gap = high - low
                    low_dist = expected_distance_to_point(mix, profile, low)
                    high_dist = expected_distance_to_point(mix, profile, high)
                    assert low_dist == F(n - size_low, n) * gap
                    assert high_dist == F(size_low, n) * gap


def test_random_phantom_basics():
    mix = random_phantom(3)
    assert mix.has_continuous and mix.continuous.is_uniform
    profile = Profile.unit(F(1, 2), F(1, 2), F(1, 2))
    assert outcome_distribution(mix, profile).atoms == ((F(1, 2), F(1)),)
    with pytest.raises(MechanismError):
        build_mechanism("random_phantom", 3, REAL_LINE)


def test_random_phantom_endpoint_profiles_land_on_the_share():
    for n in (2, 3, 4, 5):
        mix = random_phantom(n)
        for ones in range(n + 1):
            locs = (F(0),) * (n - ones) + (F(1),) * ones
            profile = Profile(UNIT_INTERVAL, locs)
            assert expected_facility_location(mix, profile) == F(ones, n)


def test_iid_phantom_point_mass():
    spec = IIDPhantomSpec(((F(1, 2), F(1)),))
    mix = iid_phantom(spec, 2)
    assert mix.components == ((Phantom((F(0), F(1, 2), F(1))), F(1)),)


def test_iid_phantom_two_atom_expansion_merges_multisets():
    spec = IIDPhantomSpec(((F(0), F(1, 2)), (F(1), F(1, 2))))
    mix = iid_phantom(spec, 3)
    got = {m.phantoms: w for m, w in mix.components}
    assert got == {
        (F(0), F(0), F(0), F(1)): F(1, 4),
        (F(0), F(0), F(1), F(1)): F(1, 2),
        (F(0), F(1), F(1), F(1)): F(1, 4),
    }


def test_iid_phantom_expansion_cap():
    atoms = tuple((F(j, 10), F(1, 10)) for j in range(10))
    with pytest.raises(ExpansionLimitError):
        iid_phantom(IIDPhantomSpec(atoms), 9, component_cap=100)


def test_iid_phantom_uniform_spec_is_the_continuous_family():
    assert iid_phantom(IIDPhantomSpec(), 4) == random_phantom(4)


def test_spec_string_round_trips():
    specs = [
        "random_rank",
        "random_dictator",
        "random_phantom",
        "median",
        "uniform_phantom",
        "average",
        "avg_or_rr:p=1/2",
        "rank:k=2",
        "dictator:i=1",
        "phantom:[0,1/2,1]",
        'iid_phantom:{"atoms":[["1/2","1"]]}',
    ]
    for text in specs:
        parsed = parse_mechanism_spec(text, 3)
        again = parse_mechanism_spec(parsed.to_string(), 3)
        assert parsed == again
        again.build()


def test_spec_string_accepts_bare_keys():
    parsed = parse_mechanism_spec('iid_phantom:{atoms:[["1/2","1"]]}', 2)
    assert parsed.params["atoms"] == ((F(1, 2), F(1)),)


def test_spec_string_errors():
    with pytest.raises(MechanismError):
        parse_mechanism_spec("mystery", 3)
    with pytest.raises(MechanismError):
        parse_mechanism_spec("avg_or_rr:q=1/2", 3)
    with pytest.raises(MechanismError):
        parse_mechanism_spec("phantom:0,1,1", 3)


def test_format_mechanism_names_the_catalog():
    assert format_mechanism(random_rank(3)) == "random_rank"
    assert format_mechanism(random_dictator(3)) == "random_dictator"
    assert format_mechanism(random_phantom(3)) == "random_phantom"
    assert format_mechanism(average_or_random_rank(F(1, 2), 3)) == "avg_or_rr:p=1/2"
    assert format_mechanism(RankK(2)) == "rank:k=2"
    assert format_mechanism(Dictator(1)) == "dictator:i=1"


def test_build_mechanism_respects_domain():
    mix = build_mechanism("random_rank", 3, REAL_LINE)
    assert mix.domain == REAL_LINE


def test_random_profiles_rank_equals_dictator_distribution():
    rng = random.Random(17)
    for _ in range(30):
        n = rng.randint(2, 5)
        locs = tuple(F(rng.randint(-20, 20), rng.randint(1, 9)) for _ in range(n))
        profile = Profile(REAL_LINE, locs)
        lhs = outcome_distribution(random_dictator(n, REAL_LINE), profile)
        rhs = outcome_distribution(random_rank(n, REAL_LINE), profile)
        assert lhs == rhs
