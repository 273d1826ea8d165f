"""Closed forms, constraint solving, and numeric cross-checks.

Everything verdict-bearing here is exact rational arithmetic. The numeric
oracle (quadrature / Monte Carlo) is deliberately kept as an independent
route: it never feeds exact-equality decisions, only inequality findings
whose margin exceeds its reported error bound.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations_with_replacement

import numpy as np

from .core import (
    NEG_INF,
    ONE,
    POS_INF,
    UNIT_INTERVAL,
    DomainMismatchError,
    IIDPhantomSpec,
    Mechanism,
    MechanismError,
    Phantom,
    Profile,
    RandomizedMechanism,
    RankK,
    ZERO,
    evaluate,
    format_point,
    grid_points,
)

# ---------------------------------------------------------------------------
# Uniform order statistics and the continuous phantom family
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class OrderStatSpec:
    """The index-th smallest of ``count`` i.i.d. phantom draws."""

    count: int
    index: int
    distribution: IIDPhantomSpec = field(default_factory=IIDPhantomSpec)

    def __post_init__(self):
        if not (1 <= self.index <= self.count):
            raise MechanismError(
                f"order statistic index {self.index} out of range 1..{self.count}"
            )


def order_stat_mean(count: int, index: int) -> Fraction:
    """Mean of the index-th smallest of ``count`` i.i.d. uniforms on [0,1]."""
    if not (1 <= index <= count):
        raise MechanismError(f"order statistic index {index} out of range 1..{count}")
    return Fraction(index, count + 1)


def uniform_order_stat_mean(spec: OrderStatSpec) -> Fraction:
    if not spec.distribution.is_uniform:
        raise MechanismError(
            "closed form covers the uniform distribution only; "
            "expand discrete specs or use the numeric oracle"
        )
    return order_stat_mean(spec.count, spec.index)


def order_stat_mc(count: int, index: int, samples: int = 1_000_000, seed: int = 0):
    """Monte Carlo mean of a uniform order statistic with a 3-SE bound."""
    if not (1 <= index <= count):
        raise MechanismError(f"order statistic index {index} out of range 1..{count}")
    rng = np.random.default_rng(seed)
    draws = rng.random((samples, count))
    stat = np.partition(draws, index - 1, axis=1)[:, index - 1]
    mean = float(stat.mean())
    three_se = 3.0 * float(stat.std(ddof=1)) / math.sqrt(samples)
    return mean, three_se


@lru_cache(maxsize=None)
def _upper_cdf_coeffs(draws: int, needed: int) -> tuple[int, ...]:
    """Polynomial (ascending coefficients) of P(at least ``needed`` of
    ``draws`` i.i.d. uniforms are <= t)."""
    if needed <= 0:
        return (1,)
    if needed > draws:
        return (0,)
    coeffs = [0] * (draws + 1)
    for r in range(needed, draws + 1):
        outer = math.comb(draws, r)
        for s in range(draws - r + 1):
            coeffs[r + s] += outer * math.comb(draws - r, s) * (-1) ** s
    return tuple(coeffs)


def _poly_integral(coeffs, lo: Fraction, hi: Fraction) -> Fraction:
    total = ZERO
    lo_pow, hi_pow = lo, hi
    for power, c in enumerate(coeffs):
        if c:
            total += Fraction(c, power + 1) * (hi_pow - lo_pow)
        lo_pow *= lo
        hi_pow *= hi
    return total


def facility_cdf_pieces(profile: Profile):
    """Piecewise-polynomial CDF of the facility location under the uniform
    phantom family (endpoints pinned at 0 and 1, n-1 interior uniforms).

    Returns (lo, hi, coeffs) triples covering [0,1]; on each open interval
    the CDF equals the polynomial with the given ascending coefficients.
    """
    if profile.domain != UNIT_INTERVAL:
        raise DomainMismatchError("the uniform phantom family lives on [0,1]")
    n = profile.n
    agents = sorted(profile.locations)
    breaks = sorted({ZERO, ONE, *agents})
    pieces = []
    for lo, hi in zip(breaks, breaks[1:]):
        at_most = bisect_right(agents, lo)
        coeffs = _upper_cdf_coeffs(n - 1, n - at_most)
        pieces.append((lo, hi, coeffs))
    return pieces


def _cdf_integral(pieces, a: Fraction, b: Fraction) -> Fraction:
    total = ZERO
    for lo, hi, coeffs in pieces:
        left, right = max(lo, a), min(hi, b)
        if left < right:
            total += _poly_integral(coeffs, left, right)
    return total


def uniform_family_expected_distance(profile: Profile, point: Fraction) -> Fraction:
    """Exact E|point - facility| under the uniform phantom family."""
    point = Fraction(point)
    if not (ZERO <= point <= ONE):
        raise DomainMismatchError("reference point must lie in [0,1]")
    pieces = facility_cdf_pieces(profile)
    below = _cdf_integral(pieces, ZERO, point)
    above = (ONE - point) - _cdf_integral(pieces, point, ONE)
    return below + above


def uniform_family_expected_location(profile: Profile) -> Fraction:
    return ONE - _cdf_integral(facility_cdf_pieces(profile), ZERO, ONE)


# ---------------------------------------------------------------------------
# Mixture-level exact expectations
# ---------------------------------------------------------------------------


def expected_distance_to_point(mechanism, profile: Profile, point: Fraction) -> Fraction:
    """Exact expected distance from ``point`` to the facility."""
    point = Fraction(point)
    if not isinstance(mechanism, RandomizedMechanism):
        return abs(point - evaluate(mechanism, profile))
    if mechanism.domain != profile.domain:
        raise DomainMismatchError("mechanism and profile domains differ")
    if mechanism.n != profile.n:
        raise MechanismError(f"mechanism built for n={mechanism.n}, got n={profile.n}")
    total = ZERO
    for mech, weight in mechanism.components:
        total += weight * abs(point - evaluate(mech, profile))
    if mechanism.has_continuous:
        if not mechanism.continuous.is_uniform:
            raise MechanismError("expand discrete phantom families before evaluating")
        total += mechanism.continuous_weight * uniform_family_expected_distance(
            profile, point
        )
    return total


def expected_facility_location(mechanism, profile: Profile) -> Fraction:
    if not isinstance(mechanism, RandomizedMechanism):
        return evaluate(mechanism, profile)
    if mechanism.domain != profile.domain:
        raise DomainMismatchError("mechanism and profile domains differ")
    if mechanism.n != profile.n:
        raise MechanismError(f"mechanism built for n={mechanism.n}, got n={profile.n}")
    total = ZERO
    for mech, weight in mechanism.components:
        total += weight * evaluate(mech, profile)
    if mechanism.has_continuous:
        if not mechanism.continuous.is_uniform:
            raise MechanismError("expand discrete phantom families before evaluating")
        total += mechanism.continuous_weight * uniform_family_expected_location(profile)
    return total


def expected_agent_distances(mechanism, profile: Profile) -> tuple[Fraction, ...]:
    return tuple(
        expected_distance_to_point(mechanism, profile, x) for x in profile.locations
    )


# ---------------------------------------------------------------------------
# Phantom order-statistic marginals of rank mixtures
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PhantomMarginal:
    """Distribution of one interior phantom order statistic in a rank mixture."""

    index: int
    top_label: str
    prob_top: Fraction
    bottom_label: str
    prob_bottom: Fraction


def _rank_index_of(mechanism: Mechanism, n: int, domain: str) -> int:
    if isinstance(mechanism, RankK):
        if mechanism.k > n:
            raise MechanismError(f"rank {mechanism.k} out of range for n={n}")
        return mechanism.k
    if isinstance(mechanism, Phantom):
        if mechanism.n != n:
            raise MechanismError("phantom vector length does not match n")
        lo = ZERO if domain == UNIT_INTERVAL else NEG_INF
        hi = ONE if domain == UNIT_INTERVAL else POS_INF
        low_count = sum(1 for y in mechanism.phantoms if y == lo)
        high_count = sum(1 for y in mechanism.phantoms if y == hi)
        if low_count + high_count != n + 1 or low_count < 1 or high_count < 1:
            raise MechanismError(
                "marginals are defined for two-valued phantom vectors only"
            )
        return low_count
    raise MechanismError(
        f"marginals are defined for rank mixtures, not {type(mechanism).__name__}"
    )


def rank_phantom_marginals(mechanism: RandomizedMechanism) -> tuple[PhantomMarginal, ...]:
    """Exact marginals of the sorted interior phantoms of a rank mixture.

    With weight w_k on the rank-k component, the i-th smallest of the n-1
    interior phantoms sits at the top extreme with probability
    w_1 + ... + w_i and at the bottom extreme otherwise.
    """
    if mechanism.has_continuous:
        raise MechanismError("marginals need a finite rank mixture")
    n, domain = mechanism.n, mechanism.domain
    weight_by_rank: dict[int, Fraction] = {}
    for mech, weight in mechanism.components:
        k = _rank_index_of(mech, n, domain)
        weight_by_rank[k] = weight_by_rank.get(k, ZERO) + weight
    top = "1" if domain == UNIT_INTERVAL else "+inf"
    bottom = "0" if domain == UNIT_INTERVAL else "-inf"
    out = []
    for i in range(1, n):
        prob_top = sum(
            (w for k, w in weight_by_rank.items() if k <= i), ZERO
        )
        out.append(PhantomMarginal(i, top, prob_top, bottom, 1 - prob_top))
    return tuple(out)


# ---------------------------------------------------------------------------
# Rank-weight feasibility: who can mix ranks and stay group-fair
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CumulativeConstraint:
    """Bound on a prefix sum w_1 + ... + w_prefix of the rank weights."""

    prefix: int
    sense: str  # "le" or "ge"
    rhs: Fraction
    provenance: str
    multiplicity: int = 1

    def describe(self) -> str:
        op = "<=" if self.sense == "le" else ">="
        return f"w_1+..+w_{self.prefix} {op} {format_point(self.rhs)}"


@dataclass(frozen=True)
class ConstraintSystem:
    n: int
    constraints: tuple[CumulativeConstraint, ...]

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "constraints": [
                {
                    "prefix": c.prefix,
                    "sense": c.sense,
                    "rhs": format_point(c.rhs),
                    "provenance": c.provenance,
                    "multiplicity": c.multiplicity,
                }
                for c in self.constraints
            ],
        }


@dataclass(frozen=True)
class RankWeightResult:
    status: str  # "unique" | "infeasible" | "non_unique"
    weights: tuple[Fraction, ...] | None
    system: ConstraintSystem
    conflict: str | None = None
    alternates: tuple[tuple[Fraction, ...], tuple[Fraction, ...]] | None = None

    def to_json(self) -> dict:
        data = {"status": self.status, "system": self.system.to_json()}
        if self.weights is not None:
            data["weights"] = [format_point(w) for w in self.weights]
        if self.conflict:
            data["conflict"] = self.conflict
        if self.alternates:
            data["alternates"] = [
                [format_point(w) for w in alt] for alt in self.alternates
            ]
        return data


def rank_weight_constraints(n: int, grid: int = 6, domain: str = UNIT_INTERVAL) -> ConstraintSystem:
    """Group-fairness constraints on rank-mixture weights over a grid.

    On the two-valued profile with n-i agents at the lower value and i at
    the higher, the mixture lands high with probability W_i = w_1+..+w_i;
    bounding each group's expected distance forces W_i <= i/n (low group)
    and W_i >= i/n (high group). The gap factor cancels, so constraints
    from all grid pairs collapse to one canonical pair per split, kept
    with a multiplicity count.
    """
    points = grid_points(domain, grid)
    pairs = [(a, b) for ai, a in enumerate(points) for b in points[ai + 1 :]]
    if not pairs:
        raise MechanismError("grid too small to generate constraints")
    constraints = []
    for i in range(1, n):
        sample = pairs[0]
        base = (
            f"profile with {n - i} agents at alpha, {i} at beta; "
            f"{len(pairs)} grid pairs, e.g. (alpha,beta)=({format_point(sample[0])},"
            f"{format_point(sample[1])})"
        )
        constraints.append(
            CumulativeConstraint(
                i, "le", Fraction(i, n), f"low group bound on {base}", len(pairs)
            )
        )
        constraints.append(
            CumulativeConstraint(
                i, "ge", Fraction(i, n), f"high group bound on {base}", len(pairs)
            )
        )
    return ConstraintSystem(n, tuple(constraints))


def solve_rank_weights(
    n: int,
    grid: int = 6,
    domain: str = UNIT_INTERVAL,
    perturb: tuple[int, Fraction] | None = None,
    extra: tuple[tuple[str, int, Fraction], ...] = (),
) -> RankWeightResult:
    """Solve for rank weights w_1..w_n >= 0 summing to 1 under the
    canonical constraint system, with optional tweaks.

    ``perturb=(index, delta)`` shifts one canonical constraint's right-hand
    side. ``extra`` adds ("eq"|"le"|"ge", k, rhs) conditions on a single
    weight w_k; those are resolved against prefix intervals, which is exact
    here because the base system pins every prefix (k=1 conditions are
    folded in exactly in all cases).
    """
    system = rank_weight_constraints(n, grid, domain)
    constraints = list(system.constraints)
    if perturb is not None:
        index, delta = perturb
        old = constraints[index]
        constraints[index] = CumulativeConstraint(
            old.prefix,
            old.sense,
            old.rhs + Fraction(delta),
            old.provenance + f" (rhs shifted by {format_point(Fraction(delta))})",
            old.multiplicity,
        )
        system = ConstraintSystem(n, tuple(constraints))

    lo = [ZERO] + [ZERO] * (n - 1) + [ONE]
    hi = [ZERO] + [ONE] * (n - 1) + [ONE]
    for con in constraints:
        if con.sense == "le":
            hi[con.prefix] = min(hi[con.prefix], con.rhs)
        else:
            lo[con.prefix] = max(lo[con.prefix], con.rhs)
    for kind, k, rhs in extra:
        if k == 1:  # w_1 is itself the first prefix sum
            rhs = Fraction(rhs)
            if kind in ("eq", "le"):
                hi[1] = min(hi[1], rhs)
            if kind in ("eq", "ge"):
                lo[1] = max(lo[1], rhs)
    for i in range(1, n + 1):
        lo[i] = max(lo[i], lo[i - 1])
    for i in range(n - 1, -1, -1):
        hi[i] = min(hi[i], hi[i + 1])
    for i in range(n + 1):
        if lo[i] > hi[i]:
            return RankWeightResult(
                "infeasible",
                None,
                system,
                conflict=(
                    f"prefix sum w_1+..+w_{i} is forced >= {format_point(lo[i])} "
                    f"and <= {format_point(hi[i])}"
                ),
            )

    unique = all(lo[i] == hi[i] for i in range(n + 1))
    if unique:
        weights = tuple(lo[i] - lo[i - 1] for i in range(1, n + 1))
        for kind, k, rhs in extra:
            if k == 1:
                continue  # already folded into the intervals
            rhs = Fraction(rhs)
            value = weights[k - 1]
            violated = (
                (kind == "eq" and value != rhs)
                or (kind == "le" and value > rhs)
                or (kind == "ge" and value < rhs)
            )
            if violated:
                return RankWeightResult(
                    "infeasible",
                    None,
                    system,
                    conflict=(
                        f"w_{k} is pinned to {format_point(value)} but required "
                        f"{kind} {format_point(rhs)}"
                    ),
                )
        return RankWeightResult("unique", weights, system)

    if any(k != 1 for _, k, _ in extra):
        raise MechanismError(
            "single-weight side constraints need a point-determined base system"
        )
    low_weights = tuple(lo[i] - lo[i - 1] for i in range(1, n + 1))
    high_weights = tuple(hi[i] - hi[i - 1] for i in range(1, n + 1))
    return RankWeightResult(
        "non_unique", None, system, alternates=(low_weights, high_weights)
    )


# ---------------------------------------------------------------------------
# Deterministic impossibility: forced placements with no phantom vector
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ForcedPlacement:
    """On the two-agent profile (0, report), group fairness forces the
    facility to the midpoint report/2."""

    report: Fraction

    @property
    def forced(self) -> Fraction:
        return self.report / 2

    @property
    def profile(self) -> Profile:
        return Profile.unit(ZERO, self.report)


@dataclass(frozen=True)
class Prop1Certificate:
    first: ForcedPlacement
    second: ForcedPlacement
    candidates: tuple[Fraction, ...]
    vectors_checked: int
    manipulation: dict | None

    def to_json(self) -> dict:
        data = {
            "instances": [
                {
                    "profile": p.profile.to_json()["locations"],
                    "forced_output": format_point(p.forced),
                }
                for p in (self.first, self.second)
            ],
            "candidate_values": [format_point(c) for c in self.candidates],
            "vectors_checked": self.vectors_checked,
        }
        if self.manipulation:
            data["manipulation"] = self.manipulation
        return data


def _med5(a: Fraction, b: Fraction, triple) -> Fraction:
    values = sorted((a, b) + triple)
    return values[2]


def find_phantom_vector(placements, candidates=None):
    """A sorted phantom triple meeting every forced placement, or None.

    Candidate values default to the placements' breakpoints plus interval
    midpoints, which is exhaustive: a phantom triple satisfies the forced
    medians iff the representative triple obtained by snapping each phantom
    to its breakpoint or containing interval does.
    """
    placements = tuple(placements)
    if candidates is None:
        base = {ZERO, ONE}
        for p in placements:
            base.update((p.report, p.forced))
        points = sorted(base)
        mids = [(a + b) / 2 for a, b in zip(points, points[1:])]
        candidates = tuple(sorted(set(points) | set(mids)))
    for triple in combinations_with_replacement(candidates, 3):
        if all(_med5(ZERO, p.report, triple) == p.forced for p in placements):
            return triple
    return None


def prop1_infeasibility(samples=(Fraction(1, 2), ONE)) -> Prop1Certificate:
    """Certificate that no single phantom vector meets the forced
    placements of two different two-agent profiles.

    ``samples`` are the non-zero agent locations t in (0, 1]; the first
    pair (in order) whose forced outputs are jointly unachievable is
    returned, with the exhaustive representative sweep recorded.
    """
    reports = [Fraction(t) for t in samples]
    if len(reports) < 2:
        raise MechanismError("need at least two sampled reports")
    for t in reports:
        if not (ZERO < t <= ONE):
            raise MechanismError(f"sampled report {format_point(t)} outside (0,1]")
    if len(set(reports)) < 2:
        raise MechanismError("sampled reports must be distinct")
    for i, t in enumerate(reports):
        for t_other in reports[i + 1 :]:
            low, high = sorted((t, t_other))
            first, second = ForcedPlacement(low), ForcedPlacement(high)
            base = {ZERO, ONE, low, high, first.forced, second.forced}
            points = sorted(base)
            mids = [(a + b) / 2 for a, b in zip(points, points[1:])]
            candidates = tuple(sorted(set(points) | set(mids)))
            checked = math.comb(len(candidates) + 2, 3)
            if find_phantom_vector((first, second), candidates) is None:
                manipulation = None
                if high < 3 * low:
                    # moving the profile from (0,low) to (0,high) drags the
                    # forced output onto (or past) the deviator's location
                    manipulation = {
                        "profile": [format_point(ZERO), format_point(low)],
                        "agent": 2,
                        "misreport": format_point(high),
                        "truthful_cost": format_point(first.forced),
                        "deviating_cost": format_point(abs(low - second.forced)),
                    }
                return Prop1Certificate(first, second, candidates, checked, manipulation)
    raise MechanismError("every sampled pair admits a phantom vector")


def prop1_grid_sweep(certificate: Prop1Certificate, grid: int = 40) -> int:
    """Count grid phantom triples meeting both forced placements (expect 0)."""
    values = tuple(Fraction(j, grid) for j in range(grid + 1))
    placements = (certificate.first, certificate.second)
    count = 0
    for triple in combinations_with_replacement(values, 3):
        if all(_med5(ZERO, p.report, triple) == p.forced for p in placements):
            count += 1
    return count


# ---------------------------------------------------------------------------
# Numeric oracle (floats, quarantined from exact verdicts)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class OracleEstimate:
    value: float
    error: float
    mode: str
    evaluations: int
    seed: int | None = None

    def to_json(self) -> dict:
        data = {
            "value": self.value,
            "error_bound": self.error,
            "mode": self.mode,
            "evaluations": self.evaluations,
            "inexact": True,
        }
        if self.seed is not None:
            data["seed"] = self.seed
        return data


def _batch_integrand(agents: list[float], point: float):
    fixed = np.array(agents + [0.0, 1.0])

    def feval(points: np.ndarray) -> np.ndarray:
        stacked = np.concatenate(
            [np.tile(fixed, (points.shape[0], 1)), points], axis=1
        )
        return np.abs(point - np.median(stacked, axis=1))

    return feval


def _adaptive_cells(feval, dims: int, tol: float, max_cells: int, min_depth: int = 4):
    """Level-synchronous adaptive midpoint cubature on [0,1]^dims.

    The integrand is piecewise linear, so cells away from its kinks agree
    between the coarse (centroid) and refined (subcell centroids) rules
    and get accepted; kink-crossing cells keep splitting until the global
    error estimate fits the tolerance.
    """
    offsets = np.array(
        [[corner >> d & 1 for d in range(dims)] for corner in range(1 << dims)],
        dtype=float,
    )
    lo = np.zeros((1, dims))
    hi = np.ones((1, dims))
    accepted_value = 0.0
    accepted_err = 0.0
    evaluated = 0
    depth = 0
    while lo.shape[0]:
        evaluated += lo.shape[0]
        if evaluated > max_cells:
            raise MechanismError("quadrature cell budget exceeded; loosen the tolerance")
        span = hi - lo
        vol = np.prod(span, axis=1)
        coarse = feval(lo + span / 2)
        fine = np.zeros(lo.shape[0])
        for off in offsets:
            fine += feval(lo + span * (0.25 + 0.5 * off))
        fine /= 1 << dims
        err = np.abs(fine - coarse) * vol
        pending = float(err.sum())
        if depth >= min_depth and accepted_err + pending <= tol:
            accepted_value += float((fine * vol).sum())
            accepted_err += pending
            break
        if depth >= min_depth:
            # bank the cheapest cells against half the remaining budget
            order = np.argsort(err)
            budget = max(0.0, (tol - accepted_err) / 2)
            cumulative = np.cumsum(err[order])
            keep = int(np.searchsorted(cumulative, budget, side="right"))
            accept = order[:keep]
            refine = order[keep:]
            accepted_value += float((fine[accept] * vol[accept]).sum())
            accepted_err += float(err[accept].sum())
        else:
            refine = np.arange(lo.shape[0])
        lo_r, span_r = lo[refine], span[refine]
        children_lo = []
        for off in offsets:
            children_lo.append(lo_r + span_r * 0.5 * off)
        lo = np.concatenate(children_lo, axis=0)
        hi = lo + np.tile(span_r / 2, (1 << dims, 1))
        depth += 1
    return accepted_value, 2.0 * max(accepted_err, 1e-15), evaluated


def oracle_point_distance(
    mechanism: RandomizedMechanism,
    profile: Profile,
    point,
    mode: str = "quadrature",
    tol: float = 1e-9,
    samples: int = 1_000_000,
    seed: int = 0,
    max_cells: int = 2_000_000,
) -> OracleEstimate:
    """Approximate E|point - facility| for a mechanism with a uniform
    continuous phantom family; finite components enter exactly.
    """
    if not isinstance(mechanism, RandomizedMechanism) or not mechanism.has_continuous:
        raise MechanismError("the numeric oracle needs a continuous phantom family")
    if not mechanism.continuous.is_uniform:
        raise MechanismError("expand discrete phantom families before sampling")
    if mechanism.n != profile.n or mechanism.domain != profile.domain:
        raise MechanismError("mechanism and profile disagree on n or domain")
    point = Fraction(point)
    finite_part = 0.0
    for mech, weight in mechanism.components:
        finite_part += float(weight) * abs(float(point - evaluate(mech, profile)))
    weight_cont = float(mechanism.continuous_weight)
    agents = [float(x) for x in profile.locations]
    dims = profile.n - 1
    if mode == "quadrature":
        feval = _batch_integrand(agents, float(point))
        value, err, cells = _adaptive_cells(feval, dims, tol, max_cells)
        return OracleEstimate(
            finite_part + weight_cont * value, weight_cont * err, mode, cells
        )
    if mode == "monte_carlo":
        rng = np.random.default_rng(seed)
        draws = rng.random((samples, dims))
        fixed = np.array(agents + [0.0, 1.0])
        stacked = np.concatenate(
            [np.tile(fixed, (samples, 1)), draws], axis=1
        )
        med = np.median(stacked, axis=1)
        dist = np.abs(float(point) - med)
        mean = float(dist.mean())
        three_se = 3.0 * float(dist.std(ddof=1)) / math.sqrt(samples)
        return OracleEstimate(
            finite_part + weight_cont * mean,
            weight_cont * three_se,
            mode,
            samples,
            seed,
        )
    raise MechanismError(f"unknown oracle mode {mode!r}")


def numeric_expectation_oracle(
    mechanism: RandomizedMechanism,
    profile: Profile,
    mode: str = "quadrature",
    tol: float = 1e-9,
    samples: int = 1_000_000,
    seed: int = 0,
) -> dict:
    """Per-agent expected distances, approximated and tagged inexact."""
    return {
        "mode": mode,
        "agent_distances": [
            oracle_point_distance(
                mechanism, profile, x, mode=mode, tol=tol, samples=samples, seed=seed
            ).to_json()
            for x in profile.locations
        ],
    }


def oracle_group_bound_check(
    mechanism: RandomizedMechanism,
    profile: Profile,
    point,
    bound,
    mode: str = "quadrature",
    tol: float = 1e-9,
    samples: int = 1_000_000,
    seed: int = 0,
) -> tuple[str, OracleEstimate]:
    """Single-instance fairness check through the inexact oracle.

    Returns "fail" only when the estimated expected distance clears the
    bound by more than the error bound, "pass" when it sits below by the
    same margin, and "inconclusive" otherwise; approximations never decide
    a tight instance.
    """
    estimate = oracle_point_distance(
        mechanism, profile, point, mode=mode, tol=tol, samples=samples, seed=seed
    )
    margin = estimate.value - float(Fraction(bound))
    if margin > estimate.error:
        return "fail", estimate
    if margin < -estimate.error:
        return "pass", estimate
    return "inconclusive", estimate
