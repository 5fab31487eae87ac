"""Exact broadcast capacity and stationary randomized policies.

The capacity is the optimum of a linear program over per-route injection
rates and schedule probabilities: maximize the total injection rate subject
to every node receiving at least as much expected service as the traffic
routed through it, with schedule probabilities summing to at most one.
Routes range over minimal connected dominating sets and schedules over
maximal independent sets of the conflict graph; neither restriction changes
the optimum because weights and capacities are nonnegative.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .errors import LimitExceeded, RateInfeasible, ValidationError
from .graphs import (
    EXACT_ENUMERATION_LIMIT,
    ConflictGraph,
    NetworkGraph,
    _maximal_schedule_members,
    _minimal_cds_members,
)
from .simplex import solve_lp_max

_FEAS_TOL = 1e-9


@dataclass(frozen=True)
class StationaryPolicy:
    """Route each arrival along a fixed CDS distribution and draw one
    schedule per slot from a fixed schedule distribution."""

    cds_rates: tuple[tuple[tuple[int, ...], float], ...]
    schedule_probs: tuple[tuple[tuple[int, ...], float], ...]

    @property
    def total_rate(self) -> float:
        return sum(rate for _, rate in self.cds_rates)

    def service_rates(self, g: NetworkGraph) -> list[float]:
        mu = [0.0] * g.node_count
        for members, prob in self.schedule_probs:
            for i in members:
                mu[i] += prob * g.capacity[i]
        return mu

    def arrival_rates(self, n: int) -> list[float]:
        lam = [0.0] * n
        for members, rate in self.cds_rates:
            for i in members:
                lam[i] += rate
        return lam

    def slacks(self, g: NetworkGraph) -> list[float]:
        mu = self.service_rates(g)
        lam = self.arrival_rates(g.node_count)
        return [m - l for m, l in zip(mu, lam)]

    def verify(self, g: NetworkGraph, tol: float = _FEAS_TOL) -> None:
        """Re-check feasibility by direct substitution."""
        if any(rate < -tol for _, rate in self.cds_rates):
            raise ValidationError("negative route rate in policy")
        if any(p < -tol for _, p in self.schedule_probs):
            raise ValidationError("negative schedule probability in policy")
        if sum(p for _, p in self.schedule_probs) > 1.0 + tol:
            raise ValidationError("schedule probabilities exceed 1")
        worst = min(self.slacks(g), default=0.0)
        if worst < -tol:
            raise ValidationError(f"policy infeasible: slack {worst}")


@dataclass(frozen=True)
class CapacityResult:
    lambda_star: float
    witness: StationaryPolicy
    lambda_star_exact: Optional[Fraction] = None

    def to_json_dict(self) -> dict:
        out = {
            "lambda_star": self.lambda_star,
            "cds_rates": [
                {"members": list(members), "rate": rate}
                for members, rate in self.witness.cds_rates
            ],
            "schedule_probs": [
                {"members": list(members), "prob": prob}
                for members, prob in self.witness.schedule_probs
            ],
        }
        if self.lambda_star_exact is not None:
            out["lambda_star_exact"] = str(self.lambda_star_exact)
        return out


def _check_pair(g: NetworkGraph, cg: ConflictGraph, limit: int) -> None:
    if g.node_count != cg.node_count:
        raise ValidationError("graph and conflict graph sizes disagree")
    if g.node_count > limit:
        raise LimitExceeded(f"capacity computation supports n <= {limit}")


def _capacity_lp(g: NetworkGraph, cg: ConflictGraph):
    routes = _minimal_cds_members(g)
    schedules = _maximal_schedule_members(cg)
    n = g.node_count
    k, j = len(routes), len(schedules)
    cols = k + j
    a_rows = []
    b = []
    for i in range(n):
        row = [0] * cols
        for r, members in enumerate(routes):
            if i in members:
                row[r] = 1
        for s, members in enumerate(schedules):
            if i in members:
                row[k + s] = -g.capacity[i]
        a_rows.append(row)
        b.append(0)
    a_rows.append([0] * k + [1] * j)
    b.append(1)
    c = [1] * k + [0] * j
    return routes, schedules, c, a_rows, b


def broadcast_capacity(
    g: NetworkGraph,
    cg: ConflictGraph,
    limit: int = EXACT_ENUMERATION_LIMIT,
    exact: bool = False,
) -> CapacityResult:
    """Maximum sustainable broadcast arrival rate, with an optimal witness.

    ``exact=True`` additionally solves the program in rational arithmetic
    and stores the exact optimum; the float solve must agree within 1e-9.
    """
    _check_pair(g, cg, limit)
    routes, schedules, c, a_rows, b = _capacity_lp(g, cg)
    value, x = solve_lp_max(c, a_rows, b)
    k = len(routes)
    cds_rates = tuple(
        (routes[r], x[r]) for r in range(k) if x[r] > _FEAS_TOL
    )
    schedule_probs = tuple(
        (schedules[s], x[k + s]) for s in range(len(schedules)) if x[k + s] > _FEAS_TOL
    )
    witness = StationaryPolicy(cds_rates=cds_rates, schedule_probs=schedule_probs)
    witness.verify(g)
    if abs(witness.total_rate - value) > 1e-6 * max(1.0, abs(value)):
        raise ValidationError("witness rate disagrees with LP optimum")

    exact_value: Optional[Fraction] = None
    if exact:
        exact_value, _ = solve_lp_max(c, a_rows, b, exact=True)
        if abs(float(exact_value) - value) > _FEAS_TOL:
            raise ValidationError(
                f"float optimum {value} differs from rational optimum {exact_value}"
            )
    return CapacityResult(lambda_star=value, witness=witness, lambda_star_exact=exact_value)


def build_randomized_policy(
    g: NetworkGraph,
    cg: ConflictGraph,
    lam: float,
    limit: int = EXACT_ENUMERATION_LIMIT,
) -> StationaryPolicy:
    """Stationary policy carrying rate ``lam``.

    For ``0 < lam < capacity`` the capacity witness is scaled down and the
    slack in the schedule budget is spread uniformly over all maximal
    schedules, which leaves every positive-capacity node with strictly
    positive service slack. ``lam = 0`` returns the empty policy.
    """
    if lam < 0 or not math.isfinite(lam):
        raise ValidationError("arrival rate must be finite and >= 0")
    if lam == 0:
        return StationaryPolicy(cds_rates=(), schedule_probs=())
    result = broadcast_capacity(g, cg, limit=limit)
    if lam >= result.lambda_star:
        raise RateInfeasible(
            f"rate {lam} not below capacity {result.lambda_star}"
        )
    theta = lam / result.lambda_star
    cds_rates = tuple(
        (members, theta * rate) for members, rate in result.witness.cds_rates
    )
    schedules = _maximal_schedule_members(cg)
    probs = {members: (1.0 - theta) / len(schedules) for members in schedules}
    for members, p in result.witness.schedule_probs:
        probs[members] = probs.get(members, 0.0) + theta * p
    policy = StationaryPolicy(
        cds_rates=cds_rates,
        schedule_probs=tuple(sorted(probs.items())),
    )
    policy.verify(g)
    return policy


def clique_upper_bound(
    g: NetworkGraph, cg: ConflictGraph, limit: int = EXACT_ENUMERATION_LIMIT
) -> float:
    """Capacity bound from mandatory transmitters.

    Nodes common to every minimal route must each transmit every packet, so
    a clique K of such nodes in the conflict graph forces
    ``rate * sum(1/c_u for u in K) <= 1``. Returns the tightest such bound;
    the singleton clique at the source always applies.
    """
    _check_pair(g, cg, limit)
    routes = _minimal_cds_members(g)
    mandatory = set(routes[0])
    for members in routes[1:]:
        mandatory &= set(members)
    nodes = sorted(mandatory)
    best = math.inf
    for mask in range(1, 1 << len(nodes)):
        subset = [nodes[i] for i in range(len(nodes)) if mask >> i & 1]
        if not all(
            cg.conflicts[u] & (1 << v)
            for idx, u in enumerate(subset)
            for v in subset[idx + 1 :]
        ):
            continue
        if any(g.capacity[u] == 0 for u in subset):
            return 0.0
        bound = 1.0 / sum(1.0 / g.capacity[u] for u in subset)
        best = min(best, bound)
    return best
