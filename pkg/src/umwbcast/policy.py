"""Virtual single-hop network: queue state and per-slot control decisions.

The virtual queues relax precedence: a packet routed along a CDS counts as
an arrival to every member's queue in its arrival slot. Routing picks the
minimum-weight route and activation the maximum-weight feasible schedule,
both weighted by the current virtual queue lengths; activation weights are
additionally scaled by node capacity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .errors import DimensionMismatch, ValidationError, ZeroNorm
from .graphs import ConflictGraph, ConnectedDominatingSet, NetworkGraph
from .solvers import mcds_exact, mcds_greedy, mwis_exact, mwis_greedy


@dataclass(frozen=True)
class VirtualQueueVector:
    """Per-node nonnegative virtual backlog at the start of a slot."""

    q: tuple[float, ...]
    slot: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "q", tuple(float(x) for x in self.q))
        for i, x in enumerate(self.q):
            if not math.isfinite(x) or x < 0:
                raise ValidationError(f"virtual queue {i} must be finite and >= 0")

    @classmethod
    def zeros(cls, n: int) -> "VirtualQueueVector":
        return cls(q=(0.0,) * n, slot=0)

    @property
    def norm(self) -> float:
        return math.sqrt(sum(x * x for x in self.q))


@dataclass(frozen=True)
class SlotDecision:
    """One slot's realized control action and the traffic it applied."""

    route: Optional[ConnectedDominatingSet]
    schedule: tuple[int, ...]
    arrivals_applied: tuple[float, ...]
    service_applied: tuple[float, ...]


def vq_step(
    vq: VirtualQueueVector, arrivals: Sequence[float], service: Sequence[float]
) -> VirtualQueueVector:
    """Advance the queues one slot: new = max(old + arrivals - service, 0)."""
    n = len(vq.q)
    if len(arrivals) != n or len(service) != n:
        raise DimensionMismatch(
            f"queue has {n} entries, got {len(arrivals)} arrivals / {len(service)} services"
        )
    nxt = tuple(max(q + a - s, 0.0) for q, a, s in zip(vq.q, arrivals, service))
    return VirtualQueueVector(q=nxt, slot=vq.slot + 1)


def _route_solver(name: str):
    try:
        return {"exact": mcds_exact, "greedy": mcds_greedy}[name]
    except KeyError:
        raise ValidationError(f"unknown route solver {name!r}") from None


def _activation_solver(name: str):
    try:
        return {"exact": mwis_exact, "greedy": mwis_greedy}[name]
    except KeyError:
        raise ValidationError(f"unknown activation solver {name!r}") from None


def umw_route(
    vq: VirtualQueueVector, g: NetworkGraph, solver: str = "exact"
) -> ConnectedDominatingSet:
    """Route for this slot's arrivals: minimum-queue-weight CDS."""
    return _route_solver(solver)(g, vq.q)


def umw_activate(
    vq: VirtualQueueVector,
    g: NetworkGraph,
    cg: ConflictGraph,
    solver: str = "exact",
    available: Optional[Iterable[int]] = None,
) -> tuple[int, ...]:
    """Schedule for this slot: maximum-weight independent set with node
    weights ``q_i * c_i``, restricted to the available nodes."""
    n = g.node_count
    if available is None:
        weights = [vq.q[i] * g.capacity[i] for i in range(n)]
    else:
        avail = set(available)
        for i in avail:
            if not 0 <= i < n:
                raise ValidationError(f"available node {i} out of range")
        # Unavailable nodes get weight zero and are dropped from the result,
        # so they can never be scheduled.
        weights = [vq.q[i] * g.capacity[i] if i in avail else 0.0 for i in range(n)]
    return _activation_solver(solver)(cg, weights)


def drift_report(vq: VirtualQueueVector, decision: SlotDecision) -> float:
    """Realized value of the one-slot drift bound for a decision; diagnostic.

    Comparing decisions on the same state should be done with the quadratic
    term held fixed (it is treated as a constant in the control derivation);
    this report plugs in the realized arrivals and services.
    """
    norm = vq.norm
    if norm == 0.0:
        raise ZeroNorm("drift bound undefined for an all-zero queue vector")
    a = decision.arrivals_applied
    s = decision.service_applied
    if len(a) != len(vq.q) or len(s) != len(vq.q):
        raise DimensionMismatch("decision vectors do not match queue length")
    b_hat = sum(x * x for x in a) + sum(x * x for x in s)
    cross = 2.0 * sum(q * x for q, x in zip(vq.q, a)) - 2.0 * sum(
        q * x for q, x in zip(vq.q, s)
    )
    return (b_hat + cross) / (2.0 * norm)
