"""Weighted route and schedule solvers.

Routing needs a minimum-weight connected dominating set; activation needs a
maximum-weight independent set of the conflict graph. Both come in an exact
flavor (complete enumeration, desk scale) and a polynomial greedy flavor.
All solvers are deterministic: ties are broken toward the lexicographically
smallest member list.
"""

from __future__ import annotations

import heapq
import math
from typing import Sequence

from .errors import DimensionMismatch, LimitExceeded, ValidationError
from .graphs import (
    EXACT_ENUMERATION_LIMIT,
    ConflictGraph,
    ConnectedDominatingSet,
    NetworkGraph,
    _iter_bits,
    _maximal_schedule_members,
    _minimal_cds_members,
    is_cds,
)

#: Per-node nonnegative weight vector (virtual-queue packets).
NodeWeights = Sequence[float]


def _validate_weights(w: NodeWeights, n: int) -> None:
    if len(w) != n:
        raise DimensionMismatch(f"expected {n} weights, got {len(w)}")
    for i, x in enumerate(w):
        if not math.isfinite(x) or x < 0:
            raise ValidationError(f"weight of node {i} must be finite and >= 0, got {x}")


def mcds_exact(
    g: NetworkGraph, w: NodeWeights, limit: int = EXACT_ENUMERATION_LIMIT
) -> ConnectedDominatingSet:
    """Minimum-weight route over all minimal connected dominating sets.

    Restricting to minimal sets loses nothing: weights are nonnegative, so
    pruning a removable member never increases the total.
    """
    _validate_weights(w, g.node_count)
    if g.node_count > limit:
        raise LimitExceeded(f"exact route solver supports n <= {limit}")
    getter = w.__getitem__
    best_key = None
    best_members = None
    for members in _minimal_cds_members(g):
        key = (sum(map(getter, members)), members)
        if best_key is None or key < best_key:
            best_key = key
            best_members = members
    assert best_members is not None, "a reachable graph always has a route"
    return ConnectedDominatingSet(best_members)


def mcds_greedy(g: NetworkGraph, w: NodeWeights) -> ConnectedDominatingSet:
    """Polynomial route heuristic: grow a dominating set by cheapest coverage,
    connect it with cheapest paths, then prune removable members."""
    _validate_weights(w, g.node_count)
    n = g.node_count
    out = g.out_masks
    cover = tuple((1 << i) | m for i, m in enumerate(out))
    full = (1 << n) - 1
    src = g.source

    members = 1 << src
    covered = cover[src]
    while covered != full:
        best = None
        for v in range(n):
            if members & (1 << v):
                continue
            gained = (cover[v] & ~covered).bit_count()
            if not gained:
                continue
            key = (w[v] / gained, v)
            if best is None or key < best:
                best = key
        assert best is not None
        v = best[1]
        members |= 1 << v
        covered |= cover[v]

    members = _connect_members(g, w, members)

    # Prune heaviest-first so expensive relays drop whenever the remainder
    # still forms a valid route.
    changed = True
    while changed:
        changed = False
        order = sorted(_iter_bits(members & ~(1 << src)), key=lambda v: (-w[v], -v))
        for v in order:
            candidate = members & ~(1 << v)
            if is_cds(g, _iter_bits(candidate)):
                members = candidate
                changed = True
                break
    return ConnectedDominatingSet(tuple(_iter_bits(members)))


def _connect_members(g: NetworkGraph, w: NodeWeights, members: int) -> int:
    """Join all members to the source component via cheapest directed paths;
    intermediate nodes become members (entering an existing member is free)."""
    out = g.out_masks
    n = g.node_count
    while True:
        reached = frontier = 1 << g.source
        while frontier:
            nxt = 0
            for i in _iter_bits(frontier):
                nxt |= out[i]
            frontier = nxt & members & ~reached
            reached |= frontier
        stranded = members & ~reached
        if not stranded:
            return members

        dist = [math.inf] * n
        parent = [-1] * n
        heap: list[tuple[float, int]] = []
        for i in _iter_bits(reached):
            dist[i] = 0.0
            heapq.heappush(heap, (0.0, i))
        target = -1
        while heap:
            d, u = heapq.heappop(heap)
            if d > dist[u]:
                continue
            if stranded & (1 << u):
                target = u
                break
            for v in _iter_bits(out[u]):
                step = 0.0 if members & (1 << v) else w[v]
                nd = d + step
                if nd < dist[v]:
                    dist[v] = nd
                    parent[v] = u
                    heapq.heappush(heap, (nd, v))
        assert target >= 0, "graph reachability guarantees a connecting path"
        v = target
        while v != -1:
            members |= 1 << v
            v = parent[v]


def mwis_exact(
    cg: ConflictGraph, w: NodeWeights, limit: int = EXACT_ENUMERATION_LIMIT
) -> tuple[int, ...]:
    """Maximum-weight independent set of the conflict graph.

    Zero-weight nodes are dropped from the result (the objective is
    unchanged), so an all-zero weight vector yields the empty schedule.
    Searching inclusion-maximal sets suffices for nonnegative weights.
    """
    _validate_weights(w, cg.node_count)
    if cg.node_count > limit:
        raise LimitExceeded(f"exact schedule solver supports n <= {limit}")
    best_total = -1.0
    candidates: list[tuple[int, ...]] = []
    for members in _maximal_schedule_members(cg):
        total = 0.0
        for i in members:
            wi = w[i]
            if wi > 0.0:
                total += wi
        if total > best_total:
            best_total = total
            candidates = [members]
        elif total == best_total:
            candidates.append(members)
    filtered = {tuple(i for i in members if w[i] > 0.0) for members in candidates}
    return min(filtered)


def mwis_greedy(cg: ConflictGraph, w: NodeWeights) -> tuple[int, ...]:
    """Greedy independent set: take nodes by descending weight, skipping any
    that conflict with an already-taken node."""
    _validate_weights(w, cg.node_count)
    taken_mask = 0
    taken: list[int] = []
    for i in sorted(range(cg.node_count), key=lambda i: (-w[i], i)):
        if w[i] <= 0.0:
            break
        if not cg.conflicts[i] & taken_mask:
            taken.append(i)
            taken_mask |= 1 << i
    return tuple(sorted(taken))
