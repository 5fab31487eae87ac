"""Slotted-time simulator for the physical broadcast network.

Each slot runs: availability draw, external arrivals at the source, route
assignment for the new arrivals, schedule activation, physical transmissions
under least-transmitted-first priority, and the virtual-queue update. Both
control decisions are evaluated on the start-of-slot virtual queues, and
packets become transmittable the slot after they arrive or are received, so
every hop costs at least one slot.

A node's transmission reaches all of its out-neighbors. A receiver keeps a
forwardable copy only on first reception and only if it lies on the packet's
route; duplicates are discarded. A packet counts as delivered once every
node has received it.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field, replace
from concurrent.futures import ProcessPoolExecutor
from typing import Optional

import numpy as np

from .errors import ConfigError, ValidationError
from .graphs import ConflictGraph, ConnectedDominatingSet, NetworkGraph
from .solvers import mcds_exact, mcds_greedy, mwis_exact, mwis_greedy

_ARRIVAL_PROCESSES = ("bernoulli", "poisson")
_SOLVERS = ("exact", "greedy")


@dataclass(frozen=True)
class SimConfig:
    """Parameters of one simulation run.

    ``lam`` is the expected external arrival rate at the source in packets
    per slot. The Bernoulli-batch process delivers ``floor(lam)`` packets
    every slot plus one more with probability ``lam - floor(lam)``.
    """

    lam: float
    horizon: int
    seed: int
    arrival_process: str = "bernoulli"
    p_on: float = 1.0
    route_solver: str = "exact"
    activation_solver: str = "exact"

    def __post_init__(self) -> None:
        if not math.isfinite(self.lam) or self.lam < 0:
            raise ConfigError("arrival rate must be finite and >= 0")
        if self.horizon < 1:
            raise ConfigError("horizon must be at least one slot")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must be a 64-bit unsigned integer")
        if self.arrival_process not in _ARRIVAL_PROCESSES:
            raise ConfigError(f"unknown arrival process {self.arrival_process!r}")
        if not 0.0 <= self.p_on <= 1.0:
            raise ConfigError("p_on must lie in [0, 1]")
        if self.route_solver not in _SOLVERS or self.activation_solver not in _SOLVERS:
            raise ConfigError("solvers must be 'exact' or 'greedy'")


@dataclass
class Packet:
    """One broadcast unit and its delivery state."""

    id: int
    arrival_slot: int
    route: ConnectedDominatingSet
    delivered_slot: Optional[int] = None

    @property
    def delay(self) -> Optional[int]:
        if self.delivered_slot is None:
            return None
        return self.delivered_slot - self.arrival_slot


@dataclass(frozen=True)
class PacketCopy:
    """A packet replica held (or just released) by one node."""

    packet_id: int
    holder: int
    transmit_count: int
    pending: bool


class NodeBuffer:
    """Pending copies at one node, ordered by (transmit_count, packet id)."""

    __slots__ = ("node", "_heap", "_present")

    def __init__(self, node: int = 0) -> None:
        self.node = node
        self._heap: list[tuple[int, int]] = []
        self._present: set[int] = set()

    def __len__(self) -> int:
        return len(self._heap)

    def push(self, packet_id: int, transmit_count: int) -> None:
        if packet_id in self._present:
            raise ValidationError(f"packet {packet_id} already buffered at node {self.node}")
        self._present.add(packet_id)
        heapq.heappush(self._heap, (transmit_count, packet_id))

    def pop_batch(self, budget: int) -> list[tuple[int, int]]:
        out = []
        for _ in range(min(budget, len(self._heap))):
            item = heapq.heappop(self._heap)
            self._present.discard(item[1])
            out.append(item)
        return out

    def snapshot(self) -> list[PacketCopy]:
        return [
            PacketCopy(packet_id=pid, holder=self.node, transmit_count=k, pending=True)
            for k, pid in sorted(self._heap)
        ]


def ltf_pick(buffer: NodeBuffer, budget: int) -> list[PacketCopy]:
    """Remove and return the ``budget`` highest-priority copies (least
    transmitted first, packet id as tie-break)."""
    if budget < 0:
        raise ValidationError("budget must be nonnegative")
    return [
        PacketCopy(packet_id=pid, holder=buffer.node, transmit_count=k, pending=False)
        for k, pid in buffer.pop_batch(budget)
    ]


@dataclass
class Trace:
    """Per-slot and per-packet records of one run. Column lists are indexed
    by slot-1; ``delivered`` and ``arrivals`` are cumulative counts."""

    config: SimConfig
    node_count: int
    sum_pq: list[int] = field(default_factory=list)
    max_vq: list[float] = field(default_factory=list)
    delivered: list[int] = field(default_factory=list)
    arrivals: list[int] = field(default_factory=list)
    schedules: list[tuple[int, ...]] = field(default_factory=list)
    packets: list[Packet] = field(default_factory=list)
    final_vq: tuple[float, ...] = ()

    def delays(self) -> list[int]:
        return [p.delay for p in self.packets if p.delivered_slot is not None]

    def mean_delay(self) -> float:
        d = self.delays()
        return sum(d) / len(d) if d else math.nan

    def throughput(self) -> float:
        return self.delivered[-1] / self.config.horizon

    def backlog_rate(self) -> float:
        return self.sum_pq[-1] / self.config.horizon


def _draw_arrivals(rng: np.random.Generator, cfg: SimConfig) -> list[int]:
    T = cfg.horizon
    if cfg.arrival_process == "poisson":
        return rng.poisson(cfg.lam, T).astype(int).tolist()
    base = int(math.floor(cfg.lam))
    frac = cfg.lam - base
    if frac > 0.0:
        extra = rng.random(T) < frac
        return (base + extra.astype(np.int64)).tolist()
    return [base] * T


def _draw_availability(rng: np.random.Generator, cfg: SimConfig, n: int) -> Optional[list[int]]:
    """Per-slot bitmasks of transmit-capable nodes, or None when all are."""
    if cfg.p_on >= 1.0:
        return None
    if cfg.p_on <= 0.0:
        return [0] * cfg.horizon
    bits = rng.random((cfg.horizon, n)) < cfg.p_on
    powers = (1 << np.arange(n, dtype=np.int64)).astype(np.int64)
    return (bits.astype(np.int64) @ powers).tolist()


def simulate(g: NetworkGraph, cg: ConflictGraph, cfg: SimConfig) -> Trace:
    """Run one seeded simulation and collect its trace.

    Identical arguments produce bit-identical traces. A delivery-count
    consistency check (arrivals minus pending copies never exceeds the
    delivered count) is enforced every slot.
    """
    if cg.node_count != g.node_count:
        raise ConfigError("graph and conflict graph sizes disagree")
    n = g.node_count
    caps = g.capacity
    src = g.source
    T = cfg.horizon
    full = (1 << n) - 1

    rng = np.random.default_rng(cfg.seed)
    arrivals_by_slot = _draw_arrivals(rng, cfg)
    avail_masks = _draw_availability(rng, cfg, n)

    route_fn = mcds_exact if cfg.route_solver == "exact" else mcds_greedy
    act_fn = mwis_exact if cfg.activation_solver == "exact" else mwis_greedy

    out_nbrs = [g.out_neighbors(i) for i in range(n)]
    buffers = [NodeBuffer(i) for i in range(n)]
    q = [0.0] * n

    trace = Trace(config=cfg, node_count=n)
    packets = trace.packets
    received: dict[int, int] = {}
    route_mask_of: dict[int, int] = {}
    route_cache: dict[tuple[int, ...], ConnectedDominatingSet] = {}
    sched_cache: dict[tuple[int, ...], tuple[int, ...]] = {}

    pending_total = 0
    delivered_count = 0
    cum_arrivals = 0

    for t in range(1, T + 1):
        arr = arrivals_by_slot[t - 1]
        amask = full if avail_masks is None else avail_masks[t - 1]

        # Control decisions, both on the start-of-slot virtual queues.
        route = None
        if arr:
            route = route_fn(g, q)
            route = route_cache.setdefault(route.members, route)
        if amask == full:
            weights = [q[i] * caps[i] for i in range(n)]
        else:
            weights = [q[i] * caps[i] if amask >> i & 1 else 0.0 for i in range(n)]
        schedule = act_fn(cg, weights)
        schedule = sched_cache.setdefault(schedule, schedule)

        # Collect every transmission before delivering any, so copies
        # received this slot cannot be forwarded until the next one.
        outgoing = []
        for i in schedule:
            if caps[i] and len(buffers[i]):
                picks = ltf_pick(buffers[i], caps[i])
                pending_total -= len(picks)
                outgoing.append((i, picks))
        for i, picks in outgoing:
            nbrs = out_nbrs[i]
            for copy in picks:
                pid = copy.packet_id
                hops = copy.transmit_count + 1
                rmask = route_mask_of.get(pid, 0)
                for j in nbrs:
                    mask = received.get(pid)
                    if mask is None:
                        break  # already delivered everywhere
                    jbit = 1 << j
                    if mask & jbit:
                        continue
                    mask |= jbit
                    if rmask & jbit:
                        assert hops < n
                        buffers[j].push(pid, hops)
                        pending_total += 1
                    if mask == full:
                        delivered_count += 1
                        packets[pid].delivered_slot = t
                        del received[pid]
                        del route_mask_of[pid]
                    else:
                        received[pid] = mask

        # New packets join the source buffer at the end of their slot.
        if arr:
            for _ in range(arr):
                pid = len(packets)
                packet = Packet(id=pid, arrival_slot=t, route=route)
                packets.append(packet)
                if n == 1:
                    packet.delivered_slot = t
                    delivered_count += 1
                else:
                    received[pid] = 1 << src
                    route_mask_of[pid] = route.mask
                    buffers[src].push(pid, 0)
                    pending_total += 1
            cum_arrivals += arr
            for i in route.members:
                q[i] += arr
        for i in schedule:
            v = q[i] - caps[i]
            q[i] = v if v > 0.0 else 0.0

        trace.sum_pq.append(pending_total)
        trace.max_vq.append(max(q))
        trace.delivered.append(delivered_count)
        trace.arrivals.append(cum_arrivals)
        trace.schedules.append(schedule)
        if not cum_arrivals - pending_total <= delivered_count <= cum_arrivals:
            raise AssertionError(
                f"delivery accounting violated at slot {t}: "
                f"arrivals={cum_arrivals} pending={pending_total} delivered={delivered_count}"
            )

    trace.final_vq = tuple(q)
    return trace


@dataclass(frozen=True)
class SaturationRow:
    """One sweep point: seed-averaged delay and throughput plus stability."""

    lam: float
    mean_delay: float
    throughput: float
    stable: bool


def _point_stats(args) -> tuple[float, float, bool]:
    g, cg, cfg, threshold = args
    tr = simulate(g, cg, cfg)
    return (tr.mean_delay(), tr.throughput(), tr.backlog_rate() < threshold)


def measure_saturation(
    g: NetworkGraph,
    cg: ConflictGraph,
    cfg_template: SimConfig,
    lambda_grid: list[float],
    runs: int,
    *,
    threshold: float = 0.01,
    jobs: int = 1,
) -> list[SaturationRow]:
    """Sweep arrival rates; average ``runs`` seeded runs per rate.

    Run ``k`` of every rate uses seed ``cfg_template.seed + k``. A point is
    stable when every run ends with pending copies per slot below
    ``threshold``. Rows come back sorted by rate regardless of ``jobs``.
    """
    if not lambda_grid:
        raise ValidationError("lambda grid must be nonempty")
    if runs < 1:
        raise ValidationError("need at least one run per grid point")
    grid = sorted(lambda_grid)
    tasks = [
        (g, cg, replace(cfg_template, lam=lam, seed=cfg_template.seed + k), threshold)
        for lam in grid
        for k in range(runs)
    ]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            stats = list(pool.map(_point_stats, tasks))
    else:
        stats = [_point_stats(task) for task in tasks]

    rows = []
    for idx, lam in enumerate(grid):
        chunk = stats[idx * runs : (idx + 1) * runs]
        delays = [d for d, _, _ in chunk if not math.isnan(d)]
        rows.append(
            SaturationRow(
                lam=lam,
                mean_delay=sum(delays) / len(delays) if delays else math.nan,
                throughput=sum(tp for _, tp, _ in chunk) / runs,
                stable=all(st for _, _, st in chunk),
            )
        )
    return rows
