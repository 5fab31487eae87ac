"""Network topology, interference models, and route/schedule enumeration.

Nodes are dense integers ``0..n-1``. Topologies are directed; a node's
transmission reaches all of its out-neighbors at once, so broadcast routes
are connected dominating sets (CDS) rooted at the source and transmission
schedules are independent sets of the conflict graph.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Iterable, Iterator

from .errors import LimitExceeded, ParseError, ValidationError

#: Largest node count accepted by the exact enumeration routines.
EXACT_ENUMERATION_LIMIT = 16


def _iter_bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


@dataclass(frozen=True)
class NetworkGraph:
    """Directed topology with per-node capacities and a single source.

    ``capacity[i]`` is the number of packet copies node ``i`` can push onto
    its outgoing hyperedge per slot. Every non-source node must be reachable
    from the source, otherwise no broadcast route exists.
    """

    node_count: int
    edges: tuple[tuple[int, int], ...]
    capacity: tuple[int, ...]
    source: int

    def __post_init__(self) -> None:
        n = self.node_count
        if n < 1:
            raise ValidationError("node_count must be positive")
        if not 0 <= self.source < n:
            raise ValidationError(f"source {self.source} out of range 0..{n - 1}")
        normalized = tuple(sorted(set((int(u), int(v)) for u, v in self.edges)))
        object.__setattr__(self, "edges", normalized)
        for u, v in normalized:
            if not (0 <= u < n and 0 <= v < n):
                raise ValidationError(f"edge ({u},{v}) out of range")
            if u == v:
                raise ValidationError(f"self-loop at node {u}")
        caps = tuple(int(c) for c in self.capacity)
        object.__setattr__(self, "capacity", caps)
        if len(caps) != n:
            raise ValidationError("capacity vector length must equal node_count")
        if any(c < 0 for c in caps):
            raise ValidationError("capacities must be nonnegative")
        unreachable = [i for i in range(n) if not self._reach_mask & (1 << i)]
        if unreachable:
            raise ValidationError(f"nodes unreachable from source: {unreachable}")

    @cached_property
    def out_masks(self) -> tuple[int, ...]:
        masks = [0] * self.node_count
        for u, v in self.edges:
            masks[u] |= 1 << v
        return tuple(masks)

    @cached_property
    def _reach_mask(self) -> int:
        masks = [0] * self.node_count
        for u, v in self.edges:
            masks[u] |= 1 << v
        reached = frontier = 1 << self.source
        while frontier:
            nxt = 0
            for i in _iter_bits(frontier):
                nxt |= masks[i]
            frontier = nxt & ~reached
            reached |= frontier
        return reached

    def out_neighbors(self, i: int) -> tuple[int, ...]:
        return tuple(_iter_bits(self.out_masks[i]))


@dataclass(frozen=True)
class InterferenceModel:
    """Which pairs of nodes cannot transmit in the same slot.

    Kinds: ``none`` (all nodes orthogonal), ``primary`` (node-centric rule:
    two nodes conflict when they are adjacent in either direction or share
    an out-neighbor), ``explicit`` (conflict pairs given directly).
    """

    kind: str
    conflicts: tuple[tuple[int, int], ...] = ()

    KINDS = ("none", "primary", "explicit")

    def __post_init__(self) -> None:
        if self.kind not in self.KINDS:
            raise ValidationError(f"unknown interference kind {self.kind!r}")
        pairs = set()
        for u, v in self.conflicts:
            if u == v:
                raise ValidationError(f"conflict pair ({u},{v}) is a self-loop")
            pairs.add((min(u, v), max(u, v)))
        object.__setattr__(self, "conflicts", tuple(sorted(pairs)))
        if self.conflicts and self.kind != "explicit":
            raise ValidationError("conflict pairs only allowed with kind='explicit'")

    @classmethod
    def none(cls) -> "InterferenceModel":
        return cls("none")

    @classmethod
    def primary(cls) -> "InterferenceModel":
        return cls("primary")

    @classmethod
    def explicit(cls, pairs: Iterable[tuple[int, int]]) -> "InterferenceModel":
        return cls("explicit", tuple(pairs))


@dataclass(frozen=True)
class ConflictGraph:
    """Symmetric, irreflexive conflict relation over node ids.

    ``conflicts[i]`` is the bitmask of nodes that cannot transmit together
    with ``i``. Feasible transmission schedules are exactly the independent
    sets of this graph.
    """

    node_count: int
    conflicts: tuple[int, ...]

    def __post_init__(self) -> None:
        n = self.node_count
        if len(self.conflicts) != n:
            raise ValidationError("conflict mask vector length must equal node_count")
        for i, mask in enumerate(self.conflicts):
            if mask & (1 << i):
                raise ValidationError(f"conflict graph has self-loop at {i}")
            if mask >> n:
                raise ValidationError(f"conflict mask of {i} references nodes >= {n}")
            for j in _iter_bits(mask):
                if not self.conflicts[j] & (1 << i):
                    raise ValidationError(f"conflict relation not symmetric at ({i},{j})")

    def has_conflict(self, i: int, j: int) -> bool:
        return bool(self.conflicts[i] & (1 << j))

    def pairs(self) -> tuple[tuple[int, int], ...]:
        out = []
        for i in range(self.node_count):
            for j in _iter_bits(self.conflicts[i]):
                if j > i:
                    out.append((i, j))
        return tuple(out)

    def is_independent(self, members: Iterable[int]) -> bool:
        mask = 0
        for i in members:
            mask |= 1 << i
        return all(not (self.conflicts[i] & mask) for i in _iter_bits(mask))


@dataclass(frozen=True)
class ConnectedDominatingSet:
    """A broadcast route: node ids, stored sorted ascending."""

    members: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "members", tuple(sorted(set(int(i) for i in self.members))))

    def __iter__(self) -> Iterator[int]:
        return iter(self.members)

    def __len__(self) -> int:
        return len(self.members)

    def __contains__(self, i: int) -> bool:
        return i in self.members

    @property
    def mask(self) -> int:
        m = 0
        for i in self.members:
            m |= 1 << i
        return m


@dataclass(frozen=True)
class ParsedGraphFile:
    """Graph file contents: topology plus any explicit conflict pairs."""

    graph: NetworkGraph
    conflict_pairs: tuple[tuple[int, int], ...]


def parse_graph_file(text: str) -> ParsedGraphFile:
    """Parse the line-oriented graph format.

    Directives: ``n <int>``, ``src <int>``, ``cap <node>:<int>`` (one or more
    per line; unlisted nodes default to capacity 1), ``edge <u> <v>``,
    ``biedge <u> <v>``, ``conflict <u> <v>``. ``#`` starts a comment.
    """
    n = None
    src = None
    caps: dict[int, int] = {}
    edges: list[tuple[int, int]] = []
    conflicts: list[tuple[int, int]] = []

    def _int(token: str, lineno: int) -> int:
        try:
            return int(token)
        except ValueError:
            raise ParseError(f"line {lineno}: expected integer, got {token!r}") from None

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        key, args = tokens[0], tokens[1:]
        if key == "n":
            if len(args) != 1:
                raise ParseError(f"line {lineno}: 'n' takes one argument")
            n = _int(args[0], lineno)
        elif key == "src":
            if len(args) != 1:
                raise ParseError(f"line {lineno}: 'src' takes one argument")
            src = _int(args[0], lineno)
        elif key == "cap":
            if not args:
                raise ParseError(f"line {lineno}: 'cap' needs node:value entries")
            for entry in args:
                if ":" not in entry:
                    raise ParseError(f"line {lineno}: malformed cap entry {entry!r}")
                node_s, val_s = entry.split(":", 1)
                caps[_int(node_s, lineno)] = _int(val_s, lineno)
        elif key in ("edge", "biedge", "conflict"):
            if len(args) != 2:
                raise ParseError(f"line {lineno}: '{key}' takes two node ids")
            u, v = _int(args[0], lineno), _int(args[1], lineno)
            if key == "edge":
                edges.append((u, v))
            elif key == "biedge":
                edges.append((u, v))
                edges.append((v, u))
            else:
                conflicts.append((u, v))
        else:
            raise ParseError(f"line {lineno}: unknown directive {key!r}")

    if n is None or n < 1:
        raise ParseError("graph file must declare a positive node count 'n'")
    if src is None:
        raise ParseError("graph file must declare a source 'src'")
    for node in caps:
        if not 0 <= node < n:
            raise ValidationError(f"capacity given for unknown node {node}")
    capacity = tuple(caps.get(i, 1) for i in range(n))
    graph = NetworkGraph(node_count=n, edges=tuple(edges), capacity=capacity, source=src)
    return ParsedGraphFile(graph=graph, conflict_pairs=tuple(conflicts))


def load_graph(text: str) -> NetworkGraph:
    """Parse a graph file and return the validated topology."""
    return parse_graph_file(text).graph


def dump_graph(g: NetworkGraph, conflict_pairs: Iterable[tuple[int, int]] = ()) -> str:
    """Serialize a graph back into the file format accepted by load_graph."""
    lines = [f"n {g.node_count}", f"src {g.source}"]
    lines.append("cap " + " ".join(f"{i}:{c}" for i, c in enumerate(g.capacity)))
    emitted = set()
    for u, v in g.edges:
        if (v, u) in g.edges and (v, u) not in emitted and u < v:
            lines.append(f"biedge {u} {v}")
            emitted.add((u, v))
            emitted.add((v, u))
        elif (u, v) not in emitted:
            lines.append(f"edge {u} {v}")
            emitted.add((u, v))
    for u, v in conflict_pairs:
        lines.append(f"conflict {u} {v}")
    return "\n".join(lines) + "\n"


def build_conflict_graph(g: NetworkGraph, model: InterferenceModel) -> ConflictGraph:
    """Construct the conflict graph of a topology under an interference model."""
    n = g.node_count
    masks = [0] * n
    if model.kind == "primary":
        out = g.out_masks
        for i in range(n):
            for j in range(i + 1, n):
                adjacent = bool(out[i] & (1 << j)) or bool(out[j] & (1 << i))
                if adjacent or (out[i] & out[j]):
                    masks[i] |= 1 << j
                    masks[j] |= 1 << i
    elif model.kind == "explicit":
        for u, v in model.conflicts:
            if not (0 <= u < n and 0 <= v < n):
                raise ValidationError(f"conflict pair ({u},{v}) out of range")
            masks[u] |= 1 << v
            masks[v] |= 1 << u
    return ConflictGraph(node_count=n, conflicts=tuple(masks))


def _cover_masks(g: NetworkGraph) -> tuple[int, ...]:
    # cover[i]: nodes dominated when i transmits (itself plus out-neighbors)
    return tuple((1 << i) | m for i, m in enumerate(g.out_masks))


def _connected_within(out_masks: tuple[int, ...], source: int, mask: int) -> bool:
    """True iff every node of mask is reachable from source inside mask."""
    if not mask & (1 << source):
        return False
    reached = frontier = 1 << source
    while frontier:
        nxt = 0
        for i in _iter_bits(frontier):
            nxt |= out_masks[i]
        frontier = nxt & mask & ~reached
        reached |= frontier
    return reached == mask


def is_cds(g: NetworkGraph, members: Iterable[int]) -> bool:
    """Check the three route conditions: source membership, internal
    connectivity along out-edges, and domination of every node."""
    mask = 0
    for i in members:
        if not 0 <= i < g.node_count:
            raise ValidationError(f"member {i} out of range")
        mask |= 1 << i
    if not mask & (1 << g.source):
        return False
    cover = _cover_masks(g)
    covered = 0
    for i in _iter_bits(mask):
        covered |= cover[i]
    if covered != (1 << g.node_count) - 1:
        return False
    return _connected_within(g.out_masks, g.source, mask)


def _check_limit(n: int, limit: int) -> None:
    if n > limit:
        raise LimitExceeded(f"exact enumeration supports n <= {limit}, got {n}")


@lru_cache(maxsize=None)
def _minimal_cds_masks(g: NetworkGraph) -> tuple[int, ...]:
    n = g.node_count
    cover = _cover_masks(g)
    out = g.out_masks
    full = (1 << n) - 1
    src_bit = 1 << g.source
    all_cds = []
    for mask in range(1 << n):
        if not mask & src_bit:
            continue
        covered = 0
        for i in _iter_bits(mask):
            covered |= cover[i]
        if covered != full:
            continue
        if _connected_within(out, g.source, mask):
            all_cds.append(mask)
    cds_set = set(all_cds)
    minimal = []
    for mask in all_cds:
        if all((mask ^ (1 << v)) not in cds_set for v in _iter_bits(mask & ~src_bit)):
            minimal.append(mask)
    return tuple(minimal)


@lru_cache(maxsize=None)
def _minimal_cds_members(g: NetworkGraph) -> tuple[tuple[int, ...], ...]:
    return tuple(sorted(tuple(_iter_bits(m)) for m in _minimal_cds_masks(g)))


def enumerate_minimal_cds(
    g: NetworkGraph, limit: int = EXACT_ENUMERATION_LIMIT
) -> list[ConnectedDominatingSet]:
    """All minimal broadcast routes, ordered lexicographically by member list.

    Minimal means no non-source member can be dropped without breaking one
    of the route conditions.
    """
    _check_limit(g.node_count, limit)
    return [ConnectedDominatingSet(m) for m in _minimal_cds_members(g)]


@lru_cache(maxsize=None)
def _independent_set_masks(cg: ConflictGraph) -> tuple[int, ...]:
    n = cg.node_count
    conf = cg.conflicts
    result = []
    for mask in range(1 << n):
        ok = True
        m = mask
        while m:
            low = m & -m
            if conf[low.bit_length() - 1] & mask:
                ok = False
                break
            m ^= low
        if ok:
            result.append(mask)
    return tuple(result)


def enumerate_schedules(
    cg: ConflictGraph, limit: int = EXACT_ENUMERATION_LIMIT
) -> list[tuple[int, ...]]:
    """All feasible schedules (independent sets, empty set included)."""
    _check_limit(cg.node_count, limit)
    subsets = [tuple(_iter_bits(m)) for m in _independent_set_masks(cg)]
    subsets.sort()
    return subsets


@lru_cache(maxsize=None)
def _maximal_independent_masks(cg: ConflictGraph) -> tuple[int, ...]:
    n = cg.node_count
    conf = cg.conflicts
    maximal = []
    for mask in _independent_set_masks(cg):
        extendable = False
        for v in range(n):
            if not mask & (1 << v) and not (conf[v] & mask):
                extendable = True
                break
        if not extendable:
            maximal.append(mask)
    return tuple(maximal)


@lru_cache(maxsize=None)
def _maximal_schedule_members(cg: ConflictGraph) -> tuple[tuple[int, ...], ...]:
    return tuple(sorted(tuple(_iter_bits(m)) for m in _maximal_independent_masks(cg)))


def enumerate_maximal_schedules(
    cg: ConflictGraph, limit: int = EXACT_ENUMERATION_LIMIT
) -> list[tuple[int, ...]]:
    """Inclusion-maximal feasible schedules. For nonnegative node weights a
    maximum-weight schedule can always be found among these."""
    _check_limit(cg.node_count, limit)
    return list(_maximal_schedule_members(cg))
