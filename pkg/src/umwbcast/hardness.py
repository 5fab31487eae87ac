"""Finite-horizon broadcast feasibility and its SAT-gadget machinery.

A monotone not-all-equal 3-SAT instance maps to a three-layer broadcast
instance: a capacity-2 source over one relay node per variable (capacity 1),
and one sink node per clause fed by its three variable relays. Two packets
must reach every node within two slots, which is possible exactly when some
truth assignment leaves every clause with both a true and a false variable.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, product

from .errors import LimitExceeded, ParseError, ValidationError
from .graphs import NetworkGraph

MAX_SAT_VARS = 24


@dataclass(frozen=True)
class Mnae3SatInstance:
    """Monotone not-all-equal 3-SAT: clauses of three unnegated variables."""

    var_count: int
    clauses: tuple[tuple[int, int, int], ...]

    def __post_init__(self) -> None:
        if self.var_count < 0:
            raise ValidationError("variable count must be nonnegative")
        normalized = []
        for clause in self.clauses:
            entries = tuple(int(v) for v in clause)
            if len(entries) != 3:
                raise ValidationError(f"clause {clause} must have exactly 3 variables")
            for v in entries:
                if not 0 <= v < self.var_count:
                    raise ValidationError(f"variable {v} out of range")
            normalized.append(entries)
        object.__setattr__(self, "clauses", tuple(normalized))


@dataclass(frozen=True)
class BroadcastInstance:
    """Can ``packet_count`` packets reach every node within ``horizon`` slots?"""

    graph: NetworkGraph
    packet_count: int
    horizon: int

    def __post_init__(self) -> None:
        if self.packet_count < 1:
            raise ValidationError("need at least one packet")
        if self.horizon < 1:
            raise ValidationError("need at least one slot")


def reduce_to_broadcast(inst: Mnae3SatInstance) -> BroadcastInstance:
    """Build the two-packet, two-slot broadcast instance of a SAT instance.

    Node ids: source 0, variable ``i`` at ``1 + i``, clause ``j`` at
    ``1 + var_count + j``. Repeated variables inside a clause collapse to a
    single edge.
    """
    n_vars = inst.var_count
    n_nodes = 1 + n_vars + len(inst.clauses)
    edges = [(0, 1 + i) for i in range(n_vars)]
    for j, clause in enumerate(inst.clauses):
        sink = 1 + n_vars + j
        for v in clause:
            edges.append((1 + v, sink))
    capacity = (2,) + (1,) * (n_nodes - 1)
    graph = NetworkGraph(
        node_count=n_nodes, edges=tuple(edges), capacity=capacity, source=0
    )
    return BroadcastInstance(graph=graph, packet_count=2, horizon=2)


def decide_mnae3sat(inst: Mnae3SatInstance, max_vars: int = MAX_SAT_VARS) -> bool:
    """Exhaustive truth-assignment scan: some assignment must give every
    clause at least one true and at least one false variable."""
    if inst.var_count > max_vars:
        raise LimitExceeded(f"assignment scan supports at most {max_vars} variables")
    clauses = inst.clauses
    for assignment in range(1 << inst.var_count):
        ok = True
        for a, b, c in clauses:
            va = assignment >> a & 1
            if va == assignment >> b & 1 == assignment >> c & 1:
                ok = False
                break
        if ok:
            return True
    return False


def decide_broadcast(bi: BroadcastInstance, max_branches: int = 2_000_000) -> bool:
    """Exhaustive scheduler search for the finite-horizon question.

    Per slot every node transmits some size-``min(capacity, held)`` subset
    of its held packets onto its outgoing hyperedge; receivers accumulate.
    Transmitting strictly fewer packets than possible never helps (receivers
    discard duplicates and extra receptions cannot hurt), so only maximal
    transmission choices are branched on. Interference constraints are not
    modeled: every node may transmit each slot.
    """
    g = bi.graph
    n = g.node_count
    full = (1 << bi.packet_count) - 1
    out_nbrs = [g.out_neighbors(i) for i in range(n)]
    held0 = [0] * n
    held0[g.source] = full
    budget = [max_branches]

    def choices_for(i: int, held_mask: int) -> tuple[int, ...]:
        cap = g.capacity[i]
        count = held_mask.bit_count()
        if cap == 0 or count == 0:
            return (0,)
        if count <= cap:
            return (held_mask,)
        bits = [1 << b for b in range(bi.packet_count) if held_mask >> b & 1]
        out = []
        for combo in combinations(bits, cap):
            m = 0
            for b in combo:
                m |= b
            out.append(m)
        return tuple(out)

    def search(held: tuple[int, ...], slots_left: int) -> bool:
        if all(h == full for h in held):
            return True
        if slots_left == 0:
            return False
        senders = [i for i in range(n) if out_nbrs[i] and held[i]]
        option_lists = [choices_for(i, held[i]) for i in senders]
        for combo in product(*option_lists):
            budget[0] -= 1
            if budget[0] < 0:
                raise LimitExceeded("broadcast search space too large")
            nxt = list(held)
            for i, tx in zip(senders, combo):
                if tx:
                    for j in out_nbrs[i]:
                        nxt[j] |= tx
            if search(tuple(nxt), slots_left - 1):
                return True
        return False

    return search(tuple(held0), bi.horizon)


def parse_clause_file(text: str) -> Mnae3SatInstance:
    """Parse the DIMACS-like clause format: a ``p mnae3 <vars> <clauses>``
    header, then one ``v1 v2 v3`` line per clause (0-based variable ids).
    Lines starting with ``c`` or ``#`` are comments."""
    var_count = None
    clause_count = None
    clauses: list[tuple[int, int, int]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c") or line.startswith("#"):
            continue
        tokens = line.split()
        if tokens[0] == "p":
            if var_count is not None:
                raise ParseError(f"line {lineno}: duplicate header")
            if len(tokens) != 4 or tokens[1] != "mnae3":
                raise ParseError(f"line {lineno}: expected 'p mnae3 <vars> <clauses>'")
            try:
                var_count, clause_count = int(tokens[2]), int(tokens[3])
            except ValueError:
                raise ParseError(f"line {lineno}: non-integer header counts") from None
            continue
        if var_count is None:
            raise ParseError(f"line {lineno}: clause before 'p mnae3' header")
        if len(tokens) != 3:
            raise ParseError(f"line {lineno}: clause must have exactly 3 variables")
        try:
            clause = tuple(int(t) for t in tokens)
        except ValueError:
            raise ParseError(f"line {lineno}: non-integer variable id") from None
        clauses.append(clause)  # type: ignore[arg-type]
    if var_count is None:
        raise ParseError("missing 'p mnae3' header")
    if clause_count != len(clauses):
        raise ParseError(
            f"header declares {clause_count} clauses, file has {len(clauses)}"
        )
    try:
        return Mnae3SatInstance(var_count=var_count, clauses=tuple(clauses))
    except ValidationError as exc:
        raise ParseError(str(exc)) from None


def dump_clause_file(inst: Mnae3SatInstance) -> str:
    lines = [f"p mnae3 {inst.var_count} {len(inst.clauses)}"]
    lines.extend(f"{a} {b} {c}" for a, b, c in inst.clauses)
    return "\n".join(lines) + "\n"


def random_instance(var_count: int, clause_count: int, rng) -> Mnae3SatInstance:
    """Uniform random monotone instance; repeated variables in a clause are
    allowed (they simply make the not-all-equal condition harder)."""
    clauses = tuple(
        tuple(int(rng.integers(0, var_count)) for _ in range(3))
        for _ in range(clause_count)
    )
    return Mnae3SatInstance(var_count=var_count, clauses=clauses)
