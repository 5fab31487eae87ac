"""Topology parsing, conflict-graph construction, and route/schedule
enumeration, cross-checked against independent set-based oracles."""

from collections import defaultdict
from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from umwbcast.errors import LimitExceeded, ParseError, ValidationError
from umwbcast.graphs import (
    ConflictGraph,
    InterferenceModel,
    NetworkGraph,
    build_conflict_graph,
    dump_graph,
    enumerate_maximal_schedules,
    enumerate_minimal_cds,
    enumerate_schedules,
    is_cds,
    load_graph,
    parse_graph_file,
)
from topo import grid_graph, path_graph, random_conflict_graph, random_network

STAR_FILE = """\
# four-node star, hub is the source
n 4
src 0
cap 0:1 1:1 2:1 3:1
biedge 0 1
biedge 0 2
biedge 0 3
"""


# --- independent oracles -------------------------------------------------

def oracle_is_cds(g: NetworkGraph, members) -> bool:
    """Set-based re-statement of the route conditions."""
    mem = set(members)
    if g.source not in mem:
        return False
    out = defaultdict(set)
    for u, v in g.edges:
        out[u].add(v)
    dominated = set(mem)
    for u in mem:
        dominated |= out[u]
    if dominated != set(range(g.node_count)):
        return False
    seen = {g.source}
    stack = [g.source]
    while stack:
        u = stack.pop()
        for v in out[u]:
            if v in mem and v not in seen:
                seen.add(v)
                stack.append(v)
    return seen == mem


def oracle_minimal_cds(g: NetworkGraph) -> set[tuple[int, ...]]:
    """Subset-lattice scan filtered by the oracle predicate and minimality."""
    nodes = range(g.node_count)
    all_cds = []
    for size in range(1, g.node_count + 1):
        for subset in combinations(nodes, size):
            if oracle_is_cds(g, subset):
                all_cds.append(set(subset))
    minimal = set()
    for s in all_cds:
        if all(
            v == g.source or not oracle_is_cds(g, s - {v})
            for v in s
        ):
            minimal.add(tuple(sorted(s)))
    return minimal


def oracle_independent_sets(cg: ConflictGraph) -> set[tuple[int, ...]]:
    nodes = range(cg.node_count)
    result = set()
    for size in range(cg.node_count + 1):
        for subset in combinations(nodes, size):
            if all(not cg.has_conflict(i, j) for i, j in combinations(subset, 2)):
                result.add(subset)
    return result


# --- graph file format ----------------------------------------------------

def test_load_star_file():
    g = load_graph(STAR_FILE)
    assert g.node_count == 4
    assert g.source == 0
    assert g.capacity == (1, 1, 1, 1)
    assert set(g.out_neighbors(0)) == {1, 2, 3}
    assert g.out_neighbors(2) == (0,)


def test_load_rejects_empty_node_list():
    with pytest.raises(ParseError):
        load_graph("src 0\n")
    with pytest.raises(ParseError):
        load_graph("")
    with pytest.raises(ParseError):
        load_graph("n 0\nsrc 0\n")


def test_load_rejects_unreachable_node():
    with pytest.raises(ValidationError):
        load_graph("n 2\nsrc 0\nedge 1 0\n")


def test_load_rejects_bad_source():
    with pytest.raises(ValidationError):
        load_graph("n 2\nsrc 5\nedge 0 1\n")


def test_parse_errors():
    with pytest.raises(ParseError):
        load_graph("n 2\nsrc 0\nfrobnicate 1 2\n")
    with pytest.raises(ParseError):
        load_graph("n 2\nsrc 0\ncap 0=3\nedge 0 1\n")
    with pytest.raises(ParseError):
        load_graph("n x\nsrc 0\n")
    with pytest.raises(ParseError):
        load_graph("n 2\nsrc 0\nedge 0\n")


def test_self_loop_rejected():
    with pytest.raises(ValidationError):
        NetworkGraph(node_count=2, edges=((0, 0), (0, 1)), capacity=(1, 1), source=0)


def test_conflict_lines_and_defaults():
    parsed = parse_graph_file("n 3\nsrc 0\ncap 0:4\nedge 0 1\nedge 0 2\nconflict 1 2\n")
    assert parsed.graph.capacity == (4, 1, 1)
    assert parsed.conflict_pairs == ((1, 2),)


def test_dump_load_round_trip():
    rng = np.random.default_rng(3)
    for _ in range(20):
        g = random_network(rng, int(rng.integers(2, 9)))
        parsed = parse_graph_file(dump_graph(g, conflict_pairs=((0, 1),)))
        assert parsed.graph == g
        assert parsed.conflict_pairs == ((0, 1),)


# --- conflict graphs -------------------------------------------------------

def test_no_interference_is_edgeless():
    g = load_graph(STAR_FILE)
    cg = build_conflict_graph(g, InterferenceModel.none())
    assert cg.conflicts == (0, 0, 0, 0)


def test_star_primary_interference_is_complete():
    # Leaves all share the hub as out-neighbor, and each leaf is adjacent to
    # the hub, so every pair conflicts.
    g = load_graph(STAR_FILE)
    cg = build_conflict_graph(g, InterferenceModel.primary())
    full = (1 << 4) - 1
    assert cg.conflicts == tuple(full ^ (1 << i) for i in range(4))


def test_grid_primary_interference_matches_pairwise_rule():
    g = grid_graph()
    cg = build_conflict_graph(g, InterferenceModel.primary())
    out = [set(g.out_neighbors(i)) for i in range(g.node_count)]
    for i in range(g.node_count):
        for j in range(g.node_count):
            if i == j:
                continue
            expected = j in out[i] or i in out[j] or bool(out[i] & out[j])
            assert cg.has_conflict(i, j) == expected


def test_explicit_conflicts():
    g = path_graph(3)
    cg = build_conflict_graph(g, InterferenceModel.explicit([(2, 0)]))
    assert cg.has_conflict(0, 2) and cg.has_conflict(2, 0)
    assert not cg.has_conflict(0, 1)
    with pytest.raises(ValidationError):
        InterferenceModel.explicit([(1, 1)])


def test_primary_interference_on_directed_edges():
    # One-directional adjacency counts as being in range of each other; a
    # shared out-neighbor conflicts even without adjacency; nodes with no
    # adjacency and disjoint out-neighborhoods stay compatible.
    g = NetworkGraph(
        node_count=5,
        edges=((0, 1), (0, 2), (1, 3), (2, 4), (1, 4)),
        capacity=(1,) * 5,
        source=0,
    )
    cg = build_conflict_graph(g, InterferenceModel.primary())
    assert cg.has_conflict(0, 1)      # adjacent, one direction only
    assert cg.has_conflict(1, 2)      # not adjacent, share out-neighbor 4
    assert not cg.has_conflict(3, 4)  # leaves: no adjacency, empty out-sets
    assert not cg.has_conflict(2, 3)  # disjoint out-sets {4} vs {}


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from(["none", "primary", "explicit"]))
def test_conflict_graph_symmetric_irreflexive(seed, kind):
    rng = np.random.default_rng(seed)
    g = random_network(rng, int(rng.integers(2, 9)))
    if kind == "explicit":
        pairs = [
            (u, v)
            for u in range(g.node_count)
            for v in range(u + 1, g.node_count)
            if rng.random() < 0.4
        ]
        model = InterferenceModel.explicit(pairs)
    else:
        model = InterferenceModel(kind)
    cg = build_conflict_graph(g, model)
    for i in range(g.node_count):
        assert not cg.has_conflict(i, i)
        for j in range(g.node_count):
            assert cg.has_conflict(i, j) == cg.has_conflict(j, i)


# --- route predicate and enumeration ---------------------------------------

def test_is_cds_star_examples():
    g = load_graph(STAR_FILE)
    assert is_cds(g, {0})
    assert not is_cds(g, {1})


def test_is_cds_path_examples():
    g = NetworkGraph(node_count=3, edges=((0, 1), (1, 2)), capacity=(1, 1, 1), source=0)
    assert not is_cds(g, {0})
    assert is_cds(g, {0, 1})


def test_minimal_cds_star():
    g = load_graph(STAR_FILE)
    assert [d.members for d in enumerate_minimal_cds(g)] == [(0,)]


def test_minimal_cds_path():
    g = path_graph(3)
    assert [d.members for d in enumerate_minimal_cds(g)] == [(0, 1)]


def test_minimal_cds_grid_matches_subset_scan():
    g = grid_graph()
    got = [d.members for d in enumerate_minimal_cds(g)]
    assert sorted(got) == got, "output must be ordered lexicographically"
    assert len(set(got)) == len(got), "no duplicates"
    assert set(got) == oracle_minimal_cds(g)


def test_minimal_cds_random_graphs_match_subset_scan():
    rng = np.random.default_rng(11)
    for _ in range(25):
        g = random_network(rng, int(rng.integers(2, 9)))
        got = {d.members for d in enumerate_minimal_cds(g)}
        assert got == oracle_minimal_cds(g)


def test_minimal_cds_members_are_minimal_routes():
    rng = np.random.default_rng(5)
    for _ in range(15):
        g = random_network(rng, int(rng.integers(2, 9)))
        for d in enumerate_minimal_cds(g):
            assert is_cds(g, d.members)
            for v in d.members:
                if v != g.source:
                    assert not is_cds(g, set(d.members) - {v})


def test_enumeration_limit():
    n = 17
    edges = tuple((0, i) for i in range(1, n))
    g = NetworkGraph(node_count=n, edges=edges, capacity=(1,) * n, source=0)
    with pytest.raises(LimitExceeded):
        enumerate_minimal_cds(g)
    cg = ConflictGraph(node_count=n, conflicts=(0,) * n)
    with pytest.raises(LimitExceeded):
        enumerate_schedules(cg)


# --- schedule enumeration ---------------------------------------------------

def test_schedules_edgeless():
    cg = ConflictGraph(node_count=3, conflicts=(0, 0, 0))
    assert len(enumerate_schedules(cg)) == 8


def test_schedules_complete():
    full = (1 << 3) - 1
    cg = ConflictGraph(node_count=3, conflicts=tuple(full ^ (1 << i) for i in range(3)))
    assert enumerate_schedules(cg) == [(), (0,), (1,), (2,)]


def test_schedules_grid_match_oracle():
    g = grid_graph()
    cg = build_conflict_graph(g, InterferenceModel.primary())
    assert set(enumerate_schedules(cg)) == oracle_independent_sets(cg)


def test_schedules_hereditary():
    rng = np.random.default_rng(7)
    for _ in range(10):
        cg = random_conflict_graph(rng, int(rng.integers(2, 9)))
        schedules = set(enumerate_schedules(cg))
        for members in schedules:
            for drop in members:
                smaller = tuple(i for i in members if i != drop)
                assert smaller in schedules


def test_maximal_schedules_subset_of_schedules():
    rng = np.random.default_rng(9)
    for _ in range(10):
        cg = random_conflict_graph(rng, int(rng.integers(2, 9)))
        schedules = set(enumerate_schedules(cg))
        maximal = enumerate_maximal_schedules(cg)
        for members in maximal:
            assert members in schedules
            mask = 0
            for i in members:
                mask |= 1 << i
            for v in range(cg.node_count):
                if not mask >> v & 1:
                    assert cg.conflicts[v] & mask, "maximal set must block every outsider"
