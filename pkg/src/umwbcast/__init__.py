"""Throughput-optimal broadcast for wireless networks with
point-to-multipoint transmissions: capacity computation, virtual-queue
max-weight control, least-transmitted-first packet scheduling, a seeded
slotted-time simulator, and the finite-horizon hardness gadget."""

from .capacity import (
    CapacityResult,
    StationaryPolicy,
    broadcast_capacity,
    build_randomized_policy,
    clique_upper_bound,
)
from .errors import (
    ConfigError,
    DimensionMismatch,
    LimitExceeded,
    ParseError,
    RateInfeasible,
    UmwError,
    ValidationError,
    ZeroNorm,
)
from .graphs import (
    EXACT_ENUMERATION_LIMIT,
    ConflictGraph,
    ConnectedDominatingSet,
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
from .hardness import (
    BroadcastInstance,
    Mnae3SatInstance,
    decide_broadcast,
    decide_mnae3sat,
    parse_clause_file,
    reduce_to_broadcast,
)
from .policy import (
    SlotDecision,
    VirtualQueueVector,
    drift_report,
    umw_activate,
    umw_route,
    vq_step,
)
from .simulate import (
    NodeBuffer,
    Packet,
    PacketCopy,
    SaturationRow,
    SimConfig,
    Trace,
    ltf_pick,
    measure_saturation,
    simulate,
)
from .solvers import mcds_exact, mcds_greedy, mwis_exact, mwis_greedy

__version__ = "0.1.0"

__all__ = [
    "BroadcastInstance",
    "CapacityResult",
    "ConfigError",
    "ConflictGraph",
    "ConnectedDominatingSet",
    "DimensionMismatch",
    "EXACT_ENUMERATION_LIMIT",
    "InterferenceModel",
    "LimitExceeded",
    "Mnae3SatInstance",
    "NetworkGraph",
    "NodeBuffer",
    "Packet",
    "PacketCopy",
    "ParseError",
    "RateInfeasible",
    "SaturationRow",
    "SimConfig",
    "SlotDecision",
    "StationaryPolicy",
    "Trace",
    "UmwError",
    "ValidationError",
    "VirtualQueueVector",
    "ZeroNorm",
    "broadcast_capacity",
    "build_conflict_graph",
    "build_randomized_policy",
    "clique_upper_bound",
    "decide_broadcast",
    "decide_mnae3sat",
    "drift_report",
    "dump_graph",
    "enumerate_maximal_schedules",
    "enumerate_minimal_cds",
    "enumerate_schedules",
    "is_cds",
    "load_graph",
    "ltf_pick",
    "mcds_exact",
    "mcds_greedy",
    "measure_saturation",
    "mwis_exact",
    "mwis_greedy",
    "parse_clause_file",
    "parse_graph_file",
    "reduce_to_broadcast",
    "simulate",
    "umw_activate",
    "umw_route",
    "vq_step",
]
