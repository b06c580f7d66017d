"""Lazy perfect (1,k)-matchings on oracle bipartite graphs and doubling
decompositions of free-group actions."""

from .core_graph import (
    BallSubgraph,
    BipartiteOracle,
    FiniteBipartiteGraph,
    Side,
    Vertex,
    check_symmetry,
    dump_bg,
    extract_ball,
    load_finite_graph,
    parse_bg,
)
from .decomposition import (
    ActionGraphSpec,
    ClassicF2Decomp,
    ParadoxDecomp,
    build_action_graph,
    corollary_spec,
    folner_failure_certificate,
    tight_spec,
    verify_decomposition,
    verify_engine_window,
)
from .flow_matching import (
    HaremMatching,
    MatchingRequest,
    brute_force_harem,
    check_expanding_hall_witness,
    check_hall_harem,
    solve_harem,
    solve_star,
    verify_matching,
)
from .group_kit import (
    OVER_CAP,
    Enumeration,
    GeneratorSet,
    PartialBijection,
    Word,
    act,
    ball,
    compose_pb,
    d_r,
    enumeration,
    folner_search,
    identity,
    inv,
    invert_pb,
    is_folner,
    mul,
    parse_word,
    piecewise_pb,
    reduce,
    restrict_pb,
    wbt_free,
)
from .harem_engine import (
    EngineSnapshot,
    EngineState,
    HWitness,
    identity_witness,
    vacuous_witness,
)

__version__ = "0.1.0"

__all__ = [
    "ActionGraphSpec",
    "BallSubgraph",
    "BipartiteOracle",
    "ClassicF2Decomp",
    "EngineSnapshot",
    "EngineState",
    "Enumeration",
    "FiniteBipartiteGraph",
    "GeneratorSet",
    "HWitness",
    "HaremMatching",
    "MatchingRequest",
    "OVER_CAP",
    "ParadoxDecomp",
    "PartialBijection",
    "Side",
    "Vertex",
    "Word",
    "act",
    "ball",
    "brute_force_harem",
    "build_action_graph",
    "check_expanding_hall_witness",
    "check_hall_harem",
    "check_symmetry",
    "compose_pb",
    "corollary_spec",
    "d_r",
    "dump_bg",
    "enumeration",
    "extract_ball",
    "folner_failure_certificate",
    "folner_search",
    "identity",
    "identity_witness",
    "inv",
    "invert_pb",
    "is_folner",
    "load_finite_graph",
    "mul",
    "parse_bg",
    "parse_word",
    "piecewise_pb",
    "reduce",
    "restrict_pb",
    "solve_harem",
    "solve_star",
    "tight_spec",
    "vacuous_witness",
    "verify_decomposition",
    "verify_engine_window",
    "verify_matching",
    "wbt_free",
]
