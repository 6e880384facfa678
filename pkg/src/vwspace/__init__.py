"""VW-path covers, a (2-eps) Hall-type criterion, the cover game, and
proof-space measurement for resolution and polynomial-calculus refutations."""

__version__ = "0.1.0"

from .errors import (
    FormatError,
    GameRuleError,
    HypothesisError,
    InconsistencyError,
    ResourceCapError,
    ValidationError,
    VwspaceError,
)
from .graph import (
    BipartiteGraph,
    VwMatching,
    build_graph,
    find_vw_cover,
    is_expander,
    parse_bigraph,
    validate_vw_matching,
    write_bigraph,
)
from .hall import (
    Hypergraph,
    discharge_audit,
    find_2path_cover,
    hall_counterexample,
    hall_verify,
    hypergraph,
    to_hypergraph,
)
from .cnfspace import (
    Cnf,
    adjacency_graph,
    cnf,
    gen_random_cnf,
    monomial_space,
    parse_dimacs,
    total_space,
    tr_encode,
    verify_pcr_trace,
    verify_res_trace,
    write_dimacs,
)
from .covergame import (
    init_cover,
    play,
    respond,
    theorem_mu,
    verify_transcript,
    write_transcript,
)
from .strategy import (
    check_k_winning,
    check_rfree,
    extract_strategy,
    to_rfree,
    verify_kwin_certificate,
    write_kwin_certificate,
)

__all__ = [
    "__version__",
    "VwspaceError", "ValidationError", "FormatError", "ResourceCapError",
    "InconsistencyError", "GameRuleError", "HypothesisError",
    "BipartiteGraph", "VwMatching", "build_graph", "find_vw_cover",
    "is_expander", "parse_bigraph", "validate_vw_matching", "write_bigraph",
    "Hypergraph", "hypergraph", "to_hypergraph", "find_2path_cover",
    "discharge_audit", "hall_verify", "hall_counterexample",
    "Cnf", "cnf", "parse_dimacs", "write_dimacs", "gen_random_cnf",
    "adjacency_graph", "tr_encode", "total_space", "monomial_space",
    "verify_res_trace", "verify_pcr_trace",
    "init_cover", "respond", "play", "theorem_mu", "write_transcript",
    "verify_transcript",
    "extract_strategy", "check_k_winning", "to_rfree", "check_rfree",
    "write_kwin_certificate", "verify_kwin_certificate",
]
