"""Random linear fountain codes over GF(2) with constrained coefficient draws.

The package splits into gf2 (bitset linear algebra), encoder/decoder (the
codec and wire format), analytics (closed-form excess-codeword model), sim
(erasure-channel Monte Carlo), cli, and figures.
"""

from .analytics import (
    ExcessDistribution,
    ModelParams,
    baseline_traditional,
    excess_distribution,
    expected_excess_closed_form,
    feasibility_bound,
    infeasible_from,
    prob_dependent,
    prob_dependent_exact,
)
from .decoder import DecoderState, InsufficientRankError, ReceiveOutcome
from .encoder import (
    Codeword,
    Encoder,
    SourceGeneration,
    combine_payloads,
    deserialize_codeword,
    serialize_codeword,
)
from .gf2 import (
    CodingVector,
    ReducedBasis,
    SingularMatrixError,
    bounded_combination_member,
    invert,
    rank,
)
from .sim import (
    SCHEME_BLOCKACK,
    SCHEME_GAMMA,
    SCHEME_TRADITIONAL,
    SCHEMES,
    ChannelConfig,
    ConfigError,
    SessionLimitError,
    SessionResult,
    SimReport,
    TraceData,
    load_trace,
    monte_carlo,
    run_session,
    substream,
    write_trace,
)

__version__ = "0.1.0"

__all__ = [
    "ChannelConfig",
    "Codeword",
    "CodingVector",
    "ConfigError",
    "DecoderState",
    "Encoder",
    "ExcessDistribution",
    "InsufficientRankError",
    "ModelParams",
    "ReceiveOutcome",
    "ReducedBasis",
    "SCHEMES",
    "SCHEME_BLOCKACK",
    "SCHEME_GAMMA",
    "SCHEME_TRADITIONAL",
    "SessionLimitError",
    "SessionResult",
    "SimReport",
    "SingularMatrixError",
    "SourceGeneration",
    "TraceData",
    "baseline_traditional",
    "bounded_combination_member",
    "combine_payloads",
    "deserialize_codeword",
    "excess_distribution",
    "expected_excess_closed_form",
    "feasibility_bound",
    "infeasible_from",
    "invert",
    "load_trace",
    "monte_carlo",
    "prob_dependent",
    "prob_dependent_exact",
    "rank",
    "run_session",
    "serialize_codeword",
    "substream",
    "write_trace",
    "__version__",
]
