"""Execution likelihood analysis and warning ranking for MicroC programs."""

from .cfg import ALWAYS, FALSE, TRUE, EdgeLabel, FunctionCfg, build_cfg
from .likelihood import (
    HEURISTIC,
    HEURISTIC_TABLE,
    SIMPLE,
    BranchModel,
    LikelihoodEngine,
    LikelihoodQuery,
    LikelihoodResult,
    batch_likelihood,
    branch_probability,
    dempster_shafer_combine,
    execution_likelihood,
    model_by_name,
    noisy_or,
)
from .evaluation import (
    BLOCKS,
    AccuracyTable,
    BlockScore,
    CorrelationReport,
    RankingPair,
    block_likelihood_table,
    correlation_report,
    shuffled_mean_scores,
    threshold_accuracy,
    wall_score,
)
from .microc import ParseError, Program, parse_program
from .profiler import (
    CALL_DEPTH_LIMIT,
    DEFAULT_STEP_LIMIT,
    ExecutionTrace,
    MicrocRuntimeError,
    ProfileData,
    RunInput,
    interpret,
    profile,
)
from .ranking import RankedWarning, WarningRecord, normalize_warnings, rank
from .sdg import CdEdge, Sdg, Slice, Vertex, VertexFlags, VertexNotFound, build_sdg
from .spans import SourceSpan

__version__ = "0.1.0"

__all__ = [
    "ALWAYS",
    "FALSE",
    "TRUE",
    "EdgeLabel",
    "FunctionCfg",
    "build_cfg",
    "HEURISTIC",
    "HEURISTIC_TABLE",
    "SIMPLE",
    "BranchModel",
    "LikelihoodEngine",
    "LikelihoodQuery",
    "LikelihoodResult",
    "batch_likelihood",
    "branch_probability",
    "dempster_shafer_combine",
    "execution_likelihood",
    "model_by_name",
    "noisy_or",
    "ParseError",
    "Program",
    "parse_program",
    "BLOCKS",
    "AccuracyTable",
    "BlockScore",
    "CorrelationReport",
    "RankingPair",
    "block_likelihood_table",
    "correlation_report",
    "shuffled_mean_scores",
    "threshold_accuracy",
    "wall_score",
    "CALL_DEPTH_LIMIT",
    "DEFAULT_STEP_LIMIT",
    "ExecutionTrace",
    "MicrocRuntimeError",
    "ProfileData",
    "RunInput",
    "interpret",
    "profile",
    "RankedWarning",
    "WarningRecord",
    "normalize_warnings",
    "rank",
    "CdEdge",
    "Sdg",
    "Slice",
    "Vertex",
    "VertexFlags",
    "VertexNotFound",
    "build_sdg",
    "SourceSpan",
    "__version__",
]
