"""Dimension-guided generation and structured exploration of LLM responses.

From one prompt, generate task-relevant nominal and ordinal dimensions, use
them to fan out many candidate responses, then filter, lay out, regenerate,
and synthesize those responses as a navigable design space.
"""

from .errors import (
    DesignSpaceError,
    ExhaustionError,
    IntegrityError,
    NotFoundError,
    ParseFailure,
    PreconditionError,
    TransportError,
)
from .explorer import (
    AxisSelection,
    LayoutAssignment,
    SearchPartition,
    SemanticLevel,
    Viewport,
    assign_layout,
    filter_nodes,
    level_payload,
    resolve_level,
    search_keyword,
)
from .model import (
    DesignSpace,
    Dimension,
    DimensionKind,
    DimensionOrigin,
    DimensionValue,
    GenerationConfig,
    ORDINAL_LEVELS,
    Provenance,
    Requirement,
    ResponseNode,
    SubspaceFilter,
    SummaryBundle,
    ValidationResult,
    validate_filter,
    validate_requirement,
)
from .pipeline import (
    AddDimensionResult,
    DimensionStageResult,
    EventKind,
    GenerationEvent,
    GenerationPipeline,
    GenerationRun,
    NodeFailure,
    RunStats,
    sample_requirement,
)
from .provider import (
    CallLedger,
    CallMeter,
    CompletionProvider,
    CompletionRequest,
    CompletionResult,
    FixtureDirProvider,
    HttpCompletionProvider,
    MockProvider,
)
from .store import (
    Block,
    BlockKind,
    BlockLink,
    EditorDocument,
    ExplorationState,
    SpaceStore,
    StoreSnapshot,
)

__version__ = "0.1.0"

__all__ = [
    "AddDimensionResult",
    "AxisSelection",
    "Block",
    "BlockKind",
    "BlockLink",
    "CallLedger",
    "CallMeter",
    "CompletionProvider",
    "CompletionRequest",
    "CompletionResult",
    "DesignSpace",
    "DesignSpaceError",
    "Dimension",
    "DimensionKind",
    "DimensionOrigin",
    "DimensionStageResult",
    "DimensionValue",
    "EditorDocument",
    "EventKind",
    "ExhaustionError",
    "ExplorationState",
    "FixtureDirProvider",
    "GenerationConfig",
    "GenerationEvent",
    "GenerationPipeline",
    "GenerationRun",
    "HttpCompletionProvider",
    "IntegrityError",
    "LayoutAssignment",
    "MockProvider",
    "NodeFailure",
    "NotFoundError",
    "ORDINAL_LEVELS",
    "ParseFailure",
    "PreconditionError",
    "Provenance",
    "Requirement",
    "ResponseNode",
    "RunStats",
    "SearchPartition",
    "SemanticLevel",
    "SpaceStore",
    "StoreSnapshot",
    "SubspaceFilter",
    "SummaryBundle",
    "TransportError",
    "ValidationResult",
    "Viewport",
    "assign_layout",
    "filter_nodes",
    "level_payload",
    "resolve_level",
    "sample_requirement",
    "search_keyword",
    "validate_filter",
    "validate_requirement",
]
