"""MDL training of modern Hopfield networks on noisy 9x9 digit bitmaps."""

from ._core import (
    AnnealResult,
    Config,
    Dataset,
    DomainError,
    Exemplar,
    MdlScore,
    MemoryBank,
    RetrievalResult,
    RunMetrics,
    RunResult,
    TraceRow,
    anneal,
    build_dataset,
    filter_ambiguous,
    golden_digits,
    mdl_score,
    pixel_code_length,
    retrieve,
    run,
    sweep_csv,
)

__all__ = [
    "AnnealResult",
    "Config",
    "Dataset",
    "DomainError",
    "Exemplar",
    "MdlScore",
    "MemoryBank",
    "RetrievalResult",
    "RunMetrics",
    "RunResult",
    "TraceRow",
    "anneal",
    "build_dataset",
    "filter_ambiguous",
    "golden_digits",
    "mdl_score",
    "pixel_code_length",
    "retrieve",
    "run",
    "sweep_csv",
]
