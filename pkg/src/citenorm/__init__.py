"""Field-normalized citation impact indicators over publication corpora.

Computes both the globalized ratio (total citations over total expected
citations) and the averaged ratio (mean of per-paper ratios) for publication
oeuvres, over baselines built per (category, document type, year) cell with
fractional counting for overlapping categories, reference-analysis placement
of papers in general journals, traceable per-paper reporting, and a
Monte-Carlo harness measuring when the two ratios diverge.
"""

from .baseline import BaselineTable, Cell, build_baselines, corpus_fingerprint, expected_rate
from .classify import (
    Assignment,
    AssignmentMethod,
    CategoryMap,
    CoverageReport,
    JournalKind,
    ReclassifyParams,
    assign_by_journal,
    classify_corpus,
    reclassify_by_references,
)
from .corpus import (
    DEFAULT_CITABLE_TYPES,
    CitationWindow,
    Corpus,
    DocType,
    IngestReport,
    Oeuvre,
    Publication,
    freeze,
    ingest,
    read_publication_file,
    select_oeuvre,
)
from .errors import (
    BaselineError,
    CitenormError,
    ClassifyError,
    ConfigError,
    CorpusStateError,
    DuplicateIdError,
    IndicatorError,
    IngestError,
    OeuvreError,
    ReportError,
    SimulationError,
    UncoveredCellError,
)
from .indicators import (
    FieldScore,
    OeuvreScore,
    TraceLine,
    averaged_ratio,
    globalized_ratio,
    per_field_breakdown,
    score,
)
from .report import ReportBundle, ReportMeta, VerificationResult, render, verify_bundle
from .simulate import DivergenceStats, SimConfig, SkewModel, generate_corpus, run_divergence

__version__ = "0.1.0"

__all__ = [
    "Assignment",
    "AssignmentMethod",
    "BaselineError",
    "BaselineTable",
    "CategoryMap",
    "Cell",
    "CitationWindow",
    "CitenormError",
    "ClassifyError",
    "ConfigError",
    "Corpus",
    "CorpusStateError",
    "CoverageReport",
    "DEFAULT_CITABLE_TYPES",
    "DivergenceStats",
    "DocType",
    "DuplicateIdError",
    "FieldScore",
    "IndicatorError",
    "IngestError",
    "IngestReport",
    "JournalKind",
    "Oeuvre",
    "OeuvreError",
    "OeuvreScore",
    "Publication",
    "ReclassifyParams",
    "ReportBundle",
    "ReportError",
    "ReportMeta",
    "SimConfig",
    "SimulationError",
    "SkewModel",
    "TraceLine",
    "UncoveredCellError",
    "VerificationResult",
    "assign_by_journal",
    "averaged_ratio",
    "build_baselines",
    "classify_corpus",
    "corpus_fingerprint",
    "expected_rate",
    "freeze",
    "generate_corpus",
    "globalized_ratio",
    "ingest",
    "per_field_breakdown",
    "read_publication_file",
    "reclassify_by_references",
    "render",
    "run_divergence",
    "score",
    "select_oeuvre",
    "verify_bundle",
]
