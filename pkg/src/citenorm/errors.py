"""Exception hierarchy shared across the package."""

from __future__ import annotations


class CitenormError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(CitenormError):
    """Invalid configuration value or unreadable config file."""


class IngestError(CitenormError):
    """Publication file cannot be ingested at all (as opposed to per-row rejection)."""


class DuplicateIdError(IngestError):
    """Two rows share a publication id; the whole ingest is refused."""

    def __init__(self, publication_id: str):
        self.publication_id = publication_id
        super().__init__(f"duplicate publication id: '{publication_id}'")


class CorpusStateError(CitenormError):
    """Operation requires a frozen (or unfrozen) corpus and got the other."""


class OeuvreError(CitenormError):
    """Oeuvre selection failed, e.g. no requested id resolves in the corpus."""


class ClassifyError(CitenormError):
    """Category map is malformed or a classification precondition is violated."""


class BaselineError(CitenormError):
    """Baseline table cannot be built or queried."""


class UncoveredCellError(BaselineError):
    """A publication needs a normalization cell absent from the baseline table."""

    def __init__(self, category: str, doc_type: str, year: int):
        self.category = category
        self.doc_type = doc_type
        self.year = year
        super().__init__(f"uncovered cell ({category}, {doc_type}, {year})")


class IndicatorError(CitenormError):
    """Indicator is undefined for the given oeuvre."""


class ReportError(CitenormError):
    """Report document is malformed or cannot be rendered."""


class SimulationError(CitenormError):
    """Simulation configuration is degenerate or inconsistent."""
