"""Publication corpus: data model, ingest validation, freezing, oeuvre selection.

The corpus is the closed universe every later stage (classification, baselines,
scoring) works from. Ingest is deliberately strict: a row is either accepted
into the corpus or listed in the rejection report with a reason, never both and
never neither, and a duplicate id refuses the whole file.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Iterator

from .errors import CorpusStateError, DuplicateIdError, IngestError, OeuvreError

PUBLICATION_COLUMNS = ("id", "journal_id", "year", "doc_type", "citations", "cited_journals")
DEFAULT_YEAR_RANGE = (1000, 3000)


class DocType(enum.Enum):
    ARTICLE = "Article"
    LETTER = "Letter"
    REVIEW = "Review"
    OTHER = "Other"


DEFAULT_CITABLE_TYPES = frozenset({DocType.ARTICLE, DocType.LETTER, DocType.REVIEW})

_DOC_TYPE_BY_TOKEN = {member.value: member for member in DocType}


def parse_citable_types(text: str) -> frozenset[DocType]:
    """Parse a comma-joined doc-type list, e.g. "Article,Letter,Review"."""
    members = set()
    for token in text.split(","):
        token = token.strip()
        if not token:
            continue
        if token not in _DOC_TYPE_BY_TOKEN:
            raise IngestError(f"unknown doc_type token: '{token}'")
        members.add(_DOC_TYPE_BY_TOKEN[token])
    if not members:
        raise IngestError("citable type set is empty")
    return frozenset(members)


@dataclass(frozen=True)
class CitationWindow:
    """Citation-window declaration, recorded for audit only.

    The supplier guarantees that citation counts match the declared window;
    the engine records it so reports can say what the counts mean.
    """

    kind: str  # "open" or "fixed"
    years: int | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("open", "fixed"):
            raise IngestError(f"unknown citation window kind: '{self.kind}'")
        if self.kind == "fixed" and (self.years is None or self.years < 1):
            raise IngestError("fixed citation window needs a positive year count")
        if self.kind == "open" and self.years is not None:
            raise IngestError("open citation window takes no year count")

    def describe(self) -> str:
        if self.kind == "open":
            return "open-ended"
        return f"fixed {self.years}-year"

    @classmethod
    def parse(cls, text: str) -> "CitationWindow":
        """Parse "open" or "fixed:N"."""
        text = text.strip()
        if text == "open":
            return cls("open")
        if text.startswith("fixed:"):
            try:
                return cls("fixed", int(text.split(":", 1)[1]))
            except ValueError as err:
                raise IngestError(f"bad citation window: '{text}'") from err
        raise IngestError(f"bad citation window: '{text}'")


@dataclass(frozen=True)
class Publication:
    id: str
    journal_id: str
    year: int
    doc_type: DocType
    citations: int
    cited_journals: tuple[str, ...] = ()


@dataclass(frozen=True)
class Corpus:
    publications: tuple[Publication, ...]
    window: CitationWindow
    frozen: bool = False
    _by_id: dict[str, Publication] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "_by_id", {pub.id: pub for pub in self.publications})

    def __len__(self) -> int:
        return len(self.publications)

    def __contains__(self, publication_id: str) -> bool:
        return publication_id in self._by_id

    def get(self, publication_id: str) -> Publication:
        try:
            return self._by_id[publication_id]
        except KeyError:
            raise OeuvreError(f"publication '{publication_id}' not in corpus") from None

    def require_frozen(self, operation: str) -> None:
        if not self.frozen:
            raise CorpusStateError(f"{operation} requires a frozen corpus")


@dataclass(frozen=True)
class Oeuvre:
    """A verified publication set attributed to one research group."""

    group_id: str
    publication_ids: frozenset[str]

    def __post_init__(self) -> None:
        if not self.publication_ids:
            raise OeuvreError("empty oeuvre")


@dataclass(frozen=True)
class RejectedRow:
    line_number: int
    reason: str
    raw: str


@dataclass(frozen=True)
class IngestReport:
    accepted: int
    rejected: tuple[RejectedRow, ...]

    def rows(self) -> Iterator[tuple[str, str, str]]:
        yield ("line", "reason", "raw")
        for rej in self.rejected:
            yield (str(rej.line_number), rej.reason, rej.raw)


def _well_formed_identifier(value: str) -> bool:
    if not value or value.startswith("#"):
        return False
    return not any(ch in value for ch in ("\t", ";", "\n", "\r"))


def _parse_row(
    fields: list[str],
    year_range: tuple[int, int],
) -> Publication | str:
    """Parse one data row; return a Publication or a rejection reason."""
    if len(fields) != len(PUBLICATION_COLUMNS):
        return f"wrong arity: expected {len(PUBLICATION_COLUMNS)} columns, found {len(fields)}"
    pub_id, journal_id, year_text, doc_text, cit_text, refs_text = fields
    if not pub_id:
        return "empty id"
    if not _well_formed_identifier(pub_id):
        return f"malformed id: '{pub_id}'"
    if not journal_id:
        return "empty journal id"
    if not _well_formed_identifier(journal_id):
        return f"malformed journal id: '{journal_id}'"
    try:
        year = int(year_text.strip())
    except ValueError:
        return f"non-integer year: '{year_text}'"
    lo, hi = year_range
    if not (lo <= year <= hi):
        return f"year out of range: {year}"
    doc_token = doc_text.strip()
    if doc_token not in _DOC_TYPE_BY_TOKEN:
        return f"unknown doc_type token: '{doc_token}'"
    try:
        citations = int(cit_text.strip())
    except ValueError:
        return f"non-integer citation count: '{cit_text}'"
    if citations < 0:
        return "negative citation count"
    cited: tuple[str, ...] = ()
    if refs_text:
        parts = refs_text.split(";")
        for part in parts:
            if not _well_formed_identifier(part):
                return f"malformed cited journal id: '{part}'"
        cited = tuple(parts)
    return Publication(
        id=pub_id,
        journal_id=journal_id,
        year=year,
        doc_type=_DOC_TYPE_BY_TOKEN[doc_token],
        citations=citations,
        cited_journals=cited,
    )


def ingest(
    lines: Iterable[str],
    window: CitationWindow,
    *,
    delimiter: str = "\t",
    year_range: tuple[int, int] = DEFAULT_YEAR_RANGE,
) -> tuple[Corpus, IngestReport]:
    """Validate a publication row stream into an unfrozen Corpus.

    Every input row lands either in the corpus or in the rejection report.
    A duplicate publication id is a hard error for the whole stream, because
    silently keeping either copy would corrupt every downstream count.
    """
    iterator = iter(lines)
    try:
        header_line = next(iterator)
    except StopIteration:
        raise IngestError("missing header row") from None
    header = tuple(header_line.rstrip("\r\n").split(delimiter))
    if header != PUBLICATION_COLUMNS:
        raise IngestError(
            f"bad header: expected {delimiter.join(PUBLICATION_COLUMNS)!r}, found {delimiter.join(header)!r}"
        )

    accepted: list[Publication] = []
    seen: set[str] = set()
    rejected: list[RejectedRow] = []
    for line_number, line in enumerate(iterator, start=2):
        raw = line.rstrip("\r\n")
        if raw == "":
            continue
        result = _parse_row(raw.split(delimiter), year_range)
        if isinstance(result, str):
            rejected.append(RejectedRow(line_number, result, raw))
            continue
        if result.id in seen:
            raise DuplicateIdError(result.id)
        seen.add(result.id)
        accepted.append(result)

    corpus = Corpus(publications=tuple(accepted), window=window, frozen=False)
    return corpus, IngestReport(accepted=len(accepted), rejected=tuple(rejected))


def freeze(corpus: Corpus) -> Corpus:
    """Mark a validated corpus immutable. Idempotent and content-preserving."""
    ids = [pub.id for pub in corpus.publications]
    if len(ids) != len(set(ids)):
        counts: dict[str, int] = {}
        for pub_id in ids:
            counts[pub_id] = counts.get(pub_id, 0) + 1
        offender = next(pub_id for pub_id in ids if counts[pub_id] > 1)
        raise DuplicateIdError(offender)
    if corpus.frozen:
        return corpus
    return replace(corpus, frozen=True)


def select_oeuvre(
    corpus: Corpus,
    group_id: str,
    requested_ids: Iterable[str],
) -> tuple[Oeuvre, tuple[str, ...]]:
    """Resolve an externally supplied publication list against the corpus.

    Returns the oeuvre over the resolvable ids plus the sorted list of ids
    that did not resolve (reported, not fatal). An empty resolvable set is an
    error: an indicator over nothing is undefined.
    """
    corpus.require_frozen("oeuvre selection")
    resolved: set[str] = set()
    missing: set[str] = set()
    for pub_id in requested_ids:
        if pub_id in corpus:
            resolved.add(pub_id)
        else:
            missing.add(pub_id)
    if not resolved:
        raise OeuvreError("empty oeuvre")
    return Oeuvre(group_id=group_id, publication_ids=frozenset(resolved)), tuple(sorted(missing))


# ---------------------------------------------------------------------------
# File formats
# ---------------------------------------------------------------------------


def publication_line(pub: Publication, delimiter: str = "\t") -> str:
    return delimiter.join(
        (
            pub.id,
            pub.journal_id,
            str(pub.year),
            pub.doc_type.value,
            str(pub.citations),
            ";".join(pub.cited_journals),
        )
    )


def publication_lines(corpus: Corpus, delimiter: str = "\t") -> Iterator[str]:
    yield delimiter.join(PUBLICATION_COLUMNS)
    for pub in corpus.publications:
        yield publication_line(pub, delimiter)


def write_publication_file(path: Path | str, corpus: Corpus, *, delimiter: str = "\t") -> None:
    Path(path).write_text("\n".join(publication_lines(corpus, delimiter)) + "\n", encoding="utf-8")


def read_publication_file(
    path: Path | str,
    window: CitationWindow,
    *,
    delimiter: str = "\t",
    year_range: tuple[int, int] = DEFAULT_YEAR_RANGE,
) -> tuple[Corpus, IngestReport]:
    with open(path, encoding="utf-8") as handle:
        return ingest(handle, window, delimiter=delimiter, year_range=year_range)


def read_oeuvre_ids(path: Path | str) -> list[str]:
    """Read an oeuvre file: one publication id per line, '#' comments allowed."""
    ids: list[str] = []
    seen: set[str] = set()
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        entry = line.strip()
        if not entry or entry.startswith("#"):
            continue
        if entry not in seen:
            seen.add(entry)
            ids.append(entry)
    return ids
