"""Journal-to-category mapping and per-paper category assignment.

Papers in specialist journals inherit the journal's categories with uniform
fractional weights. Papers in general (multidisciplinary) journals are placed
individually: their cited journals are tallied into categories, and the paper
is assigned the categories that collect a large enough share of its references.
Papers that neither route can place are marked Unclassified and surface in the
coverage report rather than silently dropping out.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Iterator, Mapping

from .corpus import Corpus, Publication
from .errors import ClassifyError
from .exact import exact, format_fixed

CATEGORY_MAP_COLUMNS = ("journal_id", "kind", "categories")
ASSIGNMENT_COLUMNS = ("publication_id", "method", "weights")

DEFAULT_MIN_REFS = 5
DEFAULT_MIN_SHARE = Fraction(1, 10)


class JournalKind(enum.Enum):
    SPECIALIST = "SPECIALIST"
    GENERAL = "GENERAL"


class AssignmentMethod(enum.Enum):
    JOURNAL = "JournalCategories"
    REFERENCES = "ReferenceAnalysis"
    UNCLASSIFIED = "Unclassified"


@dataclass(frozen=True)
class CategoryMap:
    """Journal registry: category sets (possibly overlapping) plus the
    specialist/general split that decides which assignment route applies."""

    entries: Mapping[str, frozenset[str]]
    kind: Mapping[str, JournalKind]
    categories: frozenset[str]

    @classmethod
    def from_rows(cls, rows: Iterable[tuple[str, str, Iterable[str]]]) -> "CategoryMap":
        entries: dict[str, frozenset[str]] = {}
        kinds: dict[str, JournalKind] = {}
        for journal_id, kind_token, category_ids in rows:
            if not journal_id:
                raise ClassifyError("category map row with empty journal id")
            if journal_id in entries:
                raise ClassifyError(f"duplicate journal in category map: '{journal_id}'")
            try:
                kind = JournalKind(kind_token)
            except ValueError:
                raise ClassifyError(f"unknown journal kind: '{kind_token}'") from None
            categories = frozenset(c for c in category_ids if c)
            if kind is JournalKind.SPECIALIST and not categories:
                raise ClassifyError(f"specialist journal '{journal_id}' has no categories")
            entries[journal_id] = categories
            kinds[journal_id] = kind
        all_categories = frozenset(c for cats in entries.values() for c in cats)
        return cls(entries=entries, kind=kinds, categories=all_categories)

    def is_known(self, journal_id: str) -> bool:
        return journal_id in self.entries

    def is_specialist(self, journal_id: str) -> bool:
        return self.kind.get(journal_id) is JournalKind.SPECIALIST

    def is_general(self, journal_id: str) -> bool:
        return self.kind.get(journal_id) is JournalKind.GENERAL


@dataclass(frozen=True)
class Assignment:
    publication_id: str
    weights: Mapping[str, Fraction]
    method: AssignmentMethod

    def __post_init__(self) -> None:
        if self.method is AssignmentMethod.UNCLASSIFIED:
            if self.weights:
                raise ClassifyError("unclassified assignment must carry no weights")
            return
        if not self.weights:
            raise ClassifyError("classified assignment must carry weights")
        if any(w <= 0 for w in self.weights.values()):
            raise ClassifyError("assignment weights must be strictly positive")
        if sum(self.weights.values()) != 1:
            raise ClassifyError("assignment weights must sum to 1")

    @property
    def classified(self) -> bool:
        return self.method is not AssignmentMethod.UNCLASSIFIED


def _unclassified(publication_id: str) -> Assignment:
    return Assignment(publication_id, weights={}, method=AssignmentMethod.UNCLASSIFIED)


@dataclass(frozen=True)
class ReclassifyParams:
    """Knobs for the reference-analysis route.

    min_refs: smallest number of usable (specialist-journal) references before
    the tally is trusted. min_share: smallest category share kept; a share
    exactly at the threshold is kept (closed threshold, for determinism).
    """

    min_refs: int = DEFAULT_MIN_REFS
    min_share: Fraction = DEFAULT_MIN_SHARE

    def __post_init__(self) -> None:
        object.__setattr__(self, "min_share", exact(self.min_share))
        if self.min_refs < 0:
            raise ClassifyError("min_refs must be non-negative")
        if not (0 <= self.min_share <= 1):
            raise ClassifyError("min_share must lie in [0, 1]")


def assign_by_journal(pub: Publication, category_map: CategoryMap) -> Assignment:
    """Assign a specialist-journal paper its journal's categories, split 1/k.

    An unknown journal yields an Unclassified assignment (flagged downstream);
    a general journal is a caller error because those papers need the
    reference-analysis route.
    """
    if not category_map.is_known(pub.journal_id):
        return _unclassified(pub.id)
    if category_map.is_general(pub.journal_id):
        raise ClassifyError(f"journal '{pub.journal_id}' requires reference analysis")
    categories = sorted(category_map.entries[pub.journal_id])
    share = Fraction(1, len(categories))
    return Assignment(pub.id, weights={c: share for c in categories}, method=AssignmentMethod.JOURNAL)


def reclassify_by_references(
    pub: Publication,
    category_map: CategoryMap,
    params: ReclassifyParams = ReclassifyParams(),
) -> Assignment:
    """Place a general-journal paper by tallying its cited specialist journals.

    Each cited reference contributes 1/k to each of its journal's k categories;
    references to unknown or general journals contribute nothing. Categories
    whose share of the tally reaches min_share survive and are renormalized.
    The reference list has multiset semantics: order never matters, repeats do.
    """
    if not category_map.is_general(pub.journal_id):
        raise ClassifyError(f"journal '{pub.journal_id}' is not a general journal")
    tally: dict[str, Fraction] = {}
    usable_refs = 0
    for journal_id in pub.cited_journals:
        if not category_map.is_specialist(journal_id):
            continue
        categories = category_map.entries[journal_id]
        usable_refs += 1
        contribution = Fraction(1, len(categories))
        for category in categories:
            tally[category] = tally.get(category, Fraction(0)) + contribution
    if usable_refs == 0 or usable_refs < params.min_refs:
        return _unclassified(pub.id)
    total = Fraction(usable_refs)
    kept = {c: t / total for c, t in tally.items() if t / total >= params.min_share}
    if not kept:
        return _unclassified(pub.id)
    norm = sum(kept.values())
    weights = {c: share / norm for c, share in sorted(kept.items())}
    return Assignment(pub.id, weights=weights, method=AssignmentMethod.REFERENCES)


@dataclass(frozen=True)
class CoverageReport:
    counts: Mapping[str, int]  # method name -> paper count
    unclassified_ids: tuple[str, ...]

    def rows(self) -> Iterator[tuple[str, str]]:
        for method in AssignmentMethod:
            yield (method.value, str(self.counts.get(method.value, 0)))
        yield ("unclassified_ids", ";".join(self.unclassified_ids))


def classify_corpus(
    corpus: Corpus,
    category_map: CategoryMap,
    params: ReclassifyParams = ReclassifyParams(),
) -> tuple[dict[str, Assignment], CoverageReport]:
    """Assign every publication in a frozen corpus, routing by journal kind."""
    corpus.require_frozen("classification")
    assignments: dict[str, Assignment] = {}
    counts = {method.value: 0 for method in AssignmentMethod}
    for pub in corpus.publications:
        if category_map.is_general(pub.journal_id):
            assignment = reclassify_by_references(pub, category_map, params)
        elif category_map.is_specialist(pub.journal_id):
            assignment = assign_by_journal(pub, category_map)
        else:
            assignment = _unclassified(pub.id)
        assignments[pub.id] = assignment
        counts[assignment.method.value] += 1
    unclassified = tuple(sorted(pid for pid, a in assignments.items() if not a.classified))
    return assignments, CoverageReport(counts=counts, unclassified_ids=unclassified)


# ---------------------------------------------------------------------------
# File formats
# ---------------------------------------------------------------------------


def read_category_map_file(path: Path | str, *, delimiter: str = "\t") -> CategoryMap:
    rows: list[tuple[str, str, list[str]]] = []
    for line_number, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        if not line.strip():
            continue
        fields = line.split(delimiter)
        if line_number == 1 and tuple(fields) == CATEGORY_MAP_COLUMNS:
            continue  # header is optional on read, always written
        if len(fields) != 3:
            raise ClassifyError(f"category map line {line_number}: expected 3 columns, found {len(fields)}")
        journal_id, kind_token, categories_text = fields
        categories = [c for c in categories_text.split(";") if c] if categories_text else []
        rows.append((journal_id, kind_token, categories))
    return CategoryMap.from_rows(rows)


def write_category_map_file(path: Path | str, category_map: CategoryMap, *, delimiter: str = "\t") -> None:
    lines = [delimiter.join(CATEGORY_MAP_COLUMNS)]
    for journal_id in sorted(category_map.entries):
        lines.append(
            delimiter.join(
                (
                    journal_id,
                    category_map.kind[journal_id].value,
                    ";".join(sorted(category_map.entries[journal_id])),
                )
            )
        )
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def assignment_lines(assignments: Mapping[str, Assignment], *, delimiter: str = "\t") -> Iterator[str]:
    """Audit export: publication_id, method, weights at 12 decimal digits."""
    yield delimiter.join(ASSIGNMENT_COLUMNS)
    for pub_id in sorted(assignments):
        assignment = assignments[pub_id]
        weights = ";".join(
            f"{category}:{format_fixed(weight)}" for category, weight in sorted(assignment.weights.items())
        )
        yield delimiter.join((pub_id, assignment.method.value, weights))


def write_assignment_file(path: Path | str, assignments: Mapping[str, Assignment], *, delimiter: str = "\t") -> None:
    Path(path).write_text("\n".join(assignment_lines(assignments, delimiter=delimiter)) + "\n", encoding="utf-8")
