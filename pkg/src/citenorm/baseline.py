"""Expected-citation-rate baselines per (category, document type, year) cell.

The whole ingested corpus plays the role of the citation database: every
classified, citable paper contributes its category weights to the cells it
belongs to, and a cell's expected rate is total fractional citations over
total fractional paper weight. Accumulation is exact (Fraction), so the
conservation identity -- cell citation totals summing to the plain citation
sum of all in-scope papers -- holds to the last bit and is tested that way.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Iterator, Mapping

from .classify import Assignment
from .corpus import DEFAULT_CITABLE_TYPES, Corpus, DocType, Publication
from .errors import BaselineError, UncoveredCellError
from .exact import format_fixed

BASELINE_COLUMNS = ("category", "doc_type", "year", "weight_total", "citation_total", "expected_rate")

EXCLUDED_NON_CITABLE = "non-citable doc type"
EXCLUDED_UNCLASSIFIED = "unclassified"


@dataclass(frozen=True)
class Cell:
    category: str
    doc_type: DocType
    year: int

    def describe(self) -> str:
        return f"({self.category}, {self.doc_type.value}, {self.year})"


def cell_sort_key(cell: Cell) -> tuple[str, str, int]:
    return (cell.category, cell.doc_type.value, cell.year)


@dataclass(frozen=True)
class BaselineTable:
    rates: Mapping[Cell, Fraction]
    weights_total: Mapping[Cell, Fraction]
    citations_total: Mapping[Cell, Fraction]
    corpus_fingerprint: str
    citable_types: frozenset[DocType]
    exclusions: Mapping[str, int]  # reason -> publication count

    def rate(self, cell: Cell) -> Fraction:
        try:
            return self.rates[cell]
        except KeyError:
            raise UncoveredCellError(cell.category, cell.doc_type.value, cell.year) from None

    def cells(self) -> list[Cell]:
        return sorted(self.rates, key=cell_sort_key)


def corpus_fingerprint(
    corpus: Corpus,
    assignments: Mapping[str, Assignment],
    citable_types: frozenset[DocType] = DEFAULT_CITABLE_TYPES,
) -> str:
    """Digest tying a baseline table to the exact universe it was built from.

    Canonical form: window, publications sorted by id, assignments sorted by
    id with exact fraction weights, and the citable type set. Row order in the
    source file therefore does not matter; content does.
    """
    digest = hashlib.sha256()
    digest.update(f"window={corpus.window.describe()}\n".encode())
    for pub in sorted(corpus.publications, key=lambda p: p.id):
        refs = ";".join(pub.cited_journals)
        digest.update(
            f"pub\t{pub.id}\t{pub.journal_id}\t{pub.year}\t{pub.doc_type.value}\t{pub.citations}\t{refs}\n".encode()
        )
    for pub_id in sorted(assignments):
        assignment = assignments[pub_id]
        weights = ";".join(
            f"{category}:{weight.numerator}/{weight.denominator}"
            for category, weight in sorted(assignment.weights.items())
        )
        digest.update(f"assign\t{pub_id}\t{assignment.method.value}\t{weights}\n".encode())
    digest.update(("citable=" + ",".join(sorted(t.value for t in citable_types)) + "\n").encode())
    return "sha256:" + digest.hexdigest()


def build_baselines(
    corpus: Corpus,
    assignments: Mapping[str, Assignment],
    citable_types: frozenset[DocType] = DEFAULT_CITABLE_TYPES,
) -> BaselineTable:
    """Accumulate W, C and e = C/W for every populated cell.

    Unclassified and non-citable papers are skipped and tallied, never
    silently dropped. Sparse cells stand as-is; no pooling or smoothing.
    """
    corpus.require_frozen("baseline construction")
    weights: dict[Cell, Fraction] = {}
    citations: dict[Cell, Fraction] = {}
    exclusions = {EXCLUDED_NON_CITABLE: 0, EXCLUDED_UNCLASSIFIED: 0}
    in_scope = 0
    for pub in corpus.publications:
        if pub.doc_type not in citable_types:
            exclusions[EXCLUDED_NON_CITABLE] += 1
            continue
        assignment = assignments.get(pub.id)
        if assignment is None:
            raise BaselineError(f"assignment missing for publication '{pub.id}'")
        if not assignment.classified:
            exclusions[EXCLUDED_UNCLASSIFIED] += 1
            continue
        in_scope += 1
        for category, weight in assignment.weights.items():
            cell = Cell(category, pub.doc_type, pub.year)
            weights[cell] = weights.get(cell, Fraction(0)) + weight
            citations[cell] = citations.get(cell, Fraction(0)) + weight * pub.citations
    if in_scope == 0:
        raise BaselineError("empty baseline universe")
    rates = {cell: citations[cell] / weights[cell] for cell in weights}
    return BaselineTable(
        rates=rates,
        weights_total=weights,
        citations_total=citations,
        corpus_fingerprint=corpus_fingerprint(corpus, assignments, citable_types),
        citable_types=citable_types,
        exclusions=exclusions,
    )


def expected_rate(pub: Publication, assignment: Assignment, table: BaselineTable) -> Fraction:
    """Per-paper expected citation count: category-weighted mean of cell rates."""
    if not assignment.classified:
        raise BaselineError(f"publication '{pub.id}' is unclassified")
    if pub.doc_type not in table.citable_types:
        raise BaselineError(f"publication '{pub.id}' has non-citable doc type {pub.doc_type.value}")
    total = Fraction(0)
    for category, weight in assignment.weights.items():
        total += weight * table.rate(Cell(category, pub.doc_type, pub.year))
    return total


# ---------------------------------------------------------------------------
# File format
# ---------------------------------------------------------------------------


def baseline_lines(table: BaselineTable, *, delimiter: str = "\t") -> Iterator[str]:
    yield f"# corpus_fingerprint: {table.corpus_fingerprint}"
    yield delimiter.join(BASELINE_COLUMNS)
    for cell in table.cells():
        yield delimiter.join(
            (
                cell.category,
                cell.doc_type.value,
                str(cell.year),
                format_fixed(table.weights_total[cell]),
                format_fixed(table.citations_total[cell]),
                format_fixed(table.rates[cell]),
            )
        )


def write_baseline_file(path: Path | str, table: BaselineTable, *, delimiter: str = "\t") -> None:
    Path(path).write_text("\n".join(baseline_lines(table, delimiter=delimiter)) + "\n", encoding="utf-8")
