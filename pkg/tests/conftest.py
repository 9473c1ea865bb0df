from __future__ import annotations

from pathlib import Path

import pytest

from citenorm import (
    CategoryMap,
    CitationWindow,
    Corpus,
    DocType,
    Publication,
    ReclassifyParams,
    classify_corpus,
    freeze,
    read_publication_file,
)
from citenorm.classify import read_category_map_file

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"

_DOC = {t.value: t for t in DocType}


def make_pub(pub_id, journal, year=2005, doc_type="Article", citations=0, refs=()):
    return Publication(
        id=pub_id,
        journal_id=journal,
        year=year,
        doc_type=_DOC[doc_type],
        citations=citations,
        cited_journals=tuple(refs),
    )


def make_corpus(papers, window=None) -> Corpus:
    """papers: iterable of (id, journal, year, doc_type, citations[, refs])."""
    pubs = tuple(make_pub(*spec) for spec in papers)
    return freeze(Corpus(publications=pubs, window=window or CitationWindow("open")))


def make_map(rows) -> CategoryMap:
    """rows: iterable of (journal_id, kind, [categories])."""
    return CategoryMap.from_rows(rows)


def single_field_map(journal="J-A", category="CAT-A") -> CategoryMap:
    return make_map([(journal, "SPECIALIST", [category])])


@pytest.fixture(scope="session")
def fixture_paths():
    return {
        "corpus": FIXTURES / "corpus.tsv",
        "categories": FIXTURES / "categories.tsv",
        "oeuvre_alpha": FIXTURES / "oeuvre_alpha.txt",
        "oeuvre_beta": FIXTURES / "oeuvre_beta.txt",
        "config": FIXTURES / "pipeline.cfg",
    }


@pytest.fixture(scope="session")
def fixture_corpus(fixture_paths):
    corpus, report = read_publication_file(fixture_paths["corpus"], CitationWindow("open"))
    assert not report.rejected
    return freeze(corpus)


@pytest.fixture(scope="session")
def fixture_map(fixture_paths):
    return read_category_map_file(fixture_paths["categories"])


@pytest.fixture(scope="session")
def fixture_assignments(fixture_corpus, fixture_map):
    assignments, _coverage = classify_corpus(fixture_corpus, fixture_map, ReclassifyParams())
    return assignments
