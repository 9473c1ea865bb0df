from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from citenorm import (
    BaselineError,
    Cell,
    DocType,
    UncoveredCellError,
    build_baselines,
    classify_corpus,
    corpus_fingerprint,
    expected_rate,
)
from citenorm.baseline import baseline_lines

from conftest import make_corpus, make_map, single_field_map


def classified(corpus, cmap):
    assignments, _ = classify_corpus(corpus, cmap)
    return assignments


class TestBuild:
    def test_single_cell_mean(self):
        # arithmetic-mean oracle: (0 + 2 + 4 + 10) / 4
        cmap = single_field_map()
        corpus = make_corpus([(f"P{i}", "J-A", 2005, "Article", c) for i, c in enumerate([0, 2, 4, 10])])
        table = build_baselines(corpus, classified(corpus, cmap))
        cell = Cell("CAT-A", DocType.ARTICLE, 2005)
        assert table.rates[cell] == Fraction(4)
        assert table.weights_total[cell] == Fraction(4)
        assert table.citations_total[cell] == Fraction(16)

    def test_fractional_split_across_two_cells(self):
        cmap = make_map([("J-AB", "SPECIALIST", ["CAT-A", "CAT-B"])])
        corpus = make_corpus([("P1", "J-AB", 2005, "Article", 6)])
        table = build_baselines(corpus, classified(corpus, cmap))
        for category in ("CAT-A", "CAT-B"):
            cell = Cell(category, DocType.ARTICLE, 2005)
            assert table.weights_total[cell] == Fraction(1, 2)
            assert table.citations_total[cell] == Fraction(3)
            assert table.rates[cell] == Fraction(6)
        assert sum(table.citations_total.values()) == 6

    def test_uncited_universe_gives_zero_rates(self):
        cmap = single_field_map()
        corpus = make_corpus([("P1", "J-A", 2005, "Article", 0), ("P2", "J-A", 2004, "Letter", 0)])
        table = build_baselines(corpus, classified(corpus, cmap))
        assert all(rate == 0 for rate in table.rates.values())

    def test_empty_universe_is_an_error(self):
        cmap = single_field_map()
        corpus = make_corpus([("P1", "J-A", 2005, "Other", 5)])
        with pytest.raises(BaselineError, match="empty baseline universe"):
            build_baselines(corpus, classified(corpus, cmap))

    def test_exclusion_tally(self, fixture_corpus, fixture_map, fixture_assignments):
        table = build_baselines(fixture_corpus, fixture_assignments)
        assert table.exclusions == {"non-citable doc type": 1, "unclassified": 3}

    def test_missing_assignment_is_an_error(self):
        cmap = single_field_map()
        corpus = make_corpus([("P1", "J-A", 2005, "Article", 1)])
        with pytest.raises(BaselineError, match="assignment missing"):
            build_baselines(corpus, {})


class TestConservation:
    def test_fixture_corpus_exact(self, fixture_corpus, fixture_assignments):
        table = build_baselines(fixture_corpus, fixture_assignments)
        in_scope_total = sum(
            pub.citations
            for pub in fixture_corpus.publications
            if pub.doc_type in table.citable_types and fixture_assignments[pub.id].classified
        )
        assert sum(table.citations_total.values()) == in_scope_total

    @given(
        st.lists(
            st.tuples(
                st.sampled_from(["J-A", "J-AB", "J-ABC"]),
                st.integers(min_value=0, max_value=50),
                st.sampled_from([2004, 2005]),
            ),
            min_size=1,
            max_size=40,
        )
    )
    @settings(max_examples=60, deadline=None)
    def test_random_corpora_exact(self, specs):
        cmap = make_map(
            [
                ("J-A", "SPECIALIST", ["A"]),
                ("J-AB", "SPECIALIST", ["A", "B"]),
                ("J-ABC", "SPECIALIST", ["A", "B", "C"]),
            ]
        )
        corpus = make_corpus(
            [(f"P{i}", journal, year, "Article", citations) for i, (journal, citations, year) in enumerate(specs)]
        )
        table = build_baselines(corpus, classified(corpus, cmap))
        assert sum(table.citations_total.values()) == sum(c for _, c, _ in specs)
        for cell, weight in table.weights_total.items():
            assert weight > 0
            assert table.rates[cell] == table.citations_total[cell] / weight


class TestMonotonicity:
    def test_bumping_citations_raises_each_cell_rate(self):
        cmap = make_map([("J-AB", "SPECIALIST", ["A", "B"]), ("J-A", "SPECIALIST", ["A"])])
        papers = [("P1", "J-AB", 2005, "Article", 6), ("P2", "J-A", 2005, "Article", 2)]
        corpus = make_corpus(papers)
        before = build_baselines(corpus, classified(corpus, cmap))
        bumped = make_corpus([("P1", "J-AB", 2005, "Article", 7), ("P2", "J-A", 2005, "Article", 2)])
        after = build_baselines(bumped, classified(bumped, cmap))
        for category in ("A", "B"):
            cell = Cell(category, DocType.ARTICLE, 2005)
            assert after.rates[cell] > before.rates[cell]


class TestExpectedRate:
    def test_single_category_identity(self):
        cmap = single_field_map()
        corpus = make_corpus([("P1", "J-A", 2005, "Article", 4), ("P2", "J-A", 2005, "Article", 4)])
        assignments = classified(corpus, cmap)
        table = build_baselines(corpus, assignments)
        assert expected_rate(corpus.get("P1"), assignments["P1"], table) == Fraction(4)

    def test_weighted_mean_of_cell_rates(self):
        # 0.5 * 4.0 + 0.5 * 2.0 = 3.0
        cmap = make_map([("J-AB", "SPECIALIST", ["A", "B"]), ("J-A", "SPECIALIST", ["A"]), ("J-B", "SPECIALIST", ["B"])])
        corpus = make_corpus(
            [
                ("PX", "J-AB", 2005, "Article", 3),
                ("PA1", "J-A", 2005, "Article", 5),
                ("PA2", "J-A", 2005, "Article", 2),  # cell A: (1.5 + 5 + 2) / 2.5 = 3.4
                ("PB1", "J-B", 2005, "Article", 1),  # cell B: (1.5 + 1) / 1.5 = 5/3
            ]
        )
        assignments = classified(corpus, cmap)
        table = build_baselines(corpus, assignments)
        rate_a = table.rates[Cell("A", DocType.ARTICLE, 2005)]
        rate_b = table.rates[Cell("B", DocType.ARTICLE, 2005)]
        expected = Fraction(1, 2) * rate_a + Fraction(1, 2) * rate_b
        assert expected_rate(corpus.get("PX"), assignments["PX"], table) == expected

    def test_uncovered_cell_named(self):
        cmap = single_field_map()
        corpus = make_corpus([("P1", "J-A", 2005, "Article", 4)])
        assignments = classified(corpus, cmap)
        table = build_baselines(corpus, assignments)
        other_corpus = make_corpus([("Q1", "J-A", 1999, "Article", 4)])
        other_assignments = classified(other_corpus, cmap)
        with pytest.raises(UncoveredCellError, match=r"uncovered cell \(CAT-A, Article, 1999\)"):
            expected_rate(other_corpus.get("Q1"), other_assignments["Q1"], table)

    def test_unclassified_and_non_citable_papers_refused(self):
        cmap = single_field_map()
        corpus = make_corpus(
            [("P1", "J-A", 2005, "Article", 4), ("P2", "J-X", 2005, "Article", 1), ("P3", "J-A", 2005, "Other", 1)]
        )
        assignments = classified(corpus, cmap)
        table = build_baselines(corpus, assignments)
        with pytest.raises(BaselineError, match="unclassified"):
            expected_rate(corpus.get("P2"), assignments["P2"], table)
        with pytest.raises(BaselineError, match="non-citable"):
            expected_rate(corpus.get("P3"), assignments["P3"], table)


class TestFingerprint:
    def test_identical_inputs_identical_tables(self, fixture_corpus, fixture_assignments):
        first = build_baselines(fixture_corpus, fixture_assignments)
        second = build_baselines(fixture_corpus, fixture_assignments)
        assert first.corpus_fingerprint == second.corpus_fingerprint
        assert first.rates == second.rates

    def test_content_change_changes_fingerprint(self, fixture_corpus, fixture_assignments):
        original = corpus_fingerprint(fixture_corpus, fixture_assignments)
        smaller = make_corpus(
            [
                (p.id, p.journal_id, p.year, p.doc_type.value, p.citations, list(p.cited_journals))
                for p in fixture_corpus.publications[:-1]
            ]
        )
        smaller_assignments = {k: v for k, v in fixture_assignments.items() if k in smaller}
        assert corpus_fingerprint(smaller, smaller_assignments) != original

    def test_row_order_does_not_matter(self):
        cmap = single_field_map()
        papers = [("P1", "J-A", 2005, "Article", 4), ("P2", "J-A", 2004, "Article", 1)]
        forward = make_corpus(papers)
        backward = make_corpus(list(reversed(papers)))
        assert corpus_fingerprint(forward, classified(forward, cmap)) == corpus_fingerprint(
            backward, classified(backward, cmap)
        )


class TestExport:
    def test_file_layout(self, fixture_corpus, fixture_assignments):
        table = build_baselines(fixture_corpus, fixture_assignments)
        lines = list(baseline_lines(table))
        assert lines[0] == f"# corpus_fingerprint: {table.corpus_fingerprint}"
        assert lines[1] == "category\tdoc_type\tyear\tweight_total\tcitation_total\texpected_rate"
        assert len(lines) == 2 + len(table.rates)
        first_cell = table.cells()[0]
        fields = lines[2].split("\t")
        assert fields[0] == first_cell.category
        for value in fields[3:]:
            whole, _, decimals = value.partition(".")
            assert len(decimals) == 12
