from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
import pytest

from citenorm import SimConfig, SimulationError, SkewModel, generate_corpus, run_divergence
from citenorm.simulate import (
    ZETA_TRUNCATION,
    adversarial_divergence_record,
    adversarial_two_field_case,
    read_stats_file,
    write_divergence_files,
)


def config(**overrides) -> SimConfig:
    defaults = dict(
        seed=1234,
        n_groups=6,
        oeuvre_size=(3, 8),
        skew=SkewModel("uniform", max_value=8),
        n_fields=2,
        field_rate_spread=3.0,
        replicates=2,
        papers_per_field=40,
    )
    defaults.update(overrides)
    return SimConfig(**defaults)


class TestConfig:
    def test_spread_with_single_field_is_degenerate(self):
        with pytest.raises(SimulationError, match="two fields"):
            config(n_fields=1, field_rate_spread=2.0)

    def test_single_field_without_spread_is_fine(self):
        config(n_fields=1, field_rate_spread=1.0)

    @pytest.mark.parametrize(
        "bad",
        [
            dict(n_groups=0),
            dict(replicates=0),
            dict(papers_per_field=0),
            dict(oeuvre_size=(0, 5)),
            dict(oeuvre_size=(6, 5)),
            dict(oeuvre_size=(3, 10_000)),
            dict(field_rate_spread=0.5),
        ],
    )
    def test_bad_counts_rejected(self, bad):
        with pytest.raises(SimulationError):
            config(**bad)

    @pytest.mark.parametrize(
        "text,kind",
        [("powerlaw:2.5", "powerlaw"), ("lognormal:1.0,1.2", "lognormal"), ("uniform:8", "uniform")],
    )
    def test_model_parsing(self, text, kind):
        assert SkewModel.parse(text).kind == kind

    @pytest.mark.parametrize("text", ["powerlaw:1.0", "powerlaw:0.5", "lognormal:1.0,-1", "zipf:2", "uniform:-3"])
    def test_bad_models_rejected(self, text):
        with pytest.raises(SimulationError):
            SkewModel.parse(text)


class TestGenerate:
    def test_same_seed_same_corpus(self):
        first_corpus, _, first_oeuvres = generate_corpus(config())
        second_corpus, _, second_oeuvres = generate_corpus(config())
        assert first_corpus.publications == second_corpus.publications
        assert first_oeuvres == second_oeuvres

    def test_different_seed_different_corpus(self):
        first_corpus, _, _ = generate_corpus(config())
        second_corpus, _, _ = generate_corpus(config(seed=99))
        assert first_corpus.publications != second_corpus.publications

    def test_uniform_zero_means_all_uncited(self):
        corpus, _, _ = generate_corpus(config(skew=SkewModel("uniform", max_value=0), field_rate_spread=1.0, n_fields=1))
        assert all(pub.citations == 0 for pub in corpus.publications)

    def test_field_mixture_steers_oeuvre_sampling(self):
        _, _, oeuvres = generate_corpus(config(field_mixture=(1.0, 0.0)))
        for oeuvre in oeuvres:
            assert all(pid.startswith("S00-") for pid in oeuvre.publication_ids)

    def test_bad_field_mixture_rejected(self):
        with pytest.raises(SimulationError, match="mixture length"):
            config(field_mixture=(1.0,))
        with pytest.raises(SimulationError, match="non-negative"):
            config(field_mixture=(1.0, -1.0))

    def test_power_law_mean_matches_truncated_zeta_moment(self):
        # independent moment oracle by direct summation over the documented support
        alpha = 2.5
        support = np.arange(1, ZETA_TRUNCATION + 1, dtype=np.float64)
        probs = support**-alpha
        probs /= probs.sum()
        model_mean = float((support * probs).sum())
        model_var = float(((support - model_mean) ** 2 * probs).sum())

        corpus, _, _ = generate_corpus(
            config(
                seed=2024,
                skew=SkewModel("powerlaw", alpha=alpha),
                n_fields=1,
                field_rate_spread=1.0,
                papers_per_field=1000,
            )
        )
        counts = [pub.citations for pub in corpus.publications]
        assert min(counts) >= 1
        empirical_mean = sum(counts) / len(counts)
        standard_error = math.sqrt(model_var / len(counts))
        assert abs(empirical_mean - model_mean) <= 3 * standard_error


class TestDivergence:
    def test_homogeneous_field_collapses(self):
        stats = run_divergence(config(n_fields=1, field_rate_spread=1.0, papers_per_field=60))
        deltas = [rec.delta for rec in stats.records if rec.delta is not None]
        assert deltas
        assert max(abs(d) for d in deltas) <= 1e-12

    def test_adversarial_case_reproduces_hand_values(self):
        globalized, averaged = adversarial_divergence_record(spread=9)
        assert globalized == 1
        assert averaged == Fraction(41, 9)
        assert abs(float(averaged) - 4.5556) < 1e-3

    def test_adversarial_corpus_shape(self):
        corpus, category_map, oeuvre = adversarial_two_field_case(spread=9)
        assert corpus.get("ADV-A").citations == 9
        assert corpus.get("ADV-B").citations == 1
        assert len(category_map.categories) == 2
        assert oeuvre.publication_ids == frozenset({"ADV-A", "ADV-B"})

    def test_record_count_and_determinism(self):
        cfg = config()
        first = run_divergence(cfg)
        second = run_divergence(cfg)
        assert first == second
        assert len(first.records) == cfg.n_groups * cfg.replicates
        assert first.summary["n_records"] == cfg.n_groups * cfg.replicates

    def test_sign_statistics_present(self):
        stats = run_divergence(config(field_rate_spread=6.0))
        assert "mean_delta" in stats.summary
        assert "median_delta" in stats.summary
        assert "frac_averaged_above" in stats.summary
        assert "max_abs_delta" in stats.summary


class TestStatsFiles:
    def test_round_trip(self, tmp_path):
        stats = run_divergence(config())
        stats_path = tmp_path / "stats.tsv"
        summary_path = tmp_path / "summary.tsv"
        write_divergence_files(stats, stats_path, summary_path)
        rows = read_stats_file(stats_path)
        assert len(rows) == len(stats.records)
        assert rows[0]["config"] == stats.config_label
        assert float(rows[0]["globalized"]) == pytest.approx(stats.records[0].globalized)
        summary_lines = summary_path.read_text(encoding="utf-8").splitlines()
        assert summary_lines[0] == "key\tvalue"
        keys = {line.split("\t")[0] for line in summary_lines[1:]}
        assert {"config", "n_records", "n_undefined_averaged"} <= keys
