"""Monte-Carlo harness for the gap between globalized and averaged ratios.

Synthetic corpora with controlled citation skewness and between-field rate
spread are scored with the real pipeline (classify, baselines, indicators),
and the per-group (globalized, averaged) pairs are collected. With a single
homogeneous field the two ratios coincide and the harness must report zero
divergence; with unequal field rates they drift apart, and the harness
reports signed and absolute statistics without presuming a direction.

Citation samplers are documented so their moments can be checked externally:
the power-law sampler draws from a zeta distribution truncated at
ZETA_TRUNCATION via inverse CDF; the lognormal sampler rounds to the nearest
non-negative integer; uniform draws integers on [0, max_value].

Outputs are delimiter-separated files; figure rendering lives in the CLI
layer, which consumes these files, never in this module.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from statistics import median
from typing import Iterator

import numpy as np

from .baseline import build_baselines
from .classify import CategoryMap, JournalKind, ReclassifyParams, classify_corpus
from .corpus import CitationWindow, Corpus, DocType, Oeuvre, Publication, freeze
from .errors import SimulationError
from .indicators import score

ZETA_TRUNCATION = 10_000
SIM_YEAR = 2000
STATS_COLUMNS = ("config", "replicate", "group", "globalized", "averaged", "delta")


@dataclass(frozen=True)
class SkewModel:
    """Citation-count distribution: powerlaw(alpha), lognormal(mu, sigma), uniform(max)."""

    kind: str
    alpha: float | None = None
    mu: float | None = None
    sigma: float | None = None
    max_value: int | None = None

    def __post_init__(self) -> None:
        if self.kind == "powerlaw":
            if self.alpha is None or self.alpha <= 1:
                raise SimulationError("power-law exponent must exceed 1")
        elif self.kind == "lognormal":
            if self.mu is None or self.sigma is None or self.sigma < 0:
                raise SimulationError("lognormal needs mu and sigma >= 0")
        elif self.kind == "uniform":
            if self.max_value is None or self.max_value < 0:
                raise SimulationError("uniform needs max_value >= 0")
        else:
            raise SimulationError(f"unknown skew model: '{self.kind}'")

    def label(self) -> str:
        if self.kind == "powerlaw":
            return f"powerlaw({self.alpha:g})"
        if self.kind == "lognormal":
            return f"lognormal({self.mu:g},{self.sigma:g})"
        return f"uniform({self.max_value})"

    @classmethod
    def parse(cls, text: str) -> "SkewModel":
        """Parse "powerlaw:2.5", "lognormal:1.0,1.2" or "uniform:8"."""
        match = re.fullmatch(r"(powerlaw|lognormal|uniform):([-\d.,eE+]+)", text.strip())
        if not match:
            raise SimulationError(f"bad skew model: '{text}'")
        kind, args_text = match.groups()
        args = args_text.split(",")
        try:
            if kind == "powerlaw":
                (alpha,) = args
                return cls("powerlaw", alpha=float(alpha))
            if kind == "lognormal":
                mu, sigma = args
                return cls("lognormal", mu=float(mu), sigma=float(sigma))
            (max_value,) = args
            return cls("uniform", max_value=int(max_value))
        except ValueError as err:
            raise SimulationError(f"bad skew model: '{text}'") from err


@dataclass(frozen=True)
class SimConfig:
    seed: int
    n_groups: int = 20
    oeuvre_size: tuple[int, int] = (5, 20)
    skew: SkewModel = field(default_factory=lambda: SkewModel("powerlaw", alpha=2.5))
    n_fields: int = 2
    field_rate_spread: float = 4.0
    replicates: int = 5
    papers_per_field: int = 200
    field_mixture: tuple[float, ...] | None = None  # oeuvre sampling weights; uniform when None

    def __post_init__(self) -> None:
        if min(self.n_groups, self.n_fields, self.replicates, self.papers_per_field) < 1:
            raise SimulationError("all counts must be >= 1")
        lo, hi = self.oeuvre_size
        if lo < 1 or hi < lo:
            raise SimulationError(f"bad oeuvre size range: {self.oeuvre_size}")
        if self.field_rate_spread < 1:
            raise SimulationError("field rate spread must be >= 1")
        if self.field_rate_spread > 1 and self.n_fields == 1:
            raise SimulationError("rate spread above 1 needs at least two fields")
        if self.field_mixture is not None:
            if len(self.field_mixture) != self.n_fields:
                raise SimulationError("field mixture length must equal n_fields")
            if any(share < 0 for share in self.field_mixture) or sum(self.field_mixture) <= 0:
                raise SimulationError("field mixture needs non-negative shares with a positive sum")
            reachable = sum(1 for share in self.field_mixture if share > 0) * self.papers_per_field
        else:
            reachable = self.n_fields * self.papers_per_field
        if hi > reachable:
            raise SimulationError("oeuvre size range exceeds the sampleable corpus")

    def label(self) -> str:
        return (
            f"fields={self.n_fields};spread={self.field_rate_spread:g};"
            f"model={self.skew.label()};papers={self.papers_per_field}"
        )


@dataclass(frozen=True)
class DivergenceRecord:
    replicate: int
    group_id: str
    globalized: float
    averaged: float | None

    @property
    def delta(self) -> float | None:
        return None if self.averaged is None else self.averaged - self.globalized


@dataclass(frozen=True)
class DivergenceStats:
    config_label: str
    records: tuple[DivergenceRecord, ...]
    summary: dict[str, float | int | str]


def _draw_citations(model: SkewModel, rng: np.random.Generator, size: int) -> np.ndarray:
    if model.kind == "uniform":
        return rng.integers(0, model.max_value + 1, size=size)
    if model.kind == "lognormal":
        values = np.rint(rng.lognormal(model.mu, model.sigma, size=size))
        return np.maximum(values, 0).astype(np.int64)
    support = np.arange(1, ZETA_TRUNCATION + 1, dtype=np.float64)
    probabilities = support ** (-model.alpha)
    cdf = np.cumsum(probabilities / probabilities.sum())
    cdf[-1] = 1.0
    uniforms = rng.random(size)
    return (np.searchsorted(cdf, uniforms, side="left") + 1).astype(np.int64)


def _field_multipliers(config: SimConfig) -> list[float]:
    if config.n_fields == 1:
        return [1.0]
    spread = config.field_rate_spread
    return [spread ** (index / (config.n_fields - 1)) for index in range(config.n_fields)]


def _replicate_rng(seed: int, replicate: int) -> np.random.Generator:
    # spawn-keyed so replicate results never depend on execution order
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(replicate,)))


def _generate(config: SimConfig, rng: np.random.Generator) -> tuple[Corpus, CategoryMap, list[Oeuvre]]:
    multipliers = _field_multipliers(config)
    publications: list[Publication] = []
    map_rows: list[tuple[str, str, list[str]]] = []
    for field_index in range(config.n_fields):
        journal = f"J-SIM-{field_index:02d}"
        category = f"FLD-{field_index:02d}"
        map_rows.append((journal, JournalKind.SPECIALIST.value, [category]))
        base = _draw_citations(config.skew, rng, config.papers_per_field)
        counts = np.rint(base * multipliers[field_index]).astype(np.int64)
        for paper_index in range(config.papers_per_field):
            publications.append(
                Publication(
                    id=f"S{field_index:02d}-{paper_index:05d}",
                    journal_id=journal,
                    year=SIM_YEAR,
                    doc_type=DocType.ARTICLE,
                    citations=int(counts[paper_index]),
                )
            )
    corpus = freeze(Corpus(publications=tuple(publications), window=CitationWindow("open")))
    category_map = CategoryMap.from_rows(map_rows)

    all_ids = [pub.id for pub in publications]
    probabilities = None
    if config.field_mixture is not None:
        total_share = sum(config.field_mixture)
        per_paper = [
            config.field_mixture[field_index] / total_share / config.papers_per_field
            for field_index in range(config.n_fields)
            for _ in range(config.papers_per_field)
        ]
        probabilities = np.asarray(per_paper)
    oeuvres: list[Oeuvre] = []
    lo, hi = config.oeuvre_size
    for group_index in range(config.n_groups):
        size = int(rng.integers(lo, hi + 1))
        chosen = rng.choice(len(all_ids), size=size, replace=False, p=probabilities)
        oeuvres.append(
            Oeuvre(
                group_id=f"GRP-{group_index:02d}",
                publication_ids=frozenset(all_ids[i] for i in chosen),
            )
        )
    return corpus, category_map, oeuvres


def generate_corpus(config: SimConfig) -> tuple[Corpus, CategoryMap, list[Oeuvre]]:
    """Deterministic-from-seed synthetic corpus plus its category map and oeuvres."""
    return _generate(config, _replicate_rng(config.seed, 0))


def run_divergence(config: SimConfig) -> DivergenceStats:
    """Score every synthetic oeuvre in every replicate and summarize A-versus-G gaps."""
    records: list[DivergenceRecord] = []
    undefined = 0
    for replicate in range(config.replicates):
        corpus, category_map, oeuvres = _generate(config, _replicate_rng(config.seed, replicate))
        assignments, _coverage = classify_corpus(corpus, category_map, ReclassifyParams())
        table = build_baselines(corpus, assignments)
        for oeuvre in oeuvres:
            result = score(oeuvre, corpus, assignments, table)
            averaged = float(result.averaged) if result.averaged is not None else None
            if averaged is None:
                undefined += 1
            records.append(
                DivergenceRecord(
                    replicate=replicate,
                    group_id=oeuvre.group_id,
                    globalized=float(result.globalized),
                    averaged=averaged,
                )
            )
    deltas = [rec.delta for rec in records if rec.delta is not None]
    summary: dict[str, float | int | str] = {
        "config": config.label(),
        "n_records": len(records),
        "n_undefined_averaged": undefined,
    }
    if deltas:
        summary.update(
            {
                "mean_delta": float(np.mean(deltas)),
                "median_delta": float(median(deltas)),
                "mean_abs_delta": float(np.mean(np.abs(deltas))),
                "max_abs_delta": float(np.max(np.abs(deltas))),
                "frac_averaged_above": sum(1 for d in deltas if d > 0) / len(deltas),
            }
        )
    return DivergenceStats(config_label=config.label(), records=tuple(records), summary=summary)


def adversarial_two_field_case(spread: int = 9) -> tuple[Corpus, CategoryMap, Oeuvre]:
    """Two-field corpus where the oeuvre's high-cited paper sits in the
    low-expectation field and vice versa.

    Field rates come out exactly 1 and `spread`; the oeuvre holds one paper
    cited `spread` times (rate-1 field) and one cited once (rate-`spread`
    field), so the globalized ratio is exactly 1 while the averaged ratio is
    (spread^2 + 1) / (2 * spread).
    """
    if spread < 2:
        raise SimulationError("adversarial case needs spread >= 2")
    publications = [
        Publication("ADV-A", "J-ADV-LOW", SIM_YEAR, DocType.ARTICLE, spread),
        Publication("ADV-B", "J-ADV-HIGH", SIM_YEAR, DocType.ARTICLE, 1),
    ]
    # rate-1 field: the flag paper plus `spread` papers totalling 1 citation
    publications.append(Publication("BG-LOW-00", "J-ADV-LOW", SIM_YEAR, DocType.ARTICLE, 1))
    publications.extend(
        Publication(f"BG-LOW-{i:02d}", "J-ADV-LOW", SIM_YEAR, DocType.ARTICLE, 0)
        for i in range(1, spread)
    )
    # rate-`spread` field: one companion carrying the rest of 2*spread citations
    publications.append(Publication("BG-HIGH-00", "J-ADV-HIGH", SIM_YEAR, DocType.ARTICLE, 2 * spread - 1))
    corpus = freeze(Corpus(publications=tuple(publications), window=CitationWindow("open")))
    category_map = CategoryMap.from_rows(
        [
            ("J-ADV-LOW", JournalKind.SPECIALIST.value, ["FLD-LOW"]),
            ("J-ADV-HIGH", JournalKind.SPECIALIST.value, ["FLD-HIGH"]),
        ]
    )
    oeuvre = Oeuvre(group_id="GRP-ADV", publication_ids=frozenset({"ADV-A", "ADV-B"}))
    return corpus, category_map, oeuvre


def adversarial_divergence_record(spread: int = 9) -> tuple[Fraction, Fraction]:
    """Run the adversarial case through the full pipeline; returns (G, A) exactly."""
    corpus, category_map, oeuvre = adversarial_two_field_case(spread)
    assignments, _coverage = classify_corpus(corpus, category_map, ReclassifyParams())
    table = build_baselines(corpus, assignments)
    result = score(oeuvre, corpus, assignments, table)
    assert result.averaged is not None
    return result.globalized, result.averaged


# ---------------------------------------------------------------------------
# File formats
# ---------------------------------------------------------------------------


def _cell(value: float | None) -> str:
    return "NA" if value is None else f"{value:.12g}"


def stats_lines(stats: DivergenceStats, *, delimiter: str = "\t") -> Iterator[str]:
    yield delimiter.join(STATS_COLUMNS)
    for rec in stats.records:
        yield delimiter.join(
            (
                stats.config_label,
                str(rec.replicate),
                rec.group_id,
                _cell(rec.globalized),
                _cell(rec.averaged),
                _cell(rec.delta),
            )
        )


def summary_lines(stats: DivergenceStats, *, delimiter: str = "\t") -> Iterator[str]:
    yield delimiter.join(("key", "value"))
    for key, value in stats.summary.items():
        text = value if isinstance(value, str) else (_cell(value) if isinstance(value, float) else str(value))
        yield delimiter.join((key, text))


def write_divergence_files(
    stats: DivergenceStats,
    stats_path: Path | str,
    summary_path: Path | str,
    *,
    delimiter: str = "\t",
) -> None:
    Path(stats_path).write_text("\n".join(stats_lines(stats, delimiter=delimiter)) + "\n", encoding="utf-8")
    Path(summary_path).write_text("\n".join(summary_lines(stats, delimiter=delimiter)) + "\n", encoding="utf-8")


def read_stats_file(path: Path | str, *, delimiter: str = "\t") -> list[dict[str, str]]:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines or tuple(lines[0].split(delimiter)) != STATS_COLUMNS:
        raise SimulationError(f"not a divergence stats file: {path}")
    rows = []
    for line in lines[1:]:
        if line:
            rows.append(dict(zip(STATS_COLUMNS, line.split(delimiter))))
    return rows
