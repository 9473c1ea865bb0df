"""Figure rendering for the CLI report path.

Consumes the machine score document and the divergence stats rows (the same
artifacts written to disk), so figures can always be regenerated from the
delimited outputs alone. Uses the Agg backend; files only, no display.
"""

from __future__ import annotations

from pathlib import Path
from typing import Any, Mapping, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

FIG_DPI = 150


def _save(fig: "plt.Figure", path: Path) -> Path:
    fig.savefig(path, dpi=FIG_DPI, bbox_inches="tight")
    plt.close(fig)
    return path


def render_score_figures(document: Mapping[str, Any], out_dir: Path | str, stem: str = "score") -> list[Path]:
    """Per-paper ratio chart and, when several fields exist, a field chart."""
    out_dir = Path(out_dir)
    sc = document["score"]
    written: list[Path] = []

    trace = sc["trace"]
    ids = [line["id"] for line in trace]
    ratios = [float(line["ratio"]) if line["ratio"] is not None else 0.0 for line in trace]
    flagged = [line["ratio"] is None for line in trace]

    fig, ax = plt.subplots(figsize=(8, max(2.5, 0.35 * len(ids) + 1.2)))
    colors = ["#c44e52" if flag else "#4c72b0" for flag in flagged]
    ax.barh(range(len(ids)), ratios, color=colors)
    ax.set_yticks(range(len(ids)))
    ax.set_yticklabels(ids, fontsize=8)
    ax.invert_yaxis()
    ax.axvline(float(sc["globalized"]), color="#55a868", linestyle="--", label="globalized ratio")
    if sc["averaged"] is not None:
        ax.axvline(float(sc["averaged"]), color="#8172b2", linestyle=":", label="averaged ratio")
    ax.axvline(1.0, color="0.6", linewidth=0.8)
    ax.set_xlabel("citations / expected")
    ax.set_title(f"per-paper normalized impact: {sc['group_id']}")
    ax.legend(fontsize=8)
    written.append(_save(fig, out_dir / f"{stem}_ratios.png"))

    fields = sc["per_field"]
    if len(fields) > 1:
        names = [fs["category"] for fs in fields]
        glob = [float(fs["globalized"]) if fs["globalized"] is not None else 0.0 for fs in fields]
        avg = [float(fs["averaged"]) if fs["averaged"] is not None else 0.0 for fs in fields]
        positions = range(len(names))
        width = 0.38
        fig, ax = plt.subplots(figsize=(max(4.0, 1.2 * len(names)), 3.5))
        ax.bar([p - width / 2 for p in positions], glob, width, label="globalized", color="#55a868")
        ax.bar([p + width / 2 for p in positions], avg, width, label="averaged", color="#8172b2")
        ax.set_xticks(list(positions))
        ax.set_xticklabels(names, fontsize=8)
        ax.axhline(1.0, color="0.6", linewidth=0.8)
        ax.set_ylabel("normalized impact")
        ax.set_title(f"per-field breakdown: {sc['group_id']}")
        ax.legend(fontsize=8)
        written.append(_save(fig, out_dir / f"{stem}_fields.png"))
    return written


def render_divergence_figures(
    rows: Sequence[Mapping[str, str]],
    out_dir: Path | str,
    stem: str = "divergence",
) -> list[Path]:
    """Scatter of averaged vs globalized plus a histogram of the gaps."""
    out_dir = Path(out_dir)
    defined = [row for row in rows if row["averaged"] != "NA"]
    glob = [float(row["globalized"]) for row in defined]
    avg = [float(row["averaged"]) for row in defined]
    deltas = [float(row["delta"]) for row in defined]
    written: list[Path] = []

    fig, ax = plt.subplots(figsize=(4.5, 4.5))
    ax.scatter(glob, avg, s=12, alpha=0.6, color="#4c72b0")
    limit = max([1.0] + glob + avg) * 1.05
    ax.plot([0, limit], [0, limit], color="0.6", linewidth=0.8)
    ax.set_xlabel("globalized ratio")
    ax.set_ylabel("averaged ratio")
    ax.set_title("averaged vs globalized per group")
    written.append(_save(fig, out_dir / f"{stem}_scatter.png"))

    fig, ax = plt.subplots(figsize=(5.0, 3.4))
    ax.hist(deltas, bins=min(40, max(5, len(deltas) // 4 or 5)), color="#4c72b0")
    ax.axvline(0.0, color="0.4", linewidth=0.8)
    ax.set_xlabel("averaged minus globalized")
    ax.set_ylabel("groups")
    ax.set_title("divergence distribution")
    written.append(_save(fig, out_dir / f"{stem}_hist.png"))
    return written
