"""Matplotlib report figures rendered next to the ranked CSV output.

Figures are a reporting convenience only; nothing in the ranking pipeline
depends on them. matplotlib is imported lazily so plain ranking runs do not
pay for it.
"""

from __future__ import annotations

from pathlib import Path
from typing import TYPE_CHECKING

if TYPE_CHECKING:  # pragma: no cover
    from .corpus import Corpus
    from .ranking import RankingResult

MAX_HEATMAPS = 16


def render_figures(corpus: "Corpus", result: "RankingResult", out_dir: Path) -> list[Path]:
    """Render the score chart and per-class distance heatmaps as PNG files."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    import numpy as np

    out_dir.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []

    entries = result.ranked.entries
    fig, ax = plt.subplots(figsize=(max(6.0, 0.6 * len(entries)), 4.0))
    positions = [e.position for e in entries]
    heights = [float(e.score.fraction) if e.score is not None and e.score.is_finite else 0.0
               for e in entries]
    colors = ["#777777" if e.provenance == "W" else "#3b6ea5" for e in entries]
    ax.bar(positions, heights, color=colors)
    for e in entries:
        label = f"p{e.patch_id}" + (" (W)" if e.provenance == "W" else "")
        ax.text(e.position, 0.02, label, rotation=90, ha="center", va="bottom",
                color="white", fontsize=8)
    ax.set_xlabel("final position")
    ax.set_ylabel("average rank score (lower is better)")
    ax.set_title("patch ranking")
    ax.set_xticks(positions)
    fig.tight_layout()
    path = out_dir / "ranking_scores.png"
    fig.savefig(path, dpi=120)
    plt.close(fig)
    written.append(path)

    for index, matrix in enumerate(result.matrices[:MAX_HEATMAPS]):
        if not matrix.tests:
            continue
        values = np.array(
            [[float(cell.fraction) if cell.is_finite else np.nan for cell in row]
             for row in matrix.entries])
        masked = np.ma.masked_invalid(values)
        fig, ax = plt.subplots(
            figsize=(max(4.0, 0.9 * len(matrix.tests)), max(3.0, 0.5 * len(matrix.patch_ids))))
        cmap = plt.get_cmap("viridis").copy()
        cmap.set_bad("#222222")
        image = ax.imshow(masked, cmap=cmap, aspect="auto")
        ax.set_xticks(range(len(matrix.tests)))
        ax.set_xticklabels([t.rsplit(".", 1)[-1] for t in matrix.tests],
                           rotation=45, ha="right", fontsize=8)
        ax.set_yticks(range(len(matrix.patch_ids)))
        ax.set_yticklabels([f"p{pid}" for pid in matrix.patch_ids], fontsize=8)
        if values.size <= 144:
            for i, row in enumerate(matrix.entries):
                for j, cell in enumerate(row):
                    ax.text(j, i, str(cell), ha="center", va="center",
                            color="white", fontsize=7)
        fig.colorbar(image, ax=ax, label="avg state distance")
        ax.set_title(f"class S{index}: original vs patched state distance")
        fig.tight_layout()
        path = out_dir / f"class{index}_distance_matrix.png"
        fig.savefig(path, dpi=120)
        plt.close(fig)
        written.append(path)
    return written
