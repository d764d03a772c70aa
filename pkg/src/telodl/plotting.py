"""Render sweep results to figure files next to the CSV output.

One figure per metric (hitting time and stability), with one line per
(algorithm, resource count, method) series. When the sweep varied
epsilon the x-axis is epsilon on a log scale; when it varied the player
count the x-axis is K. Hitting times are drawn on a log y-axis.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402 - backend must be set first

_METRIC_TITLES = {
    "efht": "Expected first hitting time (iterations)",
    "alpha": "Fraction of time in the collision-free state",
}


def _series_key(row: dict) -> tuple:
    return (row["algo"], row["N"], row["method"])


def render_sweep_figures(rows: list[dict], out_csv: str | Path) -> list[Path]:
    """Write <csv-stem>_efht.png and <csv-stem>_alpha.png next to the CSV.

    NA-valued rows (failed cells) are skipped. Returns the figure paths.
    """
    out_csv = Path(out_csv)
    numeric = [r for r in rows if r["value"] != "NA"]
    eps_values = sorted({float(r["epsilon"]) for r in numeric})
    by_eps = len(eps_values) > 1
    written: list[Path] = []
    for metric in ("efht", "alpha"):
        data = [r for r in numeric if r["metric"] == metric]
        if not data:
            continue
        fig, ax = plt.subplots(figsize=(6.0, 4.0))
        for key in sorted({_series_key(r) for r in data}):
            series = [r for r in data if _series_key(r) == key]
            if by_eps:
                series.sort(key=lambda r: float(r["epsilon"]))
                xs = [float(r["epsilon"]) for r in series]
            else:
                series.sort(key=lambda r: int(r["K"]))
                xs = [int(r["K"]) for r in series]
            ys = [float(r["value"]) for r in series]
            algo, n, method = key
            label = f"{algo.upper()} N={n} ({method})"
            style = "o-" if method == "approx" else "s--"
            ax.plot(xs, ys, style, label=label, markersize=4)
        if by_eps:
            ax.set_xscale("log")
            ax.set_xlabel("experimentation probability")
        else:
            ax.set_xlabel("players K")
        if metric == "efht":
            ax.set_yscale("log")
        ax.set_ylabel(_METRIC_TITLES[metric])
        ax.grid(True, which="both", alpha=0.3)
        ax.legend(fontsize=8)
        fig.tight_layout()
        path = out_csv.with_name(f"{out_csv.stem}_{metric}.png")
        fig.savefig(path, dpi=150)
        plt.close(fig)
        written.append(path)
    return written
