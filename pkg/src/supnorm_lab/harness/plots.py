"""Optional SVG line plots of trajectory norms (needs matplotlib)."""

from __future__ import annotations

from pathlib import Path


def write_norm_plots(series, out_dir, columns=("linf", "l1")) -> list:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    paths = []
    for col in columns:
        fig, ax = plt.subplots(figsize=(6, 3.5))
        ax.plot(series.times, series.column(col), lw=1.2)
        ax.set_xlabel("t")
        ax.set_ylabel(col)
        ax.grid(alpha=0.3)
        fig.tight_layout()
        path = Path(out_dir) / f"{col}.svg"
        # fixed metadata keeps the SVG reproducible
        fig.savefig(path, format="svg", metadata={"Date": None})
        plt.close(fig)
        paths.append(path)
    return paths
