"""Optional matplotlib rendering for verify/search reports.

Figures are written next to the delimited output when a plot path is given;
matplotlib is imported lazily so the core library carries no plotting
dependency.
"""

from __future__ import annotations

from pathlib import Path


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def render_verify_figure(report, path: str | Path) -> None:
    """Per-instance ratios against the bound ceiling."""
    plt = _pyplot()
    xs = [row.index for row in report.rows]
    ratios = [float(row.ratio) for row in report.rows]
    bounds = [float(row.bound) for row in report.rows]
    fig, ax = plt.subplots(figsize=(8, 4.5))
    ax.plot(xs, ratios, ".", markersize=3, label="ratio")
    ax.plot(xs, bounds, "-", linewidth=1, color="tab:red", label="bound")
    ax.set_xlabel("instance index")
    ax.set_ylabel("distortion ratio")
    ax.set_title(f"{report.bound} over {report.checked} instances")
    ax.legend(loc="lower right")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def render_search_figure(report, path: str | Path) -> None:
    """Running worst ratio over the sampled instances."""
    plt = _pyplot()
    xs, best = [], []
    current = None
    for index, _, ratio in report.rows:
        value = float(ratio)
        current = value if current is None else max(current, value)
        xs.append(index)
        best.append(current)
    fig, ax = plt.subplots(figsize=(8, 4.5))
    ax.plot(xs, best, "-", linewidth=1.2)
    ax.set_xlabel("iteration")
    ax.set_ylabel("best ratio so far")
    ax.set_title(f"{report.mechanism.label()} {report.objective.value} worst-case search")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
