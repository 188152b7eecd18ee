"""Pinned plotting style and deterministic figure output."""

from __future__ import annotations

import json
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

DEFAULT_STYLE = {
    "figsize": [6.0, 4.5],
    "dpi": 130,
    "font_size": 9,
    "line_width": 1.4,
    "marker_size": 5.0,
    "scatter_alpha": 0.45,
    "grid": True,
    "palette": ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"],
}


def load_style(path: str | Path | None = None) -> dict:
    style = dict(DEFAULT_STYLE)
    if path is not None:
        style.update(json.loads(Path(path).read_text()))
    return style


def apply_style(style: dict) -> None:
    plt.rcParams.update({
        "font.size": style["font_size"],
        "lines.linewidth": style["line_width"],
        "axes.grid": style["grid"],
        "grid.alpha": 0.3,
        "svg.hashsalt": "fixedpurity-figures",  # deterministic svg ids
        "figure.dpi": style["dpi"],
    })


def save_figure(fig, out_path: str | Path, style: dict) -> Path:
    """Write PNG or SVG with no embedded timestamps (byte-stable reruns)."""
    out_path = Path(out_path)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    kwargs = {"dpi": style["dpi"]}
    if out_path.suffix.lower() == ".svg":
        kwargs["metadata"] = {"Date": None}
    fig.savefig(out_path, **kwargs)
    plt.close(fig)
    return out_path
