"""The figure renderers: each consumes CLI artifacts and writes one image."""

from __future__ import annotations

from dataclasses import dataclass, field
from math import sqrt
from pathlib import Path

import numpy as np

from .io import InputFormatError, read_cdf_table, read_csv_columns, read_sample_batch
from .style import apply_style, load_style, save_figure

import matplotlib.pyplot as plt


@dataclass(frozen=True)
class FigureSpec:
    figure: str
    inputs: tuple[str, ...]
    output: str
    style: dict = field(default_factory=load_style)

    def __post_init__(self):
        missing = [p for p in self.inputs if not Path(p).exists()]
        if missing:
            raise InputFormatError(f"missing input files: {missing}")


def fig_radial_cdf_overlay(spec: FigureSpec):
    fig, ax = plt.subplots(figsize=spec.style["figsize"])
    tables = sorted((read_cdf_table(p) for p in spec.inputs), key=lambda t: t["dim"])
    for color, t in zip(spec.style["palette"], tables):
        if t["kind"] != "radial":
            raise InputFormatError(f"radial overlay needs radial tables, got {t['kind']}")
        n = t["dim"]
        mu = 1.0 / n + t["knots"] ** 2
        ax.plot(mu, t["values"], color=color, label=f"N = {n}")
    ax.set_xlabel("purity")
    ax.set_ylabel("cumulative probability")
    ax.set_xlim(0.0, 1.0)
    ax.set_ylim(0.0, 1.02)
    ax.legend(loc="lower right")
    return fig


def _triangle_vertices_n3() -> np.ndarray:
    # pure-state vertices of the eigenvalue triangle in the in-plane basis
    s6, s2, s23 = 1.0 / sqrt(6.0), 1.0 / sqrt(2.0), sqrt(2.0 / 3.0)
    return np.array([[s6, s2], [s6, -s2], [-s23, 0.0]])


def fig_n3_circles(spec: FigureSpec):
    fig, ax = plt.subplots(figsize=(spec.style["figsize"][0],) * 2)
    tri = _triangle_vertices_n3()
    closed = np.vstack([tri, tri[:1]])
    ax.plot(closed[:, 0], closed[:, 1], color="0.3", lw=1.0)
    # ordered-chamber wedge: center, embedded two-level mixed state, pure vertex
    wedge = np.array([[0.0, 0.0], [1.0 / sqrt(6.0), 0.0], [1.0 / sqrt(6.0), 1.0 / sqrt(2.0)],
                      [0.0, 0.0]])
    ax.plot(wedge[:, 0], wedge[:, 1], color="0.6", lw=0.8)
    for color, path in zip(spec.style["palette"] * 4, spec.inputs):
        batch = read_sample_batch(path)
        if batch["dim"] != 3:
            raise InputFormatError(f"{path}: n3-circles needs dim-3 batches")
        x = batch["r"] * np.cos(batch["phi2"])
        y = batch["r"] * np.sin(batch["phi2"])
        ax.scatter(x, y, s=spec.style["marker_size"], color=color,
                   alpha=spec.style["scatter_alpha"], linewidths=0,
                   label=f"purity {batch['mu']:g}")
    ax.set_aspect("equal")
    ax.set_xlabel("in-plane coordinate 1")
    ax.set_ylabel("in-plane coordinate 2")
    ax.legend(loc="upper left", fontsize=spec.style["font_size"] - 2)
    return fig


def fig_ent_vs_purity(spec: FigureSpec):
    fig, ax = plt.subplots(figsize=spec.style["figsize"])
    for path in spec.inputs:
        cols = read_csv_columns(path, ("mu", "concurrence"))
        mus = cols["mu"]
        ax.scatter(mus, cols["concurrence"], s=spec.style["marker_size"],
                   alpha=spec.style["scatter_alpha"], linewidths=0, color=spec.style["palette"][0])
        uniq = np.unique(mus)
        peaks = [cols["concurrence"][mus == m].max() for m in uniq]
        ax.plot(uniq, peaks, "--", color="black", lw=1.0, label="max per purity")
        if "ln" in cols:
            peaks_ln = [cols["ln"][mus == m].max() for m in uniq]
            ax.plot(uniq, peaks_ln, "--", color="0.5", lw=1.0, label="max log-negativity")
    ax.set_xlabel("joint purity")
    ax.set_ylabel("concurrence")
    ax.set_xlim(0.2, 1.02)
    ax.legend(loc="upper left")
    return fig


def fig_cqc_triangles(spec: FigureSpec):
    cols = read_csv_columns(spec.inputs[0], ("mu", "cmi_zx", "qmi"))
    for extra in spec.inputs[1:]:
        more = read_csv_columns(extra, ("mu", "cmi_zx", "qmi"))
        cols = {k: np.concatenate([cols[k], more[k]]) for k in ("mu", "cmi_zx", "qmi")}
    mus = np.unique(cols["mu"])
    ncol = min(len(mus), 5)
    nrow = (len(mus) + ncol - 1) // ncol
    fig, axes = plt.subplots(nrow, ncol, figsize=(2.2 * ncol, 2.2 * nrow),
                             squeeze=False, sharex=True, sharey=True)
    tri = np.array([[0.0, 0.0], [0.0, 2.0], [2.0, 2.0], [0.0, 0.0]])
    for ax, mu in zip(axes.ravel(), mus):
        sel = cols["mu"] == mu
        ax.plot(tri[:, 0], tri[:, 1], color="0.4", lw=1.0)
        ax.scatter(cols["cmi_zx"][sel], cols["qmi"][sel], s=spec.style["marker_size"],
                   alpha=spec.style["scatter_alpha"], linewidths=0,
                   color=spec.style["palette"][0])
        ax.set_title(f"purity {mu:g}", fontsize=spec.style["font_size"])
        ax.set_xlim(-0.1, 2.1)
        ax.set_ylim(-0.1, 2.1)
    for ax in axes.ravel()[len(mus):]:
        ax.axis("off")
    for ax in axes[-1, :]:
        ax.set_xlabel("classical MI (two unbiased pairs)")
    for ax in axes[:, 0]:
        ax.set_ylabel("quantum MI")
    fig.tight_layout()
    return fig


def fig_induced_curves(spec: FigureSpec):
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(spec.style["figsize"][0] * 1.6,
                                                  spec.style["figsize"][1]))
    for color, path in zip(spec.style["palette"], spec.inputs):
        cols = read_csv_columns(path, ("mu", "pdf", "cdf"))
        label = Path(path).stem.replace("induced_", "")
        ax1.plot(cols["mu"], cols["pdf"], color=color, label=label)
        ax2.plot(cols["mu"], cols["cdf"], color=color, label=label)
    ax1.set_xlabel("purity")
    ax1.set_ylabel("density")
    ax2.set_xlabel("purity")
    ax2.set_ylabel("cumulative")
    ax2.legend(loc="lower right", fontsize=spec.style["font_size"] - 1)
    fig.tight_layout()
    return fig


def fig_max_qmi_curve(spec: FigureSpec):
    fig, ax = plt.subplots(figsize=spec.style["figsize"])
    cols = read_csv_columns(spec.inputs[0], ("mu", "max_qmi"))
    ax.plot(cols["mu"], cols["max_qmi"], color="black", label="purity-constrained ceiling")
    ax.plot([0.25, 1.0], [0.0, 2.0], "--", color="0.6", lw=1.0, label="linear trend")
    ax.set_xlabel("joint purity")
    ax.set_ylabel("quantum MI bound")
    ax.legend(loc="upper left")
    return fig


FIGURES = {
    "radial-cdf-overlay": fig_radial_cdf_overlay,
    "n3-circles": fig_n3_circles,
    "ent-vs-purity": fig_ent_vs_purity,
    "cqc-triangles": fig_cqc_triangles,
    "induced-curves": fig_induced_curves,
    "max-qmi-curve": fig_max_qmi_curve,
}


def make_figure(spec: FigureSpec) -> Path:
    """Render one figure spec to its output path (PNG or SVG)."""
    if spec.figure not in FIGURES:
        raise InputFormatError(f"unknown figure {spec.figure!r}; choose from {sorted(FIGURES)}")
    apply_style(spec.style)
    fig = FIGURES[spec.figure](spec)
    return save_figure(fig, spec.output, spec.style)
