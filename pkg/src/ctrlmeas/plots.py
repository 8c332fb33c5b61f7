"""Figure rendering for CLI reports.

Each function writes one PNG next to the delimited output and closes the
figure.  Non-interactive backend so rendering works headless.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def _heatmap(ax, table, title, vmin=None, vmax=None, cmap="viridis"):
    im = ax.imshow(np.asarray(table), cmap=cmap, vmin=vmin, vmax=vmax)
    ax.set_title(title, fontsize=9)
    ax.set_xlabel("b")
    ax.set_ylabel("a")
    return im


def save_joint_tables(tables, path) -> None:
    """Heatmaps of conditional joint tables, one panel per (theta, phi) setting.

    ``tables`` is a list of (label, d x d array).
    """
    n = len(tables)
    cols = min(n, 4)
    rows = (n + cols - 1) // cols
    fig, axes = plt.subplots(rows, cols, figsize=(3.2 * cols, 3.0 * rows), squeeze=False)
    vmax = max(float(np.max(t)) for _, t in tables)
    for ax in axes.ravel()[n:]:
        ax.axis("off")
    for ax, (label, table) in zip(axes.ravel(), tables):
        im = _heatmap(ax, table, label, vmin=0.0, vmax=vmax)
        fig.colorbar(im, ax=ax, fraction=0.046)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_complex_table(values, path, title="complex joint probability") -> None:
    """Side-by-side real and imaginary heatmaps of a complex d x d table."""
    values = np.asarray(values)
    bound = float(np.max(np.abs(values))) or 1.0
    fig, axes = plt.subplots(1, 2, figsize=(7.0, 3.2))
    for ax, part, name in ((axes[0], np.real(values), "Re"), (axes[1], np.imag(values), "Im")):
        im = _heatmap(ax, part, f"{name} {title}", vmin=-bound, vmax=bound, cmap="RdBu_r")
        fig.colorbar(im, ax=ax, fraction=0.046)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_state_comparison(reconstructed, path, truth=None) -> None:
    """Re/Im heatmaps of a reconstructed density matrix, with the truth when known."""
    panels = [("Re reconstructed", np.real(reconstructed)), ("Im reconstructed", np.imag(reconstructed))]
    if truth is not None:
        panels += [("Re true", np.real(truth)), ("Im true", np.imag(truth))]
    bound = max(float(np.max(np.abs(t))) for _, t in panels) or 1.0
    fig, axes = plt.subplots(1, len(panels), figsize=(3.4 * len(panels), 3.2))
    axes = np.atleast_1d(axes)
    for ax, (label, table) in zip(axes, panels):
        im = _heatmap(ax, table, label, vmin=-bound, vmax=bound, cmap="RdBu_r")
        fig.colorbar(im, ax=ax, fraction=0.046)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_histogram_counts(histograms, path) -> None:
    """Success/failure count heatmaps, one row per setting."""
    n = len(histograms)
    fig, axes = plt.subplots(n, 2, figsize=(6.8, 3.0 * n), squeeze=False)
    for row, hist in zip(axes, histograms):
        label = f"theta={hist.setting.theta:.4g}, phi={hist.setting.phi:.4g}"
        for ax, counts, name in (
            (row[0], hist.success_counts, "post-selected"),
            (row[1], hist.failure_counts, "discarded"),
        ):
            im = _heatmap(ax, counts, f"{name} ({label})")
            fig.colorbar(im, ax=ax, fraction=0.046)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_snr_curve(points, path) -> None:
    """Reconstruction RMS error versus measurement strength, with error bars."""
    thetas = [p.theta for p in points]
    errors = [p.rms_error for p in points]
    bars = [p.stderr for p in points]
    fig, ax = plt.subplots(figsize=(5.0, 3.4))
    ax.errorbar(thetas, errors, yerr=bars, marker="o", capsize=3)
    ax.set_xlabel("measurement strength theta (rad)")
    ax.set_ylabel("RMS error of Re table")
    ax.set_yscale("log")
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
