"""Static SVG figures from result CSVs."""

from __future__ import annotations

from collections import defaultdict

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .experiment import CSV_COLUMNS, SERIES_COLUMNS, read_csv  # noqa: E402

PLOT_KINDS = ("cp-vs-tdelta", "cp-vs-success", "de-vs-tdelta", "coherence-vs-time")


def _means(rows, x_key, y_key):
    """Ensemble means of ``y_key`` per (order, t_delta), with the mean of ``x_key``."""
    groups = defaultdict(list)
    for r in rows:
        groups[(int(r["order_l"]), float(r["t_delta"]))].append(r)
    by_order = defaultdict(list)
    for (order, td), rs in sorted(groups.items()):
        xs = [float(r[x_key]) for r in rs]
        ys = [float(r[y_key]) for r in rs]
        by_order[order].append((float(np.mean(xs)), float(np.mean(ys))))
    return by_order


def _label(order: int) -> str:
    return "no CD" if order == 0 else f"order {order}"


def plot_results(csv_path, kind: str, out_path) -> str:
    """Write one SVG for ``kind``; returns the output path.

    ``coherence-vs-time`` expects the per-sample series CSV, the other kinds
    the result CSV.
    """
    if kind not in PLOT_KINDS:
        raise ValueError(f"unknown plot kind {kind!r}; choose from {PLOT_KINDS}")
    columns = SERIES_COLUMNS if kind == "coherence-vs-time" else CSV_COLUMNS
    rows = read_csv(csv_path, columns)

    with matplotlib.rc_context({"svg.hashsalt": "cdqc"}):
        return _draw(rows, kind, out_path)


def _draw(rows, kind, out_path) -> str:
    fig, ax = plt.subplots(figsize=(5, 3.6))
    if kind == "coherence-vs-time":
        curves = defaultdict(list)
        for r in rows:
            curves[(int(r["order_l"]), float(r["t_delta"]), r["instance_seed"])].append(
                (float(r["gap_t"]), float(r["C_re"])))
        for (order, td, seed), pts in sorted(curves.items()):
            pts.sort()
            ax.plot(*zip(*pts), label=f"{_label(order)}, T$\\Delta$={td:g}")
        ax.set_xlabel(r"$\Delta t$")
        ax.set_ylabel(r"$C_{re}$ (bits)")
    else:
        x_key, y_key, xlabel, ylabel, logx = {
            "cp-vs-tdelta": ("t_delta", "C_P", r"$T\Delta$", r"$C_P$ (bits)", True),
            "cp-vs-success": ("p_success", "C_P", "success probability", r"$C_P$ (bits)", False),
            "de-vs-tdelta": ("t_delta", "dE_avg", r"$T\Delta$", r"$\Delta\bar{E}$", True),
        }[kind]
        for order, pts in sorted(_means(rows, x_key, y_key).items()):
            ax.plot(*zip(*pts), marker="o", ms=3, label=_label(order))
        if logx:
            ax.set_xscale("log")
        ax.set_xlabel(xlabel)
        ax.set_ylabel(ylabel)
    ax.legend(fontsize=7)
    fig.tight_layout()
    # fixed metadata and id salt keep the SVG bytes reproducible
    fig.savefig(out_path, format="svg", metadata={"Date": None})
    plt.close(fig)
    return str(out_path)
