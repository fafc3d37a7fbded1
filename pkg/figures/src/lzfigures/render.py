"""Figure layouts.

Every plotted value is taken verbatim from a CSV cell; the only transforms
applied are axis scalings.  Rendering is deterministic: fixed backend, fixed
hash salt, no timestamps in the output metadata.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
matplotlib.rcParams["svg.hashsalt"] = "lzbath-figures"

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .reader import (RATES_COLUMNS, SWEEP_COLUMNS, TRAJECTORY_COLUMNS,
                     SchemaError, read_group)

FIGURE_IDS = ("fig2", "fig3", "fig4", "fig5", "fig6", "fig7")

_SERIES_COLORS = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                  "#8c564b", "#e377c2", "#7f7f7f"]


@dataclass(frozen=True)
class FigureSpec:
    """What to render: which figure, where its CSVs live, where to write."""

    figure: str
    csv_dir: str
    out_path: str

    def __post_init__(self):
        if self.figure not in FIGURE_IDS:
            raise ValueError(f"unknown figure id {self.figure!r}; expected one of {FIGURE_IDS}")


def _save(fig, out_path: str) -> str:
    path = Path(out_path)
    if path.parent and not path.parent.exists():
        path.parent.mkdir(parents=True, exist_ok=True)
    suffix = path.suffix.lower()
    if suffix == ".png":
        metadata = {"Software": "lzbath-figures"}
    elif suffix == ".pdf":
        metadata = {"CreationDate": None}
    elif suffix == ".svg":
        metadata = {"Date": None}
    else:
        metadata = None
    fig.savefig(path, dpi=150, metadata=metadata)
    plt.close(fig)
    return str(path)


def _label_pairs(labels, pattern: str, figure: str):
    groups = {}
    rx = re.compile(pattern)
    for label in labels:
        m = rx.fullmatch(label)
        if not m:
            raise SchemaError(f"{figure}: unrecognized CSV label {label!r}")
        groups[label] = m.groupdict()
    return groups


def _render_fig2(spec: FigureSpec) -> str:
    data = read_group(spec.csv_dir, spec.figure, RATES_COLUMNS)
    meta = _label_pairs(data, r"v(?P<v>[\d.]+)_T(?P<T>[\d.]+)", spec.figure)
    vs = sorted({m["v"] for m in meta.values()}, key=float)
    fig, axes = plt.subplots(1, len(vs), figsize=(4.2 * len(vs), 3.4), squeeze=False)
    for ax, v in zip(axes[0], vs):
        members = {lbl: d for lbl, d in data.items() if meta[lbl]["v"] == v}
        first = next(iter(members.values()))
        ax.plot(first["t_over_tauLZ"], first["alpha_abs"], "k--", label="|alpha_eg|")
        for i, (lbl, d) in enumerate(sorted(members.items(),
                                            key=lambda kv: float(meta[kv[0]]["T"]))):
            temperature = meta[lbl]["T"]
            color = _SERIES_COLORS[i % len(_SERIES_COLORS)]
            ax.plot(d["t_over_tauLZ"], d["Gamma_p"], color=color,
                    label=f"Gamma+ (T={temperature})")
            ax.plot(d["t_over_tauLZ"], d["Gamma_z"], color=color, linestyle="-.",
                    label=f"Gamma_z (T={temperature})")
        ax.set_xlim(-10.0, 10.0)
        ax.set_xlabel("t / tau_LZ")
        ax.set_title(f"v = {v}")
        ax.legend(fontsize=7)
    axes[0][0].set_ylabel("rate")
    fig.tight_layout()
    return _save(fig, spec.out_path)


def _render_fig3(spec: FigureSpec) -> str:
    data = read_group(spec.csv_dir, spec.figure, TRAJECTORY_COLUMNS)
    meta = _label_pairs(data, r"v(?P<v>[\d.]+)_T(?P<T>[\d.]+)_(?P<mode>\w+)", spec.figure)
    vs = sorted({m["v"] for m in meta.values()}, key=float)
    temps = sorted({m["T"] for m in meta.values()}, key=float, reverse=True)
    styles = {"full": "-", "no_nonadiabatic": "--", "no_dissipation": ":"}
    fig, axes = plt.subplots(len(vs), len(temps),
                             figsize=(4.6 * len(temps), 3.0 * len(vs)), squeeze=False)
    for i, v in enumerate(vs):
        for j, temperature in enumerate(temps):
            ax = axes[i][j]
            for lbl, d in sorted(data.items()):
                m = meta[lbl]
                if m["v"] != v or m["T"] != temperature:
                    continue
                style = styles.get(m["mode"], "-")
                ax.plot(d["t_over_tauLZ"], d["P_up"], "b" + style,
                        label=f"P_up {m['mode']}", linewidth=1.0)
                ax.plot(d["t_over_tauLZ"], d["P_down"], "r" + style,
                        label=f"P_down {m['mode']}", linewidth=1.0)
            ax.set_ylim(-0.05, 1.05)
            ax.set_title(f"v = {v}, T = {temperature}", fontsize=9)
            if i == len(vs) - 1:
                ax.set_xlabel("t / tau_LZ")
            if j == 0:
                ax.set_ylabel("population")
    axes[0][0].legend(fontsize=6)
    fig.tight_layout()
    return _save(fig, spec.out_path)


def _render_probability(spec: FigureSpec) -> str:
    data = read_group(spec.csv_dir, spec.figure, SWEEP_COLUMNS)
    meta = _label_pairs(data, r"T(?P<T>[\d.]+)", spec.figure)
    fig, ax = plt.subplots(figsize=(5.4, 4.0))
    first = next(iter(data.values()))
    order = first["v_over_eps2"].argsort()
    ax.semilogx(first["v_over_eps2"][order], first["P_lz_exact"][order], "k-",
                label="closed form")
    markers = ["o", "s", "^", "v", "D", "x", "+", "*"]
    for i, (lbl, d) in enumerate(sorted(data.items(),
                                        key=lambda kv: float(meta[kv[0]]["T"]))):
        ax.semilogx(d["v_over_eps2"], d["P_v"], markers[i % len(markers)],
                    color=_SERIES_COLORS[i % len(_SERIES_COLORS)],
                    markersize=4, linestyle="none", label=f"T = {meta[lbl]['T']}")
    ax.set_xlabel("v / eps^2")
    ax.set_ylabel("P(v)")
    ax.legend(fontsize=7)
    fig.tight_layout()
    return _save(fig, spec.out_path)


def _render_entropy(spec: FigureSpec, columns: list[str]) -> str:
    data = read_group(spec.csv_dir, spec.figure, SWEEP_COLUMNS)
    meta = _label_pairs(data, r"(?P<kind>vsweep|Tsweep)_(?:T(?P<T>[\d.]+)|v(?P<v>[\d.]+))",
                        spec.figure)
    v_sweeps = {lbl: d for lbl, d in data.items() if meta[lbl]["kind"] == "vsweep"}
    t_sweeps = {lbl: d for lbl, d in data.items() if meta[lbl]["kind"] == "Tsweep"}
    ncols = (1 if v_sweeps else 0) + (1 if t_sweeps else 0)
    fig, axes = plt.subplots(len(columns), ncols,
                             figsize=(5.2 * ncols, 3.2 * len(columns)), squeeze=False)
    for row, column in enumerate(columns):
        col = 0
        if v_sweeps:
            ax = axes[row][col]
            for i, (lbl, d) in enumerate(sorted(v_sweeps.items(),
                                                key=lambda kv: float(meta[kv[0]]["T"]))):
                ax.semilogx(d["v_over_eps2"], d[column], "o-", markersize=3,
                            color=_SERIES_COLORS[i % len(_SERIES_COLORS)],
                            label=f"T = {meta[lbl]['T']}")
            ax.set_xlabel("v / eps^2")
            ax.set_ylabel(column)
            ax.legend(fontsize=7)
            col += 1
        if t_sweeps:
            ax = axes[row][col]
            for i, (lbl, d) in enumerate(sorted(t_sweeps.items(),
                                                key=lambda kv: float(meta[kv[0]]["v"]))):
                ax.semilogx(d["T_over_eps"], d[column], "s-", markersize=3,
                            color=_SERIES_COLORS[i % len(_SERIES_COLORS)],
                            label=f"v = {meta[lbl]['v']}")
            ax.set_xlabel("T / eps")
            ax.set_ylabel(column)
            ax.legend(fontsize=7)
    fig.tight_layout()
    return _save(fig, spec.out_path)


def render(spec: FigureSpec) -> str:
    """Render one figure from its CSV inputs; returns the written path."""
    if spec.figure == "fig2":
        return _render_fig2(spec)
    if spec.figure == "fig3":
        return _render_fig3(spec)
    if spec.figure in ("fig4", "fig7"):
        return _render_probability(spec)
    if spec.figure == "fig5":
        return _render_entropy(spec, ["dS", "dS_e"])
    if spec.figure == "fig6":
        return _render_entropy(spec, ["dS_irr"])
    raise ValueError(f"unknown figure id {spec.figure!r}")
