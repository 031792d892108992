"""Deterministic SVG rendering of the four figure kinds.

Rendering is a pure function of the CSV content: a fixed style, a fixed
SVG hash salt, and stripped timestamp metadata make re-runs byte-identical
for the same inputs and library versions.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import matplotlib

matplotlib.use("svg")

import matplotlib.pyplot as plt

from .io import ConvergenceSweep, MissingColumnError, Table, read_convergence, read_table

__all__ = ["FigureSpec", "MissingColumnError", "render", "FIGURE_KINDS"]

_STYLE = {
    "svg.hashsalt": "fractransport-plots",
    "svg.fonttype": "none",  # keep annotations as searchable text
    "figure.dpi": 100,
    "font.size": 9,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "lines.linewidth": 1.2,
}


@dataclass(frozen=True)
class FigureSpec:
    """One figure request: kind, input CSVs, output path, optional labels."""

    kind: str
    inputs: tuple[str, ...]
    output: str
    labels: tuple[str, ...] = ()

    def __post_init__(self):
        if self.kind not in FIGURE_KINDS:
            raise ValueError(
                f"unknown figure kind {self.kind!r}; expected one of {sorted(FIGURE_KINDS)}"
            )
        if not self.inputs:
            raise ValueError("at least one input CSV is required")
        if self.labels and len(self.labels) != len(self.inputs):
            raise ValueError(
                f"got {len(self.labels)} labels for {len(self.inputs)} inputs"
            )


def _label(spec: FigureSpec, index: int, fallback: str) -> str:
    return spec.labels[index] if spec.labels else fallback


def _panel_title(table: Table) -> str:
    bits = []
    if "kind" in table.meta:
        bits.append(table.meta["kind"].replace("_", " "))
    if "p" in table.meta:
        bits.append(f"p = {table.meta['p']}")
    if "alpha" in table.meta:
        bits.append(f"alpha = {table.meta['alpha']}")
    return ", ".join(bits)


def _render_pdf_panel(spec: FigureSpec, fig) -> None:
    """Numeric vs analytic density, one panel per input CSV."""
    n = len(spec.inputs)
    axes = fig.subplots(1, n, sharey=True, squeeze=False)[0]
    for i, (path, ax) in enumerate(zip(spec.inputs, axes)):
        table = read_table(path)
        x = table.column(path, "x")
        ax.plot(x, table.column(path, "numeric"), label="numeric")
        ax.plot(x, table.column(path, "analytic"), "--", label="analytic")
        ax.set_xlabel("x")
        ax.set_title(_label(spec, i, _panel_title(table)))
        if i == 0:
            ax.set_ylabel("density")
            ax.legend()
    fig.set_size_inches(3.2 * n, 3.0)


def _render_mass_trace(spec: FigureSpec, fig) -> None:
    """Discrete mass over time for both scheme variants, one curve each."""
    ax = fig.subplots()
    for i, path in enumerate(spec.inputs):
        table = read_table(path)
        t = table.column(path, "t")
        suffix = f" [{_label(spec, i, '')}]" if spec.labels else ""
        ax.plot(t, table.column(path, "standard"), label="standard" + suffix)
        ax.plot(
            t,
            table.column(path, "advanced_source"),
            label="advanced source" + suffix,
        )
    ax.axhline(1.0, color="black", linewidth=0.8, linestyle=":")
    ax.set_xlabel("t")
    ax.set_ylabel("discrete mass")
    ax.legend()
    fig.set_size_inches(4.8, 3.2)


def _render_loglog_convergence(spec: FigureSpec, fig) -> None:
    """Error vs mesh size in log-log scale, fitted slope quoted verbatim."""
    ax = fig.subplots()
    for i, path in enumerate(spec.inputs):
        for sweep in read_convergence(path):
            label = _label(
                spec, i, f"alpha={sweep.alpha_text} ({sweep.norm_kind})"
            )
            ax.loglog(
                sweep.h,
                sweep.error,
                marker="o",
                markersize=3,
                label=f"{label}, slope {sweep.slope_text}",
            )
    ax.set_xlabel("h")
    ax.set_ylabel("error")
    ax.legend(fontsize=7)
    fig.set_size_inches(4.8, 3.6)


def _render_kernel_profile(spec: FigureSpec, fig) -> None:
    """The kernel G_1 across the light cone, mass residual in the title."""
    ax = fig.subplots()
    for i, path in enumerate(spec.inputs):
        table = read_table(path)
        ax.plot(
            table.column(path, "x"),
            table.column(path, "G1"),
            label=_label(spec, i, _panel_title(table)),
        )
        if "mass" in table.meta and "expected_mass" in table.meta:
            residual = float(table.meta["mass"]) - float(table.meta["expected_mass"])
            ax.set_title(f"mass residual {residual:.3e}")
    for edge in (-1.0, 1.0):
        ax.axvline(edge, color="gray", linewidth=0.8, linestyle=":")
    ax.set_xlabel("x")
    ax.set_ylabel("G_1(x)")
    ax.legend()
    fig.set_size_inches(4.8, 3.2)


FIGURE_KINDS = {
    "pdf_panel": _render_pdf_panel,
    "mass_trace": _render_mass_trace,
    "loglog_convergence": _render_loglog_convergence,
    "kernel_profile": _render_kernel_profile,
}


def render(spec: FigureSpec) -> None:
    """Render the figure to ``spec.output`` as deterministic SVG."""
    with plt.rc_context(_STYLE):
        fig = plt.figure()
        try:
            FIGURE_KINDS[spec.kind](spec, fig)
            fig.savefig(
                spec.output,
                format="svg",
                metadata={"Date": None, "Creator": None},
                bbox_inches="tight",
            )
        finally:
            plt.close(fig)
