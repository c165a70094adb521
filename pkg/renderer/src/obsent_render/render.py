"""Build a figure from CSV input(s) and write it as SVG or PNG.

SVG output is byte-deterministic: a fixed hashsalt pins matplotlib's
generated element ids and the date field is stripped, so re-rendering the
same CSV yields the identical file.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import matplotlib
from matplotlib.figure import Figure

from .errors import HashMismatchError, RenderError
from .table import read_table
from .templates import TEMPLATES, template_ids, validate

_RC = {
    "svg.hashsalt": "obsent-render",
    "figure.dpi": 110,
    "savefig.dpi": 110,
    "font.size": 9,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "lines.linewidth": 1.3,
    "legend.fontsize": 8,
}


@dataclass(frozen=True)
class FigureSpec:
    template: str
    inputs: tuple[str | Path, ...]
    out: str | Path
    xlabel: str | None = None            # override the template's default
    ylabel: str | None = None


def render(spec: FigureSpec) -> Path:
    if spec.template not in TEMPLATES:
        raise RenderError(
            f"unknown template {spec.template!r}; "
            f"available: {', '.join(template_ids())}")
    template = TEMPLATES[spec.template]

    if not spec.inputs:
        raise RenderError("no input CSVs given")
    tables = [read_table(p) for p in spec.inputs]
    if len(tables) > 1:
        hashes = {t.metadata.get("config_hash", "<absent>") for t in tables}
        if len(hashes) > 1:
            pairs = ", ".join(
                f"{t.path}={t.metadata.get('config_hash', '<absent>')}"
                for t in tables)
            raise HashMismatchError(
                f"config_hash differs across inputs ({pairs}); figures must "
                f"come from one run")
    table = tables[0]
    validate(template, table)

    out = Path(spec.out)
    fmt = out.suffix.lstrip(".").lower()
    if fmt not in ("svg", "png"):
        raise RenderError(f"unsupported output format {out.suffix!r}; "
                          f"use .svg or .png")

    with matplotlib.rc_context(_RC):
        fig = Figure(figsize=template.figsize, constrained_layout=True)
        template.draw(fig, table)
        if spec.xlabel is not None:
            for ax in fig.axes:
                ax.set_xlabel(spec.xlabel)
        if spec.ylabel is not None:
            for ax in fig.axes:
                ax.set_ylabel(spec.ylabel)
        metadata = {"Date": None} if fmt == "svg" else None
        fig.savefig(out, format=fmt, metadata=metadata)
    return out
