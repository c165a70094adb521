"""Figure templates: which columns/metadata each one needs and how it draws.

A template never computes a plotted value.  Curves come from table columns,
reference lines from metadata, and the two fig9 offsets are metadata values
added verbatim to the curves they belong to.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Callable

from .errors import SchemaError
from .table import Table


@dataclass(frozen=True)
class Template:
    template_id: str
    description: str
    source: str                       # scenario whose CSV this template reads
    columns: tuple[str, ...]
    metadata: tuple[str, ...]
    draw: Callable[[object, Table], None]
    figsize: tuple[float, float] = (6.0, 3.6)
    # families: (regex, human description); at least one column must match each
    column_families: tuple[tuple[str, str], ...] = field(default=())


def validate(template: Template, table: Table) -> None:
    """Raise SchemaError spelling out the full expected schema on any gap."""
    problems = []
    missing_cols = [c for c in template.columns if c not in table.columns]
    if missing_cols:
        problems.append(f"missing columns: {', '.join(missing_cols)}")
    for pattern, what in template.column_families:
        if not any(re.fullmatch(pattern, c) for c in table.columns):
            problems.append(f"no column matching {pattern} ({what})")
    missing_meta = [k for k in template.metadata if k not in table.metadata]
    if missing_meta:
        problems.append(f"missing metadata keys: {', '.join(missing_meta)}")
    if not table.rows:
        problems.append("table has no data rows")
    if problems:
        families = "".join(f", {p} ({what})"
                           for p, what in template.column_families)
        raise SchemaError(
            f"{table.path}: not usable for template {template.template_id}: "
            + "; ".join(problems)
            + f". Expected columns: {', '.join(template.columns)}{families}. "
            + f"Expected metadata: {', '.join(template.metadata)}. "
            + f"(source scenario: {template.source})")


def _legend(ax):
    ax.legend(frameon=False, loc="best")


def _draw_expansion(fig, t: Table) -> None:
    ax = fig.subplots()
    ax.plot(t.column("t"), t.column("s_pos"), label="s_pos")
    ax.axhline(t.ref("s_max"), ls=":", color="0.35", label="s_max")
    ax.axhline(t.ref("s_canonical"), ls="--", color="tab:green",
               label="s_canonical")
    ax.set_xlabel("t")
    ax.set_ylabel("entropy")
    _legend(ax)


def _draw_quench_panels(fig, t: Table) -> None:
    top, bottom = fig.subplots(2, 1, sharex=True)
    ref = t.ref("s_reference")
    top.plot(t.column("t"), t.column("s_f"), label="s_f")
    bottom.plot(t.column("t"), t.column("s_xe"), color="tab:orange",
                label="s_xe")
    for ax in (top, bottom):
        ax.axhline(ref, ls="--", color="tab:green", label="s_reference")
        _legend(ax)
    top.set_ylabel("s_f")
    bottom.set_ylabel("s_xe")
    bottom.set_xlabel("t")


def _draw_entanglement(fig, t: Table) -> None:
    ax = fig.subplots()
    ax.plot(t.column("t"), t.column("s_ent_left"), label="s_ent_left")
    ax.plot(t.column("t"), t.column("s_ent_right"), label="s_ent_right")
    ax.axhline(t.ref("s_canonical"), ls="--", color="tab:green",
               label="s_canonical")
    ax.axhline(t.ref("s_ent_reference"), ls=":", color="0.35",
               label="s_ent_reference")
    ax.set_xlabel("t")
    ax.set_ylabel("entanglement entropy")
    _legend(ax)


def _draw_pure_thermal(fig, t: Table) -> None:
    ax = fig.subplots()
    ts = t.column("t")
    switch = t.ref("switch_time")
    ax.plot(ts, t.column("s_f"), label="s_f")
    ax.plot(ts, t.column("s_xe"), label="s_xe")
    ax.plot(ts, t.column("s_diag"), label="s_diag")
    ax.hlines(t.ref("s_canonical_pre"), ts[0], switch, ls="--",
              color="tab:green", label="s_canonical_pre")
    ax.hlines(t.ref("s_canonical_post"), switch, ts[-1], ls="--",
              color="tab:red", label="s_canonical_post")
    ax.axvline(switch, color="0.7", lw=0.8)
    ax.set_xlabel("t")
    ax.set_ylabel("entropy")
    _legend(ax)


def _draw_entropy_vs_energy(fig, t: Table) -> None:
    axes = fig.subplots(1, 2, sharey=True)
    energy = t.column("energy")
    for ax, family in zip(axes, ("s_f", "s_xe")):
        ax.plot(energy, t.column("s_micro"), ls=":", color="0.4",
                label="s_micro")
        ax.plot(energy, t.column("s_canonical"), ls="--", color="tab:green",
                label="s_canonical")
        for kind, marker in (("eigenstate", "o"), ("ps", "s"), ("micro", "^")):
            ax.plot(energy, t.column(f"{family}_{kind}"), marker=marker,
                    ms=3, lw=1.0, label=f"{family}_{kind}")
        ax.set_xlabel("energy")
        ax.set_title(family)
        _legend(ax)
    axes[0].set_ylabel("entropy")


def _draw_binned_chain(fig, t: Table) -> None:
    ax = fig.subplots()
    ts = t.column("t")
    ax.plot(ts, t.column("s_pos"), color="0.2", label="s_pos")
    binned = sorted((c for c in t.columns if re.fullmatch(r"s_ex_m\d+", c)),
                    key=lambda c: int(c[len("s_ex_m"):]))
    for col in binned:
        ax.plot(ts, t.column(col), lw=1.0, label=col)
    ax.axhline(t.ref("s_canonical"), ls="--", color="tab:green",
               label="s_canonical")
    ax.set_xlabel("t")
    ax.set_ylabel("entropy")
    _legend(ax)


def _draw_adjusted_offsets(fig, t: Table) -> None:
    ax = fig.subplots()
    energy = t.column("energy")
    gauss = t.ref("gaussian_amplitude_deficit")
    expo = t.ref("exponential_weight_deficit")
    ax.plot(energy, t.column("s_f_micro"), marker="^", ms=3, lw=1.0,
            label="s_f_micro")
    ax.plot(energy, [v + gauss for v in t.column("s_f_eigenstate")],
            marker="o", ms=3, lw=1.0,
            label="s_f_eigenstate + gaussian_amplitude_deficit")
    ax.plot(energy, [v + gauss - expo for v in t.column("s_f_ps")],
            marker="s", ms=3, lw=1.0,
            label="s_f_ps + gaussian - exponential deficits")
    ax.plot(energy, t.column("s_micro"), ls=":", color="0.4",
            label="s_micro")
    ax.set_xlabel("energy")
    ax.set_ylabel("entropy")
    _legend(ax)


TEMPLATES: dict[str, Template] = {
    tpl.template_id: tpl for tpl in (
        Template(
            template_id="fig2",
            description="positional entropy growth after a wall release",
            source="expansion",
            columns=("t", "s_pos"),
            metadata=("s_max", "s_canonical"),
            draw=_draw_expansion,
        ),
        Template(
            template_id="fig4",
            description="block-energy and position+energy entropies vs time",
            source="eigenstate_quench",
            columns=("t", "s_f", "s_xe"),
            metadata=("s_reference",),
            draw=_draw_quench_panels,
            figsize=(6.0, 4.6),
        ),
        Template(
            template_id="fig5",
            description="half-chain entanglement entropy vs time",
            source="entanglement",
            columns=("t", "s_ent_left", "s_ent_right"),
            metadata=("s_canonical", "s_ent_reference"),
            draw=_draw_entanglement,
        ),
        Template(
            template_id="fig6",
            description="entropies across a mid-run wall release with "
                        "pre/post canonical references",
            source="pure_thermal",
            columns=("t", "s_f", "s_xe", "s_diag"),
            metadata=("switch_time", "s_canonical_pre", "s_canonical_post"),
            draw=_draw_pure_thermal,
        ),
        Template(
            template_id="fig7",
            description="equilibrium entropies vs energy, one panel per "
                        "entropy family",
            source="entropy_vs_energy",
            columns=("energy", "s_micro", "s_canonical",
                     "s_f_eigenstate", "s_f_ps", "s_f_micro",
                     "s_xe_eigenstate", "s_xe_ps", "s_xe_micro"),
            metadata=(),
            draw=_draw_entropy_vs_energy,
            figsize=(7.5, 3.4),
        ),
        Template(
            template_id="fig8",
            description="energy-binned chain entropies vs time for several "
                        "bin counts",
            source="s_ex_bins",
            columns=("t", "s_pos"),
            metadata=("s_canonical",),
            draw=_draw_binned_chain,
            column_families=((r"s_ex_m\d+", "one per bin count M"),),
        ),
        Template(
            template_id="fig9",
            description="block-energy entropies vs energy after adding the "
                        "window-width offsets shipped in metadata",
            source="entropy_vs_energy",
            columns=("energy", "s_micro",
                     "s_f_eigenstate", "s_f_ps", "s_f_micro"),
            metadata=("gaussian_amplitude_deficit",
                      "exponential_weight_deficit"),
            draw=_draw_adjusted_offsets,
        ),
    )
}


def template_ids() -> tuple[str, ...]:
    return tuple(TEMPLATES)
