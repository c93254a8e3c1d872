"""Figure presets and rendering over the sweep CSV schema.

The input files are the CSV datasets written by the `phonent` sweep CLI
(`phonent fig2` .. `phonent fig5`).  The contract is the CSV header:
a leading `axis` column plus named value columns (`e_pre`, `e_perfect`,
`e_gauss`, `e_imperfect_numeric`, `e_pert1`, `e_pert2`, `e_off`,
`e_on_numeric`, `e_on_average`, and `_mu<value>`-suffixed variants for
multi-efficiency presets), as described by `phonent manifest`.  Nothing
is recomputed here; rendering is read-only over the CSV and reruns are
idempotent.

Each preset maps a fixed list of columns to curves (label, color, style
class).  Curve styles follow the house convention for these figures:
solid/dashed/dotted lines for analytic curves, round markers for
numeric values.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

AXIS_COLUMN = "axis"

# style class -> matplotlib line kwargs
_STYLES = {
    "line": {"linestyle": "-"},
    "dash": {"linestyle": "--"},
    "dotted": {"linestyle": ":"},
    "dots": {"linestyle": "", "marker": "o", "markersize": 3.5},
}


class RenderInputError(ValueError):
    """Raised for unusable inputs: missing files, columns, or cells."""


@dataclass(frozen=True)
class CurveMap:
    """One CSV column drawn as one curve."""

    column: str
    label: str
    color: str
    style: str  # key into _STYLES
    panel: str | None = None  # None: the single default panel

    def __post_init__(self) -> None:
        if self.style not in _STYLES:
            raise RenderInputError(f"unknown style class: {self.style!r}")


@dataclass(frozen=True)
class FigureSpec:
    """A preset: which columns to draw, against which axis labels."""

    preset: str
    x_label: str
    y_label: str
    curves: tuple
    panels: tuple = ()  # panel titles, in drawing order; () = single panel

    def columns(self) -> tuple:
        return tuple(c.column for c in self.curves)


def build_specs() -> dict:
    y = "entanglement (nats)"
    fig2 = FigureSpec(
        preset="fig2",
        x_label="detected phonon number q",
        y_label=y,
        curves=(
            CurveMap("e_pre", "before measurement", "tab:blue", "dash"),
            CurveMap("e_perfect", "perfect measurement", "tab:green", "line"),
            CurveMap("e_gauss", "Gaussian approximation", "tab:red", "dotted"),
            CurveMap("e_imperfect_numeric_mu0.6", "imperfect, mu = 0.6",
                     "tab:purple", "dots"),
            CurveMap("e_imperfect_numeric_mu0.9", "imperfect, mu = 0.9",
                     "tab:orange", "dots"),
        ))
    fig3 = FigureSpec(
        preset="fig3",
        x_label="detector efficiency mu",
        y_label=y,
        curves=(
            CurveMap("e_perfect", "perfect measurement", "tab:brown", "line"),
            CurveMap("e_pre", "before measurement", "black", "line"),
            CurveMap("e_on_numeric", "on outcome", "tab:pink", "line"),
            CurveMap("e_off", "off outcome", "gold", "line"),
            CurveMap("e_imperfect_numeric", "imperfect, numeric",
                     "tab:red", "dots"),
            CurveMap("e_pert1", "first-order expansion", "tab:green", "dash"),
            CurveMap("e_pert2", "second-order expansion", "tab:blue", "dotted"),
        ))
    fig4_curves = []
    for mu in ("0.9", "0.99", "0.999"):
        panel = f"mu = {mu}"
        fig4_curves += [
            CurveMap(f"e_imperfect_numeric_mu{mu}", "numeric",
                     "tab:red", "dots", panel),
            CurveMap(f"e_pert1_mu{mu}", "first order",
                     "tab:blue", "dash", panel),
            CurveMap(f"e_pert2_mu{mu}", "second order",
                     "tab:green", "dash", panel),
        ]
    fig4 = FigureSpec(
        preset="fig4",
        x_label="detected phonon number q",
        y_label=y,
        curves=tuple(fig4_curves),
        panels=("mu = 0.9", "mu = 0.99", "mu = 0.999"))
    fig5 = FigureSpec(
        preset="fig5",
        x_label="cooperativity c2",
        y_label=y,
        curves=(
            CurveMap("e_on_numeric", "on outcome, numeric", "tab:blue", "dots"),
            CurveMap("e_on_average", "on outcome, average", "tab:red", "dash"),
            CurveMap("e_pre", "before measurement", "tab:green", "line"),
        ))
    return {"fig2": fig2, "fig3": fig3, "fig4": fig4, "fig5": fig5}


def load_table(path: str) -> tuple:
    """Reads a CSV into (header, rows of str dicts); rejects empty files."""
    try:
        fh = open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise RenderInputError(f"cannot read {path}: {exc}") from exc
    with fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise RenderInputError(f"empty CSV: {path}") from None
        rows = [dict(zip(header, line)) for line in reader if line]
    if not rows:
        raise RenderInputError(f"no data rows in {path}")
    return tuple(header), rows


def _column(rows: list, name: str, path: str) -> list:
    out = []
    for i, row in enumerate(rows):
        cell = row.get(name, "")
        try:
            out.append(float(cell))
        except ValueError:
            raise RenderInputError(
                f"non-numeric value {cell!r} in column {name}, "
                f"row {i + 2} of {path}") from None
    return out


def build_figure(spec: FigureSpec, header: tuple, rows: list,
                 path: str = "<csv>"):
    """Draws the preset onto a new Figure; one curve per mapped column."""
    missing = [c for c in (AXIS_COLUMN,) + spec.columns() if c not in header]
    if missing:
        raise RenderInputError(
            f"missing column(s) in {path}: " + ", ".join(missing))
    x = _column(rows, AXIS_COLUMN, path)
    panels = spec.panels or (None,)
    fig, axes = plt.subplots(
        1, len(panels), figsize=(4.8 * len(panels), 3.6),
        sharey=len(panels) > 1, squeeze=False)
    for ax, panel in zip(axes[0], panels):
        for curve in spec.curves:
            if curve.panel != panel:
                continue
            ax.plot(x, _column(rows, curve.column, path), color=curve.color,
                    label=curve.label, **_STYLES[curve.style])
        ax.set_xlabel(spec.x_label)
        if panel is not None:
            ax.set_title(panel)
        ax.legend(fontsize="small")
    axes[0][0].set_ylabel(spec.y_label)
    fig.suptitle(spec.preset)
    fig.tight_layout()
    return fig


def render(spec: FigureSpec, src: str, out: str, dpi: int = 150) -> str:
    """Renders one preset CSV to an image file; returns the output path."""
    header, rows = load_table(src)
    fig = build_figure(spec, header, rows, src)
    try:
        # suppress the version stamp so PNG reruns are byte-identical
        metadata = {"Software": None} if out.endswith(".png") else None
        fig.savefig(out, dpi=dpi, metadata=metadata)
    finally:
        plt.close(fig)
    return out
