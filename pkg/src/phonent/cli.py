"""Command-line front end: single points, parameter sweeps, figure presets.

Subcommands
-----------
point      evaluate requested methods at one (c1, c2, mu, q), JSON out
sweep      sweep one axis (q, mu, or c2), CSV out with fixed columns
fig2..fig5 preset sweeps reproducing the standard datasets
manifest   JSON description of presets and the CSV column schema

The CSV schema is fixed: axis, e_pre, e_perfect, e_gauss,
e_imperfect_numeric, e_pert1, e_pert2, e_off, e_on_numeric,
e_on_average, prob, trunc_deficit.  Presets that scan several detector
efficiencies append suffixed columns (e.g. e_imperfect_numeric_mu0.9)
after the fixed block.  Floats are serialized with shortest
round-trip formatting, so reruns are byte-identical.

Exit codes: 0 success, 2 invalid input, 3 numerical failure.  The
PHONENT_THREADS environment variable sets the worker count for sweep
rows (default 1); rows are always assembled in axis order.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from decimal import Decimal

from .channels import (
    MeasurementRecord,
    imperfect_outcome_prob,
    imperfect_post_state,
    on_entanglement,
    on_post_state,
    perfect_entanglement_gaussian,
    perfect_post_state,
)
from .model import (
    DEFAULT_POLICY,
    Cooperativities,
    InputError,
    NumericalError,
    TruncationPolicy,
    occupations,
    phonon_prob,
    pre_measurement_entanglement,
)
from .negativity import log_negativity, schmidt_log_negativity
from .perturbation import first_order_entanglement, second_order_entanglement

SCHEMA_VERSION = "1"

METHODS = ("exact", "eigensolve", "gaussian", "pert1", "pert2",
           "onoff-numeric", "onoff-average")

_METHOD_COLUMNS = {
    "exact": ("e_perfect",),
    "eigensolve": ("e_imperfect_numeric",),
    "gaussian": ("e_gauss",),
    "pert1": ("e_pert1",),
    "pert2": ("e_pert2",),
    "onoff-numeric": ("e_off", "e_on_numeric"),
    "onoff-average": ("e_on_average",),
}

BASE_COLUMNS = ("axis", "e_pre", "e_perfect", "e_gauss", "e_imperfect_numeric",
                "e_pert1", "e_pert2", "e_off", "e_on_numeric", "e_on_average",
                "prob", "trunc_deficit")


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SweepConfig:
    """One sweep: fixed parameters, one axis, methods to evaluate.

    ext_mus / ext_methods add suffixed columns evaluated at each listed
    efficiency on top of the base methods (used by the fig2 and fig4
    presets, which overlay several detector efficiencies).
    """

    c1: float
    c2: float
    mu: float = 1.0
    q: int = 0
    axis: str = "q"
    values: tuple = ()
    methods: tuple = ("exact",)
    ext_mus: tuple = ()
    ext_methods: tuple = ()
    prob_kind: str = ""  # "" = infer from methods
    policy: TruncationPolicy = DEFAULT_POLICY

    def __post_init__(self) -> None:
        if self.axis not in ("q", "mu", "c2"):
            raise InputError(f"unknown axis: {self.axis!r}")
        if not self.values:
            raise InputError("sweep needs at least one axis value")
        if not self.methods and not self.ext_methods:
            raise InputError("no methods requested")
        for m in tuple(self.methods) + tuple(self.ext_methods):
            if m not in METHODS:
                raise InputError(f"unknown method: {m!r} (choose from {', '.join(METHODS)})")

    def resolved_prob_kind(self) -> str:
        if self.prob_kind:
            return self.prob_kind
        counted = set(self.methods) | set(self.ext_methods)
        if counted <= {"onoff-numeric", "onoff-average"}:
            return "on"
        return "imperfect"  # equals the perfect P_q at mu = 1

    def columns(self) -> tuple:
        cols = list(BASE_COLUMNS)
        for mu in self.ext_mus:
            for m in self.ext_methods:
                for col in _METHOD_COLUMNS[m]:
                    cols.append(f"{col}_mu{mu:g}")
        return tuple(cols)


@dataclass
class SweepRow:
    """One evaluated axis point: column values plus bookkeeping."""

    axis_value: float
    values: dict
    prob: float
    trunc_deficit: float
    flags: dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# evaluation
# ---------------------------------------------------------------------------

class _Evaluator:
    """Per-sweep method dispatcher with a result cache.

    Methods that do not depend on the swept axis (the pre-measurement
    constant, on/off values under a q or mu sweep, exact values under a
    mu sweep) are computed once and reused, keyed by the parameters
    they actually consume.
    """

    def __init__(self, policy: TruncationPolicy) -> None:
        self.policy = policy
        self._memo: dict = {}

    def _key(self, method: str, coop: Cooperativities, mu: float, q: int):
        if method in ("exact", "gaussian"):
            return (method, coop.c1, coop.c2, q)
        if method in ("eigensolve", "pert1", "pert2"):
            return (method, coop.c1, coop.c2, mu, q)
        return (method, coop.c1, coop.c2)  # on/off: channel only

    def eval(self, method: str, coop: Cooperativities, mu: float, q: int):
        """Returns (column -> value, column -> flags, deficit)."""
        key = self._key(method, coop, mu, q)
        if key not in self._memo:
            self._memo[key] = self._compute(method, coop, mu, q)
        return self._memo[key]

    def _compute(self, method: str, coop: Cooperativities, mu: float, q: int):
        policy = self.policy
        if method == "exact":
            st = perfect_post_state(coop, q, policy)
            ev = schmidt_log_negativity(st)
            return {"e_perfect": ev.value}, {"e_perfect": ev.flags}, st.mass_deficit
        if method == "gaussian":
            ev = perfect_entanglement_gaussian(coop, q)
            return {"e_gauss": ev.value}, {"e_gauss": ev.flags}, 0.0
        if method == "eigensolve":
            mix = imperfect_post_state(coop, mu, q, policy)
            ev = log_negativity(mix, policy)
            deficit = max([mix.weight_deficit]
                          + [c.mass_deficit for c in mix.components])
            return ({"e_imperfect_numeric": ev.value},
                    {"e_imperfect_numeric": ev.flags}, deficit)
        if method == "pert1":
            ev = first_order_entanglement(coop, mu, q, policy)
            return {"e_pert1": ev.value}, {"e_pert1": ev.flags}, 0.0
        if method == "pert2":
            ev = second_order_entanglement(coop, mu, q, policy=policy)
            return {"e_pert2": ev.value}, {"e_pert2": ev.flags}, 0.0
        if method == "onoff-numeric":
            off_state = perfect_post_state(coop, 0, policy)
            e_off = schmidt_log_negativity(off_state)
            mix = on_post_state(coop, policy)
            e_on = log_negativity(mix, policy)
            deficit = max([off_state.mass_deficit, mix.weight_deficit]
                          + [c.mass_deficit for c in mix.components])
            return ({"e_off": e_off.value, "e_on_numeric": e_on.value},
                    {"e_off": e_off.flags, "e_on_numeric": e_on.flags}, deficit)
        if method == "onoff-average":
            ev = on_entanglement(coop, "average", policy)
            mix = on_post_state(coop, policy)
            deficit = max([mix.weight_deficit]
                          + [c.mass_deficit for c in mix.components])
            return {"e_on_average": ev.value}, {"e_on_average": ev.flags}, deficit
        raise InputError(f"unknown method: {method!r}")


def _row_prob(kind: str, coop: Cooperativities, mu: float, q: int) -> float:
    occ = occupations(coop)
    if kind == "perfect":
        return phonon_prob(occ, q)
    if kind == "imperfect":
        return imperfect_outcome_prob(occ, mu, q)
    if kind == "on":
        return 1.0 - phonon_prob(occ, 0)
    raise InputError(f"unknown probability kind: {kind!r}")


def _evaluate_point(cfg: SweepConfig, ev: _Evaluator, axis_value) -> SweepRow:
    mu, q, c2 = cfg.mu, cfg.q, cfg.c2
    if cfg.axis == "q":
        q = int(axis_value)
    elif cfg.axis == "mu":
        mu = float(axis_value)
    else:
        c2 = float(axis_value)
    coop = Cooperativities(cfg.c1, c2)
    values = {"e_pre": pre_measurement_entanglement(coop).value}
    flags: dict = {}
    deficit = 0.0
    for m in cfg.methods:
        vals, fl, d = ev.eval(m, coop, mu, q)
        values.update(vals)
        flags.update({k: v for k, v in fl.items() if v})
        deficit = max(deficit, d)
    for ext_mu in cfg.ext_mus:
        for m in cfg.ext_methods:
            vals, fl, d = ev.eval(m, coop, ext_mu, q)
            for col, val in vals.items():
                values[f"{col}_mu{ext_mu:g}"] = val
            for col, f in fl.items():
                if f:
                    flags[f"{col}_mu{ext_mu:g}"] = f
            deficit = max(deficit, d)
    prob = _row_prob(cfg.resolved_prob_kind(), coop, mu, q)
    return SweepRow(axis_value=axis_value, values=values, prob=prob,
                    trunc_deficit=deficit, flags=flags)


def _evaluate_with_context(cfg: SweepConfig, ev: _Evaluator, axis_value) -> SweepRow:
    try:
        return _evaluate_point(cfg, ev, axis_value)
    except (InputError, NumericalError) as exc:
        raise type(exc)(f"at {cfg.axis}={axis_value:g}: {exc}") from exc


def run_sweep(cfg: SweepConfig) -> list:
    """Evaluate every axis value, in order.  Honors PHONENT_THREADS."""
    ev = _Evaluator(cfg.policy)
    workers = _thread_count()
    if workers > 1 and len(cfg.values) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(lambda v: _evaluate_with_context(cfg, ev, v),
                                 cfg.values))
    else:
        rows = [_evaluate_with_context(cfg, ev, v) for v in cfg.values]
    for row in rows:
        if row.trunc_deficit >= cfg.policy.eps_trunc * (1.0 + 1e-9):
            raise NumericalError(
                f"truncation deficit {row.trunc_deficit:g} exceeds policy "
                f"eps_trunc at {cfg.axis}={row.axis_value:g}")
    return rows


def run_point(c1: float, c2: float, mu: float, q: int, methods: tuple,
              policy: TruncationPolicy = DEFAULT_POLICY) -> dict:
    """Single-point evaluation, returned as a JSON-ready document."""
    cfg = SweepConfig(c1=c1, c2=c2, mu=mu, q=q, axis="q", values=(q,),
                      methods=methods, policy=policy)
    row = _evaluate_point(cfg, _Evaluator(policy), q)
    kind = cfg.resolved_prob_kind()
    if kind == "imperfect" and mu == 1.0:
        kind = "perfect"
    record = MeasurementRecord(
        channel=kind, q=None if kind == "on" else q, probability=row.prob,
        entanglement=row.values, flags={k: list(v) for k, v in row.flags.items()})
    coop = Cooperativities(c1, c2)
    occ = occupations(coop)
    return {
        "schema_version": SCHEMA_VERSION,
        "params": {"c1": c1, "c2": c2, "mu": mu, "q": q,
                   "eps_trunc": policy.eps_trunc},
        "occupations": {"n1": occ.n1, "n2": occ.n2, "nm": occ.nm,
                        "zeta": occ.zeta},
        "channel": record.channel,
        "values": record.entanglement,
        "flags": record.flags,
        "prob": record.probability,
        "trunc_deficit": row.trunc_deficit,
    }


def _thread_count() -> int:
    raw = os.environ.get("PHONENT_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise InputError(f"PHONENT_THREADS must be a positive integer, got {raw!r}")
    if n < 1:
        raise InputError(f"PHONENT_THREADS must be a positive integer, got {raw!r}")
    return n


# ---------------------------------------------------------------------------
# presets
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Preset:
    """A canned sweep plus the renderer-facing curve metadata."""

    config: SweepConfig
    curve_columns: tuple
    prob_note: str
    description: str
    default_out: str


def _mu_grid(start: str, stop: str, step: str) -> tuple:
    d0, d1, ds = Decimal(start), Decimal(stop), Decimal(step)
    n = int((d1 - d0) / ds) + 1
    return tuple(float(d0 + i * ds) for i in range(n))


def build_presets() -> dict:
    fig2 = Preset(
        config=SweepConfig(
            c1=10.0, c2=2.0, mu=1.0, axis="q", values=tuple(range(31)),
            methods=("exact", "gaussian"),
            ext_mus=(0.6, 0.9), ext_methods=("eigensolve",),
            prob_kind="perfect"),
        curve_columns=("e_perfect", "e_gauss", "e_imperfect_numeric_mu0.6",
                       "e_imperfect_numeric_mu0.9", "e_pre"),
        prob_note="probability of counting exactly q phonons",
        description=("entanglement versus counted phonon number at c1=10, "
                     "c2=2: exact ladder sum, Gaussian estimate, numeric "
                     "finite-efficiency curves, pre-measurement constant"),
        default_out="fig2.csv")
    fig3 = Preset(
        config=SweepConfig(
            c1=10.0, c2=5.0, q=2, axis="mu",
            values=_mu_grid("0.5", "1.0", "0.01"),
            methods=("exact", "eigensolve", "pert1", "pert2", "onoff-numeric"),
            prob_kind="imperfect"),
        curve_columns=("e_imperfect_numeric", "e_pert1", "e_pert2", "e_off",
                       "e_on_numeric", "e_perfect", "e_pre"),
        prob_note="probability of reporting q=2 at efficiency mu",
        description=("entanglement versus detector efficiency at c1=10, "
                     "c2=5, q=2: numeric mixture value, both perturbative "
                     "orders, threshold on/off values, perfect-detector "
                     "limit, pre-measurement constant"),
        default_out="fig3.csv")
    fig4 = Preset(
        config=SweepConfig(
            c1=10.0, c2=3.0, axis="q", values=tuple(range(11)),
            methods=(),
            ext_mus=(0.9, 0.99, 0.999),
            ext_methods=("eigensolve", "pert1", "pert2"),
            prob_kind="perfect"),
        curve_columns=("e_imperfect_numeric_mu0.9", "e_pert1_mu0.9",
                       "e_pert2_mu0.9", "e_imperfect_numeric_mu0.99",
                       "e_pert1_mu0.99", "e_pert2_mu0.99",
                       "e_imperfect_numeric_mu0.999", "e_pert1_mu0.999",
                       "e_pert2_mu0.999"),
        prob_note="probability of counting exactly q phonons",
        description=("entanglement versus counted phonon number at c1=10, "
                     "c2=3 for three detector efficiencies: numeric value "
                     "against both perturbative orders"),
        default_out="fig4.csv")
    fig5 = Preset(
        config=SweepConfig(
            c1=100.0, c2=1.0, axis="c2",
            values=tuple(float(Decimal("1.0") + i * Decimal("0.5"))
                         for i in range(39)),
            methods=("onoff-numeric", "onoff-average"),
            prob_kind="on"),
        curve_columns=("e_on_numeric", "e_on_average", "e_pre"),
        prob_note="probability of a threshold click (1 - P_0)",
        description=("entanglement after a threshold click versus c2 at "
                     "c1=100: numeric mixture value, weighted average of "
                     "per-outcome values, pre-measurement constant"),
        default_out="fig5.csv")
    return {"fig2": fig2, "fig3": fig3, "fig4": fig4, "fig5": fig5}


def emit_manifest() -> dict:
    """Preset and column-schema description for downstream consumers."""
    presets = {}
    for name, preset in build_presets().items():
        cfg = preset.config
        vals = cfg.values
        all_methods = set(cfg.methods) | set(cfg.ext_methods)
        uses_q = bool(all_methods & {"exact", "eigensolve", "gaussian",
                                     "pert1", "pert2"})
        uses_mu = bool(set(cfg.methods) & {"eigensolve", "pert1", "pert2"})
        params = {"c1": cfg.c1}
        if cfg.axis != "c2":
            params["c2"] = cfg.c2
        if uses_q and cfg.axis != "q":
            params["q"] = cfg.q
        if uses_mu and cfg.axis != "mu":
            params["mu"] = cfg.mu
        entry = {
            "params": params,
            "axis": {"name": cfg.axis, "start": vals[0], "stop": vals[-1],
                     "count": len(vals)},
            "methods": list(cfg.methods),
            "columns": list(cfg.columns()),
            "curve_columns": list(preset.curve_columns),
            "curve_count": len(preset.curve_columns),
            "prob": preset.prob_note,
            "description": preset.description,
            "default_out": preset.default_out,
        }
        if cfg.ext_mus:
            entry["extension_mu"] = list(cfg.ext_mus)
            entry["extension_methods"] = list(cfg.ext_methods)
        presets[name] = entry
    return {
        "schema_version": SCHEMA_VERSION,
        "columns": list(BASE_COLUMNS),
        "float_format": "shortest round-trip decimal",
        "axis_note": ("figure axis ranges are chosen to cover the visible "
                      "plot domains and are recorded here, not hardcoded "
                      "downstream"),
        "presets": presets,
    }


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, int):
        return str(v)
    return repr(float(v))


def _rows_to_csv(rows: list, columns: tuple) -> str:
    lines = [",".join(columns)]
    for row in rows:
        cells = []
        for col in columns:
            if col == "axis":
                cells.append(_cell(row.axis_value))
            elif col == "prob":
                cells.append(_cell(row.prob))
            elif col == "trunc_deficit":
                cells.append(_cell(row.trunc_deficit))
            else:
                cells.append(_cell(row.values.get(col)))
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def _rows_to_json(rows: list, columns: tuple, preset: str | None) -> str:
    out_rows = []
    for row in rows:
        doc = {}
        for col in columns:
            if col == "axis":
                doc[col] = row.axis_value
            elif col == "prob":
                doc[col] = row.prob
            elif col == "trunc_deficit":
                doc[col] = row.trunc_deficit
            else:
                doc[col] = row.values.get(col)
        out_rows.append(doc)
    return json.dumps({"schema_version": SCHEMA_VERSION, "preset": preset,
                       "columns": list(columns), "rows": out_rows},
                      indent=2, allow_nan=False) + "\n"


def _write(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def _parse_methods(raw: str) -> tuple:
    methods = tuple(m.strip() for m in raw.split(",") if m.strip())
    if not methods:
        raise argparse.ArgumentTypeError("at least one method required")
    for m in methods:
        if m not in METHODS:
            raise argparse.ArgumentTypeError(
                f"unknown method {m!r} (choose from {', '.join(METHODS)})")
    return methods


def _add_common(sp: argparse.ArgumentParser, point_like: bool) -> None:
    sp.add_argument("--c1", type=float, required=True, help="first cooperativity")
    sp.add_argument("--c2", type=float, required=True, help="second cooperativity")
    sp.add_argument("--mu", type=float, default=1.0,
                    help="detector efficiency in (0, 1] (default 1)")
    sp.add_argument("--q", type=int, default=0,
                    help="counted phonon number (default 0)")
    sp.add_argument("--methods", type=_parse_methods, default=("exact",),
                    help="comma-separated subset of: " + ", ".join(METHODS))
    if point_like:
        sp.add_argument("--format", choices=("csv", "json"), default="json")
    else:
        sp.add_argument("--format", choices=("csv", "json"), default="csv")


def _add_output(sp: argparse.ArgumentParser, default_out: str | None) -> None:
    sp.add_argument("--eps-trunc", type=float, default=DEFAULT_POLICY.eps_trunc,
                    help="truncation tail target (default %(default)g)")
    sp.add_argument("--out", default=default_out,
                    help="output path ('-' or omitted: stdout)"
                    if default_out is None else
                    "output path (default %(default)s, '-' for stdout)")


def _axis_values(axis: str, start: float, stop: float, step: float) -> tuple:
    if step <= 0:
        raise InputError(f"step must be > 0, got {step:g}")
    if stop < start:
        raise InputError(f"stop < start ({stop:g} < {start:g})")
    if axis == "q":
        for name, x in (("start", start), ("stop", stop), ("step", step)):
            if abs(x - round(x)) > 1e-9:
                raise InputError(f"q axis needs integer {name}, got {x:g}")
        return tuple(range(int(round(start)), int(round(stop)) + 1,
                           int(round(step))))
    d0, d1, ds = Decimal(repr(start)), Decimal(repr(stop)), Decimal(repr(step))
    n = int((d1 - d0) / ds) + 1
    return tuple(float(d0 + i * ds) for i in range(n))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="phonent",
        description="Entanglement concentration by phonon counting: "
                    "closed forms, ladder sums, and PT-negativity numerics.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_point = sub.add_parser("point", help="evaluate one parameter point")
    _add_common(p_point, point_like=True)
    _add_output(p_point, None)

    p_sweep = sub.add_parser("sweep", help="sweep one axis")
    _add_common(p_sweep, point_like=False)
    p_sweep.add_argument("--axis", choices=("q", "mu", "c2"), required=True)
    p_sweep.add_argument("--start", type=float, required=True)
    p_sweep.add_argument("--stop", type=float, required=True)
    p_sweep.add_argument("--step", type=float, required=True)
    _add_output(p_sweep, None)

    for name in ("fig2", "fig3", "fig4", "fig5"):
        p_fig = sub.add_parser(name, help=f"emit the {name} preset dataset")
        p_fig.add_argument("--format", choices=("csv", "json"), default="csv")
        _add_output(p_fig, f"{name}.csv")

    p_man = sub.add_parser("manifest", help="describe presets and CSV schema")
    p_man.add_argument("--out", default=None)

    return parser


def _policy_from(args: argparse.Namespace) -> TruncationPolicy:
    eps = getattr(args, "eps_trunc", DEFAULT_POLICY.eps_trunc)
    if eps == DEFAULT_POLICY.eps_trunc:
        return DEFAULT_POLICY
    return TruncationPolicy(eps_trunc=eps)


def _dispatch(args: argparse.Namespace) -> int:
    if args.command == "manifest":
        _write(json.dumps(emit_manifest(), indent=2) + "\n", args.out)
        return 0

    policy = _policy_from(args)

    if args.command == "point":
        doc = run_point(args.c1, args.c2, args.mu, args.q, args.methods, policy)
        if args.format == "json":
            _write(json.dumps(doc, indent=2, allow_nan=False) + "\n", args.out)
        else:
            cfg = SweepConfig(c1=args.c1, c2=args.c2, mu=args.mu, q=args.q,
                              axis="q", values=(args.q,), methods=args.methods,
                              policy=policy)
            rows = run_sweep(cfg)
            _write(_rows_to_csv(rows, cfg.columns()), args.out)
        return 0

    if args.command == "sweep":
        values = _axis_values(args.axis, args.start, args.stop, args.step)
        cfg = SweepConfig(c1=args.c1, c2=args.c2, mu=args.mu, q=args.q,
                          axis=args.axis, values=values, methods=args.methods,
                          policy=policy)
    else:  # figure preset
        preset = build_presets()[args.command]
        cfg = preset.config
        if policy is not DEFAULT_POLICY:
            cfg = SweepConfig(**{**cfg.__dict__, "policy": policy})

    rows = run_sweep(cfg)
    if args.format == "json":
        name = args.command if args.command.startswith("fig") else None
        _write(_rows_to_json(rows, cfg.columns(), name), args.out)
    else:
        _write(_rows_to_csv(rows, cfg.columns()), args.out)
    return 0


def main(argv: list | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _dispatch(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
