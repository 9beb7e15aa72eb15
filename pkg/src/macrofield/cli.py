"""Command-line surface: derive, simulate, analytic, calibrate, phases,
inflation, debt, scenario, and report.

Commands read the bundled German table (--frg) or a delimited file
(--input, optionally --decimal-comma) and emit CSV or JSON to --out or
stdout.  ``report`` reproduces the reference figures as x/y column
files and renders a PNG chart next to the delimited output.

Exit codes: 0 success, 2 input or validation problem, 3 numeric
failure, 4 fit non-convergence.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import analytic, calibrate, dataset, diagnostics, model, multiworld
from .errors import MacrofieldError, NoMaximumError, PoleError, ValidationError

_FIGURE_IDS = (
    "fig1",
    "fig2",
    "fig3",
    "fig5",
    "fig6",
    "fig7",
    "fig13",
    "fig15",
    "fig23",
    "fig24",
    "fig27",
    "fig28",
    "fig29",
)


# ---------------------------------------------------------------- emission


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _rows_to_csv(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_cell(v) for v in row])
    return buf.getvalue()


def _rows_to_json(header, rows) -> str:
    return json.dumps(
        [dict(zip(header, row)) for row in rows], indent=2, allow_nan=False
    )


def _write(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")


def _emit_table(args, header, rows) -> None:
    fmt = getattr(args, "format", "csv")
    text = _rows_to_json(header, rows) if fmt == "json" else _rows_to_csv(header, rows)
    _write(text, args.out)


def _emit_summary(args, summary: dict) -> None:
    """Sidecar summary: next to --out as <out>.summary.json, else stderr."""
    text = json.dumps(summary, indent=2)
    if args.out:
        Path(str(args.out) + ".summary.json").write_text(text + "\n", encoding="utf-8")
    else:
        print(text, file=sys.stderr)


def _py(v):
    """Cast numpy scalars for json serialization."""
    if v is None:
        return None
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    return v


# ------------------------------------------------------------------ inputs


def _load_series(args) -> dataset.EconSeries:
    if getattr(args, "input", None) and getattr(args, "frg", False):
        raise ValidationError("pass either --frg or --input, not both")
    if getattr(args, "input", None):
        text = Path(args.input).read_text(encoding="utf-8")
        series = dataset.parse_series(
            text, decimal_comma=getattr(args, "decimal_comma", False)
        )
    elif getattr(args, "frg", False):
        series = dataset.frg_dataset()
    else:
        raise ValidationError("pass --frg or --input PATH")
    from_year = getattr(args, "from_year", None)
    to_year = getattr(args, "to_year", None)
    if from_year is not None or to_year is not None:
        series = series.window(from_year, to_year)
    return series


def _load_config(path: str) -> dict:
    try:
        cfg = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ValidationError(f"config {path}: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ValidationError(f"config {path} must hold a JSON object")
    return cfg


def _add_input_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--frg", action="store_true", help="use the bundled German table")
    p.add_argument("--input", metavar="PATH", help="delimited annual table")
    p.add_argument(
        "--decimal-comma",
        action="store_true",
        help="input uses comma decimals (German formatting)",
    )


def _add_output_flags(p: argparse.ArgumentParser, default_format="csv") -> None:
    p.add_argument("--out", metavar="PATH", help="output path (default stdout)")
    p.add_argument(
        "--format",
        choices=("csv", "json"),
        default=default_format,
        help=f"output format (default {default_format})",
    )


def _add_window_flags(p: argparse.ArgumentParser, astype=int) -> None:
    p.add_argument("--from", dest="from_year", type=astype, metavar="YEAR")
    p.add_argument("--to", dest="to_year", type=astype, metavar="YEAR")


# ---------------------------------------------------------------- commands


def cmd_derive(args) -> int:
    series = _load_series(args)
    derived = dataset.derive_indicators(series)
    header = list(dataset.COLUMNS) + list(dataset.DERIVED_COLUMNS)
    rows = []
    for i, rec in enumerate(series.records):
        row = [getattr(rec, c) for c in dataset.COLUMNS]
        row += [_py(derived.column(c)[i]) for c in dataset.DERIVED_COLUMNS]
        rows.append(row)
    _emit_table(args, header, rows)
    return 0


def _resolve_simulation(args) -> tuple[model.ModelParams, float, float, str]:
    cfg = {}
    if getattr(args, "config", None):
        cfg = _load_config(args.config)
    if args.frg and cfg:
        raise ValidationError("pass either --frg or --config, not both")

    horizon = cfg.pop("horizon", None)
    step = cfg.pop("step", None)
    method = cfg.pop("method", None)
    if args.frg:
        params = calibrate.frg_baseline_params()
    elif cfg:
        params = model.params_from_config(cfg)
    else:
        raise ValidationError("pass --frg or --config PATH")

    if getattr(args, "population_table", None) == "frg":
        params = replace(
            params, p_B=calibrate.population_growth_table(dataset.frg_dataset())
        )
    if args.to_year is not None:
        horizon = args.to_year - params.t0
    if horizon is None:
        horizon = 85.0
    step = args.step if args.step is not None else (step if step is not None else 0.25)
    method = args.method if args.method is not None else (method or "rk4")
    return params, float(horizon), float(step), str(method)


_TRAJ_COLUMNS = ("year", "Y", "K", "p_n", "p_s", "p_B", "dY", "dK")


def _trajectory_rows(traj: model.Trajectory, from_year=None):
    rows = []
    for i, year in enumerate(traj.years):
        if from_year is not None and year < from_year:
            continue
        rows.append(
            [
                int(year),
                float(traj.Y[i]),
                float(traj.K[i]),
                float(traj.p_n[i]),
                float(traj.p_s[i]),
                float(traj.p_B[i]),
                float(traj.dY[i]),
                float(traj.dK[i]),
            ]
        )
    return rows


def cmd_simulate(args) -> int:
    params, horizon, step, method = _resolve_simulation(args)
    traj = model.integrate(params, horizon=horizon, step=step, method=method)
    rows = _trajectory_rows(traj, args.from_year)
    summary = {
        "t0": traj.t0,
        "Y0": params.Y0,
        "K0": params.K0,
        "peak_year": traj.peak_year(),
        "collapse_year": traj.collapse_year(),
        "stop_reason": traj.stop_reason,
        "step": traj.step,
        "method": traj.method,
    }
    if args.format == "json":
        doc = {
            "summary": summary,
            "trajectory": [dict(zip(_TRAJ_COLUMNS, row)) for row in rows],
        }
        _write(json.dumps(doc, indent=2), args.out)
    else:
        _write(_rows_to_csv(_TRAJ_COLUMNS, rows), args.out)
        _emit_summary(args, summary)
    return 0


def cmd_analytic(args) -> int:
    branch = analytic.AnalyticBranch.from_rates(args.p_n, args.p_s, args.y0, args.k0)
    t0 = args.from_year if args.from_year is not None else 0.0
    t1 = args.to_year if args.to_year is not None else 50.0
    step = args.step if args.step is not None else 1.0
    if not step > 0:
        raise ValidationError(f"--step must be > 0, got {step}")
    ts = np.arange(t0, t1 + 0.5 * step, step)
    Y, K = analytic.basis_solution(branch, ts)
    rows = []
    for i, t in enumerate(ts):
        try:
            kt = analytic.capital_coefficient_closed(branch, float(t))
        except PoleError:
            kt = None
        rows.append([float(t), float(Y[i]), float(K[i]), kt])
    try:
        t_c = analytic.characteristic_time(args.p_n, args.p_s)
    except MacrofieldError:
        t_c = None
    summary = {
        "phi": branch.phi,
        "kind": branch.kind,
        "root": branch.root,
        "characteristic_time": t_c,
    }
    if args.format == "json":
        doc = dict(summary)
        doc["points"] = [dict(zip(("t", "Y", "K", "k_t"), row)) for row in rows]
        _write(json.dumps(doc, indent=2), args.out)
    else:
        _write(_rows_to_csv(("t", "Y", "K", "k_t"), rows), args.out)
        _emit_summary(args, summary)
    return 0


def _emit_doc(args, doc: dict) -> None:
    """Flat mapping as JSON, or as two-column CSV key/value rows."""
    if args.format == "json":
        _write(json.dumps(doc, indent=2), args.out)
    else:
        rows = [[k, _py(v)] for k, v in doc.items()]
        _write(_rows_to_csv(("key", "value"), rows), args.out)


def cmd_calibrate(args) -> int:
    if args.what == "yk":
        if args.input:
            fit = calibrate.fit_quadratic_yk(_load_series(args))
        else:
            year_range = None
            if args.from_year is not None and args.to_year is not None:
                year_range = (args.from_year, args.to_year)
            fit = calibrate.frg_quadratic_fit(
                data_only=args.data_only, year_range=year_range
            )
        doc = {
            "a_K": fit.a_K,
            "b_K": fit.b_K,
            "c_K": fit.c_K,
            "residual_rms": fit.residual_rms,
            "n_points": fit.n_points,
            "year_range": list(fit.year_range) if fit.year_range else None,
        }
        if fit.a_K > 0:
            try:
                ext = calibrate.capital_extremes(fit)
                doc["K_max"] = ext.K_max
                doc["Y_at_K_max"] = ext.Y_at_K_max
                doc["K_E_low"] = ext.K_E_low
                doc["K_E_high"] = ext.K_E_high
            except NoMaximumError:  # pragma: no cover - guarded by a_K > 0
                pass
        _emit_doc(args, doc)
    elif args.what == "prel":
        series = _load_series(args)
        fit = calibrate.fit_prel_exponential(
            series, constrain_prel0=args.constrain_prel0, target=args.target
        )
        _emit_doc(
            args,
            {
                "p_rel0": fit.p_rel0,
                "T_h": fit.T_h,
                "rms": fit.rms,
                "iterations": fit.iterations,
                "target": fit.target,
                "constrained": fit.constrained,
            },
        )
    else:  # chain
        data = dataset.frg_dataset()
        t_i = args.from_year if args.from_year is not None else data.start_year
        t_e = args.to_year if args.to_year is not None else 2010
        traj = model.integrate(calibrate.frg_points_params(), horizon=85.0)
        corr = calibrate.chain_correction(traj, data, t_i=t_i, t_e=t_e)
        _emit_doc(
            args,
            {
                "V_i": corr.V_i,
                "V_e": corr.V_e,
                "t_i": corr.t_i,
                "t_e": corr.t_e,
                "slope": corr.slope,
            },
        )
    return 0


def cmd_phases(args) -> int:
    series = _load_series(args)
    report = diagnostics.phase_classify(series, quota=args.quota)
    if args.format == "json":
        doc = {
            "quota": report.quota,
            "crossings": {k: _py(v) for k, v in report.crossings.items()},
            "years": list(report.years),
            "phase": list(report.phase),
        }
        _write(json.dumps(doc, indent=2), args.out)
    else:
        rows = list(zip(report.years, report.phase))
        _write(_rows_to_csv(("year", "phase"), rows), args.out)
        _emit_summary(args, {"crossings": {k: _py(v) for k, v in report.crossings.items()}})
    return 0


def cmd_inflation(args) -> int:
    if args.source == "model":
        horizon = 83.0
        t0 = 1950
        if args.to_year is not None:
            horizon = args.to_year - t0
        traj = model.integrate(calibrate.frg_points_params(), horizon=horizon)
        pairs = diagnostics.inflation_series(traj, args.method)
        if args.from_year is not None:
            pairs = [(y, v) for y, v in pairs if y >= args.from_year]
    else:
        series = _load_series(args)
        pairs = diagnostics.inflation_series(series, args.method)
    _emit_table(args, ("year", "inflation"), [[y, v] for y, v in pairs])
    return 0


def cmd_debt(args) -> int:
    series = _load_series(args)
    s0 = args.s0 if args.s0 is not None else series.records[0].state_debt
    path = diagnostics.debt_path(
        series, args.p_a, s0, tranche=args.tranche, compounding=args.compounding
    )
    official = dict(zip(series.years(), series.column("state_debt")))
    rows = []
    for year, modeled in path:
        off = official.get(year)
        ratio = modeled / off if off else None
        rows.append([year, modeled, off, ratio])
    _emit_table(args, ("year", "modeled_debt", "official_debt", "ratio"), rows)
    return 0


def cmd_scenario(args) -> int:
    cfg = _load_config(args.config)
    horizon = cfg.pop("horizon", 140.0)
    step = args.step if args.step is not None else cfg.pop("step", 0.25)
    method = args.method if args.method is not None else cfg.pop("method", "rk4")
    cfg.pop("step", None)
    cfg.pop("method", None)
    experiment = cfg.pop("experiment", None)
    starts = cfg.pop("starts", None)

    if experiment is not None:
        unknown = set(experiment) - {"kind", "export_fraction", "start_lag_years"}
        if unknown:
            raise ValidationError(f"unknown experiment keys {sorted(unknown)}")
        if experiment.get("kind") != "capital_export":
            raise ValidationError("experiment kind must be 'capital_export'")
        world = multiworld.world_from_config(cfg)
        if world.n_economies != 2:
            raise ValidationError("the capital-export experiment needs 2 economies")
        result = multiworld.capital_export_experiment(
            world.economies[0],
            world.economies[1],
            float(experiment.get("export_fraction", 0.1)),
            float(experiment.get("start_lag_years", 25.0)),
            horizon=float(horizon),
            step=float(step),
            method=str(method),
        )
        header = ["year", "Y1", "K1", "Y2", "K2", "Y1_standalone", "Y2_standalone"]
        c, s = result.coupled, result.standalone
        rows = [
            [
                int(c.years[i]),
                float(c.Y[0][i]),
                float(c.K[0][i]),
                float(c.Y[1][i]),
                float(c.K[1][i]),
                float(s.Y[0][i]),
                float(s.Y[1][i]),
            ]
            for i in range(len(c))
        ]
        summary = {k: _py(v) for k, v in result.summary().items()}
    else:
        world = multiworld.world_from_config(cfg)
        traj = multiworld.integrate_world(
            world,
            float(horizon),
            step=float(step),
            method=str(method),
            starts=starts,
        )
        header = ["year"]
        for i in range(world.n_economies):
            header += [f"Y{i + 1}", f"K{i + 1}"]
        rows = []
        for j in range(len(traj)):
            row = [int(traj.years[j])]
            for i in range(world.n_economies):
                row += [float(traj.Y[i][j]), float(traj.K[i][j])]
            rows.append(row)
        summary = {}
        for i in range(world.n_economies):
            summary[f"economy_{i + 1}_peak_year"] = traj.peak_year(i)
            summary[f"economy_{i + 1}_collapse_year"] = traj.collapse_year(i)

    if args.format == "json":
        doc = {
            "summary": summary,
            "trajectory": [dict(zip(header, row)) for row in rows],
        }
        _write(json.dumps(doc, indent=2), args.out)
    else:
        _write(_rows_to_csv(header, rows), args.out)
        _emit_summary(args, summary)
    return 0


# ----------------------------------------------------------------- figures


def _fig_data(fig: str):
    """(header, rows, y-axis label, log-y flag) for one figure id."""
    data = dataset.frg_dataset()
    years = data.years()

    if fig == "fig1":
        rows = [
            [r.year, r.gdp, r.assets, r.loans] for r in data.records
        ]
        return ("year", "gdp", "assets", "loans"), rows, "bn currency", True

    if fig == "fig2":
        d = dataset.derive_indicators(data)
        rows = [
            [years[i], _py(d.k_t[i]), _py(d.k_c[i]), _py(d.k_m[i])]
            for i in range(len(years))
        ]
        return ("year", "k_t", "k_c", "k_m"), rows, "capital coefficients", False

    if fig == "fig3":
        d = dataset.derive_indicators(data)
        rows = [[years[i], _py(d.k_i[i])] for i in range(len(years))]
        return ("year", "k_i"), rows, "marginal GDP per capital", False

    if fig in ("fig5", "fig6"):
        traj = calibrate.frg_chained_trajectory()
        gdp = dict(zip(years, data.column("gdp")))
        header = ["year", "gdp_data", "gdp_model"]
        variants = [traj]
        if fig == "fig6":
            header.append("gdp_model_population")
            params = replace(
                calibrate.frg_points_params(),
                p_B=calibrate.population_growth_table(data),
            )
            ptraj = model.integrate(params, horizon=85.0)
            corr = calibrate.chain_correction(
                ptraj, data, t_i=data.start_year, t_e=2010
            )
            variants.append(calibrate.apply_chain(corr, ptraj, allow_extrapolation=True))
        rows = []
        all_years = sorted(set(int(y) for t in variants for y in t.years))
        for year in all_years:
            row = [year, gdp.get(year)]
            for t in variants:
                try:
                    row.append(float(t.value_at(year, "Y")))
                except MacrofieldError:
                    row.append(None)
            rows.append(row)
        return tuple(header), rows, "GDP, bn currency", False

    if fig == "fig7":
        traj = calibrate.frg_chained_trajectory()
        d = dataset.derive_indicators(data)
        ktd = dict(zip(years, d.k_t))
        rows = []
        for i, year in enumerate(traj.years.astype(int)):
            ktm = float(traj.K[i] / traj.Y[i]) if traj.Y[i] > 0 else None
            rows.append([int(year), _py(ktd.get(int(year))), ktm])
        return ("year", "kt_data", "kt_model"), rows, "capital coefficient", False

    if fig == "fig13":
        d = dataset.derive_indicators(data)
        rows = [
            [years[i], None if d.p_rel[i] is None else 100.0 * d.p_rel[i]]
            for i in range(len(years))
        ]
        return ("year", "p_rel_percent"), rows, "direct lending share, %", False

    if fig == "fig15":
        report = diagnostics.phase_classify(data)
        rows = [[y, p] for y, p in zip(report.years, report.phase)]
        return ("year", "phase"), rows, "crisis phase", False

    if fig == "fig23":
        rows = [
            [r.year, r.ratio, r.base] for r in diagnostics.debt_ratio(data)
        ]
        return ("year", "debt_ratio", "base"), rows, "debt over dominant resource", False

    if fig == "fig24":
        path = diagnostics.debt_path(
            data,
            0.03,
            data.records[0].state_debt,
            tranche="capital_increment",
            compounding="to_date",
        )
        official = dict(zip(years, data.column("state_debt")))
        rows = [[y, official.get(y), v] for y, v in path]
        return ("year", "official_debt", "modeled_debt"), rows, "bn currency", True

    if fig in ("fig27", "fig28"):
        horizon = 62.0 if fig == "fig27" else 83.0
        traj = model.integrate(calibrate.frg_points_params(), horizon=horizon)
        core = dict(diagnostics.inflation_series(traj, "core"))
        cpi = dict(zip(years, data.column("cpi")))
        rows = []
        for year in traj.years.astype(int):
            year = int(year)
            c = core.get(year)
            official = cpi.get(year)
            rows.append(
                [
                    year,
                    None if official is None else 100.0 * official,
                    None if c is None else 100.0 * c,
                ]
            )
        return ("year", "cpi_percent", "core_percent"), rows, "inflation, %/year", False

    if fig == "fig29":
        strong = model.ModelParams(Y0=1.0, K0=0.38)
        weak = strong.scaled(0.5)
        result = multiworld.capital_export_experiment(strong, weak, 0.1, 25.0)
        c, s = result.coupled, result.standalone
        rows = [
            [
                int(c.years[i]),
                float(c.Y[0][i]),
                float(c.Y[1][i]),
                float(s.Y[0][i]),
                float(s.Y[1][i]),
            ]
            for i in range(len(c))
        ]
        return (
            ("year", "Y1", "Y2", "Y1_standalone", "Y2_standalone"),
            rows,
            "GDP, points",
            False,
        )

    raise ValidationError(
        f"unknown figure id {fig!r}; known ids: {', '.join(_FIGURE_IDS)}"
    )


def _render_figure(fig: str, header, rows, ylabel: str, logy: bool, png_path: Path) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig_obj, ax = plt.subplots(figsize=(8, 5))
    xs = [row[0] for row in rows]
    value_cols = [
        (i, name) for i, name in enumerate(header) if i > 0 and name != "base"
    ]
    for i, name in value_cols:
        ys = [row[i] if isinstance(row[i], (int, float)) else np.nan for row in rows]
        style = "o" if name.endswith("_data") or name in ("cpi_percent",) else "-"
        ax.plot(xs, ys, style, label=name, markersize=3)
    if fig == "fig15":
        for key, year in diagnostics.phase_classify(dataset.frg_dataset()).crossings.items():
            if year is not None:
                ax.axvline(year, color="grey", linestyle=":", linewidth=0.8)
    if logy:
        ax.set_yscale("log")
    ax.set_xlabel("year")
    ax.set_ylabel(ylabel)
    ax.set_title(fig)
    ax.grid(True, alpha=0.3)
    ax.legend(loc="best", fontsize=8)
    fig_obj.tight_layout()
    fig_obj.savefig(png_path, dpi=150)
    plt.close(fig_obj)


def cmd_report(args) -> int:
    fig = args.figure
    header, rows, ylabel, logy = _fig_data(fig)
    out = args.out if args.out else f"{fig}.csv"
    fmt = getattr(args, "format", "csv")
    text = _rows_to_json(header, rows) if fmt == "json" else _rows_to_csv(header, rows)
    Path(out).write_text(text, encoding="utf-8")
    png_path = Path(out).with_suffix(".png")
    _render_figure(fig, header, rows, ylabel, logy, png_path)
    print(f"wrote {out} and {png_path}", file=sys.stderr)
    return 0


# ------------------------------------------------------------------ parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="macrofield",
        description=(
            "Simulation, calibration, and diagnostics for the two-field "
            "GDP/capital flow system."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("derive", help="raw table plus derived indicators")
    _add_input_flags(p)
    _add_window_flags(p)
    _add_output_flags(p)
    p.set_defaults(func=cmd_derive)

    p = sub.add_parser("simulate", help="integrate the flow system")
    p.add_argument("--frg", action="store_true", help="reference 1950 calibration")
    p.add_argument("--config", metavar="PATH", help="JSON model parameters")
    p.add_argument(
        "--population-table",
        choices=("frg",),
        help="inject the observed population growth rates as p_B",
    )
    _add_window_flags(p)
    p.add_argument("--step", type=float, default=None, help="integrator step, years")
    p.add_argument("--method", choices=("rk4", "euler"), default=None)
    _add_output_flags(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("analytic", help="closed-form frozen-rate solution")
    p.add_argument("--p-n", dest="p_n", type=float, required=True)
    p.add_argument("--p-s", dest="p_s", type=float, required=True)
    p.add_argument("--y0", type=float, default=1.0)
    p.add_argument("--k0", type=float, default=0.38)
    _add_window_flags(p, astype=float)
    p.add_argument("--step", type=float, default=None, help="grid spacing, years")
    _add_output_flags(p)
    p.set_defaults(func=cmd_analytic)

    p = sub.add_parser("calibrate", help="fits against a data series")
    p.add_argument("what", choices=("yk", "prel", "chain"))
    _add_input_flags(p)
    _add_window_flags(p)
    p.add_argument(
        "--data-only",
        action="store_true",
        help="yk: fit the raw table instead of the chained model arc",
    )
    p.add_argument("--constrain-prel0", action="store_true", help="prel: pin p_rel0=1")
    p.add_argument(
        "--target",
        choices=("p_rel", "p_n"),
        default="p_rel",
        help="prel: observable the fit matches",
    )
    _add_output_flags(p, default_format="json")
    p.set_defaults(func=cmd_calibrate)

    p = sub.add_parser("phases", help="crisis-phase classification")
    _add_input_flags(p)
    _add_window_flags(p)
    p.add_argument("--quota", type=float, default=0.5, help="debt/loans threshold")
    _add_output_flags(p, default_format="json")
    p.set_defaults(func=cmd_phases)

    p = sub.add_parser("inflation", help="inflation series by method")
    _add_input_flags(p)
    _add_window_flags(p)
    p.add_argument(
        "--method",
        choices=diagnostics._INFLATION_METHODS,
        default="core",
    )
    p.add_argument(
        "--source",
        choices=("data", "model"),
        default="data",
        help="data series or the reference model trajectory",
    )
    _add_output_flags(p)
    p.set_defaults(func=cmd_inflation)

    p = sub.add_parser("debt", help="modeled state debt vs official")
    _add_input_flags(p)
    _add_window_flags(p)
    p.add_argument("--p-a", dest="p_a", type=float, default=0.03, help="interest rate")
    p.add_argument("--s0", type=float, default=None, help="initial debt (default: data)")
    p.add_argument(
        "--tranche", choices=("gdp_savings", "capital_increment"), default="gdp_savings"
    )
    p.add_argument("--compounding", choices=("origin", "to_date"), default="origin")
    _add_output_flags(p)
    p.set_defaults(func=cmd_debt)

    p = sub.add_parser("scenario", help="coupled economies from a world config")
    p.add_argument("--config", metavar="PATH", required=True)
    p.add_argument("--step", type=float, default=None)
    p.add_argument("--method", choices=("rk4", "euler"), default=None)
    _add_output_flags(p)
    p.set_defaults(func=cmd_scenario)

    p = sub.add_parser(
        "report", help="figure-reproduction dataset (CSV plus PNG chart)"
    )
    p.add_argument("figure", metavar="FIG", help=f"one of: {', '.join(_FIGURE_IDS)}")
    p.add_argument("--out", metavar="PATH", help="CSV path (default <fig>.csv)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=cmd_report)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except MacrofieldError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
