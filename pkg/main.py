#!/usr/bin/env python
"""
tabsynth - Main Entry Point
---
Command line interface binding table ingestion, saturated-model synthesis,
disclosure-risk and utility metrics, combining-rule inference and the
risk-utility trade-off grid into reproducible pipelines.

Exit codes: 0 success, 2 validation error, 3 undefined metric.
"""

import functools
import itertools
import json
import sys
from datetime import datetime
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import click
from loguru import logger
from pydantic import ValidationError as PydanticValidationError

from common.errors import UndefinedMetricError, ValidationError
from common.exporter import export_to_csv, export_to_json
from common.pydantic_utils import dict_to_pydantic_model, model_to_dict
from common.utils import format_number, parse_band, parse_float_list, parse_int_list
from config import config
from inference.analysis import analyze_ensemble, analyze_original
from inference.models import MarginalOddsSpec
from risk.report import analytic_report, empirical_report, report_rows, report_to_dict
from synthesis.engine import synthesize as run_synthesis
from synthesis.models import SynthesisParams
from synthesis.storage import export_ensemble_csv, load_ensemble, save_ensemble
from tables.aggregate import load_microdata_csv
from tables.ensemble_ops import average_ensemble
from tables.fixtures import CENSUS_LIKE_SPECTRUM, fixture_from_spectrum
from tables.io import load_contingency_table, load_schema, load_spectrum, save_table
from tables.spectrum import tau_spectrum
from tradeoff.grid import analytic_grid, evaluate_grid, pareto_front, points_to_rows
from tradeoff.models import GridSpec
from utility.metrics import DEFAULT_QUANTILES, ci_overlap, utility_report

EXIT_VALIDATION = 2
EXIT_UNDEFINED = 3

RISK_COLUMNS = ["k", "d", "sigma", "m", "tau3", "tau4", "mode"]
TRADEOFF_COLUMNS = ["m", "sigma", "k", "d", "risk", "risk_se", "utility", "utility_se", "utility_raw", "provenance"]
ANALYZE_COLUMNS = ["sigma", "q_bar", "b_m", "v_bar", "variance", "dof", "lower", "upper", "level", "estimator", "mode", "m"]


# Configure logging
def setup_logging(log_dir_override=None, level: Optional[str] = None):
    """Configure logging for the application."""
    log_dir = Path(log_dir_override) if log_dir_override else config.runtime.log_dir
    log_dir.mkdir(parents=True, exist_ok=True)
    level = level or config.runtime.log_level

    # Remove default logger
    logger.remove()

    # Add file logger with rotation
    log_file = log_dir / f"tabsynth_{datetime.now().strftime('%Y%m%d')}.log"
    logger.add(
        log_file,
        rotation="10 MB",
        retention="1 week",
        level=level,
        format="{time:YYYY-MM-DD HH:mm:ss} | {level} | {message}",
    )

    # Add console logger
    logger.add(
        sys.stderr,
        level=level,
        format="<green>{time:HH:mm:ss}</green> | <level>{level}</level> | <level>{message}</level>",
    )

    return logger


def handle_errors(fn):
    """Map library errors onto the CLI exit codes."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except (ValidationError, PydanticValidationError) as e:
            logger.error(f"Validation failed: {e}")
            click.echo(f"Error: {e}", err=True)
            sys.exit(EXIT_VALIDATION)
        except UndefinedMetricError as e:
            logger.warning(str(e))
            click.echo(f"Undefined metric: {e}", err=True)
            sys.exit(EXIT_UNDEFINED)

    return wrapper


def _output_path(path: Optional[str], default_name: str) -> Path:
    return Path(path) if path else config.runtime.output_dir / default_name


def _collect_bands(bands: Tuple[str, ...], ks: Tuple[int, ...], ds: Tuple[float, ...]) -> List[Tuple[int, float]]:
    """--band k:d entries plus the cross product of --k and --d; defaults to (1, 0.5)."""
    collected = [parse_band(b) for b in bands]
    if ks or ds:
        collected.extend(itertools.product(ks or (1,), ds or (0.5,)))
    if not collected:
        collected = [(1, 0.5)]
    return list(dict.fromkeys(collected))


def _load_analysis(path: str) -> MarginalOddsSpec:
    with open(path, "r", encoding="utf-8") as f:
        return dict_to_pydantic_model(json.load(f), MarginalOddsSpec)


def _estimator(value: Optional[str]) -> Optional[str]:
    return {"tp": "Tp", "ts": "Ts"}.get(value.lower()) if value else None


@click.group()
@click.version_option(version="0.1.0")
@click.option("--log-dir", type=click.Path(file_okay=False), default=None, help="Directory for log files")
@click.option("--verbose", "-v", is_flag=True, help="Log at DEBUG level")
def cli(log_dir, verbose):
    """tabsynth - Saturated-model synthesis of contingency tables with risk-utility reporting."""
    setup_logging(log_dir, "DEBUG" if verbose else None)


@cli.command()
@click.argument("microdata", type=click.Path(exists=True, dir_okay=False))
@click.option("--schema", "schema_path", type=click.Path(exists=True, dir_okay=False), help="Schema JSON fixing variable and category order")
@click.option("--output", "-o", type=click.Path(), help="Output table JSON")
@handle_errors
def aggregate(microdata, schema_path, output):
    """Aggregate a CSV of categorical records into a contingency table."""
    schema = load_schema(schema_path) if schema_path else None
    table, _ = load_microdata_csv(microdata, schema)
    path = _output_path(output, "table.json")
    save_table(table, path)
    logger.info(f"Aggregated {table.n} records into K={table.K} cells")
    click.echo(f"Wrote table with K={table.K}, n={table.n} to {path}")


@cli.command()
@click.option("--spectrum", "spectrum_path", type=click.Path(exists=True, dir_okay=False), help="Spectrum JSON (defaults to the census-like spectrum)")
@click.option("--cells", "-K", "cells", type=int, required=True, help="Number of cells K")
@click.option("--max-count", type=int, default=None, help="Upper end of an open k+ spectrum bucket")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--output", "-o", type=click.Path(), help="Output table JSON")
@handle_errors
def fixture(spectrum_path, cells, max_count, seed, output):
    """Generate a fixture table whose cell sizes follow a τ₂ spectrum."""
    spectrum = load_spectrum(spectrum_path, total_cells=cells) if spectrum_path else CENSUS_LIKE_SPECTRUM
    table = fixture_from_spectrum(spectrum, cells, max_count=max_count, seed=seed)
    path = _output_path(output, "fixture.json")
    save_table(table, path)
    click.echo(f"Wrote fixture with K={table.K}, n={table.n} to {path}")


@cli.command()
@click.argument("table_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--sigma", type=float, default=None, help="NBI dispersion σ")
@click.option("--alpha", type=float, default=None, help="Pseudocount mean for sampling zeros")
@click.option("--alpha-on", is_flag=True, help="Use the configured default α for sampling zeros")
@click.option("-m", "m", type=int, default=None, help="Number of synthetic replicates")
@click.option("--size-factor", type=float, default=None, help="Expected n_syn / n")
@click.option("--seed", type=int, default=None, help="Master seed")
@click.option("--workers", type=int, default=None, help="Worker threads")
@click.option("--format", "fmt", type=click.Choice(["dir", "csv"]), default="dir", show_default=True)
@click.option("--output", "-o", type=click.Path(), help="Ensemble directory (dir) or CSV file (csv)")
@handle_errors
def synthesize(table_path, sigma, alpha, alpha_on, m, size_factor, seed, workers, fmt, output):
    """Generate m synthetic replicates of a table."""
    defaults = config.synthesis
    if alpha is None:
        alpha = defaults.alpha_enabled if alpha_on else defaults.alpha
    params = SynthesisParams(
        sigma=defaults.sigma if sigma is None else sigma,
        alpha=alpha,
        m=defaults.m if m is None else m,
        size_factor=defaults.size_factor if size_factor is None else size_factor,
        master_seed=defaults.seed if seed is None else seed,
    )
    table = load_contingency_table(table_path)
    ensemble = run_synthesis(table, params, workers=workers or config.runtime.workers)
    if fmt == "csv":
        path = export_ensemble_csv(ensemble, _output_path(output, "ensemble.csv"))
    else:
        path = save_ensemble(ensemble, _output_path(output, "ensemble"))
    click.echo(f"Wrote m={ensemble.m} replicates to {path}")


@cli.command()
@click.option("--table", "table_path", type=click.Path(exists=True, dir_okay=False), help="Original table JSON")
@click.option("--ensemble", "ensemble_path", type=click.Path(exists=True), help="Ensemble directory or CSV (empirical mode)")
@click.option("--analytic", is_flag=True, help="Use the CLT approximations instead of an ensemble")
@click.option("--spectrum", "spectrum_path", type=click.Path(exists=True, dir_okay=False), help="τ₂ spectrum JSON for analytic mode")
@click.option("--sigma", type=float, default=None, help="σ for analytic mode")
@click.option("-m", "m", type=int, default=None, help="m for analytic mode")
@click.option("--band", "bands", multiple=True, help="Band as k:d; repeatable")
@click.option("--k", "ks", type=int, multiple=True, help="Band k; crossed with --d")
@click.option("--d", "ds", type=float, multiple=True, help="Band d; crossed with --k")
@click.option("--truncation", type=int, default=None, help="Largest cell size in the analytic τ₄ denominator")
@click.option("--lattice-correction", is_flag=True, help="Widen d by 1/(2m) in the analytic forms")
@click.option("--include-zero-cells", is_flag=True, help="Count zero cells in the analytic τ₄ denominator")
@click.option("--output", "-o", type=click.Path(), help="Output τ CSV")
@click.option("--json", "json_path", type=click.Path(), help="Also write the full report as JSON")
@handle_errors
def risk(
    table_path, ensemble_path, analytic, spectrum_path, sigma, m, bands, ks, ds,
    truncation, lattice_correction, include_zero_cells, output, json_path,
):
    """Compute τ₃/τ₄ disclosure-risk metrics, empirically or analytically."""
    band_list = _collect_bands(bands, ks, ds)
    if analytic:
        if spectrum_path:
            tau2 = load_spectrum(spectrum_path)
        elif table_path:
            tau2 = tau_spectrum(load_contingency_table(table_path))
        else:
            raise ValidationError("Analytic mode needs --table or --spectrum")
        report = analytic_report(
            tau2,
            band_list,
            sigma=config.synthesis.sigma if sigma is None else sigma,
            m=config.synthesis.m if m is None else m,
            truncation=truncation,
            include_zero_cells=include_zero_cells,
            lattice_correction=lattice_correction,
        )
    else:
        if not (table_path and ensemble_path):
            raise ValidationError("Empirical mode needs --table and --ensemble (or pass --analytic)")
        table = load_contingency_table(table_path)
        ensemble = load_ensemble(ensemble_path)
        report = empirical_report(
            table, average_ensemble(ensemble), band_list, sigma=ensemble.params.sigma, m=ensemble.m
        )

    path = _output_path(output, "risk.csv")
    export_to_csv(report_rows(report), str(path), fieldnames=RISK_COLUMNS)
    if json_path:
        export_to_json(report_to_dict(report), json_path)
    click.echo(f"Wrote {len(band_list)} band(s) to {path}")

    undefined = report.undefined_bands()
    if undefined:
        raise UndefinedMetricError("tau3/tau4", f"no qualifying cells for band(s) {', '.join(undefined)}")


@cli.command()
@click.argument("table_path", type=click.Path(exists=True, dir_okay=False))
@click.argument("ensemble_path", type=click.Path(exists=True))
@click.option("--quantiles", default=",".join(format_number(q) for q in DEFAULT_QUANTILES), show_default=True)
@click.option("--analysis", "analysis_path", type=click.Path(exists=True, dir_okay=False), help="Analysis spec JSON; adds CI overlap")
@click.option("--mode", type=click.Choice(["separate", "averaged"]), default="separate", show_default=True)
@click.option("--level", type=float, default=0.95, show_default=True)
@click.option("--correction", type=float, default=0.0, help="Added to each 2x2 cell before the log-odds ratio")
@click.option("--output", "-o", type=click.Path(), help="Output utility CSV")
@handle_errors
def utility(table_path, ensemble_path, quantiles, analysis_path, mode, level, correction, output):
    """Compare a synthetic ensemble with the original table."""
    table = load_contingency_table(table_path)
    ensemble = load_ensemble(ensemble_path)
    averaged = average_ensemble(ensemble)
    ci_pair = None
    if analysis_path:
        spec = _load_analysis(analysis_path)
        if mode == "separate" and ensemble.m < 2:
            mode = "averaged"
        combined = analyze_ensemble(ensemble, spec, mode=mode, level=level, correction=correction)
        ci_pair = (analyze_original(table, spec, level, correction), combined.interval)
    report = utility_report(
        table, averaged, parse_float_list(quantiles), ci_pair, sigma=ensemble.params.sigma, m=ensemble.m
    )
    row: Dict = {"sigma": report.sigma, "m": report.m, "hellinger": report.hellinger, "euclidean": report.euclidean}
    row.update({f"pct_diff_q{q}": v for q, v in report.pct_diff_quantiles.items()})
    row["ci_overlap"] = report.ci_overlap
    path = _output_path(output, "utility.csv")
    export_to_csv([row], str(path))
    click.echo(f"Wrote utility report to {path}")


@cli.command()
@click.argument("ensemble_path", type=click.Path(exists=True))
@click.argument("analysis_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--mode", type=click.Choice(["separate", "averaged"]), default="separate", show_default=True)
@click.option("--estimator", type=click.Choice(["tp", "ts"], case_sensitive=False), default=None, help="Defaults to tp for separate, ts for averaged")
@click.option("--level", type=float, default=0.95, show_default=True)
@click.option("--correction", type=float, default=0.0, help="Added to each 2x2 cell before the log-odds ratio")
@click.option("--n", "n", type=float, default=None, help="Original sample size for T_s (defaults to the ensemble's record)")
@click.option("--table", "table_path", type=click.Path(exists=True, dir_okay=False), help="Original table; adds its interval and the CI overlap")
@click.option("--output", "-o", type=click.Path(), help="Output estimate JSON")
@click.option("--append-csv", "append_csv", type=click.Path(dir_okay=False), help="Also append the estimate and sigma as one row of this CSV")
@handle_errors
def analyze(ensemble_path, analysis_path, mode, estimator, level, correction, n, table_path, output, append_csv):
    """Estimate a 2x2 log-odds ratio from synthetic data with the T_p or T_s combining rule."""
    ensemble = load_ensemble(ensemble_path)
    spec = _load_analysis(analysis_path)
    combined = analyze_ensemble(
        ensemble, spec, mode=mode, estimator=_estimator(estimator), level=level, correction=correction, n=n
    )
    row = combined.to_row()
    payload = {"estimate": row}
    if table_path:
        original = analyze_original(load_contingency_table(table_path), spec, level, correction)
        payload["original"] = model_to_dict(original)
        payload["ci_overlap"] = ci_overlap(original, combined.interval)
    path = _output_path(output, "estimate.json")
    export_to_json(payload, str(path))
    if append_csv:
        export_to_csv([{"sigma": ensemble.params.sigma, **row}], append_csv, fieldnames=ANALYZE_COLUMNS, append=True)
    interval = combined.interval
    click.echo(
        f"{combined.estimator}: q̄={format_number(combined.q_bar)} "
        f"[{format_number(interval.lower)}, {format_number(interval.upper)}] -> {path}"
    )


@cli.command()
@click.argument("table_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--grid", "grid_path", type=click.Path(exists=True, dir_okay=False), help="Grid spec JSON; flags override its fields")
@click.option("--sigmas", default=None, help="Comma-separated σ values")
@click.option("--ms", default=None, help="Comma-separated m values")
@click.option("--band", "bands", multiple=True, help="Band as k:d; repeatable")
@click.option("--k", "ks", type=int, multiple=True)
@click.option("--d", "ds", type=float, multiple=True)
@click.option("--risk-metric", type=click.Choice(["tau3", "tau4"]), default=None)
@click.option("--utility-metric", type=click.Choice(["hellinger", "euclidean", "ci_overlap", "none"]), default=None)
@click.option("--analysis", "analysis_path", type=click.Path(exists=True, dir_okay=False), help="Analysis spec JSON for ci_overlap")
@click.option("--mode", type=click.Choice(["separate", "averaged"]), default=None)
@click.option("--replications", type=int, default=None)
@click.option("--seed", type=int, default=None, help="Master seed")
@click.option("--alpha", type=float, default=None)
@click.option("--size-factor", type=float, default=None)
@click.option("--level", type=float, default=None)
@click.option("--truncation", type=int, default=None)
@click.option("--lattice-correction", is_flag=True, help="Widen d by 1/(2m) in the analytic forms")
@click.option("--analytic", is_flag=True, help="Risk from the CLT approximations; no sampling")
@click.option("--workers", type=int, default=None)
@click.option("--progress", is_flag=True, help="Show a progress bar")
@click.option("--front", "front_path", type=click.Path(), help="Also write the non-dominated points to this CSV")
@click.option("--output", "-o", type=click.Path(), help="Output points CSV")
@handle_errors
def tradeoff(
    table_path, grid_path, sigmas, ms, bands, ks, ds, risk_metric, utility_metric, analysis_path, mode,
    replications, seed, alpha, size_factor, level, truncation, lattice_correction, analytic, workers,
    progress, front_path, output,
):
    """Evaluate risk and utility over an (m, σ) grid."""
    fields: Dict = {}
    if grid_path:
        with open(grid_path, "r", encoding="utf-8") as f:
            fields.update(json.load(f))
    overrides = {
        "sigmas": parse_float_list(sigmas) if sigmas else None,
        "ms": parse_int_list(ms) if ms else None,
        "bands": _collect_bands(bands, ks, ds) if (bands or ks or ds) else None,
        "risk_metric": risk_metric,
        "analysis_mode": mode,
        "replications": replications,
        "master_seed": seed,
        "alpha": alpha,
        "size_factor": size_factor,
        "level": level,
        "truncation": truncation,
        "lattice_correction": lattice_correction or None,
    }
    fields.update({key: value for key, value in overrides.items() if value is not None})
    if utility_metric is not None:
        fields["utility_metric"] = None if utility_metric == "none" else utility_metric
    elif analytic:
        fields.setdefault("utility_metric", None)
    if "master_seed" not in fields:
        fields["master_seed"] = config.synthesis.seed
    grid = dict_to_pydantic_model(fields, GridSpec)

    table = load_contingency_table(table_path)
    if analytic:
        points = analytic_grid(tau_spectrum(table), grid)
    else:
        analysis = _load_analysis(analysis_path) if analysis_path else None
        points = evaluate_grid(table, grid, analysis, workers=workers or config.runtime.workers, progress=progress)

    path = _output_path(output, "tradeoff.csv")
    export_to_csv(points_to_rows(points), str(path), fieldnames=TRADEOFF_COLUMNS)
    if front_path:
        front = pareto_front(points)
        if front:
            export_to_csv(points_to_rows(front), front_path, fieldnames=TRADEOFF_COLUMNS)
        else:
            logger.warning("No points with both risk and utility; front not written")
    click.echo(f"Wrote {len(points)} trade-off points to {path}")

    undefined = [p for p in points if p.risk is None]
    if undefined:
        raise UndefinedMetricError(grid.risk_metric, f"undefined at {len(undefined)} grid point(s)")


if __name__ == "__main__":
    cli()
