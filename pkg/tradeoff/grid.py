"""
Risk-utility trade-off over an (m, sigma) grid.

evaluate_grid runs one job per (sigma, replication): it synthesizes max(ms)
replicates with a job seed derived from (master_seed, sigma index,
replication) and evaluates every m on prefixes of that ensemble, so points
for different m share their first replicates. Hellinger and Euclidean
utilities are mapped onto [0, 1] as 1 - distance / (largest distance in
the run); the raw distances are kept alongside.
"""

import math
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from loguru import logger

from common.batch import run_ordered
from common.errors import ValidationError
from common.utils import derive_seed
from inference.analysis import analyze_ensemble, analyze_original
from inference.models import MarginalOddsSpec
from risk.analytic import tau3_analytic, tau4_analytic
from risk.empirical import tau3_empirical, tau4_empirical
from risk.models import TauBandQuery
from synthesis.engine import prefix, synthesize
from synthesis.models import SynthesisParams
from tables.ensemble_ops import average_ensemble
from tables.models import ContingencyTable, TauSpectrum
from tradeoff.models import GridSpec, TradeoffPoint
from utility.metrics import ci_overlap, euclidean, hellinger

# (sigma index, replication) -> {(m, band index): (risk, raw utility)}
JobResult = Dict[Tuple[int, int], Tuple[Optional[float], Optional[float]]]


def _mean_se(values: Sequence[Optional[float]]) -> Tuple[Optional[float], Optional[float]]:
    defined = np.array([v for v in values if v is not None], dtype=np.float64)
    if defined.size == 0:
        return None, None
    mean = float(defined.mean())
    if defined.size < 2:
        return mean, None
    return mean, float(defined.std(ddof=1) / math.sqrt(defined.size))


def _clip(value: Optional[float]) -> Optional[float]:
    return None if value is None else min(1.0, max(0.0, value))


def evaluate_grid(
    table: ContingencyTable,
    grid: GridSpec,
    analysis: Optional[MarginalOddsSpec] = None,
    workers: int = 1,
    progress: bool = False,
) -> List[TradeoffPoint]:
    """Empirical risk and utility at every (sigma, m, band) of the grid, averaged over replications."""
    if grid.utility_metric == "ci_overlap" and analysis is None:
        raise ValidationError("utility metric 'ci_overlap' needs an analysis spec (row/col predicates)")

    original_interval = None
    if grid.utility_metric == "ci_overlap":
        original_interval = analyze_original(table, analysis, grid.level, grid.correction)

    max_m = grid.ms[-1]
    jobs = [(j, sigma, r) for j, sigma in enumerate(grid.sigmas) for r in range(grid.replications)]

    def _run(job) -> JobResult:
        j, sigma, r = job
        params = SynthesisParams(
            sigma=sigma,
            alpha=grid.alpha,
            m=max_m,
            size_factor=grid.size_factor,
            master_seed=derive_seed(grid.master_seed, j, r),
        )
        ensemble = synthesize(table, params)
        result: JobResult = {}
        for m in grid.ms:
            sub = prefix(ensemble, m)
            averaged = average_ensemble(sub)
            utility_raw = None
            if grid.utility_metric == "hellinger":
                utility_raw = hellinger(table, averaged)
            elif grid.utility_metric == "euclidean":
                utility_raw = euclidean(table, averaged)
            elif grid.utility_metric == "ci_overlap":
                mode = grid.analysis_mode
                if mode == "separate" and m < 2:
                    # T_p needs two replicates
                    mode = "averaged"
                combined = analyze_ensemble(sub, analysis, mode=mode, level=grid.level, correction=grid.correction)
                utility_raw = ci_overlap(original_interval, combined.interval)
            for b, (k, d) in enumerate(grid.bands):
                if grid.risk_metric == "tau3":
                    risk = tau3_empirical(table, averaged, k, d)
                else:
                    risk = tau4_empirical(table, averaged, k, d)
                result[(m, b)] = (risk, utility_raw)
        return result

    logger.info(
        f"Evaluating grid: {len(grid.sigmas)} sigmas x {len(grid.ms)} m-values x {len(grid.bands)} bands, "
        f"{grid.replications} replication(s), {len(jobs)} jobs on {workers} worker(s)"
    )
    results = run_ordered(_run, jobs, workers=workers, desc="grid", progress=progress)

    scale = 1.0
    if grid.utility_metric in ("hellinger", "euclidean"):
        raws = [u for result in results for _, u in result.values() if u is not None]
        scale = max(raws) if raws else 0.0

    def _standardize(raw: Optional[float]) -> Optional[float]:
        if raw is None:
            return None
        if grid.utility_metric == "ci_overlap":
            return raw
        return 1.0 if scale == 0 else 1.0 - raw / scale

    points = []
    for j, sigma in enumerate(grid.sigmas):
        own = results[j * grid.replications : (j + 1) * grid.replications]
        for m in grid.ms:
            for b, (k, d) in enumerate(grid.bands):
                risks = [result[(m, b)][0] for result in own]
                raws = [result[(m, b)][1] for result in own]
                risk, risk_se = _mean_se(risks)
                utility, utility_se = _mean_se([_standardize(u) for u in raws])
                utility_raw, _ = _mean_se(raws)
                if risk is None:
                    logger.warning(f"{grid.risk_metric} undefined at m={m}, sigma={sigma}, band ({k}, {d})")
                points.append(
                    TradeoffPoint(
                        m=m,
                        sigma=sigma,
                        k=k,
                        d=d,
                        risk=_clip(risk),
                        risk_se=risk_se,
                        utility=_clip(utility),
                        utility_se=utility_se,
                        utility_raw=utility_raw,
                        provenance="empirical",
                    )
                )
    return points


def analytic_grid(tau2: TauSpectrum, grid: GridSpec) -> List[TradeoffPoint]:
    """Risk at every grid point from the CLT approximations; nothing is sampled."""
    if grid.utility_metric is not None:
        raise ValidationError(
            f"utility metric {grid.utility_metric!r} needs synthetic data; use evaluate_grid, "
            "or set utility_metric to None for an analytic risk surface"
        )
    if grid.alpha > 0:
        raise ValidationError("analytic_grid assumes alpha = 0; use evaluate_grid when alpha > 0")

    points = []
    for sigma in grid.sigmas:
        for m in grid.ms:
            for k, d in grid.bands:
                query = TauBandQuery(k=k, d=d, sigma=sigma, m=m)
                if k == 0:
                    risk = 1.0 if grid.risk_metric == "tau3" else None
                elif grid.risk_metric == "tau3":
                    risk = tau3_analytic(query, lattice_correction=grid.lattice_correction)
                else:
                    risk = tau4_analytic(
                        query,
                        tau2,
                        grid.truncation,
                        include_zero_cells=grid.include_zero_cells,
                        lattice_correction=grid.lattice_correction,
                    )
                points.append(
                    TradeoffPoint(m=m, sigma=sigma, k=k, d=d, risk=_clip(risk), provenance="analytic")
                )
    logger.info(f"Analytic grid: {len(points)} points")
    return points


def dominates(first: TradeoffPoint, second: TradeoffPoint) -> bool:
    """True when `first` has no more risk and no less utility than `second`, and is strictly better in one."""
    if None in (first.risk, first.utility, second.risk, second.utility):
        return False
    no_worse = first.risk <= second.risk and first.utility >= second.utility
    better = first.risk < second.risk or first.utility > second.utility
    return no_worse and better


def pareto_front(points: Sequence[TradeoffPoint]) -> List[TradeoffPoint]:
    """Points with defined risk and utility that no other point dominates, in input order."""
    candidates = [p for p in points if p.risk is not None and p.utility is not None]
    return [p for p in candidates if not any(dominates(other, p) for other in candidates)]


def points_to_rows(points: Sequence[TradeoffPoint]) -> List[Dict]:
    return [point.to_row() for point in points]
