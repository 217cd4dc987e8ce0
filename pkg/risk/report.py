"""Building, serializing and flattening τ reports."""

import math
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from loguru import logger

from common.utils import band_key
from risk.analytic import tau3_analytic, tau4_analytic
from risk.empirical import tau3_empirical, tau4_empirical
from risk.models import TauBandQuery, TauReport
from synthesis.nbi import nbi_pmf, nbi_tail_bound
from tables.models import ContingencyTable, RealTable, TauSpectrum
from tables.spectrum import tau_spectrum

Band = Tuple[int, float]


def empirical_report(
    original: ContingencyTable,
    averaged: RealTable,
    bands: Sequence[Band],
    sigma: Optional[float] = None,
    m: Optional[int] = None,
) -> TauReport:
    tau3: Dict[str, Optional[float]] = {}
    tau4: Dict[str, Optional[float]] = {}
    for k, d in bands:
        key = band_key(k, d)
        tau3[key] = tau3_empirical(original, averaged, k, d)
        tau4[key] = tau4_empirical(original, averaged, k, d)
    return TauReport(
        tau1=tau_spectrum(averaged, binning="unit-rounded"),
        tau2=tau_spectrum(original),
        tau3=tau3,
        tau4=tau4,
        mode="empirical",
        sigma=sigma,
        m=m,
    )


def analytic_report(
    tau2: TauSpectrum,
    bands: Sequence[Band],
    sigma: float,
    m: int,
    truncation: Optional[int] = None,
    include_zero_cells: bool = False,
    lattice_correction: bool = False,
) -> TauReport:
    tau3: Dict[str, Optional[float]] = {}
    tau4: Dict[str, Optional[float]] = {}
    for k, d in bands:
        key = band_key(k, d)
        query = TauBandQuery(k=k, d=d, sigma=sigma, m=m)
        if k == 0:
            # zeros stay zero with alpha = 0
            tau3[key] = 1.0
            tau4[key] = None
            logger.debug("Analytic τ₄ for k=0 is not covered by the CLT form; reported as undefined")
            continue
        tau3[key] = tau3_analytic(query, lattice_correction=lattice_correction)
        tau4[key] = tau4_analytic(
            query, tau2, truncation, include_zero_cells=include_zero_cells, lattice_correction=lattice_correction
        )

    tau1 = None
    if m == 1:
        spectrum = tau2.expand_tail(truncation) if tau2.tail_start is not None and truncation else tau2
        if spectrum.tail_start is None:
            tau1 = _expected_tau1_spectrum(spectrum, sigma)
    return TauReport(tau1=tau1, tau2=tau2, tau3=tau3, tau4=tau4, mode="analytic", sigma=sigma, m=m)


def _expected_tau1_spectrum(tau2: TauSpectrum, sigma: float) -> TauSpectrum:
    """Expected single-replicate τ₁ up to the NBI tail bound of the largest cell; the rest is an open tail."""
    sizes = [i for i, p in tau2.proportions.items() if p > 0]
    largest = max(sizes)
    upper = nbi_tail_bound(largest, sigma) if largest > 0 else 0
    ks = np.arange(upper + 1)
    expected = np.zeros(upper + 1, dtype=np.float64)
    for i in sizes:
        if i == 0:
            expected[0] += tau2.get(0)
        else:
            expected += tau2.get(i) * nbi_pmf(ks, i, sigma)
    proportions = {int(k): float(p) for k, p in zip(ks, expected) if p > 0}
    tail = upper + 1
    proportions[tail] = max(0.0, 1.0 - math.fsum(proportions.values()))
    return TauSpectrum(proportions=proportions, total_cells=tau2.total_cells, tail_start=tail)


def report_rows(report: TauReport) -> List[Dict]:
    """Flat rows: k, d, sigma, m, tau3, tau4, mode."""
    rows = []
    for key in report.tau3:
        k, d = key.split(":")
        rows.append(
            {
                "k": int(k),
                "d": float(d),
                "sigma": report.sigma,
                "m": report.m,
                "tau3": report.tau3[key],
                "tau4": report.tau4.get(key),
                "mode": report.mode,
            }
        )
    return rows


def report_to_dict(report: TauReport) -> Dict:
    return {
        "mode": report.mode,
        "sigma": report.sigma,
        "m": report.m,
        "tau1": report.tau1.to_json_dict() if report.tau1 else None,
        "tau2": report.tau2.to_json_dict(),
        "tau3": dict(report.tau3),
        "tau4": dict(report.tau4),
    }
