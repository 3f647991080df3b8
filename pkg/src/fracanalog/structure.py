"""Structure-function oracle: increment moments and scaling exponents.

Certifies synthesized processes independently of the phase-space pipeline:
E|x(t) - x(t-tau)|^q fitted as a power law of tau over the inertial range
gives the scaling exponents zeta(q).
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .synthesis import TimeSeries

__all__ = ["StructureFunctionTable", "ZetaEstimate", "log_spaced_lags",
           "structure_functions", "scaling_exponents"]


@dataclass
class StructureFunctionTable:
    lags: np.ndarray     # in samples (units of dt)
    orders: np.ndarray
    values: np.ndarray   # (len(lags), len(orders))


@dataclass
class ZetaEstimate:
    q: float
    zeta: float
    stderr: float
    degenerate: bool = False


def log_spaced_lags(lo: float, hi: float, per_decade: int = 12) -> np.ndarray:
    """Integer lags, log-uniform at per_decade points per decade, deduplicated."""
    if not 0 < lo <= hi:
        raise ValueError(f"need 0 < lo <= hi, got [{lo}, {hi}]")
    count = int(np.ceil(per_decade * np.log10(hi / lo))) + 1
    grid = np.logspace(np.log10(lo), np.log10(hi), max(count, 1))
    return np.unique(np.round(grid).astype(int))


def structure_functions(series: TimeSeries, lags, orders) -> StructureFunctionTable:
    """Empirical moments E|delta_tau x|^q on a (lag, order) grid."""
    x = np.asarray(series.values, dtype=float)
    n = x.size
    lags = np.asarray(lags, dtype=int)
    orders = np.asarray(orders, dtype=float)
    if lags.size == 0 or orders.size == 0:
        raise ValueError("lags and orders must be non-empty")
    if lags.min() < 1:
        raise ValueError(f"lags must be >= 1, got {lags.min()}")
    if lags.max() >= n:
        raise ValueError(f"lag {lags.max()} is not smaller than the series "
                         f"length {n}")
    if lags.max() >= n / 10:
        warnings.warn(
            f"largest lag {lags.max()} exceeds n/10 = {n / 10:.0f}; moments "
            "there are statistically weak", stacklevel=2)
    values = np.empty((lags.size, orders.size))
    for i, lag in enumerate(lags):
        d = np.abs(x[lag:] - x[:-lag])
        for j, q in enumerate(orders):
            values[i, j] = 1.0 if q == 0.0 else float(np.mean(d ** q))
    return StructureFunctionTable(lags=lags, orders=orders, values=values)


def _slope_with_stderr(lx, ly):
    cx = lx - lx.mean()
    sxx = float((cx * cx).sum())
    slope = float((cx * ly).sum()) / sxx
    intercept = float(ly.mean() - slope * lx.mean())
    resid = ly - (slope * lx + intercept)
    dof = max(lx.size - 2, 1)
    stderr = float(np.sqrt((resid * resid).sum() / dof / sxx))
    return slope, intercept, stderr


def scaling_exponents(table: StructureFunctionTable,
                      fit_range: tuple) -> list[ZetaEstimate]:
    """Least-squares slope of ln E|delta_tau x|^q vs ln tau, per order.

    Orders whose moments leave fewer than 3 finite log points inside the
    fit range are flagged degenerate and carry NaN estimates.
    """
    lo, hi = fit_range
    mask = (table.lags >= lo) & (table.lags <= hi)
    if mask.sum() < 5:
        raise ValueError(
            f"fit range [{lo}, {hi}] contains only {int(mask.sum())} lags; "
            "need at least 5")
    lx_all = np.log(table.lags[mask].astype(float))
    out = []
    for j, q in enumerate(table.orders):
        with np.errstate(divide="ignore"):
            ly = np.log(table.values[mask, j])
        finite = np.isfinite(ly)
        if finite.sum() < 3:
            out.append(ZetaEstimate(q=float(q), zeta=float("nan"),
                                    stderr=float("nan"), degenerate=True))
            continue
        slope, _, stderr = _slope_with_stderr(lx_all[finite], ly[finite])
        out.append(ZetaEstimate(q=float(q), zeta=slope, stderr=stderr))
    return out
