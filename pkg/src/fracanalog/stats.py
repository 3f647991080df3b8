"""Ensemble statistics: volume PDFs, dispersion curves, and scaling fits.

All logarithms are natural. Volume PDFs describe log(delta_a) over the
collection of target states; dispersion curves track the mean successor
volume and the target-wise regression exponent alpha(tau) of
log delta_s on log delta_a.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import stats as sstats

from .volumes import VolumeRecords

__all__ = ["LogVolumePdf", "DispersionCurve", "ScalingFit", "log_volume_pdf",
           "rescaled_pdf", "dispersion_curve", "fit_domain_slopes",
           "fit_alpha_intermittency"]


@dataclass
class LogVolumePdf:
    bin_centers: np.ndarray
    densities: np.ndarray
    mean: float
    std: float
    n_samples: int
    n_dropped: int = 0
    degenerate: bool = False


@dataclass
class DispersionCurve:
    taus: np.ndarray
    mean_delta_s: np.ndarray
    mean_log_delta_s: np.ndarray
    alpha: np.ndarray
    alpha_stderr: np.ndarray


@dataclass
class ScalingFit:
    slope: float
    intercept: float
    stderr: float
    fit_range: tuple
    n_points: int


def _fit_line(x: np.ndarray, y: np.ndarray) -> tuple[float, float, float]:
    cx = x - x.mean()
    sxx = float((cx * cx).sum())
    slope = float((cx * y).sum()) / sxx
    intercept = float(y.mean() - slope * x.mean())
    resid = y - (slope * x + intercept)
    dof = max(x.size - 2, 1)
    stderr = float(np.sqrt((resid * resid).sum() / dof / sxx))
    return slope, intercept, stderr


def log_volume_pdf(records: VolumeRecords, n_bins: int = 100) -> LogVolumePdf:
    """Normalized histogram of log(delta_a) plus its raw mean and std.

    Zero volumes cannot be logged; they are dropped and counted, and more
    than 0.1% of them is an error.
    """
    da = np.asarray(records.delta_a, dtype=float)
    positive = da > 0.0
    n_dropped = int(da.size - positive.sum())
    if da.size == 0:
        raise ValueError("no volume records")
    if n_dropped > 0.001 * da.size:
        raise ValueError(
            f"{n_dropped} of {da.size} records have zero volume "
            "(over 0.1%); the database cannot resolve these targets")
    logs = np.log(da[positive])
    mean = float(logs.mean())
    std = float(logs.std())
    degenerate = std == 0.0
    counts, edges = np.histogram(logs, bins=n_bins)
    widths = np.diff(edges)
    densities = counts / (logs.size * widths)
    centers = 0.5 * (edges[:-1] + edges[1:])
    return LogVolumePdf(bin_centers=centers, densities=densities, mean=mean,
                        std=std, n_samples=int(logs.size),
                        n_dropped=n_dropped, degenerate=degenerate)


def rescaled_pdf(pdf: LogVolumePdf) -> LogVolumePdf:
    """Standardize the abscissa to zero mean, unit std; area is preserved."""
    if pdf.degenerate or pdf.std <= 0.0:
        raise ValueError("cannot rescale a degenerate (zero-std) PDF")
    return LogVolumePdf(
        bin_centers=(pdf.bin_centers - pdf.mean) / pdf.std,
        densities=pdf.densities * pdf.std,
        mean=0.0, std=1.0, n_samples=pdf.n_samples,
        n_dropped=pdf.n_dropped, degenerate=False)


def dispersion_curve(records: VolumeRecords, robust: bool = False,
                     robust_max_points: int = 2000) -> DispersionCurve:
    """Mean successor volume and alpha(tau) across targets, per tau.

    alpha is the ordinary least-squares slope of log delta_s on log
    delta_a; robust=True switches to Theil-Sen on an evenly strided
    subsample (all-pairs on the full set would be quadratic).
    """
    n = len(records)
    if n < 2:
        raise ValueError("need at least 2 records")
    if n < 1000:
        warnings.warn(f"only {n} records; alpha estimates will be noisy",
                      stacklevel=2)
    da = records.delta_a
    with np.errstate(divide="ignore"):
        la = np.log(da)
    taus = records.taus
    mean_ds = np.empty(taus.size)
    mean_log_ds = np.empty(taus.size)
    alpha = np.empty(taus.size)
    alpha_err = np.empty(taus.size)
    for j in range(taus.size):
        ds = records.delta_s[:, j]
        finite = np.isfinite(ds) & np.isfinite(da)
        if not finite.any():
            raise ValueError(f"all volumes non-finite at tau={taus[j]}")
        mean_ds[j] = ds[finite].mean()
        with np.errstate(divide="ignore"):
            ls = np.log(ds)
        ok = finite & np.isfinite(ls) & np.isfinite(la)
        mean_log_ds[j] = ls[ok].mean()
        x, y = la[ok], ls[ok]
        if robust:
            stride = max(1, x.size // robust_max_points)
            res = sstats.theilslopes(y[::stride], x[::stride])
            alpha[j] = res.slope
            alpha_err[j] = 0.25 * (res.high_slope - res.low_slope)
        else:
            alpha[j], _, alpha_err[j] = _fit_line(x, y)
    return DispersionCurve(taus=taus, mean_delta_s=mean_ds,
                           mean_log_delta_s=mean_log_ds,
                           alpha=alpha, alpha_stderr=alpha_err)


def fit_domain_slopes(curve: DispersionCurve, tau_k: float, big_t: float
                      ) -> tuple[ScalingFit, ScalingFit, float]:
    """Log-log fits of the mean successor volume in the three scale domains.

    Dissipative: tau < tau_k. Inertial: [3 tau_k, T/3]. The integral
    domain is summarized by the plateau level, the plain mean of
    <delta_s> over tau > 2T.
    """
    taus = curve.taus.astype(float)
    x = np.log(taus / big_t)
    y = np.log(curve.mean_delta_s)
    fits = []
    for name, mask, rng in (
        ("dissipative", taus < tau_k, (taus.min(), tau_k)),
        ("inertial", (taus >= 3 * tau_k) & (taus <= big_t / 3),
         (3 * tau_k, big_t / 3)),
    ):
        if mask.sum() < 3:
            raise ValueError(f"{name} domain has only {int(mask.sum())} grid "
                             "points; need at least 3")
        slope, intercept, stderr = _fit_line(x[mask], y[mask])
        fits.append(ScalingFit(slope=slope, intercept=intercept, stderr=stderr,
                               fit_range=rng, n_points=int(mask.sum())))
    plateau_mask = taus > 2 * big_t
    if plateau_mask.sum() < 3:
        raise ValueError(f"integral domain has only {int(plateau_mask.sum())} "
                         "grid points; need at least 3")
    plateau = float(curve.mean_delta_s[plateau_mask].mean())
    return fits[0], fits[1], plateau


def fit_alpha_intermittency(curves: dict, tau_k: float, big_t: float,
                            with_offset: bool = True,
                            ) -> tuple[float, float, Optional[float]]:
    """Pooled estimate of gamma in alpha(tau) = -gamma sqrt(c2) log(tau/T).

    Pools (tau, alpha) points of every c2 > 0 curve over the inertial
    window [3 tau_k, T/3] and regresses alpha on u = -sqrt(c2) log(tau/T).
    A finite database offsets the alpha curves upward without changing
    their slope, so by default a common intercept is estimated alongside
    gamma and returned as the third element; with_offset=False forces the
    through-origin form. Curves with c2 = 0 carry no weight either way.

    Returns (gamma, stderr, offset or None).
    """
    u, a = [], []
    for c2, curve in curves.items():
        if c2 <= 0.0:
            continue
        taus = curve.taus.astype(float)
        mask = (taus >= 3 * tau_k) & (taus <= big_t / 3)
        u.append(np.sqrt(c2) * (-np.log(taus[mask] / big_t)))
        a.append(curve.alpha[mask])
    if not u:
        raise ValueError("need at least one curve with c2 > 0")
    u = np.concatenate(u)
    a = np.concatenate(a)
    if u.size < 2 or np.ptp(u) == 0.0:
        raise ValueError("degenerate design: need at least two distinct "
                         "(c2, tau) combinations")
    if with_offset:
        gamma, offset, stderr = _fit_line(u, a)
        return gamma, stderr, offset
    gamma = float((u * a).sum() / (u * u).sum())
    resid = a - gamma * u
    stderr = float(np.sqrt((resid * resid).sum() / max(u.size - 1, 1)
                           / (u * u).sum()))
    return gamma, stderr, None
