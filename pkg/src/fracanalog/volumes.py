"""Ensemble volumes: mean pairwise squared distance of analogues and successors.

The volume of a k-member ensemble is the mean over all k(k-1)/2 unordered
pairs of the squared Euclidean distance. It is computed through the
algebraic identity

    volume = 2k/(k-1) * sum_c Var_c

(per-coordinate population variance, deviations taken from the ensemble
mean so no precision is lost), which is O(k p) per ensemble; the literal
O(k^2 p) pairwise sum is kept for cross-checking.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .analogues import NeighborIndex, query_batch
from .embedding import EmbeddedSeries

__all__ = ["VolumeRecord", "VolumeRecords", "analogue_volume",
           "analogue_volume_pairwise", "successor_volume", "compute_volume_records"]

CHUNK = 65536  # targets per gather; bounds peak memory of the (chunk, k, p) block


def _volume_identity(states: np.ndarray) -> np.ndarray:
    """Ensemble volume via the variance identity; states (..., k, p)."""
    k = states.shape[-2]
    if k < 2:
        raise ValueError(f"need at least 2 ensemble members, got {k}")
    dev = states - states.mean(axis=-2, keepdims=True)
    ssq = np.einsum("...kp,...kp->...", dev, dev)
    return 2.0 * ssq / (k - 1)


def analogue_volume(states: np.ndarray) -> float:
    """Volume of one k-member ensemble of p-vectors (k x p array)."""
    states = np.asarray(states, dtype=float)
    if states.ndim == 1:
        states = states[:, None]
    return float(_volume_identity(states))


def analogue_volume_pairwise(states: np.ndarray) -> float:
    """Literal pairwise-sum form, accumulation order fixed (i outer, j inner)."""
    states = np.asarray(states, dtype=float)
    if states.ndim == 1:
        states = states[:, None]
    k = states.shape[0]
    if k < 2:
        raise ValueError(f"need at least 2 ensemble members, got {k}")
    total = 0.0
    for i in range(1, k):
        d = states[i] - states[:i]
        total += float((d * d).sum())
    return 2.0 * total / (k * (k - 1))


# Successor ensembles obey the identical contract.
successor_volume = analogue_volume


@dataclass
class VolumeRecord:
    """Per-target volumes: delta_a and delta_s over the tau grid."""

    target_time_index: int
    delta_a: float
    delta_s: dict


@dataclass
class VolumeRecords:
    """Columnar store of one VolumeRecord per measure target state."""

    target_time_indices: np.ndarray
    taus: np.ndarray
    delta_a: np.ndarray       # (N,)
    delta_s: np.ndarray       # (N, len(taus))

    def __len__(self):
        return self.delta_a.size

    def __getitem__(self, i: int) -> VolumeRecord:
        return VolumeRecord(
            target_time_index=int(self.target_time_indices[i]),
            delta_a=float(self.delta_a[i]),
            delta_s={int(t): float(v) for t, v in zip(self.taus, self.delta_s[i])},
        )


def compute_volume_records(index: NeighborIndex, database: EmbeddedSeries,
                           measure: EmbeddedSeries, k: int,
                           tau_grid: np.ndarray, workers: int = -1) -> VolumeRecords:
    """delta_a and delta_s(tau) for every embedded state of the measure."""
    taus = np.asarray(tau_grid, dtype=int)
    if taus.size == 0:
        raise ValueError("tau grid is empty")
    if taus.min() < 1 or taus.max() > index.tau_max:
        raise ValueError(
            f"tau grid [{taus.min()}, {taus.max()}] must lie within "
            f"[1, tau_max={index.tau_max}]")
    if (database.source.params is not None and measure.source.params is not None
            and database.source.params.seed == measure.source.params.seed):
        raise ValueError("database and measure must be independent "
                         "realizations (identical seeds)")

    targets = measure.states
    n = targets.shape[0]
    _, rows = query_batch(index, targets, k, workers=workers)
    states = database.states
    delta_a = np.empty(n)
    delta_s = np.empty((n, taus.size))
    for lo in range(0, n, CHUNK):
        hi = min(lo + CHUNK, n)
        r = rows[lo:hi]
        delta_a[lo:hi] = _volume_identity(states[r])
        for j, tau in enumerate(taus):
            delta_s[lo:hi, j] = _volume_identity(states[r + tau])
    return VolumeRecords(
        target_time_indices=np.arange(n) + measure.first_time_index,
        taus=taus, delta_a=delta_a, delta_s=delta_s)
