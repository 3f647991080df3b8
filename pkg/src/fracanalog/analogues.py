"""Exact nearest-neighbor search over embedded states.

The database index only admits states that still have successors tau_max
steps ahead, so every returned analogue can be advanced by any tau up to
tau_max. Queries are exact Euclidean k-NN (kd-tree); ties in distance are
broken toward the smaller time index so results are platform-independent.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from .embedding import EmbeddedSeries

__all__ = ["NeighborIndex", "AnalogEnsemble", "build_index", "k_nearest", "successors"]


@dataclass
class AnalogEnsemble:
    """k analogues of one target state, ordered by (distance, time index)."""

    target_time_index: int
    analogue_time_indices: np.ndarray
    distances: np.ndarray

    @property
    def k(self) -> int:
        return self.analogue_time_indices.size

    @property
    def epsilon_k(self) -> float:
        """Distance from the target to its k-th nearest analogue."""
        return float(self.distances[-1])


@dataclass
class NeighborIndex:
    """Read-only exact k-NN structure over the admissible database states."""

    database: EmbeddedSeries
    tau_max: int
    n_admissible: int
    tree: cKDTree = field(repr=False)

    @property
    def admissible_range(self) -> int:
        """Largest admissible analogue time index (inclusive)."""
        return self.n_admissible - 1


def build_index(database: EmbeddedSeries, tau_max: int) -> NeighborIndex:
    """Build the exact spatial index over states with full successor coverage."""
    if tau_max < 1:
        raise ValueError(f"tau_max must be >= 1, got {tau_max}")
    n = len(database)
    if tau_max >= n:
        raise ValueError(f"tau_max={tau_max} must be smaller than the "
                         f"database length {n}")
    n_adm = n - tau_max
    if n_adm < 1:
        raise ValueError("empty admissible range")
    tree = cKDTree(database.states[:n_adm])
    return NeighborIndex(database=database, tau_max=tau_max,
                         n_admissible=n_adm, tree=tree)


def _order_by_distance_then_index(dist, idx):
    # Two stable sorts implement the (distance, index) lexicographic order.
    by_idx = np.argsort(idx, axis=-1, kind="stable")
    dist = np.take_along_axis(dist, by_idx, axis=-1)
    idx = np.take_along_axis(idx, by_idx, axis=-1)
    by_dist = np.argsort(dist, axis=-1, kind="stable")
    return (np.take_along_axis(dist, by_dist, axis=-1),
            np.take_along_axis(idx, by_dist, axis=-1))


def _query_exact(index: NeighborIndex, target: np.ndarray, k: int):
    """Single-target query honoring the tie-break at the k-th distance."""
    n_adm = index.n_admissible
    kq = min(k + 1, n_adm)
    dist, idx = index.tree.query(target, k=kq)
    while kq < n_adm and dist[-1] == dist[k - 1]:
        kq = min(2 * kq, n_adm)
        dist, idx = index.tree.query(target, k=kq)
    boundary = dist[k - 1]
    inner = dist < boundary
    m = int(inner.sum())
    tied = np.sort(idx[dist == boundary])
    keep_idx = np.concatenate([idx[inner], tied[: k - m]])
    keep_dist = np.concatenate([dist[inner], np.full(k - m, boundary)])
    return _order_by_distance_then_index(keep_dist, keep_idx)


def k_nearest(index: NeighborIndex, target: np.ndarray, k: int,
              target_time_index: int = -1) -> AnalogEnsemble:
    """The k admissible states closest to the target in Euclidean distance."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if k > index.n_admissible:
        raise ValueError(f"k={k} exceeds the {index.n_admissible} admissible "
                         "database states")
    target = np.asarray(target, dtype=float)
    dist, idx = _query_exact(index, target, k)
    return AnalogEnsemble(target_time_index=target_time_index,
                          analogue_time_indices=idx, distances=dist)


def query_batch(index: NeighborIndex, targets: np.ndarray, k: int,
                workers: int = -1):
    """Vectorized k_nearest over many targets.

    Returns (distances, indices) as (N, k) arrays with the same ordering
    contract as k_nearest. Results do not depend on the worker count.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    n_adm = index.n_admissible
    if k > n_adm:
        raise ValueError(f"k={k} exceeds the {n_adm} admissible database states")
    targets = np.atleast_2d(np.asarray(targets, dtype=float))
    kq = min(k + 1, n_adm)
    dist, idx = index.tree.query(targets, k=kq, workers=workers)
    if kq > k:
        # Targets whose k-th and (k+1)-th distances tie need the full
        # tie-group to pick the smallest time indices.
        unresolved = np.flatnonzero(dist[:, k] == dist[:, k - 1])
        dist, idx = dist[:, :k].copy(), idx[:, :k].copy()
        for t in unresolved:
            dist[t], idx[t] = _query_exact(index, targets[t], k)
    dist, idx = _order_by_distance_then_index(dist, idx)
    return dist, idx


def successors(database: EmbeddedSeries, ensemble: AnalogEnsemble,
               tau: int) -> np.ndarray:
    """States at the analogue time indices advanced by tau samples."""
    if tau < 0:
        raise ValueError(f"tau must be >= 0, got {tau}")
    rows = ensemble.analogue_time_indices + tau
    if rows.max(initial=0) >= len(database):
        raise ValueError(
            f"tau={tau} advances analogue {int(ensemble.analogue_time_indices.max())} "
            f"past the database end ({len(database)} states)")
    return database.states[rows]
