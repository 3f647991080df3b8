"""Phase-space reconstruction by delay embedding.

A scalar series x(t) sampled at intervals dt is mapped to p-dimensional
states (x(t), x(t - m dt), ..., x(t - (p-1) m dt)), most recent value
first. The first admissible state sits at sample index (p-1)*m.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .synthesis import TimeSeries

__all__ = ["EmbedParams", "EmbeddedSeries", "takens_embed"]


@dataclass(frozen=True)
class EmbedParams:
    """Embedding dimension p and delay multiplier m (delay = m*dt)."""

    p: int = 3
    m: int = 1

    def __post_init__(self):
        if self.p < 1:
            raise ValueError(f"embedding dimension p must be >= 1, got {self.p}")
        if self.m < 1:
            raise ValueError(f"delay multiplier m must be >= 1, got {self.m}")


@dataclass
class EmbeddedSeries:
    """Delay-embedded states, one row per time index.

    Row i is the state at sample index first_time_index + i; column c holds
    x at sample index first_time_index + i - c*m.
    """

    states: np.ndarray
    params: EmbedParams
    first_time_index: int
    source: TimeSeries = field(repr=False)

    def __len__(self):
        return self.states.shape[0]

    @property
    def dim(self) -> int:
        return self.states.shape[1]


def takens_embed(series: TimeSeries, params: EmbedParams) -> EmbeddedSeries:
    """Embed a series into p-dimensional delay coordinates.

    Returns n - (p-1)*m states stored as a C-contiguous float matrix so that
    neighbor queries stream whole rows.
    """
    x = np.asarray(series.values, dtype=float)
    n = x.size
    p, m = params.p, params.m
    window = (p - 1) * m
    if n <= window:
        raise ValueError(
            f"series of length {n} too short for p={p}, m={m}: "
            f"need at least {window + 1} samples"
        )
    cols = [x[window - c * m: n - c * m] for c in range(p)]
    states = np.ascontiguousarray(np.column_stack(cols))
    return EmbeddedSeries(states=states, params=params,
                          first_time_index=window, source=series)
