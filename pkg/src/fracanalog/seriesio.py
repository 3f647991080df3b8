"""Series file formats: 64-byte binary header + float64 payload, or CSV.

Header layout (little-endian): magic "FRAC", u32 version, u64 n, f64 dt,
f64 hurst, f64 c2, f64 tau_k, f64 T, u64 seed. Externally loaded series
may carry NaN in the process fields; they are then stored without params.
"""
from __future__ import annotations

import math
import struct
from pathlib import Path

import numpy as np

from .synthesis import ProcessParams, TimeSeries

__all__ = ["write_series_bin", "read_series_bin", "write_series_csv",
           "read_series_csv"]

MAGIC = b"FRAC"
VERSION = 1
_HEADER = struct.Struct("<4sIQdddddQ")
assert _HEADER.size == 64


def write_series_bin(series: TimeSeries, path) -> None:
    p = series.params
    header = _HEADER.pack(
        MAGIC, VERSION, len(series), series.dt,
        p.hurst if p else math.nan, p.c2 if p else math.nan,
        p.tau_k if p else math.nan, p.big_t if p else math.nan,
        p.seed if p else 0)
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(np.asarray(series.values, dtype="<f8").tobytes())


def read_series_bin(path) -> TimeSeries:
    raw = Path(path).read_bytes()
    if len(raw) < _HEADER.size:
        raise ValueError(f"{path}: truncated header")
    magic, version, n, dt, hurst, c2, tau_k, big_t, seed = _HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise ValueError(f"{path}: bad magic {magic!r}, expected {MAGIC!r}")
    if version != VERSION:
        raise ValueError(f"{path}: unsupported version {version}")
    values = np.frombuffer(raw, dtype="<f8", offset=_HEADER.size)
    if values.size != n:
        raise ValueError(f"{path}: header says {n} samples, payload has "
                         f"{values.size}")
    params = None
    if not math.isnan(hurst):
        params = ProcessParams(hurst=hurst, c2=c2, tau_k=tau_k, big_t=big_t,
                               n=int(n), dt=dt, seed=int(seed))
    return TimeSeries(values=values.astype(float), dt=dt, params=params)


def write_series_csv(series: TimeSeries, path) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write("value\n")
        fh.writelines(f"{v!r}\n" for v in series.values)


def read_series_csv(path, dt: float = 1.0) -> TimeSeries:
    with open(path) as fh:
        header = fh.readline().strip()
        if header != "value":
            raise ValueError(f"{path}: expected header 'value', got {header!r}")
        values = np.array([float(line) for line in fh if line.strip()])
    return TimeSeries(values=values, dt=dt)
