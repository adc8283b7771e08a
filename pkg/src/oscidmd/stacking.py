"""Delay embedding (Hankel stacking) of scalar records into snapshot matrices.

A scalar series of length N embedded with depth m yields an m x n Hankel
matrix with n = N - m + 1 and entry(i, j) = sample(i + j). Stacking raises
the effective state dimension so that all significant modes of a single
measured channel become observable to the decomposition.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .ingest import SignalRecord


@dataclass(frozen=True)
class SnapshotMatrix:
    """Delay-embedded state snapshots: m stacked rows by n time columns."""

    data: np.ndarray
    dt: float
    t0: float
    stack_depth: int
    source_channel: str

    def __post_init__(self) -> None:
        data = np.array(self.data, dtype=float, copy=True)
        if data.ndim != 2:
            raise ValueError("snapshot data must be 2-D")
        m, n = data.shape
        if m < 1 or n < 2:
            raise ValueError(f"snapshot matrix must be at least 1x2, got {m}x{n}")
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        data.setflags(write=False)
        object.__setattr__(self, "data", data)

    @property
    def shape(self) -> tuple[int, int]:
        return self.data.shape


def default_stack_depth(length: int) -> int:
    """Default embedding depth: one fifth of the record, clamped feasible."""
    return min(max(length // 5, 1), length - 1)


def delay_embed(rec: SignalRecord, channel: str | None = None, stack_depth: int | None = None) -> SnapshotMatrix:
    """Hankel-embed one channel of a record.

    Produces an m x n matrix with m = stack_depth and n = length - m + 1;
    entry (i, j) equals the raw sample at index i + j.
    """
    name = channel if channel is not None else rec.names[0]
    x = rec.channel(name)
    length = x.size
    depth = default_stack_depth(length) if stack_depth is None else stack_depth
    if depth < 1:
        raise ValueError("stack depth must be at least 1")
    if depth > length - 1:
        raise ValueError(
            f"stack depth {depth} too large for a record of {length} samples; "
            f"maximum feasible depth is {length - 1}"
        )
    data = sliding_window_view(x, length - depth + 1).copy()
    return SnapshotMatrix(
        data=data, dt=rec.dt, t0=rec.t0, stack_depth=depth, source_channel=name
    )


def shifted_pair(snap: SnapshotMatrix) -> tuple[np.ndarray, np.ndarray]:
    """Split snapshots into the time-shifted pair (columns 0..n-2, 1..n-1)."""
    if snap.data.shape[1] < 2:
        raise ValueError("need at least 2 snapshot columns to form a shifted pair")
    return snap.data[:, :-1], snap.data[:, 1:]


def unembed(matrix: np.ndarray) -> np.ndarray:
    """Collapse an m x n (approximately Hankel) matrix back to a series.

    Averages anti-diagonals, the least-squares inverse of the embedding;
    returns a series of length m + n - 1. Exact for true Hankel matrices.
    """
    mat = np.asarray(matrix, dtype=float)
    if mat.ndim != 2 or mat.size == 0:
        raise ValueError("unembed expects a non-empty 2-D matrix")
    m, n = mat.shape
    idx = np.add.outer(np.arange(m), np.arange(n)).ravel()
    sums = np.bincount(idx, weights=mat.ravel(), minlength=m + n - 1)
    counts = np.bincount(idx, minlength=m + n - 1)
    return sums / counts
