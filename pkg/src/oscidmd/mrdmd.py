"""Multi-resolution decomposition over dyadic time bins.

Each level l splits the snapshot window into 2^(l-1) bins. Every bin is
subsampled down to a fixed count mu, decomposed, and screened: modes with
|ln(lambda)| < rho (rho = pi / g) are slow at that time scale. Their
full-resolution reconstruction is subtracted from the bin and the residual
is halved and recursed until the termination level, which is the largest L
keeping more than mu columns per bin.

Per-level bookkeeping (exact in rational arithmetic), with B = 2^(l-1)
bins of nominal size S = n / B over a window of duration N = n * dt:

    bin duration        D = S * dt
    subsample rate      f_sp = mu / D
    capturable ceiling  f_m = f_sp / 2 = 2^(l-2) * mu / N
    slow-mode ceiling   f_slow_max = f_m / g

The recursion is embarrassingly parallel across sibling bins; this
implementation runs depth-first sequentially, which is the reference
ordering any parallel variant must reproduce.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .dmd import TRUNC_RATIO, DmdResult, TruncationRule, ZeroSignalError, dmd
from .modes import ModeReport, reports_from_dmd
from .stacking import SnapshotMatrix

_MAX_DT_DENOMINATOR = 10**9

# Per-bin fits see only mu subsamples; a relative noise-floor cut keeps weak
# coherent content resolvable without the overfit a near-full rank causes on
# corrupted bins.
DEFAULT_BIN_RULE = TruncationRule(TRUNC_RATIO, 1e-4)


class PlanError(ValueError):
    """Raised when decomposition parameters are inconsistent."""


def _as_fraction(value, name: str) -> Fraction:
    """Exact rational view of a parameter; floats snap to the nearest simple ratio."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value)
        except (ValueError, ZeroDivisionError) as exc:
            raise PlanError(f"{name} must be rational, got {value!r}") from exc
    if isinstance(value, float):
        if not math.isfinite(value):
            raise PlanError(f"{name} must be finite")
        return Fraction(value).limit_denominator(_MAX_DT_DENOMINATOR)
    raise PlanError(f"{name} must be rational, got {type(value).__name__}")


@dataclass(frozen=True)
class LevelParams:
    """Exact per-level quantities of a decomposition plan."""

    level: int
    bins: int
    bin_size: Fraction
    bin_duration: Fraction
    f_sp: Fraction
    f_m: Fraction
    f_slow_max: Fraction


@dataclass(frozen=True)
class MrdmdPlan:
    """Decomposition geometry: levels, bin sizes and frequency ceilings."""

    mu: int
    termination_level: int
    g: Fraction
    rho: float
    n: int
    dt: float
    dt_exact: Fraction
    window_duration: Fraction
    per_level: tuple[LevelParams, ...]

    def level(self, l: int) -> LevelParams:
        if not 1 <= l <= self.termination_level:
            raise PlanError(f"level {l} outside 1..{self.termination_level}")
        return self.per_level[l - 1]


def plan(
    n: int,
    dt: float,
    mu: int = 16,
    g: int | str | Fraction | float = 4,
    termination_level: int | None = None,
) -> MrdmdPlan:
    """Build the decomposition plan for n snapshot columns at interval dt.

    The termination level defaults to the largest L with
    floor(n / 2^(L-1)) > mu; an override must still satisfy that bound.
    """
    if n < 2:
        raise PlanError("need at least 2 snapshot columns")
    if mu < 2:
        raise PlanError("subsample count mu must be at least 2")
    g_frac = _as_fraction(g, "g")
    if not g_frac > 1:
        raise PlanError(f"screening divisor g must exceed 1, got {g_frac}")
    if mu >= n:
        raise PlanError(
            f"cannot subsample level 1: mu={mu} must be smaller than the n={n} snapshot columns"
        )
    level_max = 1
    while n // (2**level_max) > mu:
        level_max += 1
    if termination_level is not None:
        if termination_level < 1 or n // (2 ** (termination_level - 1)) <= mu:
            raise PlanError(
                f"termination level {termination_level} violates the bin-size criterion "
                f"n / 2^(L-1) > mu (n={n}, mu={mu}, max feasible L={level_max})"
            )
        level = termination_level
    else:
        level = level_max

    dt_exact = _as_fraction(dt, "dt")
    if not dt_exact > 0:
        raise PlanError("dt must be positive")
    window = n * dt_exact
    table = []
    for l in range(1, level + 1):
        bins = 2 ** (l - 1)
        size = Fraction(n, bins)
        duration = size * dt_exact
        f_sp = Fraction(mu) / duration
        f_m = f_sp / 2
        table.append(
            LevelParams(
                level=l,
                bins=bins,
                bin_size=size,
                bin_duration=duration,
                f_sp=f_sp,
                f_m=f_m,
                f_slow_max=f_m / g_frac,
            )
        )
    return MrdmdPlan(
        mu=mu,
        termination_level=level,
        g=g_frac,
        rho=math.pi / float(g_frac),
        n=n,
        dt=float(dt),
        dt_exact=dt_exact,
        window_duration=window,
        per_level=tuple(table),
    )


def subsample(span: tuple[int, int], mu: int) -> np.ndarray:
    """mu evenly spaced column indices inside [start, stop).

    Index i maps to start + round(i * len / mu) (exact half-to-even
    rounding); the first subsample is the span start.
    """
    start, stop = span
    length = stop - start
    if length < mu:
        raise ValueError(f"span of {length} columns is shorter than mu={mu}")
    if mu < 1:
        raise ValueError("mu must be positive")
    return np.array([start + round(Fraction(i * length, mu)) for i in range(mu)], dtype=int)


def screen_slow(result: DmdResult, rho: float) -> np.ndarray:
    """Indices of modes with |ln(lambda)| < rho (strict).

    A zero eigenvalue (fully decayed numerical mode) has |ln 0| = inf and
    is never slow.
    """
    lams = result.eigenvalues
    mags = np.full(lams.shape, np.inf)
    nz = lams != 0
    mags[nz] = np.abs(np.log(lams[nz]))
    return np.flatnonzero(mags < rho)


def slow_reconstruction(
    node_dmd: DmdResult,
    slow_set: np.ndarray | tuple[int, ...],
    span: tuple[int, int],
    dt: float,
    f_sp: float,
) -> np.ndarray:
    """Full-resolution reconstruction of the slow modes over a bin.

    Each slow mode is evaluated in continuous time, value(tau) =
    Re(Phi_k e^(omega_k tau) b_k) with omega_k = f_sp * ln(lambda_k) and
    tau the offset from the bin start, bridging the subsampled eigenvalue
    interval to the full sample rate. An empty slow set yields zeros.
    """
    start, stop = span
    width = stop - start
    if width < 1:
        raise ValueError("span must cover at least one column")
    idx = np.asarray(slow_set, dtype=int)
    m = node_dmd.modes.shape[0]
    if idx.size == 0:
        return np.zeros((m, width))
    lam = node_dmd.eigenvalues[idx]
    omega = f_sp * np.log(lam)
    tau = dt * np.arange(width)
    coeff = node_dmd.amplitudes[idx][:, None] * np.exp(omega[:, None] * tau[None, :])
    return (node_dmd.modes[:, idx] @ coeff).real


@dataclass(frozen=True)
class MrdmdNode:
    """One (level, bin) analysis unit of the recursion."""

    level: int
    bin_index: int
    col_span: tuple[int, int]
    subsample_indices: np.ndarray
    dmd: DmdResult | None
    slow_set: tuple[int, ...]
    slow_reconstruction: np.ndarray
    children: tuple["MrdmdNode", ...]

    @property
    def is_leaf(self) -> bool:
        return not self.children


@dataclass(frozen=True)
class MrdmdResult:
    """Full decomposition: node tree, per-level and total reconstructions."""

    plan: MrdmdPlan
    root: MrdmdNode
    per_level_reconstruction: tuple[np.ndarray, ...]
    total_reconstruction: np.ndarray
    all_modes: tuple[ModeReport, ...]


def decompose(
    snap: SnapshotMatrix | np.ndarray,
    mrdmd_plan: MrdmdPlan,
    rule: TruncationRule = DEFAULT_BIN_RULE,
) -> MrdmdResult:
    """Run the multi-resolution recursion over a snapshot matrix.

    Depth-first per bin: subsample, decompose, screen slow modes,
    reconstruct them at full resolution, subtract, then split the residual
    in half and recurse. When a bin has no signal energy left (fully
    explained upstream) it contributes zeros and an empty mode list and
    the recursion continues. Bins of odd width split with the larger half
    first.
    """
    data = snap.data if isinstance(snap, SnapshotMatrix) else np.asarray(snap, dtype=float)
    if data.ndim != 2:
        raise ValueError("snapshot data must be 2-D")
    m, n = data.shape
    if n != mrdmd_plan.n:
        raise ValueError(f"snapshot matrix has {n} columns but the plan expects {mrdmd_plan.n}")
    if isinstance(snap, SnapshotMatrix) and abs(snap.dt - mrdmd_plan.dt) > 1e-9 * mrdmd_plan.dt:
        raise ValueError(
            f"snapshot interval {snap.dt!r} disagrees with the plan interval {mrdmd_plan.dt!r}"
        )

    dt = mrdmd_plan.dt
    mu = mrdmd_plan.mu
    level_count = mrdmd_plan.termination_level
    per_level = [np.zeros((m, n)) for _ in range(level_count)]
    reports: list[ModeReport] = []

    def recurse(block: np.ndarray, start: int, level: int, bin_index: int) -> MrdmdNode:
        width = block.shape[1]
        rel = subsample((0, width), mu)
        f_sp = mu / (width * dt)
        xsub = block[:, rel]
        try:
            fit = dmd(xsub[:, :-1], xsub[:, 1:], rule, dt=1.0 / f_sp)
        except ZeroSignalError:
            fit = None
        if fit is None:
            slow: tuple[int, ...] = ()
            recon = np.zeros((m, width))
        else:
            slow_idx = screen_slow(fit, mrdmd_plan.rho)
            slow = tuple(int(k) for k in slow_idx)
            recon = slow_reconstruction(fit, slow_idx, (0, width), dt, f_sp)
            reports.extend(
                reports_from_dmd(
                    fit,
                    f_sp=f_sp,
                    horizon_steps=mu,
                    level=level,
                    bin_index=bin_index,
                    slow_set=set(slow),
                )
            )
        per_level[level - 1][:, start : start + width] = recon
        children: tuple[MrdmdNode, ...] = ()
        if level < level_count:
            residual = block - recon
            half = (width + 1) // 2
            children = (
                recurse(residual[:, :half], start, level + 1, 2 * bin_index),
                recurse(residual[:, half:], start + half, level + 1, 2 * bin_index + 1),
            )
        return MrdmdNode(
            level=level,
            bin_index=bin_index,
            col_span=(start, start + width),
            subsample_indices=rel + start,
            dmd=fit,
            slow_set=slow,
            slow_reconstruction=per_level[level - 1][:, start : start + width],
            children=children,
        )

    root = recurse(np.array(data, dtype=float, copy=True), 0, 1, 0)
    total = np.zeros((m, n))
    for layer in per_level:
        total += layer
    ordered = tuple(sorted(reports, key=lambda r: (r.level, r.bin_index)))
    return MrdmdResult(
        plan=mrdmd_plan,
        root=root,
        per_level_reconstruction=tuple(per_level),
        total_reconstruction=total,
        all_modes=ordered,
    )
