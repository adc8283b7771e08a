"""Mode reporting: continuous eigenvalues, damping classes, dominance ranking.

A discrete eigenvalue lambda expressed at subsample frequency f_sp maps to
the continuous eigenvalue omega = f_sp * ln(lambda); Re(omega) is the
growth rate in 1/s and |Im(omega)| / 2pi the frequency in Hz. The integral
contribution of a mode accumulates its amplitude envelope over the
analysis horizon and drives the dominant-mode ranking.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass, replace

import numpy as np

from .dmd import DmdResult

DAMPING_DECAYING = "decaying"
DAMPING_CRITICAL = "critical"
DAMPING_GROWING = "growing"

# Growth-rate band (1/s) treated as critically damped.
DEFAULT_EPS_CRIT = 0.5

_CONJ_MATCH_RTOL = 1e-9


@dataclass(frozen=True)
class ModeReport:
    """One identified mode, conjugate pairs collapsed to a single row.

    ``slow`` is None for plain single-window analyses, otherwise whether
    the mode passed the slow screen of its bin. ``damping_class`` and
    ``dominant_rank`` stay None until :func:`classify` assigns them;
    ranking covers retained oscillatory modes only, so zero-frequency
    baseline components are reported but never ranked.
    """

    level: int
    bin_index: int
    eigenvalue: complex
    omega: complex
    frequency_hz: float
    growth_rate: float
    amplitude_mag: float
    integral_contribution: float
    pair: bool
    slow: bool | None = None
    damping_class: str | None = None
    dominant_rank: int | None = None


def to_continuous(lam: complex, f_sp: float) -> complex:
    """Map a discrete eigenvalue to the continuous plane: f_sp * ln(lambda)."""
    if lam == 0:
        raise ValueError("eigenvalue 0 decays fully within one step and has no continuous image")
    if not f_sp > 0:
        raise ValueError("subsample frequency must be positive")
    return f_sp * cmath.log(lam)


def integral_contribution(
    phi_k: np.ndarray, lam_k: complex, b_k: complex, horizon_steps: int
) -> float:
    """Envelope importance ||Phi_k|| * sum_{j=1..horizon} |b_k| |lambda_k|^(j-1).

    Gauge-invariant: rescaling Phi_k by c and b_k by 1/c leaves it fixed.
    """
    if horizon_steps < 1:
        raise ValueError("horizon must be at least one step")
    mag = abs(lam_k)
    envelope = float(np.sum(mag ** np.arange(horizon_steps)))
    return float(np.linalg.norm(phi_k)) * abs(b_k) * envelope


def reports_from_dmd(
    result: DmdResult,
    f_sp: float,
    horizon_steps: int,
    level: int = 0,
    bin_index: int = 0,
    slow_set: set[int] | frozenset[int] | None = None,
) -> list[ModeReport]:
    """Collapse a decomposition into mode reports.

    Conjugate pairs on real data become one row with non-negative
    frequency and ``pair=True``. Fully decayed modes (lambda = 0) carry no
    dynamics and are omitted.
    """
    lams = result.eigenvalues
    reports: list[ModeReport] = []
    consumed: set[int] = set()
    for k, lam in enumerate(lams):
        if k in consumed or lam == 0:
            continue
        partner: int | None = None
        if lam.imag != 0.0:
            target = lam.conjugate()
            tol = _CONJ_MATCH_RTOL * (1.0 + abs(lam))
            for j in range(k + 1, len(lams)):
                if j not in consumed and abs(lams[j] - target) <= tol:
                    partner = j
                    break
        if partner is not None:
            consumed.add(partner)
        omega = to_continuous(complex(lam), f_sp)
        in_slow = False
        if slow_set is not None:
            in_slow = k in slow_set or (partner is not None and partner in slow_set)
        reports.append(
            ModeReport(
                level=level,
                bin_index=bin_index,
                eigenvalue=complex(lam),
                omega=omega,
                frequency_hz=abs(omega.imag) / (2.0 * np.pi),
                growth_rate=omega.real,
                amplitude_mag=float(abs(result.amplitudes[k])),
                integral_contribution=integral_contribution(
                    result.modes[:, k], complex(lam), complex(result.amplitudes[k]), horizon_steps
                ),
                pair=partner is not None,
                slow=in_slow if slow_set is not None else None,
            )
        )
    return reports


def classify(
    reports: list[ModeReport], eps_crit: float = DEFAULT_EPS_CRIT
) -> list[ModeReport]:
    """Assign damping classes and dominance ranks; returns a new list.

    Damping: growing if Re(omega) > eps_crit, critical if |Re(omega)| <=
    eps_crit, decaying otherwise. Ranks order retained oscillatory modes
    (slow is not False, frequency > 0) by descending integral
    contribution; ties break on ascending frequency, level, then bin.
    """
    if eps_crit < 0:
        raise ValueError("eps_crit must be non-negative")

    def damping(r: ModeReport) -> str:
        if r.growth_rate > eps_crit:
            return DAMPING_GROWING
        if abs(r.growth_rate) <= eps_crit:
            return DAMPING_CRITICAL
        return DAMPING_DECAYING

    annotated = [replace(r, damping_class=damping(r), dominant_rank=None) for r in reports]
    rankable = [i for i, r in enumerate(annotated) if r.slow is not False and r.frequency_hz > 0]
    rankable.sort(
        key=lambda i: (
            -annotated[i].integral_contribution,
            annotated[i].frequency_hz,
            annotated[i].level,
            annotated[i].bin_index,
        )
    )
    for rank, i in enumerate(rankable, start=1):
        annotated[i] = replace(annotated[i], dominant_rank=rank)
    return annotated


def dominant(reports: list[ModeReport]) -> ModeReport | None:
    """The rank-1 mode of a classified report list, if any."""
    for r in reports:
        if r.dominant_rank == 1:
            return r
    return None


@dataclass(frozen=True)
class ModeCluster:
    """All instances of one physical mode at one level.

    A sustained mode shows up in every bin of the level where it is slow,
    so near-equal frequencies within a level are grouped and their
    contributions summed; isolated artifacts stay singleton clusters.
    """

    level: int
    members: tuple[ModeReport, ...]
    aggregate_ic: float

    @property
    def best(self) -> ModeReport:
        return max(self.members, key=lambda r: r.integral_contribution)

    @property
    def frequency_hz(self) -> float:
        return self.best.frequency_hz


def _adjacency_tol(freq: float) -> float:
    return max(0.5, 0.01 * freq)


def cluster_sustained(
    reports: list[ModeReport], eps_crit: float = DEFAULT_EPS_CRIT
) -> list[ModeCluster]:
    """Group sustained oscillatory modes into per-level frequency clusters.

    Candidates are retained (slow is not False), oscillatory and critically
    damped (|growth rate| <= eps_crit); within a level, neighbours closer
    than max(0.5 Hz, 1%) merge. Clusters come back sorted by descending
    aggregate contribution, ties by (frequency, level) ascending.
    """
    candidates = [
        r
        for r in reports
        if r.slow is not False and r.frequency_hz > 0 and abs(r.growth_rate) <= eps_crit
    ]
    clusters: list[ModeCluster] = []
    for level in sorted({r.level for r in candidates}):
        group: list[ModeReport] = []
        for r in sorted(candidates, key=lambda r: (r.frequency_hz, r.bin_index)):
            if r.level != level:
                continue
            if group and r.frequency_hz - group[-1].frequency_hz > _adjacency_tol(r.frequency_hz):
                clusters.append(_make_cluster(level, group))
                group = []
            group.append(r)
        if group:
            clusters.append(_make_cluster(level, group))
    clusters.sort(key=lambda c: (-c.aggregate_ic, c.frequency_hz, c.level))
    return clusters


def _make_cluster(level: int, members: list[ModeReport]) -> ModeCluster:
    return ModeCluster(
        level=level,
        members=tuple(members),
        aggregate_ic=float(sum(r.integral_contribution for r in members)),
    )


def dominant_cluster(
    reports: list[ModeReport], eps_crit: float = DEFAULT_EPS_CRIT
) -> ModeCluster | None:
    """The sustained-mode cluster with the largest aggregate contribution."""
    clusters = cluster_sustained(reports, eps_crit)
    return clusters[0] if clusters else None


def strongest_oscillatory(reports: list[ModeReport]) -> ModeReport | None:
    """Highest-contribution retained oscillatory mode, any damping.

    Fallback estimate when no sustained mode exists, e.g. when a gap has
    corrupted the damping of everything a single-window fit found.
    """
    pool = [r for r in reports if r.slow is not False and r.frequency_hz > 0]
    if not pool:
        return None
    return max(pool, key=lambda r: (r.integral_contribution, -r.frequency_hz))
