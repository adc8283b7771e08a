"""Best-fit linear step operator extraction from snapshot pairs (DMD).

Given the shifted pair X1, X2 (X2 one step ahead of X1), the method
computes a truncated SVD X1 = U S V^T, projects the step operator onto the
U basis as A~ = U^T X2 V S^{-1}, eigendecomposes A~ W = W L, lifts modes as
Phi = U W, and fits amplitudes b = pinv(Phi) x1. The full m x m operator is
never formed. Reconstruction: x_j = Phi L^{j-1} b.

All functions are pure; results are immutable and safe to share across
threads. Linear-algebra kernels may use threaded BLAS internally, which is
deterministic for a fixed library and thread count.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Singular values at or below these floors carry no usable signal.
_SV_ABS_FLOOR = 1e-300
_SV_RATIO_FLOOR = 1e-12

_EIG_RESIDUAL_RTOL = 1e-8

TRUNC_FIXED = "fixed-rank"
TRUNC_ENERGY = "energy-fraction"
TRUNC_RATIO = "singular-value-ratio"


class DecompositionError(ValueError):
    """Raised when a snapshot matrix cannot be decomposed as requested."""


class ZeroSignalError(DecompositionError):
    """Raised for matrices with no signal energy (all-zero input)."""


@dataclass(frozen=True)
class TruncationRule:
    """SVD truncation policy.

    kind is one of ``fixed-rank`` (value: positive integer rank),
    ``energy-fraction`` (value in (0, 1]: smallest rank capturing that
    fraction of squared singular-value energy) or ``singular-value-ratio``
    (value in (0, 1): keep singular values above value * sigma_1).
    """

    kind: str
    value: float

    def __post_init__(self) -> None:
        if self.kind == TRUNC_FIXED:
            if int(self.value) != self.value or self.value < 1:
                raise ValueError("fixed-rank truncation needs a positive integer rank")
        elif self.kind == TRUNC_ENERGY:
            if not 0.0 < self.value <= 1.0:
                raise ValueError("energy fraction must lie in (0, 1]")
        elif self.kind == TRUNC_RATIO:
            if not 0.0 < self.value < 1.0:
                raise ValueError("singular-value ratio must lie in (0, 1)")
        else:
            raise ValueError(f"unknown truncation kind {self.kind!r}")

    @classmethod
    def fixed(cls, rank: int) -> "TruncationRule":
        return cls(TRUNC_FIXED, rank)

    @classmethod
    def energy(cls, fraction: float) -> "TruncationRule":
        return cls(TRUNC_ENERGY, fraction)

    @classmethod
    def sv_ratio(cls, ratio: float) -> "TruncationRule":
        return cls(TRUNC_RATIO, ratio)


DEFAULT_RULE = TruncationRule(TRUNC_ENERGY, 0.9999)


@dataclass(frozen=True)
class SvdTruncation:
    """Rank-truncated SVD factors plus the full pre-truncation spectrum."""

    u: np.ndarray
    sigma: np.ndarray
    v: np.ndarray
    rank: int
    singular_values: np.ndarray
    rank_clamped: bool


@dataclass(frozen=True)
class DmdResult:
    """Outcome of one decomposition.

    modes holds the projected mode columns Phi = U W (unit-norm W columns),
    eigenvalues the per-step multipliers at dt_effective, amplitudes the
    least-squares fit of the first snapshot. Modes are ordered by
    descending |b_k| * ||Phi_k||, ties broken by descending |lambda| with
    the non-negative imaginary member of a conjugate pair first.
    a_tilde and eigvecs retain the reduced operator and its (reordered)
    eigenvectors for residual diagnostics.
    """

    modes: np.ndarray
    eigenvalues: np.ndarray
    amplitudes: np.ndarray
    rank: int
    dt_effective: float
    singular_values: np.ndarray
    rank_clamped: bool
    a_tilde: np.ndarray
    eigvecs: np.ndarray

    def __post_init__(self) -> None:
        for field in ("modes", "eigenvalues", "amplitudes", "singular_values", "a_tilde", "eigvecs"):
            arr = getattr(self, field)
            arr.setflags(write=False)


def _requested_rank(s: np.ndarray, rule: TruncationRule) -> int:
    if rule.kind == TRUNC_FIXED:
        return int(rule.value)
    if rule.kind == TRUNC_ENERGY:
        energy = np.cumsum(s * s)
        return int(np.searchsorted(energy, rule.value * energy[-1], side="left")) + 1
    return max(int(np.sum(s > rule.value * s[0])), 1)


def svd_truncated(x: np.ndarray, rule: TruncationRule = DEFAULT_RULE) -> SvdTruncation:
    """Truncated SVD of a snapshot matrix under a truncation rule.

    Singular directions below the relative floor 1e-12 never count as
    available; a rule demanding more than the available rank is clamped
    and flagged. An all-zero matrix is rejected.
    """
    x = np.asarray(x, dtype=float)
    if x.ndim != 2 or x.size == 0:
        raise DecompositionError("snapshot matrix must be 2-D and non-empty")
    u, s, vh = np.linalg.svd(x, full_matrices=False)
    if s[0] <= _SV_ABS_FLOOR:
        raise ZeroSignalError("no signal energy in snapshot matrix")
    available = int(np.sum(s > max(_SV_ABS_FLOOR, s[0] * _SV_RATIO_FLOOR)))
    requested = _requested_rank(s, rule)
    rank = min(requested, available)
    return SvdTruncation(
        u=u[:, :rank].copy(),
        sigma=s[:rank].copy(),
        v=vh[:rank].T.copy(),
        rank=rank,
        singular_values=s,
        rank_clamped=requested > available,
    )


def reduced_operator(u: np.ndarray, sigma: np.ndarray, v: np.ndarray, x2: np.ndarray) -> np.ndarray:
    """Project the step operator onto the U basis: U^T X2 V S^{-1}."""
    u = np.asarray(u)
    v = np.asarray(v)
    sigma = np.asarray(sigma)
    x2 = np.asarray(x2)
    r = u.shape[1]
    if sigma.shape != (r,) or v.shape[1] != r:
        raise ValueError("inconsistent truncation shapes for U, sigma, V")
    if x2.shape != (u.shape[0], v.shape[0]):
        raise ValueError(
            f"X2 shape {x2.shape} does not match U rows {u.shape[0]} and V rows {v.shape[0]}"
        )
    a_tilde = (u.T @ x2 @ v) / sigma[None, :]
    if not np.all(np.isfinite(a_tilde)):
        raise DecompositionError("reduced operator has non-finite entries")
    return a_tilde


def eig_modes(a_tilde: np.ndarray, u: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Eigendecompose the reduced operator and lift modes as Phi = U W.

    Eigenvector columns are normalized to unit 2-norm before projection.
    A defective (non-diagonalizable) operator is rejected with a hint to
    lower the truncation rank by one.
    """
    a_tilde = np.asarray(a_tilde)
    if a_tilde.ndim != 2 or a_tilde.shape[0] != a_tilde.shape[1]:
        raise ValueError("reduced operator must be square")
    if u.shape[1] != a_tilde.shape[0]:
        raise ValueError("U columns must match the reduced operator size")
    try:
        eigvals, w = np.linalg.eig(a_tilde)
    except np.linalg.LinAlgError as exc:
        raise DecompositionError(
            f"eigendecomposition failed ({exc}); retry with truncation rank r-1"
        ) from exc
    # eig returns real arrays for an all-real spectrum
    eigvals = eigvals.astype(complex)
    w = w.astype(complex)
    norms = np.linalg.norm(w, axis=0)
    if np.any(norms == 0):
        raise DecompositionError(
            "reduced operator appears defective (zero eigenvector); retry with truncation rank r-1"
        )
    w = w / norms[None, :]
    wsv = np.linalg.svd(w, compute_uv=False)
    if wsv[-1] <= 1e-12 * wsv[0]:
        raise DecompositionError(
            "reduced operator appears defective (eigenvector matrix is singular); "
            "retry with truncation rank r-1"
        )
    scale = np.linalg.norm(a_tilde, 2)
    residuals = np.linalg.norm(a_tilde @ w - w * eigvals[None, :], axis=0)
    if np.any(residuals > _EIG_RESIDUAL_RTOL * scale):
        raise DecompositionError(
            "reduced operator appears defective (eigen residual "
            f"{residuals.max():.3e} exceeds {_EIG_RESIDUAL_RTOL:.0e} * ||A~||); "
            "retry with truncation rank r-1"
        )
    return w, eigvals, u @ w


def amplitudes(phi: np.ndarray, x1: np.ndarray) -> np.ndarray:
    """Least-squares mode amplitudes b that minimize ||Phi b - x1||."""
    phi = np.asarray(phi)
    x1 = np.asarray(x1)
    if phi.shape[0] != x1.shape[0]:
        raise ValueError("first snapshot length must match mode rows")
    b, *_ = np.linalg.lstsq(phi, x1.astype(complex), rcond=None)
    return b


def reconstruct(result: DmdResult, j: int) -> np.ndarray:
    """State estimate at iteration j >= 1: Phi diag(lambda^(j-1)) b."""
    if j < 1:
        raise ValueError("iteration index j starts at 1")
    return result.modes @ (result.amplitudes * result.eigenvalues ** (j - 1))


def reconstruct_window(result: DmdResult, n_columns: int) -> np.ndarray:
    """Reconstruction over iterations 1..n_columns as a complex m x n matrix."""
    if n_columns < 1:
        raise ValueError("need at least one column")
    powers = result.eigenvalues[:, None] ** np.arange(n_columns)[None, :]
    return result.modes @ (result.amplitudes[:, None] * powers)


def dmd(
    x1: np.ndarray,
    x2: np.ndarray,
    rule: TruncationRule = DEFAULT_RULE,
    dt: float = 1.0,
) -> DmdResult:
    """Full decomposition of a shifted snapshot pair.

    Composes truncated SVD, reduced-operator projection, eigendecomposition
    and amplitude fitting; dt is the sampling interval the eigenvalues are
    expressed in.
    """
    x1 = np.asarray(x1, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    if x1.ndim != 2 or x1.size == 0:
        raise DecompositionError("empty snapshot pair")
    if x1.shape != x2.shape:
        raise ValueError(f"snapshot pair shapes differ: {x1.shape} vs {x2.shape}")
    if not dt > 0:
        raise ValueError("dt must be positive")

    svd = svd_truncated(x1, rule)
    a_tilde = reduced_operator(svd.u, svd.sigma, svd.v, x2)
    w, eigvals, phi = eig_modes(a_tilde, svd.u)
    b = amplitudes(phi, x1[:, 0])

    score = np.abs(b) * np.linalg.norm(phi, axis=0)
    order = sorted(
        range(svd.rank),
        key=lambda k: (
            -score[k],
            -abs(eigvals[k]),
            0 if eigvals[k].imag >= 0 else 1,
            -eigvals[k].imag,
            eigvals[k].real,
        ),
    )
    return DmdResult(
        modes=phi[:, order].copy(),
        eigenvalues=eigvals[order].copy(),
        amplitudes=b[order].copy(),
        rank=svd.rank,
        dt_effective=dt,
        singular_values=svd.singular_values.copy(),
        rank_clamped=svd.rank_clamped,
        a_tilde=a_tilde,
        eigvecs=w[:, order].copy(),
    )
