"""Sweep schedule, spectral gap and regime classification."""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .pauli import to_dense
from .problems import DEGENERACY_TOL, ProblemInstance, reachable_subspace

IMPULSE_THRESHOLD = np.pi ** 2 / 4
REGIME_FACTOR = 10.0
_T_SLACK = 1e-12


def _check_time(t, T):
    if T <= 0:
        raise ValueError(f"total time must be positive, got {T}")
    t = np.asarray(t, dtype=float)
    if np.any(t < -_T_SLACK * T) or np.any(t > T * (1 + _T_SLACK)):
        raise ValueError(f"time outside [0, {T}]")
    return np.clip(t, 0.0, T)


def lambda_t(t, T):
    """``sin^2(pi/2 sin^2(pi t / 2T))``; rises from 0 to 1 with zero slope at both ends."""
    t = _check_time(t, T)
    out = np.sin(0.5 * np.pi * np.sin(0.5 * np.pi * t / T) ** 2) ** 2
    return float(out) if out.ndim == 0 else out


def lambda_dot(t, T):
    """Time derivative of :func:`lambda_t`; peaks at ``pi^2 / 4T`` at ``t = T/2``."""
    t = _check_time(t, T)
    out = (np.pi ** 2 / (4 * T)) * np.sin(np.pi * t / T) * np.sin(np.pi * np.sin(0.5 * np.pi * t / T) ** 2)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class GapResult:
    gap: float
    lam_at_min: float
    gapless: bool
    lams: np.ndarray
    gaps: np.ndarray


def spectral_gap(w: np.ndarray, degeneracy_tol: float = DEGENERACY_TOL) -> float:
    """Distance from the lowest eigenvalue to the next distinct one (``inf`` if none)."""
    e0 = w[0]
    above = w[w > e0 + degeneracy_tol * max(1.0, abs(e0))]
    return float(above[0] - e0) if above.size else np.inf


def min_gap(instance: ProblemInstance, grid_points: int = 201,
            degeneracy_tol: float = DEGENERACY_TOL, reachable_only: bool = True) -> GapResult:
    """Minimum ground-state gap of ``(1 - lam) H_I + lam H_F`` on a uniform lambda grid.

    With ``reachable_only`` the spectrum is taken inside the subspace the
    dynamics can reach from the initial state; symmetry-protected crossings
    with unreachable levels would otherwise drive the gap to zero.
    """
    if grid_points < 2:
        raise ValueError("grid_points must be >= 2")
    h_i = to_dense(instance.h_initial)
    h_f = to_dense(instance.h_final)
    if reachable_only:
        v = reachable_subspace(instance)
        h_i = v.conj().T @ h_i @ v
        h_f = v.conj().T @ h_f @ v
    lams = np.linspace(0.0, 1.0, grid_points)
    gaps = np.array([spectral_gap(np.linalg.eigvalsh((1 - lam) * h_i + lam * h_f), degeneracy_tol)
                     for lam in lams])
    k = int(np.argmin(gaps))
    return GapResult(float(gaps[k]), float(lams[k]), bool(gaps[k] < 1e-12), lams, gaps)


class Regime(str, enum.Enum):
    IMPULSE = "Impulse"
    INTERMEDIATE = "Intermediate"
    ADIABATIC = "Adiabatic"


@dataclass(frozen=True)
class RegimeReport:
    gap: float
    t_delta: float
    regime: Regime


def classify_regime(T: float, gap: float, factor: float = REGIME_FACTOR) -> RegimeReport:
    if T <= 0 or gap <= 0:
        raise ValueError("T and gap must be positive")
    td = T * gap
    if td <= IMPULSE_THRESHOLD / factor:
        regime = Regime.IMPULSE
    elif td >= IMPULSE_THRESHOLD * factor:
        regime = Regime.ADIABATIC
    else:
        regime = Regime.INTERMEDIATE
    return RegimeReport(gap, td, regime)
