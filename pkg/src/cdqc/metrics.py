"""Coherence, energy fluctuation, speed-limit time and success probability."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import simpson

from .evolve import EvolutionTrace
from .problems import DEGENERACY_TOL, ProblemInstance, ground_space
from .schedule import Regime, classify_regime

UNIT_NORM_TOL = 1e-8


def level_populations(state: np.ndarray, h_dense: np.ndarray,
                      degeneracy_tol: float = DEGENERACY_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Populations of ``state`` on the distinct eigenvalues of ``h_dense``.

    Returns ``(energies, populations)``; levels closer than
    ``degeneracy_tol * max(1, |E|)`` share one projector.
    """
    w, v = np.linalg.eigh(h_dense)
    amp2 = np.abs(v.conj().T @ state) ** 2
    scale = max(1.0, float(np.max(np.abs(w))))
    new_group = np.empty(len(w), dtype=bool)
    new_group[0] = True
    new_group[1:] = np.diff(w) > degeneracy_tol * scale
    labels = np.cumsum(new_group) - 1
    pops = np.bincount(labels, weights=amp2)
    return w[new_group], pops


def shannon_bits(p: np.ndarray) -> float:
    p = p[p > 0]
    return float(max(0.0, -np.sum(p * np.log2(p))))


def coherence_re(state: np.ndarray, h_dense: np.ndarray,
                 degeneracy_tol: float = DEGENERACY_TOL) -> float:
    """Relative entropy of coherence of a pure state in the eigenbasis of ``h_dense`` (bits)."""
    norm = np.linalg.norm(state)
    if abs(norm - 1.0) > UNIT_NORM_TOL:
        raise ValueError(f"state is not normalized (norm {norm:.12g})")
    return shannon_bits(level_populations(state, h_dense, degeneracy_tol)[1])


def energy_std(state: np.ndarray, h_dense: np.ndarray) -> float:
    """``sqrt(<H^2> - <H>^2)``, evaluated as ``||(H - <H>) psi||`` to avoid cancellation."""
    hpsi = h_dense @ state
    mean = np.real(np.vdot(state, hpsi))
    return float(np.linalg.norm(hpsi - mean * state))


def _hamiltonians(trace: EvolutionTrace, basis: str):
    exp = trace.expansion
    for t, lam in zip(trace.times, trace.lambdas):
        if basis == "full":
            yield exp.cd_hamiltonian(t, trace.T)
        elif basis == "adiabatic":
            yield exp.h_ad_dense(lam)
        else:
            raise ValueError(f"unknown basis {basis!r}")


def _check_trace(trace: EvolutionTrace):
    if not trace.valid:
        raise ValueError(f"invalid trace (norm drift {trace.norm_drift:.3g})")
    if len(trace.times) < 2:
        raise ValueError("trace needs at least two samples")


def coherence_series(trace: EvolutionTrace, basis: str = "full") -> np.ndarray:
    _check_trace(trace)
    return np.array([coherence_re(psi, h) for psi, h in zip(trace.states, _hamiltonians(trace, basis))])


def time_average(trace: EvolutionTrace, values: np.ndarray) -> float:
    """``(1/T) * integral`` of per-sample ``values`` (Simpson's rule on the sample grid).

    The speed-limit bound is saturated along geodesic evolutions, so the
    fluctuation integral needs better than trapezoid accuracy.
    """
    return float(simpson(values, x=trace.times) / trace.T)


def mean_coherence(trace: EvolutionTrace, basis: str = "full") -> float:
    return time_average(trace, coherence_series(trace, basis))


def energy_fluctuation_avg(trace: EvolutionTrace) -> float:
    _check_trace(trace)
    stds = np.array([energy_std(psi, h) for psi, h in zip(trace.states, _hamiltonians(trace, "full"))])
    return time_average(trace, stds)


def bures_angle(psi0: np.ndarray, psi1: np.ndarray) -> float:
    """``arccos |<psi0|psi1>|`` via the phase-aligned chord, accurate near zero angle."""
    overlap = np.vdot(psi0, psi1)
    phase = overlap / abs(overlap) if abs(overlap) > 0 else 1.0
    chord = np.linalg.norm(psi1 - phase * psi0)
    return float(2.0 * np.arcsin(min(1.0, chord / 2.0)))


def qsl_time(trace: EvolutionTrace, avg_fluctuation: float | None = None) -> float:
    """``arccos|<psi(0)|psi(T)>| / mean energy spread``; ``inf`` if the spread vanishes."""
    if avg_fluctuation is None:
        avg_fluctuation = energy_fluctuation_avg(trace)
    return _qsl(bures_angle(trace.states[0], trace.states[-1]), avg_fluctuation)


def _qsl(angle: float, spread: float) -> float:
    if angle == 0.0:
        return 0.0
    if spread <= 0.0:
        return float("inf")
    return angle / spread


def success_probability(final_state: np.ndarray, instance_or_states) -> float:
    """Population of ``final_state`` in the ground space of the final Hamiltonian."""
    if isinstance(instance_or_states, ProblemInstance):
        _, g = ground_space(instance_or_states.h_final)
    else:
        g = np.asarray(instance_or_states)
    return float(np.sum(np.abs(g.conj().T @ final_state) ** 2))


@dataclass
class MetricsRecord:
    mean_coherence: float
    avg_energy_fluctuation: float
    qsl_time: float
    success_probability: float
    t_delta: float
    regime: Regime
    order: int
    coherence_series: np.ndarray
    population_sum_error: float


def evaluate_trace(trace: EvolutionTrace, gap: float, ground_states: np.ndarray | None = None,
                   basis: str = "full") -> MetricsRecord:
    """All scalars for one run, diagonalizing ``H(t)`` once per sample."""
    _check_trace(trace)
    if basis not in ("full", "adiabatic"):
        raise ValueError(f"unknown basis {basis!r}")
    exp = trace.expansion
    cre, stds, pop_err = [], [], 0.0
    for psi, t, lam in zip(trace.states, trace.times, trace.lambdas):
        h = exp.cd_hamiltonian(t, trace.T)
        _, pops = level_populations(psi, h if basis == "full" else exp.h_ad_dense(lam))
        pop_err = max(pop_err, abs(float(np.sum(pops)) - 1.0))
        cre.append(shannon_bits(pops))
        stds.append(energy_std(psi, h))
    cre = np.array(cre)
    d_e = time_average(trace, np.array(stds))
    if ground_states is None:
        ground_states = ground_space(trace.instance.h_final)[1]
    report = classify_regime(trace.T, gap)
    return MetricsRecord(
        mean_coherence=time_average(trace, cre),
        avg_energy_fluctuation=d_e,
        qsl_time=_qsl(bures_angle(trace.states[0], trace.states[-1]), d_e),
        success_probability=success_probability(trace.final_state, ground_states),
        t_delta=report.t_delta,
        regime=report.regime,
        order=trace.order,
        coherence_series=cre,
        population_sum_error=pop_err,
    )
