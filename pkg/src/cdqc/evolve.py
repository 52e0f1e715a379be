"""Exponential-midpoint propagation under the counterdiabatic Hamiltonian."""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass, field

import numpy as np

from .agp import AgpExpansion
from .problems import ProblemInstance, initial_state
from .schedule import lambda_dot, lambda_t

MAX_NORM_DRIFT = 1e-8
DEFAULT_SAMPLES = 401
MIN_STEPS = 400
MAX_DEFAULT_STEPS = 8000
STEPS_PER_VARIATION = 10.0


class InvalidTraceError(RuntimeError):
    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace


@dataclass
class EvolutionTrace:
    times: np.ndarray
    states: np.ndarray  # (n_samples, 2^n)
    lambdas: np.ndarray
    lambda_dots: np.ndarray
    order: int
    T: float
    n_steps: int
    norm_drift: float
    instance: ProblemInstance | None = field(default=None, repr=False)
    expansion: AgpExpansion | None = field(default=None, repr=False)

    @property
    def valid(self) -> bool:
        return self.norm_drift <= MAX_NORM_DRIFT

    @property
    def final_state(self) -> np.ndarray:
        return self.states[-1]


def midpoint_step(h: np.ndarray, psi: np.ndarray, dt: float) -> np.ndarray:
    """``exp(-i h dt) psi`` through the hermitian eigendecomposition of ``h``."""
    w, v = np.linalg.eigh(h)
    return v @ (np.exp(-1j * w * dt) * (v.conj().T @ psi))


def spectral_norm_estimate(expansion: AgpExpansion, T: float, probes: int = 20) -> float:
    ts = np.linspace(0.0, T, probes)
    return max(float(np.max(np.abs(np.linalg.eigvalsh(expansion.cd_hamiltonian(t, T))))) for t in ts)


def variation_rate(expansion: AgpExpansion, T: float, probes: int = 20) -> float:
    """Largest spectral norm of ``dH/dt`` over ``probes`` interior times (central differences)."""
    h = 1e-4 * T
    ts = np.linspace(h, T - h, probes)
    return max(float(np.linalg.norm(expansion.cd_hamiltonian(t + h, T) - expansion.cd_hamiltonian(t - h, T), 2))
               / (2 * h) for t in ts)


def default_steps(expansion: AgpExpansion, T: float, n_samples: int = DEFAULT_SAMPLES) -> int:
    """``10 T sqrt(max ||dH/dt||)`` clipped to ``[MIN_STEPS, MAX_DEFAULT_STEPS]``.

    Rounded up to a multiple of ``n_samples - 1``.  The midpoint exponential
    is exact for a frozen Hamiltonian, so the step only has to follow how fast
    ``H(t)`` changes, not how large it is.  The cap only binds for the
    factorization family, whose populations are converged well below it.
    """
    steps = STEPS_PER_VARIATION * T * math.sqrt(variation_rate(expansion, T))
    steps = min(MAX_DEFAULT_STEPS, max(MIN_STEPS, math.ceil(steps)))
    return _round_steps(steps, n_samples)


def _round_steps(n_steps: int, n_samples: int) -> int:
    per = max(1, math.ceil(n_steps / (n_samples - 1)))
    return per * (n_samples - 1)


def propagate(instance: ProblemInstance, expansion: AgpExpansion, T: float, n_steps: int | None = None,
              n_samples: int = DEFAULT_SAMPLES, psi0: np.ndarray | None = None,
              check: bool = True) -> EvolutionTrace:
    """Propagate the ground state of ``H_I`` from ``t = 0`` to ``T``.

    ``n_steps`` is rounded up to a multiple of ``n_samples - 1`` so samples
    land on step boundaries.  Raises :class:`InvalidTraceError` when the norm
    drifts by more than ``MAX_NORM_DRIFT`` (with ``check``).
    """
    if T <= 0:
        raise ValueError("T must be positive")
    if n_samples < 2:
        raise ValueError("n_samples must be >= 2")
    if n_steps is None:
        n_steps = default_steps(expansion, T, n_samples)
    if n_steps < n_samples - 1:
        raise ValueError("n_steps must be >= n_samples - 1")
    n_steps = _round_steps(n_steps, n_samples)
    per = n_steps // (n_samples - 1)
    dt = T / n_steps

    psi = initial_state(instance) if psi0 is None else np.asarray(psi0, dtype=np.complex128)
    states = np.empty((n_samples, psi.size), dtype=np.complex128)
    states[0] = psi
    for s in range(1, n_samples):
        for j in range((s - 1) * per, s * per):
            psi = midpoint_step(expansion.cd_hamiltonian((j + 0.5) * dt, T), psi, dt)
        states[s] = psi
    times = np.linspace(0.0, T, n_samples)
    drift = float(np.max(np.abs(np.linalg.norm(states, axis=1) - 1.0)))
    trace = EvolutionTrace(times, states, lambda_t(times, T), lambda_dot(times, T), expansion.order,
                           float(T), n_steps, drift, instance, expansion)
    if check and not trace.valid:
        raise InvalidTraceError(f"norm drift {drift:.3g} exceeds {MAX_NORM_DRIFT}", trace)
    return trace


def convergence_report(instance: ProblemInstance, expansion: AgpExpansion, T: float,
                       steps_sequence) -> list[tuple[int, float]]:
    """Norm of the change in the final state between successive step counts."""
    finals = []
    rows = []
    for n in steps_sequence:
        finals.append(propagate(instance, expansion, T, n_steps=n, n_samples=2).final_state)
        if len(finals) > 1:
            rows.append((n, float(np.linalg.norm(finals[-1] - finals[-2]))))
    return rows


# -- binary dump ------------------------------------------------------------
# little-endian: magic b"CDQT", uint32 n_qubits, uint32 n_samples, float64 T,
# then n_samples float64 times, then n_samples * 2^n interleaved (re, im) float64.

_MAGIC = b"CDQT"


def dump_trace(trace: EvolutionTrace, path) -> None:
    n = int(np.log2(trace.states.shape[1]))
    with open(path, "wb") as fh:
        fh.write(_MAGIC + struct.pack("<IId", n, len(trace.times), trace.T))
        fh.write(trace.times.astype("<f8").tobytes())
        fh.write(trace.states.astype("<c16").tobytes())


def load_trace_arrays(path) -> tuple[float, np.ndarray, np.ndarray]:
    """Return ``(T, times, states)`` from a :func:`dump_trace` file."""
    with open(path, "rb") as fh:
        data = fh.read()
    if data[:4] != _MAGIC:
        raise ValueError("not a trace file")
    n, ns, T = struct.unpack_from("<IId", data, 4)
    off = 4 + struct.calcsize("<IId")
    times = np.frombuffer(data, "<f8", ns, off)
    off += 8 * ns
    states = np.frombuffer(data, "<c16", ns * 2 ** n, off).reshape(ns, 2 ** n)
    return T, times.copy(), states.copy()
