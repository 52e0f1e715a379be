"""Counterdiabatic sweeps with nested-commutator gauge potentials, exact dynamics and coherence metrics."""

from .pauli import PauliOperator, commutator, combine, frobenius_sq, string_mul, to_dense
from .problems import (
    Family,
    ProblemInstance,
    build_factorization,
    build_heisenberg,
    build_maxcut,
    build_mixer,
    build_random_4local,
    build_random_qubo,
    ground_space,
    maxcut_instance,
)
from .schedule import classify_regime, lambda_dot, lambda_t, min_gap
from .agp import AgpExpansion, build_nested, exact_agp_dense
from .evolve import EvolutionTrace, convergence_report, propagate
from .metrics import (
    coherence_re,
    energy_fluctuation_avg,
    evaluate_trace,
    mean_coherence,
    qsl_time,
    success_probability,
)

__version__ = "0.1.0"
