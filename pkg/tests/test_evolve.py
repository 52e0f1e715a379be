import numpy as np
import pytest
from scipy.linalg import expm

from cdqc.agp import AgpExpansion
from cdqc.evolve import (
    MIN_STEPS, InvalidTraceError, convergence_report, default_steps, dump_trace, load_trace_arrays,
    midpoint_step, propagate,
)
from cdqc.metrics import success_probability
from cdqc.pauli import PauliOperator, to_dense
from cdqc.problems import ProblemInstance, build_factorization, build_random_qubo, initial_state, maxcut_instance
from cdqc.schedule import min_gap


def constant_instance():
    h = PauliOperator(2, {"XI": -1.0, "IX": -1.0, "ZZ": 0.3, "YZ": 0.2})
    return ProblemInstance.custom(h, h)


def test_constant_hamiltonian_matches_closed_form():
    inst = constant_instance()
    exp = AgpExpansion.from_instance(inst, 2)
    psi0 = np.array([1, 1j, -0.5, 0.25], dtype=complex)
    psi0 /= np.linalg.norm(psi0)
    T = 3.3
    tr = propagate(inst, exp, T, n_steps=40, n_samples=5, psi0=psi0)
    h = to_dense(inst.h_final)
    for t, psi in zip(tr.times, tr.states):
        np.testing.assert_allclose(psi, expm(-1j * h * t) @ psi0, atol=1e-10)


def test_trace_layout_and_endpoints():
    inst = build_random_qubo(3, 0)
    tr = propagate(inst, AgpExpansion.from_instance(inst, 1), 0.8, n_steps=100, n_samples=11)
    assert tr.times[0] == 0.0 and tr.times[-1] == pytest.approx(0.8)
    assert np.all(np.diff(tr.times) > 0)
    assert tr.n_steps == 100 and tr.states.shape == (11, 8)
    np.testing.assert_allclose(tr.states[0], initial_state(inst), atol=1e-12)
    np.testing.assert_allclose(tr.states[0], np.full(8, 8 ** -0.5), atol=1e-12)
    assert tr.valid and tr.norm_drift < 1e-10
    assert tr.lambdas[0] == 0.0 and tr.lambdas[-1] == pytest.approx(1.0)


def test_steps_round_up_to_sample_grid():
    inst = build_random_qubo(2, 0)
    tr = propagate(inst, AgpExpansion.from_instance(inst, 0), 1.0, n_steps=101, n_samples=11)
    assert tr.n_steps == 110


@pytest.mark.parametrize("kwargs", [{"n_steps": 5, "n_samples": 11}, {"n_samples": 1}])
def test_bad_step_arguments(kwargs):
    inst = build_random_qubo(2, 0)
    with pytest.raises(ValueError):
        propagate(inst, AgpExpansion.from_instance(inst, 0), 1.0, **kwargs)
    with pytest.raises(ValueError):
        propagate(inst, AgpExpansion.from_instance(inst, 0), -1.0)


def test_norm_drift_is_reported_not_hidden():
    inst = build_random_qubo(2, 0)
    exp = AgpExpansion.from_instance(inst, 0)
    bad = np.array([1.0, 0, 0, 1e-3])
    with pytest.raises(InvalidTraceError) as info:
        propagate(inst, exp, 1.0, n_steps=10, n_samples=2, psi0=bad)
    assert info.value.trace is not None and not info.value.trace.valid
    assert not propagate(inst, exp, 1.0, n_steps=10, n_samples=2, psi0=bad, check=False).valid


def test_midpoint_step_is_unitary():
    rng = np.random.default_rng(0)
    a = rng.normal(size=(16, 16)) + 1j * rng.normal(size=(16, 16))
    h = a + a.conj().T
    psi = rng.normal(size=16) + 0j
    psi /= np.linalg.norm(psi)
    out = midpoint_step(h, psi, 0.37)
    assert abs(np.linalg.norm(out) - 1) < 1e-13
    np.testing.assert_allclose(out, expm(-0.37j * h) @ psi, atol=1e-12)


def test_adiabatic_single_edge():
    inst = maxcut_instance({(0, 1): 1.0}, 2)
    gap = min_gap(inst).gap
    tr = propagate(inst, AgpExpansion.from_instance(inst, 0), 50 / gap)
    assert success_probability(tr.final_state, inst) >= 0.99


def test_step_doubling_converged_at_unit_t_delta():
    inst = build_random_qubo(6, 0)
    T = 1.0 / min_gap(inst).gap
    exp = AgpExpansion.from_instance(inst, 1)
    (n, diff), = convergence_report(inst, exp, T, [4000, 8000])
    assert n == 8000 and diff < 1e-6


def test_second_order_convergence():
    inst = build_random_qubo(2, 3)
    exp = AgpExpansion.from_instance(inst, 1)
    T = 1.0 / min_gap(inst).gap
    ref = propagate(inst, exp, T, n_steps=20000, n_samples=2).final_state
    steps = np.array([25, 50, 100, 200])
    errs = [np.linalg.norm(propagate(inst, exp, T, n_steps=int(n), n_samples=2).final_state - ref) for n in steps]
    slope = np.polyfit(np.log(T / steps), np.log(errs), 1)[0]
    assert slope == pytest.approx(2.0, abs=0.2)


def test_convergence_report_cases():
    inst = constant_instance()
    exp = AgpExpansion.from_instance(inst, 0)
    assert convergence_report(inst, exp, 1.0, [100]) == []
    for _, d in convergence_report(inst, exp, 1.0, [10, 20, 40]):
        assert d < 1e-13

    qubo = build_random_qubo(6, 1)
    T = 0.1 / min_gap(qubo).gap
    rows = convergence_report(qubo, AgpExpansion.from_instance(qubo, 3), T, [20, 40, 80, 160])
    diffs = np.array([d for _, d in rows])
    assert np.all(np.diff(diffs) < 0)
    ratios = diffs[:-1] / diffs[1:]
    np.testing.assert_allclose(ratios, 4.0, rtol=0.15)


def test_default_steps_rule():
    inst = build_random_qubo(6, 0)
    gap = min_gap(inst).gap
    exp = AgpExpansion.from_instance(inst, 2)
    impulse = default_steps(exp, 0.05 / gap)
    adiabatic = default_steps(exp, 50 / gap)
    assert impulse == MIN_STEPS
    assert adiabatic > impulse and adiabatic % 400 == 0
    # a large but slowly varying diagonal target does not blow up the step count
    fac = build_factorization(143)
    assert default_steps(AgpExpansion.from_instance(fac, 2), 30 / min_gap(fac).gap) <= 8000


def test_trace_dump_round_trip(tmp_path):
    inst = build_random_qubo(3, 2)
    tr = propagate(inst, AgpExpansion.from_instance(inst, 2), 0.5, n_steps=60, n_samples=7)
    path = tmp_path / "trace.bin"
    dump_trace(tr, path)
    T, times, states = load_trace_arrays(path)
    assert T == tr.T
    np.testing.assert_array_equal(times, tr.times)
    np.testing.assert_array_equal(states, tr.states)
    raw = path.read_bytes()
    assert raw[:4] == b"CDQT" and len(raw) == 4 + 16 + 7 * 8 + 7 * 8 * 16
    (tmp_path / "bad.bin").write_bytes(b"XXXX" + raw[4:])
    with pytest.raises(ValueError):
        load_trace_arrays(tmp_path / "bad.bin")
