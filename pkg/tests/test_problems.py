import itertools

import numpy as np
import pytest

from cdqc.pauli import PauliOperator, commutator, to_dense
from cdqc.problems import (
    Family, ProblemInstance, build_factorization, build_heisenberg, build_maxcut, build_mixer,
    build_random_4local, build_random_qubo, decode_factors, default_widths, dumps_instance,
    fig1_graph, ground_space, initial_state, load_instance, loads_instance, make_instance,
    maxcut_instance, reachable_subspace, schmidt_rank, z_polynomial,
)


def bits_of(index, n):
    return [(index >> (n - 1 - q)) & 1 for q in range(n)]


def is_z_only(op):
    return all(set(s) <= {"I", "Z"} for s in op.terms)


# -- mixer -----------------------------------------------------------------

def test_mixer_examples():
    assert build_mixer(1).terms == {"X": -1.0}
    e0, g = ground_space(build_mixer(2))
    assert e0 == pytest.approx(-2.0, abs=1e-12)
    assert g.shape[1] == 1
    np.testing.assert_allclose(np.abs(g[:, 0]), 0.5, atol=1e-12)
    inst = build_random_qubo(6, 0)
    np.testing.assert_allclose(initial_state(inst), 2.0 ** -3, atol=1e-12)
    assert len(build_mixer(5)) == 5


# -- max-cut -----------------------------------------------------------------

def test_single_edge_maxcut_spectrum():
    d = to_dense(build_maxcut({(0, 1): 1.0}, 2))
    np.testing.assert_allclose(np.diag(d).real, [0, -1, -1, 0], atol=1e-15)


def test_fig1_graph_is_cubic_with_nine_edges():
    g = fig1_graph()
    assert len(g) == 9
    degree = np.zeros(6, int)
    for i, j in g:
        degree[i] += 1
        degree[j] += 1
    assert list(degree) == [3] * 6


def brute_max_cut(weights, n):
    best = 0.0
    for b in range(2 ** n):
        s = bits_of(b, n)
        best = max(best, sum(w for (i, j), w in weights.items() if s[i] != s[j]))
    return best


@pytest.mark.parametrize("seed", [None, 3, 11])
def test_maxcut_minimum_is_minus_max_cut(seed):
    inst = maxcut_instance(seed=seed)
    weights = {(i, j): w for i, j, w in inst.params["edges"]}
    e0, _ = ground_space(inst.h_final)
    assert e0 == pytest.approx(-brute_max_cut(weights, 6), abs=1e-12)
    assert is_z_only(inst.h_final)


def test_maxcut_validation():
    assert build_maxcut({}, 3).is_zero()
    with pytest.raises(ValueError, match="self-loop"):
        build_maxcut({(1, 1): 1.0}, 3)
    with pytest.raises(ValueError):
        build_maxcut({(0, 5): 1.0}, 3)


# -- random QUBO / 4-local ----------------------------------------------------

@pytest.mark.parametrize("builder", [build_random_qubo, build_random_4local])
def test_random_families_are_deterministic(builder):
    a, b = builder(6, 42), builder(6, 42)
    assert a == b
    assert a.h_final != builder(6, 43).h_final


@pytest.mark.parametrize("builder,n", [(build_random_qubo, 5), (build_random_4local, 6)])
def test_symbolic_diagonal_matches_dense_minimum(builder, n):
    inst = builder(n, 7)
    assert is_z_only(inst.h_final)
    energies = []
    for b in range(2 ** n):
        s = bits_of(b, n)
        energies.append(sum(c.real * np.prod([1 - 2 * s[q] for q, ch in enumerate(k) if ch == "Z"])
                            for k, c in inst.h_final.terms.items()))
    assert min(energies) == pytest.approx(np.linalg.eigvalsh(to_dense(inst.h_final))[0], abs=1e-12)


def test_random_coefficients_are_uniform_on_increasing_tuples():
    inst = build_random_4local(6, 0)
    idx = [tuple(k) for k, _ in inst.params["coefficients"]]
    assert all(list(t) == sorted(set(t)) for t in idx)
    assert len(idx) == 6 + 15 + 20 + 15
    assert all(-1 <= v <= 1 for _, v in inst.params["coefficients"])


def test_4local_term_count_and_qubo_reduction():
    assert len(build_random_4local(4, 1).h_final) == 15
    coeffs = {(0,): 0.3, (1, 2): -0.7, (0, 3): 0.2}
    assert z_polynomial(4, coeffs) == z_polynomial(4, {**coeffs, (0, 1, 2): 0.0, (0, 1, 2, 3): 0.0})
    assert z_polynomial(2, {(0,): 0.0, (1,): 0.0, (0, 1): 0.0}).is_zero()


def test_family_size_checks():
    with pytest.raises(ValueError):
        build_random_qubo(1, 0)
    with pytest.raises(ValueError):
        build_random_4local(3, 0)
    with pytest.raises(ValueError):
        build_heisenberg(2)


# -- factorization -----------------------------------------------------------

@pytest.mark.parametrize("N,n_x,n_y,expected", [
    (9, 1, 1, {(3, 3)}),
    (15, 1, 2, {(3, 5)}),
    (143, 3, 3, {(11, 13), (13, 11)}),
])
def test_factorization_ground_states_by_brute_force(N, n_x, n_y, expected):
    inst = build_factorization(N, n_x, n_y)
    n = n_x + n_y
    assert is_z_only(inst.h_final)
    diag = np.diag(to_dense(inst.h_final)).real
    for b in range(2 ** n):
        x, y = decode_factors(b, n_x, n_y)
        assert diag[b] == pytest.approx((x * y - N) ** 2, abs=1e-9)
    zeros = {decode_factors(b, n_x, n_y) for b in np.flatnonzero(np.abs(diag) < 1e-9)}
    assert zeros == expected
    e0, g = ground_space(inst.h_final)
    assert e0 == pytest.approx(0.0, abs=1e-9)
    assert g.shape[1] == len(expected)
    assert np.all(diag >= -1e-9)


def test_factorization_widths():
    assert default_widths(143) == (3, 3)
    assert default_widths(15) == (1, 2)
    inst = build_factorization(143)
    assert inst.params == {"N": 143, "n_x": 3, "n_y": 3}
    with pytest.raises(ValueError, match="n_x=3, n_y=3"):
        build_factorization(143, 1, 2)
    with pytest.raises(ValueError):
        build_factorization(14)
    with pytest.raises(ValueError):
        build_factorization(13)


# -- Heisenberg --------------------------------------------------------------

def test_heisenberg_is_hermitian_and_not_diagonal():
    h = build_heisenberg(6).h_final
    d = to_dense(h)
    assert h.is_hermitian()
    np.testing.assert_allclose(d, d.conj().T, atol=1e-15)
    assert not h.is_diagonal()


def test_heisenberg_field_only_spectrum():
    n, g = 5, 0.7
    d = np.diag(to_dense(build_heisenberg(n, g=g, J=0.0, beta=0.0).h_final)).real
    expected = [g * (n - 2 * bin(b).count("1")) for b in range(2 ** n)]
    np.testing.assert_allclose(d, expected, atol=1e-12)
    assert int(np.argmin(d)) == 2 ** n - 1


def test_heisenberg_conserves_magnetization():
    inst = build_heisenberg(6, 1.0, 0.2, 0.5)
    mz = sum((PauliOperator.term(6, {j: "Z"}) for j in range(6)), PauliOperator.zero(6))
    assert commutator(mz, inst.h_final).is_zero()


def test_heisenberg_translation_invariance():
    n = 6
    h = build_heisenberg(n, 1.0, 0.2, 0.5).h_final
    shifted = PauliOperator(n, {s[-1] + s[:-1]: c for s, c in h.terms.items()})
    assert shifted.allclose(h, atol=0)
    np.testing.assert_allclose(np.linalg.eigvalsh(to_dense(shifted)), np.linalg.eigvalsh(to_dense(h)),
                               atol=1e-12)


@pytest.mark.parametrize("beta,entangled", [(0.2, False), (0.5, True), (0.8, True)])
def test_heisenberg_ground_state_entanglement(beta, entangled):
    # with g=1, J=0.2 the field dominates at small beta: the ground state is the
    # all-down product state; larger beta moves it into an entangled sector
    e0, g = ground_space(build_heisenberg(6, 1.0, 0.2, beta).h_final)
    assert g.shape[1] == 1
    assert (schmidt_rank(g[:, 0], 3) > 1) is entangled


def test_heisenberg_reference_ground_energy():
    e0, _ = ground_space(build_heisenberg(6, 1.0, 0.2, 0.2).h_final)
    assert e0 == pytest.approx(-6.0 + 6 * 0.2, abs=1e-12)


# -- spectra helpers -----------------------------------------------------------

def test_ground_space_of_single_edge():
    e0, g = ground_space(build_maxcut({(0, 1): 1.0}, 2))
    assert e0 == pytest.approx(-1.0)
    proj = g @ g.conj().T
    np.testing.assert_allclose(np.diag(proj).real, [0, 1, 1, 0], atol=1e-12)


def test_reachable_subspace_dimensions():
    assert reachable_subspace(maxcut_instance({(0, 1): 1.0}, 2)).shape[1] == 2
    basis = reachable_subspace(maxcut_instance())
    assert basis.shape[1] < 64
    np.testing.assert_allclose(basis.conj().T @ basis, np.eye(basis.shape[1]), atol=1e-10)


def test_instance_validation():
    with pytest.raises(ValueError):
        ProblemInstance(Family.CUSTOM, 2, build_mixer(2), build_mixer(3))
    with pytest.raises(ValueError):
        ProblemInstance.custom(build_mixer(1), PauliOperator(1, {"Z": 1j}))


# -- instance files -------------------------------------------------------------

@pytest.mark.parametrize("inst", [
    build_random_qubo(4, 5),
    build_random_4local(5, 2),
    build_factorization(15),
    build_heisenberg(4, 1.0, 0.2, 0.3),
    maxcut_instance(seed=9),
    ProblemInstance.custom(PauliOperator(2, {"XI": -1, "IX": -1}), PauliOperator(2, {"ZZ": 0.25, "YX": 1e-3})),
], ids=lambda i: i.family.value)
def test_instance_round_trip(inst, tmp_path):
    path = tmp_path / "inst.txt"
    from cdqc.problems import dump_instance
    dump_instance(inst, path)
    back = load_instance(path)
    assert back == inst
    np.testing.assert_array_equal(back.h_final.coeffs, inst.h_final.coeffs)
    assert dumps_instance(back) == path.read_text()


def test_truncated_instance_names_line():
    text = dumps_instance(build_random_qubo(3, 1))
    lines = text.splitlines()
    with pytest.raises(ValueError, match="line 3"):
        loads_instance("\n".join(lines[:2]))
    broken = lines[:-1] + [lines[-1].rsplit(" ", 1)[0]]
    with pytest.raises(ValueError, match=f"line {len(lines)}"):
        loads_instance("\n".join(broken))
    with pytest.raises(ValueError, match="h_final"):
        loads_instance("\n".join(lines[:lines.index("[h_final]")]))


def test_make_instance_dispatch():
    assert make_instance("RandomQubo", 4, 3) == build_random_qubo(4, 3)
    assert make_instance("Factorization", params={"N": 15}) == build_factorization(15)
    assert make_instance("Heisenberg", 5, params={"beta": 0.4}) == build_heisenberg(5, beta=0.4)
    edge = make_instance("MaxCut", 2, params={"edges": [[0, 1, 1.0]]})
    assert edge.h_final == build_maxcut({(0, 1): 1.0}, 2)
    with pytest.raises(ValueError):
        make_instance("Nope", 3)
