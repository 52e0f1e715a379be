"""Initial and final Hamiltonians for the five problem families.

All families share the transverse-field mixer ``H_I = -sum_j X_j`` as the
initial Hamiltonian.  Random ensembles draw their couplings uniformly from
``[-1, 1]`` with :func:`numpy.random.default_rng` seeded per instance.
"""

from __future__ import annotations

import enum
import itertools
import json
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .pauli import DENSE_QUBIT_CAP, PauliOperator, parse_operator, to_dense

DEGENERACY_TOL = 1e-9


class Family(str, enum.Enum):
    MAXCUT = "MaxCut"
    RANDOM_QUBO = "RandomQubo"
    FACTORIZATION = "Factorization"
    RANDOM_4LOCAL = "Random4Local"
    HEISENBERG = "Heisenberg"
    CUSTOM = "Custom"


@dataclass(frozen=True, eq=False)
class ProblemInstance:
    family: Family
    n_qubits: int
    h_initial: PauliOperator
    h_final: PauliOperator
    seed: int | None = None
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.h_initial.n_qubits != self.n_qubits or self.h_final.n_qubits != self.n_qubits:
            raise ValueError("h_initial, h_final and n_qubits disagree")
        if not (self.h_initial.is_hermitian() and self.h_final.is_hermitian()):
            raise ValueError("instance Hamiltonians must be hermitian")

    @classmethod
    def custom(cls, h_initial: PauliOperator, h_final: PauliOperator) -> "ProblemInstance":
        """Hand-built pair outside the five families."""
        return cls(Family.CUSTOM, h_initial.n_qubits, h_initial, h_final)

    def __eq__(self, other):
        if not isinstance(other, ProblemInstance):
            return NotImplemented
        return (self.family == other.family and self.n_qubits == other.n_qubits
                and self.seed == other.seed and self.params == other.params
                and self.h_initial == other.h_initial and self.h_final == other.h_final)

    __hash__ = None


def build_mixer(n: int) -> PauliOperator:
    if n < 1:
        raise ValueError("mixer needs at least one qubit")
    return sum((PauliOperator.term(n, {j: "X"}, -1.0) for j in range(n)), PauliOperator.zero(n))


def z_polynomial(n: int, coefficients: Mapping[tuple[int, ...], float]) -> PauliOperator:
    """``sum_c coefficients[c] * prod_{j in c} Z_j``; the empty tuple is the identity."""
    terms: dict[str, complex] = {}
    for idx, c in coefficients.items():
        letters = ["I"] * n
        for j in idx:
            letters[j] = "Z"
        key = "".join(letters)
        terms[key] = terms.get(key, 0.0) + c
    return PauliOperator(n, terms)


def fig1_graph() -> dict[tuple[int, int], float]:
    """Six vertices, nine unit-weight edges, every vertex of degree three (K_{3,3})."""
    return {(i, j): 1.0 for i in range(3) for j in range(3, 6)}


def build_maxcut(weights: Mapping[tuple[int, int], float], n: int) -> PauliOperator:
    """``1/2 sum_{ij} J_ij (Z_i Z_j - 1)``; the minimum energy is minus the max cut weight."""
    coeffs: dict[tuple[int, ...], float] = {}
    for (i, j), w in weights.items():
        if i == j:
            raise ValueError(f"self-loop edge ({i}, {j})")
        if not (0 <= i < n and 0 <= j < n):
            raise ValueError(f"edge ({i}, {j}) outside {n} vertices")
        key = tuple(sorted((i, j)))
        coeffs[key] = coeffs.get(key, 0.0) + 0.5 * w
        coeffs[()] = coeffs.get((), 0.0) - 0.5 * w
    return z_polynomial(n, coeffs)


def maxcut_instance(weights: Mapping[tuple[int, int], float] | None = None, n: int = 6,
                    seed: int | None = None) -> ProblemInstance:
    """Max-cut on ``weights`` (default: the six-vertex cubic graph, unit weights).

    With ``seed`` set and no explicit weights, the graph keeps its edges and
    takes weights uniform in ``[0, 1]``.
    """
    if weights is None:
        weights = fig1_graph()
        if seed is not None:
            rng = np.random.default_rng(seed)
            weights = {e: float(rng.uniform(0.0, 1.0)) for e in weights}
    weights = dict(weights)
    params = {"edges": [[i, j, w] for (i, j), w in sorted(weights.items())]}
    return ProblemInstance(Family.MAXCUT, n, build_mixer(n), build_maxcut(weights, n), seed, params)


def _random_z_coefficients(n: int, max_body: int, rng) -> dict[tuple[int, ...], float]:
    coeffs = {}
    for k in range(1, max_body + 1):
        for idx in itertools.combinations(range(n), k):
            coeffs[idx] = float(rng.uniform(-1.0, 1.0))
    return coeffs


def _coeff_params(coeffs: Mapping[tuple[int, ...], float]) -> dict:
    return {"coefficients": [[list(k), v] for k, v in coeffs.items()]}


def build_random_qubo(n: int, seed: int) -> ProblemInstance:
    """``sum_j a_j Z_j + sum_{j<k} b_jk Z_j Z_k`` with couplings uniform in [-1, 1]."""
    if n < 2:
        raise ValueError("random QUBO needs n >= 2")
    coeffs = _random_z_coefficients(n, 2, np.random.default_rng(seed))
    return ProblemInstance(Family.RANDOM_QUBO, n, build_mixer(n), z_polynomial(n, coeffs), seed,
                           _coeff_params(coeffs))


def build_random_4local(n: int, seed: int) -> ProblemInstance:
    """All 1- to 4-body Z couplings over increasing index tuples, uniform in [-1, 1]."""
    if n < 4:
        raise ValueError("random 4-local needs n >= 4")
    coeffs = _random_z_coefficients(n, 4, np.random.default_rng(seed))
    return ProblemInstance(Family.RANDOM_4LOCAL, n, build_mixer(n), z_polynomial(n, coeffs), seed,
                           _coeff_params(coeffs))


# -- factorization ---------------------------------------------------------

def _register(n: int, offset: int, width: int) -> PauliOperator:
    """``1 + sum_{j=1}^{width} 2^j Q_j`` with ``Q = (1 - Z) / 2`` on qubits ``offset..``."""
    op = PauliOperator.identity(n)
    for j in range(1, width + 1):
        q = offset + j - 1
        op = op + (PauliOperator.identity(n) - PauliOperator.term(n, {q: "Z"})) * (2.0 ** j / 2)
    return op


def factor_pairs(N: int, n_x: int, n_y: int) -> list[tuple[int, int]]:
    """Odd factor pairs ``(x, y)`` with ``x < 2^(n_x+1)`` and ``y < 2^(n_y+1)``."""
    return [(x, N // x) for x in range(3, 2 ** (n_x + 1), 2)
            if N % x == 0 and N // x > 1 and N // x < 2 ** (n_y + 1)]


def default_widths(N: int) -> tuple[int, int]:
    """Smallest register widths ``n_x <= n_y`` (by total, then n_x) admitting a factor pair."""
    if N < 9 or N % 2 == 0:
        raise ValueError(f"N must be odd and >= 9, got {N}")
    for total in range(2, 2 * N.bit_length() + 1):
        for n_x in range(1, total // 2 + 1):
            if factor_pairs(N, n_x, total - n_x):
                return n_x, total - n_x
    raise ValueError(f"{N} has no odd factor pair (is it prime?)")


def build_factorization(N: int, n_x: int | None = None, n_y: int | None = None) -> ProblemInstance:
    """``(x y - N)^2`` over binary registers for the odd factors ``x`` and ``y``.

    Qubits ``0..n_x-1`` hold bits 1..n_x of ``x`` and the next ``n_y`` hold ``y``
    (bit 0 of each factor is fixed to one).
    """
    if N < 9 or N % 2 == 0:
        raise ValueError(f"N must be odd and >= 9, got {N}")
    if n_x is None or n_y is None:
        n_x, n_y = default_widths(N)
    if n_x < 1 or n_y < 1:
        raise ValueError("register widths must be positive")
    if not factor_pairs(N, n_x, n_y):
        try:
            hint = "; smallest sufficient widths are n_x=%d, n_y=%d" % default_widths(N)
        except ValueError:
            hint = ""
        raise ValueError(f"no factor pair of {N} fits n_x={n_x}, n_y={n_y}{hint}")
    n = n_x + n_y
    x = _register(n, 0, n_x)
    y = _register(n, n_x, n_y)
    f = x @ y - PauliOperator.identity(n, float(N))
    h = f @ f
    # the product of diagonal strings is real up to rounding
    h = PauliOperator.from_arrays(n, h.xs, h.zs, h.coeffs.real)
    return ProblemInstance(Family.FACTORIZATION, n, build_mixer(n), h, None,
                           {"N": N, "n_x": n_x, "n_y": n_y})


def decode_factors(index: int, n_x: int, n_y: int) -> tuple[int, int]:
    """Decode a computational-basis index into ``(x, y)``; Z = -1 (bit 1) means Q = 1."""
    n = n_x + n_y
    bits = [(index >> (n - 1 - q)) & 1 for q in range(n)]
    x = 1 + sum(2 ** j * bits[j - 1] for j in range(1, n_x + 1))
    y = 1 + sum(2 ** j * bits[n_x + j - 1] for j in range(1, n_y + 1))
    return x, y


# -- Heisenberg ------------------------------------------------------------

def build_heisenberg(n: int, g: float = 1.0, J: float = 0.2, beta: float = 0.2) -> ProblemInstance:
    """Periodic XXZ ring with field: ``g sum Z + J sum (XX + YY) + beta sum ZZ``."""
    if n < 3:
        raise ValueError("Heisenberg ring needs n >= 3")
    terms: dict[str, complex] = {}

    def add(ops, c):
        letters = ["I"] * n
        for j, ch in ops.items():
            letters[j] = ch
        key = "".join(letters)
        terms[key] = terms.get(key, 0.0) + c

    for j in range(n):
        k = (j + 1) % n
        add({j: "Z"}, g)
        add({j: "X", k: "X"}, J)
        add({j: "Y", k: "Y"}, J)
        add({j: "Z", k: "Z"}, beta)
    h = PauliOperator(n, terms)
    return ProblemInstance(Family.HEISENBERG, n, build_mixer(n), h, None,
                           {"g": g, "J": J, "beta": beta})


# -- spectra ---------------------------------------------------------------

def ground_space(h: PauliOperator | np.ndarray, degeneracy_tol: float = DEGENERACY_TOL,
                 max_qubits: int = DENSE_QUBIT_CAP) -> tuple[float, np.ndarray]:
    """Minimum eigenvalue and an orthonormal basis (columns) of its eigenspace."""
    mat = h if isinstance(h, np.ndarray) else to_dense(h, max_qubits)
    w, v = np.linalg.eigh(mat)
    e0 = float(w[0])
    mask = w <= e0 + degeneracy_tol * max(1.0, abs(e0))
    return e0, v[:, mask]


def initial_state(instance: ProblemInstance) -> np.ndarray:
    """Unique ground state of ``h_initial``."""
    _, states = ground_space(instance.h_initial)
    if states.shape[1] != 1:
        raise ValueError(f"initial Hamiltonian ground space is {states.shape[1]}-fold degenerate")
    psi = states[:, 0]
    # fix the global phase so the largest amplitude is real positive
    k = np.argmax(np.abs(psi))
    return psi * (abs(psi[k]) / psi[k])


def reachable_subspace(instance: ProblemInstance, tol: float = 1e-9) -> np.ndarray:
    """Orthonormal basis of the smallest subspace containing the initial state and
    invariant under both ``h_initial`` and ``h_final``.

    Every Hamiltonian of the sweep, counterdiabatic terms included, lies in the
    algebra generated by the two, so the state never leaves this subspace.
    """
    hs = [to_dense(instance.h_initial), to_dense(instance.h_final)]
    basis = initial_state(instance)[:, None]
    while True:
        block = np.hstack([basis] + [h @ basis for h in hs])
        u, s, _ = np.linalg.svd(block, full_matrices=False)
        rank = int(np.sum(s > tol * s[0]))
        if rank == basis.shape[1]:
            return basis
        basis = u[:, :rank]


def schmidt_rank(state: np.ndarray, n_left: int, tol: float = 1e-10) -> int:
    """Schmidt rank of a pure state across the cut after the first ``n_left`` qubits."""
    n = int(np.log2(state.size))
    s = np.linalg.svd(state.reshape(2 ** n_left, 2 ** (n - n_left)), compute_uv=False)
    return int(np.sum(s > tol * s[0]))


# -- instance files ----------------------------------------------------------

def dumps_instance(instance: ProblemInstance) -> str:
    lines = [
        f"family={instance.family.value}",
        f"n_qubits={instance.n_qubits}",
        f"seed={'' if instance.seed is None else instance.seed}",
        f"params={json.dumps(instance.params, sort_keys=True)}",
        "[h_initial]",
        instance.h_initial.to_text().rstrip("\n"),
        "[h_final]",
        instance.h_final.to_text().rstrip("\n"),
    ]
    return "\n".join(lines) + "\n"


def loads_instance(text: str) -> ProblemInstance:
    """Parse an instance file; errors name the offending line."""
    lines = text.splitlines()
    header = {}
    expected = ["family", "n_qubits", "seed", "params"]
    for i, key in enumerate(expected):
        if i >= len(lines):
            raise ValueError(f"line {i + 1}: unexpected end of file, expected '{key}='")
        line = lines[i]
        if not line.startswith(key + "="):
            raise ValueError(f"line {i + 1}: expected '{key}=...', got {line!r}")
        header[key] = line.split("=", 1)[1]
    try:
        family = Family(header["family"])
        n = int(header["n_qubits"])
        seed = int(header["seed"]) if header["seed"] else None
        params = json.loads(header["params"])
    except ValueError as exc:
        raise ValueError(f"lines 1-4: malformed header ({exc})") from None

    try:
        i_init = lines.index("[h_initial]")
    except ValueError:
        raise ValueError(f"line {len(lines) + 1}: missing '[h_initial]' section") from None
    try:
        i_final = lines.index("[h_final]")
    except ValueError:
        raise ValueError(f"line {len(lines) + 1}: missing '[h_final]' section") from None
    h_i = parse_operator(lines[i_init + 1:i_final], first_lineno=i_init + 2)
    h_f = parse_operator(lines[i_final + 1:], first_lineno=i_final + 2)
    if h_i.n_qubits != n or h_f.n_qubits != n:
        raise ValueError(f"operator qubit counts ({h_i.n_qubits}, {h_f.n_qubits}) disagree with n_qubits={n}")
    return ProblemInstance(family, n, h_i, h_f, seed, params)


def dump_instance(instance: ProblemInstance, path) -> None:
    with open(path, "w") as fh:
        fh.write(dumps_instance(instance))


def load_instance(path) -> ProblemInstance:
    with open(path) as fh:
        return loads_instance(fh.read())


def make_instance(family: Family | str, n: int = 6, seed: int | None = None,
                  params: Mapping | None = None) -> ProblemInstance:
    """Dispatch on family name with family-specific keyword ``params``."""
    family = Family(family)
    params = dict(params or {})
    if family is Family.MAXCUT:
        edges = params.get("edges")
        weights = None if edges is None else {(int(i), int(j)): float(w) for i, j, w in edges}
        return maxcut_instance(weights, n, seed if params.get("random_weights") else None)
    if family is Family.RANDOM_QUBO:
        return build_random_qubo(n, seed)
    if family is Family.RANDOM_4LOCAL:
        return build_random_4local(n, seed)
    if family is Family.FACTORIZATION:
        return build_factorization(int(params.get("N", 143)), params.get("n_x"), params.get("n_y"))
    if family is Family.HEISENBERG:
        return build_heisenberg(n, params.get("g", 1.0), params.get("J", 0.2), params.get("beta", 0.2))
    raise ValueError(f"unknown family {family}")


__all__ = [
    "Family", "ProblemInstance", "build_mixer", "z_polynomial", "fig1_graph", "build_maxcut",
    "maxcut_instance", "build_random_qubo", "build_random_4local", "build_factorization",
    "factor_pairs", "default_widths", "decode_factors", "build_heisenberg", "ground_space",
    "initial_state", "reachable_subspace", "schmidt_rank", "dumps_instance", "loads_instance",
    "dump_instance", "load_instance", "make_instance", "DEGENERACY_TOL",
]
