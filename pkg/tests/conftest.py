import itertools
from functools import reduce

import numpy as np
import pytest

from cdqc.pauli import PauliOperator

PAULI_2X2 = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def kron_string(letters: str) -> np.ndarray:
    """Independent dense oracle: plain Kronecker product, leftmost letter first."""
    return reduce(np.kron, [PAULI_2X2[c] for c in letters])


def kron_dense(op: PauliOperator) -> np.ndarray:
    dim = 2 ** op.n_qubits
    out = np.zeros((dim, dim), dtype=complex)
    for letters, c in op.terms.items():
        out += c * kron_string(letters)
    return out


def random_operator(rng, n: int, n_terms: int, hermitian: bool = False) -> PauliOperator:
    alphabet = ["".join(s) for s in itertools.product("IXYZ", repeat=n)]
    picks = rng.choice(len(alphabet), size=min(n_terms, len(alphabet)), replace=False)
    terms = {}
    for p in picks:
        c = rng.normal()
        terms[alphabet[p]] = c if hermitian else c + 1j * rng.normal()
    return PauliOperator(n, terms)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


# -- acceptance report -------------------------------------------------------

ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def report_criterion(number: int, passed: bool, detail: str) -> None:
    ACCEPTANCE[number] = (bool(passed), detail)
    print(f"criterion {number:2d}: {'PASS' if passed else 'FAIL'}  {detail}")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        passed, detail = ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if passed else 'FAIL'}  {detail}")
