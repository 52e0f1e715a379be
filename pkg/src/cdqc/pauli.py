"""Weighted sums of n-qubit Pauli strings.

Strings are stored in symplectic form: two integer bitmasks ``x`` and ``z`` with
qubit ``j`` (the ``j``-th letter, leftmost first) on bit ``n - 1 - j``.  A string
is ``P(x, z) = i^{popcount(x & z)} X^x Z^z`` so that ``Y`` corresponds to
``x = z = 1`` and every string is hermitian.  With this bit order the dense
matrix of ``"XZ"`` is ``kron(X, Z)`` and basis index bits read left to right.
"""

from __future__ import annotations

from typing import Iterable, Mapping

import numpy as np

PRUNE_TOL = 1e-14
DENSE_QUBIT_CAP = 12
MAX_SYMBOLIC_QUBITS = 31

_LETTER_BITS = {"I": (0, 0), "X": (1, 0), "Y": (1, 1), "Z": (0, 1)}
_BITS_LETTER = {v: k for k, v in _LETTER_BITS.items()}
_PHASES = np.array([1, 1j, -1, -1j])


class ResourceLimitError(RuntimeError):
    """A size cap (qubits, terms) was exceeded."""


def _popcount(a: np.ndarray) -> np.ndarray:
    return np.bitwise_count(a).astype(np.int64)


def _parse_letters(letters: str) -> tuple[int, int]:
    x = z = 0
    for ch in letters:
        try:
            bx, bz = _LETTER_BITS[ch]
        except KeyError:
            raise ValueError(f"invalid Pauli letter {ch!r} in {letters!r}") from None
        x = (x << 1) | bx
        z = (z << 1) | bz
    return x, z


def _letters(x: int, z: int, n: int) -> str:
    return "".join(_BITS_LETTER[((x >> (n - 1 - j)) & 1, (z >> (n - 1 - j)) & 1)] for j in range(n))


def _sort_keys(xs: np.ndarray, zs: np.ndarray, n: int) -> np.ndarray:
    # base-4 digits I=0 X=1 Y=2 Z=3, qubit 0 most significant -> lexicographic letter order
    keys = np.zeros(xs.shape, dtype=np.int64)
    for j in range(n):
        bit = n - 1 - j
        bx = (xs >> bit) & 1
        bz = (zs >> bit) & 1
        digit = bx + bz + 2 * bz * (1 - bx)
        keys = keys * 4 + digit
    return keys


def string_mul(a: str, b: str) -> tuple[complex, str]:
    """Multiply two Pauli strings, returning ``(phase, c)`` with ``a b = phase * c``."""
    if len(a) != len(b):
        raise ValueError(f"Pauli strings differ in length: {len(a)} vs {len(b)}")
    n = len(a)
    xa, za = _parse_letters(a)
    xb, zb = _parse_letters(b)
    x, z = xa ^ xb, za ^ zb
    k = (xa & za).bit_count() + (xb & zb).bit_count() + 2 * (za & xb).bit_count() - (x & z).bit_count()
    return complex(_PHASES[k % 4]), _letters(x, z, n)


class PauliOperator:
    """Immutable linear combination of Pauli strings on ``n_qubits`` qubits.

    Terms are kept merged, pruned below ``PRUNE_TOL`` and sorted
    lexicographically on their letters.
    """

    __slots__ = ("n_qubits", "xs", "zs", "coeffs")

    def __init__(self, n_qubits: int, terms: Mapping[str, complex] | None = None):
        if n_qubits < 1 or n_qubits > MAX_SYMBOLIC_QUBITS:
            raise ValueError(f"n_qubits must be in [1, {MAX_SYMBOLIC_QUBITS}], got {n_qubits}")
        terms = terms or {}
        xs, zs, cs = [], [], []
        for letters, c in terms.items():
            if len(letters) != n_qubits:
                raise ValueError(f"string {letters!r} does not have length {n_qubits}")
            x, z = _parse_letters(letters)
            xs.append(x)
            zs.append(z)
            cs.append(c)
        self._set(n_qubits, np.array(xs, dtype=np.int64), np.array(zs, dtype=np.int64),
                  np.array(cs, dtype=np.complex128))

    def _set(self, n, xs, zs, coeffs):
        self.n_qubits = n
        if len(xs):
            keys = _sort_keys(xs, zs, n)
            uniq, first, inv = np.unique(keys, return_index=True, return_inverse=True)
            summed = np.zeros(len(uniq), dtype=np.complex128)
            np.add.at(summed, inv, coeffs)
            keep = np.abs(summed) >= PRUNE_TOL
            xs, zs, coeffs = xs[first][keep], zs[first][keep], summed[keep]
        else:
            xs = np.zeros(0, dtype=np.int64)
            zs = np.zeros(0, dtype=np.int64)
            coeffs = np.zeros(0, dtype=np.complex128)
        for arr in (xs, zs, coeffs):
            arr.setflags(write=False)
        self.xs, self.zs, self.coeffs = xs, zs, coeffs

    @classmethod
    def from_arrays(cls, n_qubits: int, xs, zs, coeffs) -> "PauliOperator":
        """Build from raw symplectic arrays; duplicates are merged."""
        op = cls.__new__(cls)
        op._set(n_qubits, np.asarray(xs, dtype=np.int64), np.asarray(zs, dtype=np.int64),
                np.asarray(coeffs, dtype=np.complex128))
        return op

    @classmethod
    def zero(cls, n_qubits: int) -> "PauliOperator":
        return cls(n_qubits)

    @classmethod
    def identity(cls, n_qubits: int, coeff: complex = 1.0) -> "PauliOperator":
        return cls(n_qubits, {"I" * n_qubits: coeff})

    @classmethod
    def term(cls, n_qubits: int, ops: Mapping[int, str], coeff: complex = 1.0) -> "PauliOperator":
        """Single string with letters ``ops[j]`` on qubits ``j`` and identity elsewhere."""
        letters = ["I"] * n_qubits
        for j, ch in ops.items():
            if not 0 <= j < n_qubits:
                raise ValueError(f"qubit index {j} out of range for {n_qubits} qubits")
            letters[j] = ch
        return cls(n_qubits, {"".join(letters): coeff})

    # -- inspection -------------------------------------------------------

    def __len__(self) -> int:
        return len(self.coeffs)

    @property
    def terms(self) -> dict[str, complex]:
        return {_letters(int(x), int(z), self.n_qubits): complex(c)
                for x, z, c in zip(self.xs, self.zs, self.coeffs)}

    def is_zero(self) -> bool:
        return len(self.coeffs) == 0

    def is_hermitian(self, tol: float = 1e-12) -> bool:
        return bool(np.all(np.abs(self.coeffs.imag) <= tol))

    def is_diagonal(self) -> bool:
        return bool(np.all(self.xs == 0))

    def __repr__(self) -> str:
        body = ", ".join(f"{k}: {v:.6g}" for k, v in list(self.terms.items())[:8])
        more = ", ..." if len(self) > 8 else ""
        return f"PauliOperator(n_qubits={self.n_qubits}, {{{body}{more}}})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, PauliOperator):
            return NotImplemented
        return (self.n_qubits == other.n_qubits and np.array_equal(self.xs, other.xs)
                and np.array_equal(self.zs, other.zs) and np.array_equal(self.coeffs, other.coeffs))

    __hash__ = None

    def allclose(self, other: "PauliOperator", atol: float = 1e-12) -> bool:
        diff = combine(self, other, 1.0, -1.0)
        return bool(np.all(np.abs(diff.coeffs) <= atol))

    # -- arithmetic -------------------------------------------------------

    def __add__(self, other):
        if isinstance(other, PauliOperator):
            return combine(self, other, 1.0, 1.0)
        if np.isscalar(other):
            return combine(self, PauliOperator.identity(self.n_qubits), 1.0, other)
        return NotImplemented

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, PauliOperator):
            return combine(self, other, 1.0, -1.0)
        if np.isscalar(other):
            return combine(self, PauliOperator.identity(self.n_qubits), 1.0, -other)
        return NotImplemented

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return self * -1.0

    def __mul__(self, scalar):
        if not np.isscalar(scalar):
            return NotImplemented
        return PauliOperator.from_arrays(self.n_qubits, self.xs, self.zs, self.coeffs * scalar)

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return self * (1.0 / scalar)

    def __matmul__(self, other: "PauliOperator") -> "PauliOperator":
        _check_same(self, other)
        xs, zs, cs, _ = _pair_products(self, other)
        return PauliOperator.from_arrays(self.n_qubits, xs, zs, cs)

    def dagger(self) -> "PauliOperator":
        return PauliOperator.from_arrays(self.n_qubits, self.xs, self.zs, self.coeffs.conj())

    def commutator(self, other: "PauliOperator") -> "PauliOperator":
        return commutator(self, other)

    def frobenius_sq(self) -> float:
        return frobenius_sq(self)

    def to_dense(self, max_qubits: int = DENSE_QUBIT_CAP) -> np.ndarray:
        return to_dense(self, max_qubits)

    # -- text serialization ----------------------------------------------

    def to_text(self) -> str:
        lines = [f"n_qubits={self.n_qubits}"]
        lines += [f"{k} {v.real!r} {v.imag!r}" for k, v in self.terms.items()]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "PauliOperator":
        return parse_operator(text.splitlines())


def parse_operator(lines: Iterable[str], first_lineno: int = 1) -> PauliOperator:
    """Parse the ``n_qubits=<n>`` / ``<letters> <re> <im>`` text format."""
    n = None
    terms: dict[str, complex] = {}
    for lineno, raw in enumerate(lines, start=first_lineno):
        line = raw.strip()
        if not line:
            continue
        if n is None:
            if not line.startswith("n_qubits="):
                raise ValueError(f"line {lineno}: expected 'n_qubits=<n>' header, got {line!r}")
            try:
                n = int(line.split("=", 1)[1])
            except ValueError:
                raise ValueError(f"line {lineno}: bad qubit count {line!r}") from None
            continue
        parts = line.split()
        if len(parts) != 3 or len(parts[0]) != n:
            raise ValueError(f"line {lineno}: expected '<{n} letters> <re> <im>', got {line!r}")
        try:
            c = complex(float(parts[1]), float(parts[2]))
        except ValueError:
            raise ValueError(f"line {lineno}: bad coefficient in {line!r}") from None
        if parts[0] in terms:
            raise ValueError(f"line {lineno}: duplicate string {parts[0]}")
        terms[parts[0]] = c
    if n is None:
        raise ValueError("missing 'n_qubits=<n>' header")
    return PauliOperator(n, terms)


def _check_same(a: PauliOperator, b: PauliOperator) -> None:
    if a.n_qubits != b.n_qubits:
        raise ValueError(f"qubit count mismatch: {a.n_qubits} vs {b.n_qubits}")


def _pair_products(a: PauliOperator, b: PauliOperator):
    """All pairwise string products; also returns the anticommutation mask."""
    xa, za, ca = a.xs[:, None], a.zs[:, None], a.coeffs[:, None]
    xb, zb, cb = b.xs[None, :], b.zs[None, :], b.coeffs[None, :]
    x = xa ^ xb
    z = za ^ zb
    k = _popcount(xa & za) + _popcount(xb & zb) + 2 * _popcount(za & xb) - _popcount(x & z)
    coeff = ca * cb * _PHASES[k % 4]
    anti = (_popcount(xa & zb) + _popcount(za & xb)) % 2 == 1
    return x.ravel(), z.ravel(), coeff.ravel(), anti.ravel()


def combine(a: PauliOperator, b: PauliOperator, scale_a: complex = 1.0,
            scale_b: complex = 1.0) -> PauliOperator:
    """Return ``scale_a * a + scale_b * b``."""
    _check_same(a, b)
    return PauliOperator.from_arrays(
        a.n_qubits,
        np.concatenate([a.xs, b.xs]),
        np.concatenate([a.zs, b.zs]),
        np.concatenate([a.coeffs * scale_a, b.coeffs * scale_b]),
    )


def commutator(a: PauliOperator, b: PauliOperator) -> PauliOperator:
    """``ab - ba``; only anticommuting string pairs survive, each contributing ``2ab``."""
    _check_same(a, b)
    if a.is_zero() or b.is_zero():
        return PauliOperator.zero(a.n_qubits)
    x, z, c, anti = _pair_products(a, b)
    return PauliOperator.from_arrays(a.n_qubits, x[anti], z[anti], 2.0 * c[anti])


def frobenius_sq(a: PauliOperator) -> float:
    """``Tr(a^dagger a)``, using orthogonality of Pauli strings under the trace."""
    return float(2.0 ** a.n_qubits * np.sum(np.abs(a.coeffs) ** 2))


def string_phases(xs: np.ndarray, zs: np.ndarray, n: int):
    """Per-string matrix data: for basis state b, ``P|b> = val[t, b] |b ^ x_t>``."""
    basis = np.arange(2 ** n, dtype=np.int64)
    sign = 1 - 2 * (_popcount(zs[:, None] & basis[None, :]) % 2)
    return _PHASES[_popcount(xs & zs) % 4][:, None] * sign


def to_dense(a: PauliOperator, max_qubits: int = DENSE_QUBIT_CAP) -> np.ndarray:
    """Dense ``2^n x 2^n`` matrix of the operator."""
    n = a.n_qubits
    if n > max_qubits:
        raise ResourceLimitError(f"dense realization capped at {max_qubits} qubits, operator has {n}")
    dim = 2 ** n
    out = np.zeros((dim, dim), dtype=np.complex128)
    if a.is_zero():
        return out
    basis = np.arange(dim, dtype=np.int64)
    vals = a.coeffs[:, None] * string_phases(a.xs, a.zs, n)
    rows = basis[None, :] ^ a.xs[:, None]
    cols = np.broadcast_to(basis, rows.shape)
    np.add.at(out, (rows.ravel(), cols.ravel()), vals.ravel())
    return out
