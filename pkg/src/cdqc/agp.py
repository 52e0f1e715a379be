"""Nested-commutator approximation of the adiabatic gauge potential.

Along the sweep ``H_ad(lam) = H_I + lam * D`` with ``D = H_F - H_I``, so the
nested commutators ``O_1 = [H_ad, D]``, ``O_{k+1} = [H_ad, O_k]`` are
polynomials in ``lam`` whose coefficients are computed once::

    O_{k+1}[m] = [H_I, O_k[m]] + [D, O_k[m-1]]

The order-``l`` potential is ``A = i sum_k alpha_k O_{2k-1}`` with ``alpha``
from the Hankel system ``sum_k Gamma_{j+k} alpha_k = -Gamma_j``,
``Gamma_k = ||O_k||_F^2``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

from .pauli import PauliOperator, ResourceLimitError, commutator, to_dense
from .problems import DEGENERACY_TOL, ProblemInstance
from .schedule import lambda_dot, lambda_t

TERM_BUDGET = 2_000_000
SV_CUTOFF = 1e-12
ALPHA_MEMO_SIZE = 4096


class LambdaPoly:
    """``sum_m lam^m coeffs[m]`` with :class:`PauliOperator` coefficients."""

    def __init__(self, coeffs: Sequence[PauliOperator]):
        coeffs = list(coeffs)
        if not coeffs:
            raise ValueError("need at least one coefficient")
        while len(coeffs) > 1 and coeffs[-1].is_zero():
            coeffs.pop()
        self.coeffs = tuple(coeffs)
        self.n_qubits = coeffs[0].n_qubits

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def n_terms(self) -> int:
        return sum(len(c) for c in self.coeffs)

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.coeffs)

    def __call__(self, lam: float) -> PauliOperator:
        xs, zs, table = self._aligned
        return PauliOperator.from_arrays(self.n_qubits, xs, zs, self._values(lam, table))

    @cached_property
    def _aligned(self):
        # all coefficients on one shared key set: table[m, t] is the weight of string t in coeffs[m]
        xs = np.concatenate([c.xs for c in self.coeffs])
        zs = np.concatenate([c.zs for c in self.coeffs])
        keys = (xs << 32) | zs
        uniq, first, inv = np.unique(keys, return_index=True, return_inverse=True)
        table = np.zeros((len(self.coeffs), len(uniq)), dtype=np.complex128)
        offset = 0
        for m, c in enumerate(self.coeffs):
            table[m, inv[offset:offset + len(c)]] = c.coeffs
            offset += len(c)
        return xs[first], zs[first], table

    @staticmethod
    def _values(lam, table):
        powers = float(lam) ** np.arange(table.shape[0])
        return powers @ table

    def frobenius_sq(self, lam: float) -> float:
        _, _, table = self._aligned
        return float(2.0 ** self.n_qubits * np.sum(np.abs(self._values(lam, table)) ** 2))

    def dense_coeffs(self) -> list[np.ndarray]:
        return [to_dense(c) for c in self.coeffs]


def build_nested(h_initial: PauliOperator, h_final: PauliOperator, max_k: int,
                 term_budget: int = TERM_BUDGET) -> list[LambdaPoly]:
    """``[O_1, ..., O_max_k]`` as lambda polynomials."""
    if max_k < 1:
        raise ValueError("max_k must be >= 1")
    d = h_final - h_initial
    current = [commutator(h_initial, d)]
    out = [LambdaPoly(current)]
    for k in range(2, max_k + 1):
        nxt = []
        for m in range(len(current) + 1):
            term = PauliOperator.zero(h_initial.n_qubits)
            if m < len(current):
                term = term + commutator(h_initial, current[m])
            if m >= 1:
                term = term + commutator(d, current[m - 1])
            nxt.append(term)
        poly = LambdaPoly(nxt)
        if poly.n_terms > term_budget:
            raise ResourceLimitError(f"O_{k} has {poly.n_terms} terms, budget is {term_budget}")
        current = list(poly.coeffs)
        out.append(poly)
    return out


@dataclass(frozen=True)
class AlphaSolution:
    alphas: np.ndarray
    residual: float
    trivial: bool


class AgpExpansion:
    """Order-``order`` counterdiabatic expansion for one ``(H_I, H_F)`` pair.

    ``order = 0`` means no counterdiabatic term at all.
    """

    def __init__(self, h_initial: PauliOperator, h_final: PauliOperator, order: int,
                 term_budget: int = TERM_BUDGET):
        if order < 0:
            raise ValueError("order must be >= 0")
        if h_initial.n_qubits != h_final.n_qubits:
            raise ValueError("qubit count mismatch")
        self.order = order
        self.h_initial = h_initial
        self.h_final = h_final
        self.n_qubits = h_initial.n_qubits
        self.nested = build_nested(h_initial, h_final, 2 * order, term_budget) if order else []
        self._alpha_memo: dict[float, AlphaSolution] = {}

    @classmethod
    def from_instance(cls, instance: ProblemInstance, order: int, **kw) -> "AgpExpansion":
        return cls(instance.h_initial, instance.h_final, order, **kw)

    def h_ad(self, lam: float) -> PauliOperator:
        return self.h_initial * (1 - lam) + self.h_final * lam

    def gammas(self, lam: float) -> np.ndarray:
        """``Gamma_1 .. Gamma_{2l}`` at ``lam``."""
        return np.array([o.frobenius_sq(lam) for o in self.nested])

    def gamma(self, k: int, lam: float) -> float:
        return self.nested[k - 1].frobenius_sq(lam)

    def solve_alphas(self, lam: float) -> AlphaSolution:
        """Least-squares solution of the Hankel system at ``lam`` (memoized per exact ``lam``)."""
        lam = float(lam)
        sol = self._alpha_memo.get(lam)
        if sol is None:
            if len(self._alpha_memo) >= ALPHA_MEMO_SIZE:
                self._alpha_memo.clear()
            sol = self._alpha_memo[lam] = self._solve_alphas(lam)
        return sol

    def _solve_alphas(self, lam: float) -> AlphaSolution:
        l = self.order
        if l == 0:
            return AlphaSolution(np.zeros(0), 0.0, True)
        g = self.gammas(lam)
        if g[0] == 0.0:
            return AlphaSolution(np.zeros(l), 0.0, True)
        # Gamma_k grows like scale^k; rescale so the Hankel entries are O(1)
        scale = g[1] / g[0] if g[1] > 0 else 1.0
        gs = g / scale ** np.arange(1, 2 * l + 1)
        hankel = np.array([[gs[i + j + 1] for j in range(l)] for i in range(l)])
        beta = np.linalg.lstsq(hankel, -gs[:l], rcond=SV_CUTOFF)[0]
        alphas = beta / scale ** np.arange(1, l + 1)
        residual = float(np.linalg.norm(hankel @ beta + gs[:l]) / np.linalg.norm(gs[:l]))
        alphas.setflags(write=False)
        return AlphaSolution(alphas, residual, False)

    def agp(self, lam: float) -> PauliOperator:
        """Symbolic ``A^(l)(lam) = i sum_k alpha_k O_{2k-1}(lam)``."""
        out = PauliOperator.zero(self.n_qubits)
        if self.order == 0:
            return out
        sol = self.solve_alphas(lam)
        for k, a in enumerate(sol.alphas, start=1):
            out = out + self.nested[2 * k - 2](lam) * (1j * a)
        return out

    # -- dense fast path ---------------------------------------------------

    @cached_property
    def _dense(self):
        h_i = to_dense(self.h_initial)
        d = to_dense(self.h_final) - h_i
        odd = [self.nested[2 * k].dense_coeffs() for k in range(self.order)]
        return h_i, d, odd

    def h_ad_dense(self, lam: float) -> np.ndarray:
        h_i, d, _ = self._dense
        return h_i + lam * d

    def agp_dense(self, lam: float, alphas: np.ndarray | None = None) -> np.ndarray:
        _, d, odd = self._dense
        out = np.zeros_like(d)
        if self.order == 0:
            return out
        if alphas is None:
            alphas = self.solve_alphas(lam).alphas
        for a, mats in zip(alphas, odd):
            for m, mat in enumerate(mats):
                out += (1j * a * lam ** m) * mat
        return out

    def cd_hamiltonian(self, t: float, T: float) -> np.ndarray:
        """``H_ad(lam(t)) + lam_dot(t) A^(l)(lam(t))`` as a dense matrix."""
        lam = lambda_t(t, T)
        h = self.h_ad_dense(lam)
        if self.order:
            h = h + lambda_dot(t, T) * self.agp_dense(lam)
        return h

    def gamma_table(self, lams: Sequence[float]) -> list[dict]:
        """Per-lambda ``Gamma``, ``alpha`` and residual rows for conditioning studies."""
        rows = []
        for lam in lams:
            sol = self.solve_alphas(lam)
            row = {"lambda": float(lam)}
            row.update({f"gamma_{k}": v for k, v in enumerate(self.gammas(lam), start=1)})
            row.update({f"alpha_{k}": v for k, v in enumerate(sol.alphas, start=1)})
            row["residual"] = sol.residual
            rows.append(row)
        return rows


def cd_hamiltonian(expansion: AgpExpansion, t: float, T: float) -> np.ndarray:
    return expansion.cd_hamiltonian(t, T)


def exact_agp_dense(h_initial: PauliOperator | ProblemInstance, h_final: PauliOperator | None = None,
                    lam: float = 0.5, degeneracy_tol: float = DEGENERACY_TOL,
                    return_degenerate: bool = False):
    """Spectral gauge potential ``-i sum_{m!=n} <m|D|n> / (e_m - e_n) |m><n|``.

    Elements between (numerically) degenerate levels are set to zero.
    Accepts either a :class:`ProblemInstance` or the two operators.
    """
    if isinstance(h_initial, ProblemInstance):
        h_initial, h_final = h_initial.h_initial, h_initial.h_final
    h_i = to_dense(h_initial)
    d = to_dense(h_final) - h_i
    w, v = np.linalg.eigh(h_i + lam * d)
    m = v.conj().T @ d @ v
    diff = w[:, None] - w[None, :]
    degenerate = np.abs(diff) < degeneracy_tol * max(1.0, float(np.max(np.abs(w))))
    safe = np.where(degenerate, 1.0, diff)
    a = np.where(degenerate, 0.0, -1j * m / safe)
    out = v @ a @ v.conj().T
    if return_degenerate:
        off_diag = degenerate & ~np.eye(len(w), dtype=bool)
        return out, bool(np.any(off_diag & (np.abs(m) > 0)))
    return out


__all__ = ["LambdaPoly", "build_nested", "AlphaSolution", "AgpExpansion", "cd_hamiltonian",
           "exact_agp_dense", "TERM_BUDGET", "SV_CUTOFF"]
