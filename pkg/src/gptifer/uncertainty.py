"""Uncertainty relations for two-level systems and ball-shaped state spaces.

The product of variances of two observables is bounded below by commutator
and anti-commutator terms; specializing to Pauli measurements on a qubit
turns the bound into the unit-sphere constraint on the expectation vector,
and the same quadratic constraint generalizes to d binary measurements.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import GptState

PAULI_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
PAULI_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
PAULI_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)


@dataclass(frozen=True)
class PauliExpectations:
    """Expectation values of the three Pauli measurements."""

    ex: float
    ey: float
    ez: float


def _require_hermitian(M: np.ndarray, label: str, atol: float = 1e-9) -> np.ndarray:
    M = np.asarray(M, dtype=complex)
    if M.shape != (2, 2) or not np.allclose(M, M.conj().T, atol=atol):
        raise ValueError(f"{label} must be a Hermitian 2x2 matrix")
    return M


def _expval(rho: np.ndarray, M: np.ndarray) -> float:
    return float(np.real(np.trace(M @ rho)))


def pauli_expectations(rho: np.ndarray) -> PauliExpectations:
    """Pauli expectation triple of a qubit density matrix."""
    rho = np.asarray(rho, dtype=complex)
    return PauliExpectations(
        ex=_expval(rho, PAULI_X),
        ey=_expval(rho, PAULI_Y),
        ez=_expval(rho, PAULI_Z),
    )


def schrodinger_bound(rho: np.ndarray, X: np.ndarray, Y: np.ndarray) -> tuple[float, float]:
    """Both sides of the variance-product bound with the anti-commutator term.

    Returns ``(lhs, rhs)`` where
    ``lhs = |<[X,Y]>|^2 / 4 + |<{X,Y}> - 2<X><Y>|^2 / 4`` and
    ``rhs = Var(X) * Var(Y)``.  Nothing is asserted; callers compare.
    """
    X = _require_hermitian(X, "X")
    Y = _require_hermitian(Y, "Y")
    rho = np.asarray(rho, dtype=complex)
    ex = _expval(rho, X)
    ey = _expval(rho, Y)
    comm = np.trace((X @ Y - Y @ X) @ rho)
    anti = np.trace((X @ Y + Y @ X) @ rho)
    lhs = 0.25 * np.abs(comm) ** 2 + 0.25 * np.abs(anti - 2.0 * ex * ey) ** 2
    var_x = _expval(rho, X @ X) - ex**2
    var_y = _expval(rho, Y @ Y) - ey**2
    return float(lhs), float(var_x * var_y)


def robertson_bound(rho: np.ndarray, X: np.ndarray, Y: np.ndarray) -> tuple[float, float]:
    """Commutator-only variant; its lhs never exceeds the anti-commutator one."""
    X = _require_hermitian(X, "X")
    Y = _require_hermitian(Y, "Y")
    rho = np.asarray(rho, dtype=complex)
    comm = np.trace((X @ Y - Y @ X) @ rho)
    lhs = 0.25 * np.abs(comm) ** 2
    ex = _expval(rho, X)
    ey = _expval(rho, Y)
    var_x = _expval(rho, X @ X) - ex**2
    var_y = _expval(rho, Y @ Y) - ey**2
    return float(lhs), float(var_x * var_y)


def bloch_norm(p: PauliExpectations) -> float:
    """Squared length of the expectation vector; valid qubit states stay <= 1."""
    return p.ex**2 + p.ey**2 + p.ez**2


def dball_bound(s: GptState, d: int) -> float:
    """Left-hand side sum_i (P(X_i = 1) - 1/2)^2 of the ball constraint.

    The state must use the d-ball layout of d binary blocks; callers compare
    the returned sum to 1/4.
    """
    if s.dim != 2 * d:
        raise ValueError(f"state dimension {s.dim} does not match {d} binary measurements")
    plus = s.probs[0::2]
    return float(np.sum((plus - 0.5) ** 2))


def random_pure_qubit_states(count: int, rng: np.random.Generator) -> np.ndarray:
    """Density matrices of normalized standard-Gaussian complex 2-vectors."""
    raw = rng.standard_normal((count, 2)) + 1j * rng.standard_normal((count, 2))
    raw /= np.linalg.norm(raw, axis=1, keepdims=True)
    return np.einsum("ni,nj->nij", raw, raw.conj())
