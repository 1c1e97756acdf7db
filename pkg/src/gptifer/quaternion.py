"""Quaternion scalars, vectors and matrices with symplectic operations.

Quaternions are stored component-wise (1, i, j, k); matrices keep a single
``(4, rows, cols)`` float array so products reduce to real matrix products.
The symplectic dagger is transpose plus entrywise conjugation, and a square
matrix is symplectic when ``S @ S.dagger()`` is the identity.  Probabilities
are always extracted through :func:`real_trace_prob`, never read off ket
amplitudes, so the unobservability of the {+1, -1} global phase holds by
construction of the probability rule.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

DEFAULT_ATOL = 1e-9


class NumericConsistencyError(ArithmeticError):
    """A quantity that must be numerically real carries imaginary residue."""


@dataclass(frozen=True)
class Quaternion:
    """Scalar a + ib + jc + kd with ii = jj = kk = ijk = -1."""

    a: float = 0.0
    b: float = 0.0
    c: float = 0.0
    d: float = 0.0

    def __mul__(self, other):
        if isinstance(other, Quaternion):
            return qmul(self, other)
        if isinstance(other, (int, float)):
            return Quaternion(self.a * other, self.b * other, self.c * other, self.d * other)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, float)):
            return Quaternion(self.a * other, self.b * other, self.c * other, self.d * other)
        return NotImplemented

    def __add__(self, other):
        return Quaternion(self.a + other.a, self.b + other.b, self.c + other.c, self.d + other.d)

    def __sub__(self, other):
        return Quaternion(self.a - other.a, self.b - other.b, self.c - other.c, self.d - other.d)

    def __neg__(self):
        return Quaternion(-self.a, -self.b, -self.c, -self.d)

    def conjugate(self) -> "Quaternion":
        return Quaternion(self.a, -self.b, -self.c, -self.d)

    def norm(self) -> float:
        return float(np.sqrt(self.a**2 + self.b**2 + self.c**2 + self.d**2))

    def components(self) -> tuple[float, float, float, float]:
        return (self.a, self.b, self.c, self.d)

    def isclose(self, other: "Quaternion", atol: float = DEFAULT_ATOL) -> bool:
        return (
            abs(self.a - other.a) <= atol
            and abs(self.b - other.b) <= atol
            and abs(self.c - other.c) <= atol
            and abs(self.d - other.d) <= atol
        )

    def __repr__(self):
        return f"Quaternion({self.a:g}, {self.b:g}, {self.c:g}, {self.d:g})"


ONE = Quaternion(1.0)
I = Quaternion(0.0, 1.0)
J = Quaternion(0.0, 0.0, 1.0)
K = Quaternion(0.0, 0.0, 0.0, 1.0)


def qmul(p: Quaternion, q: Quaternion) -> Quaternion:
    """Hamilton product (non-commutative: ij = k but ji = -k)."""
    return Quaternion(
        p.a * q.a - p.b * q.b - p.c * q.c - p.d * q.d,
        p.a * q.b + p.b * q.a + p.c * q.d - p.d * q.c,
        p.a * q.c - p.b * q.d + p.c * q.a + p.d * q.b,
        p.a * q.d + p.b * q.c - p.c * q.b + p.d * q.a,
    )


def _hamilton_matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    # component form of the Hamilton product; real matrices commute with
    # the unit symbols, so each component is a sum of real matrix products
    a0, a1, a2, a3 = a
    b0, b1, b2, b3 = b
    return np.stack(
        [
            a0 @ b0 - a1 @ b1 - a2 @ b2 - a3 @ b3,
            a0 @ b1 + a1 @ b0 + a2 @ b3 - a3 @ b2,
            a0 @ b2 - a1 @ b3 + a2 @ b0 + a3 @ b1,
            a0 @ b3 + a1 @ b2 - a2 @ b1 + a3 @ b0,
        ]
    )


def _right_scalar(comps: np.ndarray, q: Quaternion) -> np.ndarray:
    """Entrywise product comps * q with the scalar on the right."""
    a0, a1, a2, a3 = comps
    return np.stack(
        [
            a0 * q.a - a1 * q.b - a2 * q.c - a3 * q.d,
            a0 * q.b + a1 * q.a + a2 * q.d - a3 * q.c,
            a0 * q.c - a1 * q.d + a2 * q.a + a3 * q.b,
            a0 * q.d + a1 * q.c - a2 * q.b + a3 * q.a,
        ]
    )


def _left_scalar(q: Quaternion, comps: np.ndarray) -> np.ndarray:
    """Entrywise product q * comps with the scalar on the left."""
    b0, b1, b2, b3 = comps
    return np.stack(
        [
            q.a * b0 - q.b * b1 - q.c * b2 - q.d * b3,
            q.a * b1 + q.b * b0 + q.c * b3 - q.d * b2,
            q.a * b2 - q.b * b3 + q.c * b0 + q.d * b1,
            q.a * b3 + q.b * b2 - q.c * b1 + q.d * b0,
        ]
    )


class QuatMatrix:
    """Matrix of quaternions stored as a (4, rows, cols) component array."""

    __slots__ = ("comps",)

    def __init__(self, comps):
        arr = np.array(comps, dtype=float)
        if arr.ndim != 3 or arr.shape[0] != 4:
            raise ValueError("component array must have shape (4, rows, cols)")
        arr.setflags(write=False)
        object.__setattr__(self, "comps", arr)

    def __setattr__(self, name, value):
        raise AttributeError("QuatMatrix is immutable")

    # -- constructors -------------------------------------------------------

    @classmethod
    def from_real(cls, matrix) -> "QuatMatrix":
        real = np.asarray(matrix, dtype=float)
        comps = np.zeros((4,) + real.shape)
        comps[0] = real
        return cls(comps)

    @classmethod
    def identity(cls, n: int) -> "QuatMatrix":
        return cls.from_real(np.eye(n))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "QuatMatrix":
        return cls(np.zeros((4, rows, cols)))

    @classmethod
    def diag(cls, entries) -> "QuatMatrix":
        n = len(entries)
        comps = np.zeros((4, n, n))
        for idx, q in enumerate(entries):
            comps[:, idx, idx] = q.components()
        return cls(comps)

    @classmethod
    def from_quaternions(cls, rows) -> "QuatMatrix":
        n_rows = len(rows)
        n_cols = len(rows[0])
        comps = np.zeros((4, n_rows, n_cols))
        for i, row in enumerate(rows):
            for j, q in enumerate(row):
                comps[:, i, j] = q.components()
        return cls(comps)

    # -- structure ----------------------------------------------------------

    @property
    def shape(self) -> tuple[int, int]:
        return self.comps.shape[1], self.comps.shape[2]

    @property
    def n(self) -> int:
        rows, cols = self.shape
        if rows != cols:
            raise ValueError("matrix is not square")
        return rows

    def at(self, i: int, j: int) -> Quaternion:
        return Quaternion(*self.comps[:, i, j])

    def is_diagonal(self, atol: float = DEFAULT_ATOL) -> bool:
        off = self.comps - self.comps * np.eye(self.shape[0])[None, :, :]
        return bool(np.all(np.abs(off) <= atol))

    def diagonal(self) -> list[Quaternion]:
        return [self.at(i, i) for i in range(self.n)]

    # -- algebra -------------------------------------------------------------

    def __matmul__(self, other):
        if isinstance(other, QuatMatrix):
            return QuatMatrix(_hamilton_matmul(self.comps, other.comps))
        if isinstance(other, QuatKet):
            col = other.comps[:, :, None]
            return QuatKet(_hamilton_matmul(self.comps, col)[:, :, 0])
        return NotImplemented

    def __add__(self, other):
        return QuatMatrix(self.comps + other.comps)

    def __sub__(self, other):
        return QuatMatrix(self.comps - other.comps)

    def __neg__(self):
        return QuatMatrix(-self.comps)

    def dagger(self) -> "QuatMatrix":
        comps = np.transpose(self.comps, (0, 2, 1)).copy()
        comps[1:] *= -1.0
        return QuatMatrix(comps)

    def trace(self) -> Quaternion:
        return Quaternion(*(np.trace(self.comps[c]) for c in range(4)))

    def isclose(self, other: "QuatMatrix", atol: float = DEFAULT_ATOL) -> bool:
        return bool(np.allclose(self.comps, other.comps, rtol=0.0, atol=atol))

    def is_hermitian(self, atol: float = DEFAULT_ATOL) -> bool:
        return self.isclose(self.dagger(), atol=atol)

    def complex_adjoint(self) -> np.ndarray:
        """Complex 2N x 2M matrix representing this matrix faithfully.

        Writing M = C1 + C2*j with complex blocks C1, C2, the representation
        [[C1, C2], [-conj(C2), conj(C1)]] is multiplicative and maps the
        symplectic dagger to the complex conjugate transpose, so spectra and
        positive semidefiniteness transfer.
        """
        c1 = self.comps[0] + 1j * self.comps[1]
        c2 = self.comps[2] + 1j * self.comps[3]
        top = np.concatenate([c1, c2], axis=1)
        bottom = np.concatenate([-np.conj(c2), np.conj(c1)], axis=1)
        return np.concatenate([top, bottom], axis=0)

    def __repr__(self):
        rows, cols = self.shape
        return f"QuatMatrix<{rows}x{cols}>"


class QuatKet:
    """Column vector of quaternions, stored as a (4, n) component array."""

    __slots__ = ("comps",)

    def __init__(self, comps):
        arr = np.array(comps, dtype=float)
        if arr.ndim != 2 or arr.shape[0] != 4:
            raise ValueError("component array must have shape (4, n)")
        arr.setflags(write=False)
        object.__setattr__(self, "comps", arr)

    def __setattr__(self, name, value):
        raise AttributeError("QuatKet is immutable")

    @classmethod
    def from_quaternions(cls, entries) -> "QuatKet":
        comps = np.zeros((4, len(entries)))
        for i, q in enumerate(entries):
            comps[:, i] = q.components()
        return cls(comps)

    @classmethod
    def basis(cls, n: int, index: int) -> "QuatKet":
        comps = np.zeros((4, n))
        comps[0, index] = 1.0
        return cls(comps)

    @classmethod
    def uniform(cls, n: int) -> "QuatKet":
        comps = np.zeros((4, n))
        comps[0] = 1.0 / np.sqrt(n)
        return cls(comps)

    @property
    def dim(self) -> int:
        return self.comps.shape[1]

    def at(self, i: int) -> Quaternion:
        return Quaternion(*self.comps[:, i])

    def norm(self) -> float:
        return float(np.sqrt(np.sum(self.comps**2)))

    def left_scalar(self, h: Quaternion) -> "QuatKet":
        """Global phase h applied from the left: entries become h * psi_i."""
        return QuatKet(_left_scalar(h, self.comps))

    def dagger_dot(self, other: "QuatKet") -> Quaternion:
        """Symplectic inner product sum_i conj(self_i) * other_i."""
        bra = self.comps.copy()
        bra[1:] *= -1.0
        total = _hamilton_matmul(bra[:, None, :], other.comps[:, :, None])
        return Quaternion(*total[:, 0, 0])

    def density(self) -> QuatMatrix:
        """Rank-1 projector |psi><psi| with entries psi_i * conj(psi_k)."""
        col = self.comps[:, :, None]
        bra = self.comps[:, None, :].copy()
        bra[1:] *= -1.0
        return QuatMatrix(_hamilton_matmul(col, bra))

    def isclose(self, other: "QuatKet", atol: float = DEFAULT_ATOL) -> bool:
        return bool(np.allclose(self.comps, other.comps, rtol=0.0, atol=atol))

    def __repr__(self):
        return f"QuatKet<dim={self.dim}>"


# ---------------------------------------------------------------------------
# Module operations
# ---------------------------------------------------------------------------


def dagger(M: QuatMatrix) -> QuatMatrix:
    """Symplectic dagger: transpose plus entrywise quaternionic conjugation."""
    return M.dagger()


def is_symplectic(M: QuatMatrix, atol: float = DEFAULT_ATOL) -> bool:
    """Whether M @ M.dagger() is the identity within tolerance."""
    rows, cols = M.shape
    if rows != cols:
        raise ValueError("symplectic test requires a square matrix")
    return (M @ M.dagger()).isclose(QuatMatrix.identity(rows), atol=atol)


def real_trace_prob(E: QuatMatrix, rho: QuatMatrix, atol: float = DEFAULT_ATOL) -> float:
    """Probability tr(E rho), asserting the trace is numerically real.

    Raises :class:`NumericConsistencyError` when the trace carries imaginary
    residue above tolerance; measurement effects paired with states in this
    package (real-symmetric effects, or effects sharing the state's imaginary
    plane) keep the trace exactly real.
    """
    t = (E @ rho).trace()
    residue = max(abs(t.b), abs(t.c), abs(t.d))
    if residue > atol:
        raise NumericConsistencyError(
            f"trace has imaginary residue {residue:.3e} above tolerance {atol:.1e}"
        )
    return t.a


def real_trace(M: QuatMatrix) -> float:
    """Real part of the trace (the basis-independent quaternionic trace)."""
    return float(np.trace(M.comps[0]))


def conjugate_state(S: QuatMatrix, rho: QuatMatrix) -> QuatMatrix:
    """Image S rho S.dagger() of a state under a symplectic transformation."""
    return S @ rho @ S.dagger()


# ---------------------------------------------------------------------------
# Sampling
# ---------------------------------------------------------------------------


def random_quaternion(rng: np.random.Generator) -> Quaternion:
    return Quaternion(*rng.standard_normal(4))


def random_unit_quaternion(rng: np.random.Generator) -> Quaternion:
    comps = rng.standard_normal(4)
    comps /= np.linalg.norm(comps)
    return Quaternion(*comps)


def _vec_conj(comps: np.ndarray) -> np.ndarray:
    out = comps.copy()
    out[1:] *= -1.0
    return out


def _vec_inner(u: np.ndarray, v: np.ndarray) -> Quaternion:
    # sum_i conj(u_i) v_i over (4, n) component arrays
    total = _hamilton_matmul(_vec_conj(u)[:, None, :], v[:, :, None])
    return Quaternion(*total[:, 0, 0])


def random_symplectic(n: int, rng: np.random.Generator) -> QuatMatrix:
    """Random symplectic matrix via quaternionic Gram-Schmidt on Gaussians."""
    cols = [rng.standard_normal((4, n)) for _ in range(n)]
    ortho: list[np.ndarray] = []
    for v in cols:
        w = v
        for u in ortho:
            w = w - _right_scalar(u, _vec_inner(u, w))
        norm = np.sqrt(np.sum(w**2))
        if norm < 1e-12:
            raise RuntimeError("Gram-Schmidt degenerated; retry with another seed")
        ortho.append(w / norm)
    comps = np.stack(ortho, axis=2)
    return QuatMatrix(comps)
