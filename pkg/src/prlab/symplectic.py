"""Constant symplectic structures on tori and the product phase space.

Coordinates on T^{2n} are ordered (x_1, y_1, ..., x_n, y_n), each taken
mod 1.  The irrational structure carries the two-form

    omega_irr = sum_{i<=n} dy_i ^ dx_i
              + sum_{i<n}  a_i dx_n ^ dy_i
              + sum_{i<n}  b_i dx_i ^ dx_n

where the coefficient vector (a_1, b_1, ..., a_{n-1}, b_{n-1}) admits,
together with 1, no small integer relation.  Any Hamiltonian depending
only on y_n then generates a translation flow in an irrational direction
on every {y_n = const} level; that single fact is what every downstream
module relies on.

Conventions (pinned by the distinguished-field tests): the matrix Omega
represents the form via omega(u, v) = u^T Omega v, where a term
c * dA ^ dB contributes Omega[A, B] += c and Omega[B, A] -= c.  The
Hamiltonian vector field of a covector dH solves omega(X, .) = -dH,
which for an antisymmetric Omega reduces to the linear system
Omega X = dH.  Under these choices the field of dy_n comes out as
(a_1, b_1, ..., a_{n-1}, b_{n-1}, 1, 0) exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import mpmath
import numpy as np

_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47)


class IndependenceError(ValueError):
    """A bounded-height integer relation was found among (1, a_i, b_i)."""


@dataclass(frozen=True)
class IrrationalityVector:
    """Coefficients (a_1, b_1, ..., a_{n-1}, b_{n-1}) of the irrational form.

    True rational independence is not machine-verifiable; the
    ``check_independence`` method searches for integer relations of
    bounded height instead and is an explicit approximation of the real
    requirement.  The default vector uses square roots of distinct
    primes, which are algebraically independent over the rationals
    together with 1, so the runtime check is a sanity test only.
    """

    n: int
    entries: tuple[float, ...]

    def __post_init__(self):
        if self.n < 2:
            raise ValueError(f"torus half-dimension must be >= 2, got n={self.n}")
        if len(self.entries) != 2 * (self.n - 1):
            raise ValueError(
                f"need 2*(n-1)={2 * (self.n - 1)} entries, got {len(self.entries)}"
            )

    @classmethod
    def sqrt_primes(cls, n: int) -> "IrrationalityVector":
        k = 2 * (n - 1)
        if k > len(_PRIMES):
            raise ValueError(f"n={n} exceeds the built-in prime table")
        return cls(n=n, entries=tuple(float(np.sqrt(p)) for p in _PRIMES[:k]))

    def check_independence(self, max_height: int = 1000, tol: float = 1e-9) -> None:
        """Raise IndependenceError if a bounded-height relation exists.

        Searches for integers (q_0, q_1, ..., q_{2n-2}), not all zero,
        with |q_0 + sum q_i entries_i| < tol.  With k coefficients of
        height Q, pigeonhole forces near-relations of size ~(2Q)^{-(k-1)}
        for EVERY vector, so the requested height is capped at roughly
        (1/tol)^{1/(k-1)} / 4 to keep the tolerance information-bearing;
        for n = 2 the cap is inactive and the stated (height, tol) pair
        applies verbatim.  The lattice search only proposes candidates
        (its internal tolerance is not a hard residual bound), so each
        candidate's residual is re-evaluated at high precision.
        """
        values = [mpmath.mpf(1)] + [mpmath.mpf(e) for e in self.entries]
        k = len(values)
        sound_height = max(4, int(round((1.0 / tol) ** (1.0 / (k - 1)) / 4.0)))
        height = min(max_height, sound_height)
        with mpmath.workdps(40):
            for cand_tol in (tol, tol * 1e-3):
                rel = mpmath.pslq(values, tol=mpmath.mpf(cand_tol), maxcoeff=height)
                if rel is None:
                    continue
                residual = abs(mpmath.fsum(q * v for q, v in zip(rel, values)))
                if residual < tol and max(abs(q) for q in rel) <= height:
                    raise IndependenceError(
                        f"integer relation {rel} among (1, {self.entries}) "
                        f"with residual {float(residual):.3e} < {tol}"
                    )


@dataclass(frozen=True)
class TorusSymplecticStructure:
    """The constant irrational form on T^{2n} plus its solved vector fields."""

    n: int
    matrix: np.ndarray
    vec: IrrationalityVector

    @property
    def dim(self) -> int:
        return 2 * self.n

    @cached_property
    def inverse(self) -> np.ndarray:
        return np.linalg.inv(self.matrix)

    @cached_property
    def distinguished_field(self) -> np.ndarray:
        """Solution X of omega(X, .) = -dy_n, with the y_n slot pinned to 0.

        The y_n component vanishes identically by the structure of the
        form; the solve only reproduces that up to rounding, so it is
        zeroed exactly (after a residual check) to make y_n a first
        integral of every flow assembled from this field, exactly in
        floating point.
        """
        dh = np.zeros(self.dim)
        dh[-1] = 1.0
        x = hamiltonian_vector_field(self, dh)
        if abs(x[-1]) > 1e-12:
            raise ArithmeticError(f"distinguished field has y_n component {x[-1]}")
        x[-1] = 0.0
        x.setflags(write=False)
        return x


@dataclass(frozen=True)
class ProductSymplecticStructure:
    """Block-diagonal form on (base torus) x (irrational torus)."""

    base_dim: int
    torus: TorusSymplecticStructure

    def __post_init__(self):
        if self.base_dim < 0 or self.base_dim % 2:
            raise ValueError(f"base dimension must be even and >= 0, got {self.base_dim}")

    @property
    def dim(self) -> int:
        return self.base_dim + self.torus.dim

    @cached_property
    def matrix(self) -> np.ndarray:
        m = np.zeros((self.dim, self.dim))
        m[: self.base_dim, : self.base_dim] = standard_form_matrix(self.base_dim)
        m[self.base_dim :, self.base_dim :] = self.torus.matrix
        m.setflags(write=False)
        return m

    @cached_property
    def inverse(self) -> np.ndarray:
        return np.linalg.inv(self.matrix)

    @cached_property
    def distinguished_field(self) -> np.ndarray:
        """The torus field embedded in the product (zero base block)."""
        x = np.zeros(self.dim)
        x[self.base_dim :] = self.torus.distinguished_field
        x.setflags(write=False)
        return x


def standard_form_matrix(dim: int) -> np.ndarray:
    """Matrix of sum dy_i ^ dx_i on T^{dim} in (x_1, y_1, ...) order."""
    if dim % 2:
        raise ValueError(f"dimension must be even, got {dim}")
    m = np.zeros((dim, dim))
    for i in range(dim // 2):
        m[2 * i + 1, 2 * i] = 1.0
        m[2 * i, 2 * i + 1] = -1.0
    return m


def build_omega_irr(
    vec: IrrationalityVector, check_independence: bool = True
) -> TorusSymplecticStructure:
    """Assemble the irrational form for the given coefficient vector.

    Entries are placed, not computed, so antisymmetry holds exactly.
    Coordinate slots: x_i at 2(i-1), y_i at 2(i-1)+1.
    """
    if check_independence:
        vec.check_independence()
    n = vec.n
    m = np.zeros((2 * n, 2 * n))
    for i in range(n):
        m[2 * i + 1, 2 * i] = 1.0  # dy_i ^ dx_i
        m[2 * i, 2 * i + 1] = -1.0
    xn = 2 * (n - 1)
    for i in range(n - 1):
        a_i = vec.entries[2 * i]
        b_i = vec.entries[2 * i + 1]
        m[xn, 2 * i + 1] = a_i  # a_i dx_n ^ dy_i
        m[2 * i + 1, xn] = -a_i
        m[2 * i, xn] = b_i  # b_i dx_i ^ dx_n
        m[xn, 2 * i] = -b_i
    m.setflags(write=False)
    return TorusSymplecticStructure(n=n, matrix=m, vec=vec)


def hamiltonian_vector_field(struct, dh: np.ndarray) -> np.ndarray:
    """Solve omega(X, .) = -dH for the constant form of ``struct``.

    ``dh`` may be a single covector of shape (dim,) or a batch
    (..., dim); the solve is a matrix application of the precomputed
    inverse in either case.
    """
    dh = np.asarray(dh, dtype=float)
    if dh.shape[-1] != struct.dim:
        raise ValueError(f"covector has dimension {dh.shape[-1]}, expected {struct.dim}")
    return dh @ struct.inverse.T


def distinguished_vector_field(struct) -> np.ndarray:
    """The Hamiltonian field of dy_n on the torus (or product) structure."""
    return struct.distinguished_field


def form_pairing(struct, u: np.ndarray, v: np.ndarray) -> float:
    """Evaluate omega(u, v) = u^T Omega v."""
    return float(np.asarray(u) @ struct.matrix @ np.asarray(v))


def contract_field(struct, x: np.ndarray) -> np.ndarray:
    """The covector omega(X, .) as a coefficient array."""
    return np.asarray(x) @ struct.matrix
