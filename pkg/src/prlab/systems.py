"""Catalog of base Hamiltonians on (T^2, dy ^ dx) and their flows.

Entries:

    constant             H = c0                      (identity time-one map)
    small-autonomous     H = eps * cos(2 pi x)       (explicitly integrable)
    kicked-rotor-smooth  H = cos(2 pi y)/(2 pi)
                           + (K / 4 pi^2) cos(2 pi x) w(t)

where w(t) = (8/35) (1 - cos(2 pi t))^4 is a smooth 1-periodic kick of
unit mean.  The kicked rotor at K around 6 is strongly chaotic in
measurements (positive largest Lyapunov exponent); that is an observed
property with recorded seeds, not a proved one.

Sign convention on the base: X_H = (dH/dy, -dH/dx), so the constant
Hamiltonian is static and H = eps cos(2 pi x) translates y at rate
2 pi eps sin(2 pi x).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from prlab.dressing import BaseHamiltonian
from prlab.integrators import solve_to_times

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class BaseSystemSpec:
    id: str
    params: tuple[float, ...]
    hamiltonian: BaseHamiltonian


def _constant(c0: float = 1.0) -> BaseHamiltonian:
    def value(t, p):
        p = np.asarray(p, dtype=float)
        return np.broadcast_to(np.asarray(c0, dtype=float), np.shape(t)) + 0.0 * p[..., 0]

    def grad(t, p):
        return np.zeros_like(np.asarray(p, dtype=float))

    def hess(t, p):
        p = np.asarray(p, dtype=float)
        return np.zeros(p.shape + (p.shape[-1],))

    return BaseHamiltonian(
        dim=2, value=value, grad=grad, hess=hess,
        autonomous=True, sup_bound=abs(c0), label=f"constant({c0})",
    )


def _small_autonomous(eps: float = 1e-3) -> BaseHamiltonian:
    def value(t, p):
        return eps * np.cos(TWO_PI * np.asarray(p)[..., 0]) + 0.0 * np.asarray(t)

    def grad(t, p):
        p = np.asarray(p, dtype=float)
        g = np.zeros_like(p)
        g[..., 0] = -TWO_PI * eps * np.sin(TWO_PI * p[..., 0])
        return g

    def hess(t, p):
        p = np.asarray(p, dtype=float)
        h = np.zeros(p.shape + (2,))
        h[..., 0, 0] = -(TWO_PI**2) * eps * np.cos(TWO_PI * p[..., 0])
        return h

    return BaseHamiltonian(
        dim=2, value=value, grad=grad, hess=hess,
        autonomous=True, sup_bound=abs(eps), label=f"small-autonomous({eps})",
    )


def _kick_profile(t):
    return (8.0 / 35.0) * (1.0 - np.cos(TWO_PI * np.asarray(t))) ** 4


def _kicked_rotor_smooth(k: float = 6.0) -> BaseHamiltonian:
    amp = k / (2.0 * TWO_PI**2)  # K / (4 pi^2)

    def value(t, p):
        p = np.asarray(p, dtype=float)
        return np.cos(TWO_PI * p[..., 1]) / TWO_PI + amp * np.cos(
            TWO_PI * p[..., 0]
        ) * _kick_profile(t)

    def grad(t, p):
        p = np.asarray(p, dtype=float)
        g = np.empty_like(p)
        g[..., 0] = -TWO_PI * amp * np.sin(TWO_PI * p[..., 0]) * _kick_profile(t)
        g[..., 1] = -np.sin(TWO_PI * p[..., 1])
        return g

    def hess(t, p):
        p = np.asarray(p, dtype=float)
        h = np.zeros(p.shape + (2,))
        h[..., 0, 0] = -(TWO_PI**2) * amp * np.cos(TWO_PI * p[..., 0]) * _kick_profile(t)
        h[..., 1, 1] = -TWO_PI * np.cos(TWO_PI * p[..., 1])
        return h

    sup = 1.0 / TWO_PI + amp * (8.0 / 35.0) * 16.0
    return BaseHamiltonian(
        dim=2, value=value, grad=grad, hess=hess,
        autonomous=False, sup_bound=sup, label=f"kicked-rotor-smooth({k})",
    )


CATALOG = {
    "constant": _constant,
    "small-autonomous": _small_autonomous,
    "kicked-rotor-smooth": _kicked_rotor_smooth,
}


def catalog_get(system_id: str, params: tuple = ()) -> BaseHamiltonian:
    try:
        builder = CATALOG[system_id]
    except KeyError:
        raise KeyError(f"unknown base system {system_id!r}; known: {sorted(CATALOG)}")
    return builder(*params)


def catalog_entry(system_id: str, params: tuple = ()) -> BaseSystemSpec:
    return BaseSystemSpec(
        id=system_id, params=tuple(float(x) for x in params),
        hamiltonian=catalog_get(system_id, params),
    )


def _base_rhs(ham: BaseHamiltonian):
    dim = ham.dim

    def rhs(t, y):
        pts = y.reshape(-1, dim)
        return ham.vector_field(t, pts).ravel()

    return rhs


def base_flow_states(
    ham: BaseHamiltonian, points: np.ndarray, k: int, tol: float
) -> np.ndarray:
    """States of the base flow at integer times 1..k, shape (k, N, dim).

    Integrates in unit chunks and reduces mod 1 between them so the
    magnitudes stay O(1) on long runs.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float)) % 1.0
    out = np.empty((k,) + pts.shape)
    rhs = _base_rhs(ham)
    for j in range(k):
        y = solve_to_times(rhs, pts.ravel(), (j, j + 1), [j + 1], tol)[0]
        pts = y.reshape(pts.shape) % 1.0
        out[j] = pts
    return out


def base_time_one_map(ham: BaseHamiltonian, p, tol: float = 1e-10) -> np.ndarray:
    """Time-one map of the base flow at a single point (reduced mod 1)."""
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    p = np.asarray(p, dtype=float)
    return base_flow_states(ham, p[None, :], 1, tol)[0, 0]


def base_flow_with_tangent(
    ham: BaseHamiltonian, points: np.ndarray, tangents: np.ndarray, tol: float
) -> tuple[np.ndarray, np.ndarray]:
    """One unit of flow together with the tangent (variational) propagation."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    vs = np.atleast_2d(np.asarray(tangents, dtype=float))
    dim = ham.dim
    n = pts.shape[0]

    def rhs(t, y):
        arr = y.reshape(n, 2 * dim)
        p, v = arr[:, :dim], arr[:, dim:]
        dp = ham.vector_field(t, p)
        dv = np.einsum("nij,nj->ni", ham.vector_field_jacobian(t, p), v)
        return np.concatenate([dp, dv], axis=1).ravel()

    y0 = np.concatenate([pts, vs], axis=1).ravel()
    y1 = solve_to_times(rhs, y0, (0.0, 1.0), [1.0], tol)[0].reshape(n, 2 * dim)
    return y1[:, :dim] % 1.0, y1[:, dim:]


def base_monodromy(ham: BaseHamiltonian, p, tol: float = 1e-10) -> np.ndarray:
    """Linearization of the time-one map at p (dim x dim matrix)."""
    p = np.asarray(p, dtype=float)
    dim = ham.dim
    basis = np.eye(dim)
    cols = []
    for j in range(dim):
        _, v = base_flow_with_tangent(ham, p[None, :], basis[j][None, :], tol)
        cols.append(v[0])
    return np.stack(cols, axis=1)
