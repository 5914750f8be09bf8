"""The dressing construction: profiles, the prefactor, and dressed Hamiltonians.

A base Hamiltonian H(t, p) on a standard torus is dressed to

    value(t, p, z, theta) = C * alpha(theta) + beta(alpha(theta)) * H(t, p)

on the product with an irrational torus, where alpha is a Morse function
on the circle with exactly two critical points theta_1, theta_2, beta
vanishes at alpha(theta_1) and alpha(theta_2) and equals 1 at alpha(eta),
and C = 2 * max |H * beta'(alpha)|.  The size of C forces the multiplier

    g(t, p, theta) = C + beta'(alpha(theta)) * H(t, p)

to stay >= C/2, so the torus component of the Hamiltonian field never
changes sign and the two critical levels of alpha are the only places the
field can vanish.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq

from prlab.symplectic import TorusSymplecticStructure, standard_form_matrix

TWO_PI = 2.0 * np.pi


class DegenerateHamiltonianError(ValueError):
    """Raised when an operation requires H not identically zero."""


@dataclass(frozen=True)
class ProfilePair:
    """Circle profile alpha (with two derivatives) and cutoff beta.

    Evaluators are closed-form callables so the second derivatives at the
    critical points stay exact; sampled profiles would blur the
    Morse-Bott rank checks downstream.
    """

    alpha: Callable
    alpha_d1: Callable
    alpha_d2: Callable
    beta: Callable
    beta_d1: Callable
    beta_d2: Callable
    theta1: float
    theta2: float
    eta: float
    label: str = "custom"

    def validate(self, grid_size: int = 10_000, tol: float = 1e-12) -> None:
        """Check the defining constraints on a dense grid; raise on failure."""
        for th in (self.theta1, self.theta2):
            if abs(self.alpha_d1(th)) > tol:
                raise ValueError(f"alpha'({th}) = {self.alpha_d1(th)} is not ~0")
            if self.alpha_d2(th) == 0.0:
                raise ValueError(f"alpha''({th}) vanishes: not a Morse critical point")
            if abs(self.beta(self.alpha(th))) > tol:
                raise ValueError(f"beta(alpha({th})) = {self.beta(self.alpha(th))} != 0")
        if abs(self.beta(self.alpha(self.eta)) - 1.0) > tol:
            raise ValueError(f"beta(alpha(eta)) = {self.beta(self.alpha(self.eta))} != 1")
        # exactly two sign changes of alpha' over one period
        grid = np.linspace(0.0, 1.0, grid_size, endpoint=False)
        d1 = self.alpha_d1(grid)
        changes = int(np.count_nonzero(np.sign(d1) != np.sign(np.roll(d1, -1))))
        if changes != 2:
            raise ValueError(f"alpha' changes sign {changes} times; need exactly 2")


def make_sin_profiles() -> ProfilePair:
    """Profiles alpha(theta) = beta(theta) = sin(2 pi theta).

    Critical points sit at 1/4 and 3/4; eta is the root of
    sin(2 pi eta) = 1/4 on (0, 1/4), located to 1e-14.
    """
    eta = brentq(lambda t: np.sin(TWO_PI * t) - 0.25, 0.0, 0.25, xtol=1e-15)
    return ProfilePair(
        alpha=lambda t: np.sin(TWO_PI * t),
        alpha_d1=lambda t: TWO_PI * np.cos(TWO_PI * t),
        alpha_d2=lambda t: -TWO_PI**2 * np.sin(TWO_PI * t),
        beta=lambda s: np.sin(TWO_PI * s),
        beta_d1=lambda s: TWO_PI * np.cos(TWO_PI * s),
        beta_d2=lambda s: -TWO_PI**2 * np.sin(TWO_PI * s),
        theta1=0.25,
        theta2=0.75,
        eta=float(eta),
        label="sin",
    )


PROFILES: dict[str, Callable[..., ProfilePair]] = {"sin": make_sin_profiles}


def get_profiles(profile_id: str, params: tuple = ()) -> ProfilePair:
    try:
        builder = PROFILES[profile_id]
    except KeyError:
        raise KeyError(f"unknown profile id {profile_id!r}; known: {sorted(PROFILES)}")
    pair = builder(*params)
    pair.validate()
    return pair


@dataclass(frozen=True)
class BaseHamiltonian:
    """One-periodic Hamiltonian on a standard torus T^{dim}.

    ``value``, ``grad`` and ``hess`` accept a scalar (or broadcastable
    array) time and points of shape (..., dim); they return shapes
    (...), (..., dim) and (..., dim, dim).  All evaluators must be
    1-periodic in t and in each coordinate of p.
    """

    dim: int
    value: Callable
    grad: Callable
    hess: Callable
    autonomous: bool = False
    sup_bound: float | None = None
    label: str = "custom"

    def __post_init__(self):
        if self.dim < 2 or self.dim % 2:
            raise ValueError(f"base dimension must be even and >= 2, got {self.dim}")

    def vector_field(self, t, p: np.ndarray) -> np.ndarray:
        """X_H = Omega^{-1} grad H for the standard form on the base torus."""
        return self.grad(t, p) @ _standard_inverse(self.dim).T

    def vector_field_jacobian(self, t, p: np.ndarray) -> np.ndarray:
        """Spatial Jacobian of X_H, i.e. Omega^{-1} Hess H."""
        inv = _standard_inverse(self.dim)
        return np.einsum("ij,...jk->...ik", inv, self.hess(t, p))

    def check_periodicity(self, samples: int = 64, tol: float = 1e-12, seed: int = 7):
        rng = np.random.default_rng(seed)
        t = rng.uniform(0.0, 1.0, samples)
        p = rng.uniform(0.0, 1.0, (samples, self.dim))
        base = self.value(t, p)
        if np.max(np.abs(self.value(t + 1.0, p) - base)) > tol:
            raise ValueError("Hamiltonian is not 1-periodic in t")
        for i in range(self.dim):
            shifted = p.copy()
            shifted[:, i] += 1.0
            if np.max(np.abs(self.value(t, shifted) - base)) > tol:
                raise ValueError(f"Hamiltonian is not 1-periodic in coordinate {i}")


_STANDARD_INV_CACHE: dict[int, np.ndarray] = {}


def _standard_inverse(dim: int) -> np.ndarray:
    inv = _STANDARD_INV_CACHE.get(dim)
    if inv is None:
        inv = np.linalg.inv(standard_form_matrix(dim))
        inv.setflags(write=False)
        _STANDARD_INV_CACHE[dim] = inv
    return inv


def _grid_axis(k: int) -> np.ndarray:
    return np.arange(k) / k


def _refine_max(f: Callable, center: np.ndarray, width: float, rounds: int = 30) -> float:
    """Deterministic zoom refinement of a grid maximum of |f|.

    ``f`` maps an (N, d) array of points in the periodic unit cube to N
    values.  Each round re-grids a shrinking box around the running
    argmax; 30 halvings push the box below 1e-9 per side, which locates a
    smooth quadratic maximum to ~1e-14 relative in value.
    """
    d = center.size
    best = center.copy()
    for _ in range(rounds):
        axes = [np.linspace(-width, width, 9) + best[i] for i in range(d)]
        mesh = np.stack([g.ravel() for g in np.meshgrid(*axes, indexing="ij")], axis=-1)
        vals = np.abs(f(mesh))
        best = mesh[int(np.argmax(vals))]
        width *= 0.5
    return float(np.max(np.abs(f(best[None, :]))))


def max_abs_hamiltonian(ham: BaseHamiltonian, grid: int = 64) -> float:
    """max |H(t, p)| over the period cube, grid search plus local zoom."""
    t_axis = _grid_axis(1 if ham.autonomous else max(grid, 64))
    p_axes = [_grid_axis(max(grid, 64))] * ham.dim
    mesh = np.meshgrid(t_axis, *p_axes, indexing="ij")
    pts = np.stack([g.ravel() for g in mesh], axis=-1)
    vals = np.abs(ham.value(pts[:, 0], pts[:, 1:]))
    seed = pts[int(np.argmax(vals))]
    return _refine_max(
        lambda q: ham.value(q[:, 0], q[:, 1:]), seed, 1.5 / max(grid, 64)
    )


def max_abs_beta_slope(profiles: ProfilePair, grid: int = 256) -> float:
    """max |beta'(alpha(theta))| over the circle, grid plus local zoom."""
    theta = _grid_axis(max(grid, 64))
    vals = np.abs(profiles.beta_d1(profiles.alpha(theta)))
    seed = np.array([theta[int(np.argmax(vals))]])
    return _refine_max(
        lambda q: profiles.beta_d1(profiles.alpha(q[:, 0])), seed, 1.5 / max(grid, 64)
    )


def c_norm(ham: BaseHamiltonian, profiles: ProfilePair, grid: int = 64) -> float:
    """The prefactor 2 * max |H(t,p) * beta'(alpha(theta))|.

    The maximand factorizes over independent variables, so the joint
    maximum over (t, p, theta) equals the product of the two factor
    maxima; each factor is located by grid search with deterministic
    local refinement.  H identically zero yields 0, which flags the
    dressed Hamiltonian as degenerate.
    """
    return 2.0 * max_abs_hamiltonian(ham, grid) * max_abs_beta_slope(profiles, grid * 4)


@dataclass(frozen=True)
class DressedHamiltonian:
    """The dressed Hamiltonian on (base torus) x (irrational torus).

    State layout: the first ``base.dim`` slots are the base point p, the
    remaining 2n slots are the torus coordinates (x_1, y_1, ..., x_n, y_n)
    with theta = y_n in the last slot.
    """

    base: BaseHamiltonian
    profiles: ProfilePair
    torus: TorusSymplecticStructure
    C: float

    @property
    def dim(self) -> int:
        return self.base.dim + self.torus.dim

    @property
    def degenerate(self) -> bool:
        return self.C == 0.0

    def split(self, state: np.ndarray):
        """(p, z, theta) views of full states of shape (..., dim)."""
        b = self.base.dim
        return state[..., :b], state[..., b:-1], state[..., -1]

    def value(self, t, state: np.ndarray) -> np.ndarray:
        p, _, theta = self.split(np.asarray(state, dtype=float))
        a = self.profiles.alpha(theta)
        return self.C * a + self.profiles.beta(a) * self.base.value(t, p)

    def g(self, t, p: np.ndarray, theta) -> np.ndarray:
        return self.C + self.profiles.beta_d1(self.profiles.alpha(theta)) * self.base.value(t, p)

    def field(self, t, state: np.ndarray) -> np.ndarray:
        """Hamiltonian vector field at states of shape (dim,) or (N, dim).

        Torus block: g * alpha'(theta) * X with X the distinguished
        direction; base block: beta(alpha(theta)) * X_H.  The theta
        component is exactly zero because X has a zero y_n slot.
        """
        state = np.asarray(state, dtype=float)
        single = state.ndim == 1
        s = state[None, :] if single else state
        p, _, theta = self.split(s)
        a = self.profiles.alpha(theta)
        torus_rate = self.g(t, p, theta) * self.profiles.alpha_d1(theta)
        out = np.empty_like(s)
        out[:, : self.base.dim] = (
            self.profiles.beta(a)[:, None] * self.base.vector_field(t, p)
        )
        out[:, self.base.dim :] = torus_rate[:, None] * self.torus.distinguished_field
        return out[0] if single else out

    def field_jacobian(self, t, state: np.ndarray) -> np.ndarray:
        """Spatial Jacobian of the field, shape (..., dim, dim).

        Nonzero blocks: d(base)/dp, d(base)/dtheta, d(torus)/dp and
        d(torus)/dtheta; nothing depends on z, and the theta row is zero.
        """
        state = np.asarray(state, dtype=float)
        single = state.ndim == 1
        s = state[None, :] if single else state
        p, _, theta = self.split(s)
        pr = self.profiles
        b = self.base.dim
        a = pr.alpha(theta)
        da = pr.alpha_d1(theta)
        d2a = pr.alpha_d2(theta)
        beta = pr.beta(a)
        dbeta = pr.beta_d1(a)
        d2beta = pr.beta_d2(a)
        h = self.base.value(t, p)
        gradh = self.base.grad(t, p)
        xh = self.base.vector_field(t, p)
        dxh = self.base.vector_field_jacobian(t, p)
        g = self.C + dbeta * h
        x = self.torus.distinguished_field

        jac = np.zeros(s.shape + (self.dim,))
        jac[:, :b, :b] = beta[:, None, None] * dxh
        jac[:, :b, -1] = (dbeta * da)[:, None] * xh
        # torus rows: (dg/dp_j * alpha') X  and  (dg/dtheta * alpha' + g * alpha'') X
        dg_dp = dbeta[:, None] * gradh
        jac[:, b:, :b] = x[:, None] * (da[:, None, None] * dg_dp[:, None, :])
        dtheta_rate = d2beta * da * h * da + g * d2a
        jac[:, b:, -1] = dtheta_rate[:, None] * x
        return jac[0] if single else jac

    def min_g_check(self, samples: int = 100_000, seed: int = 11) -> float:
        """Min of g over a random verification grid (should be >= C/2)."""
        rng = np.random.default_rng(seed)
        t = rng.uniform(0.0, 1.0, samples)
        p = rng.uniform(0.0, 1.0, (samples, self.base.dim))
        theta = rng.uniform(0.0, 1.0, samples)
        return float(np.min(self.g(t, p, theta)))


def dress(
    ham: BaseHamiltonian,
    profiles: ProfilePair,
    torus: TorusSymplecticStructure,
    grid: int = 64,
) -> DressedHamiltonian:
    """Build the dressed Hamiltonian, computing the prefactor C."""
    return DressedHamiltonian(
        base=ham, profiles=profiles, torus=torus, C=c_norm(ham, profiles, grid)
    )


def eval_dressed(fh: DressedHamiltonian, t, p, z, theta) -> float | np.ndarray:
    """Evaluate the dressed Hamiltonian at split coordinates.

    The value never depends on z; the argument is kept so call sites
    read like points of the product.
    """
    p = np.asarray(p, dtype=float)
    a = fh.profiles.alpha(theta)
    return fh.C * a + fh.profiles.beta(a) * fh.base.value(t, p)


def g_factor(fh: DressedHamiltonian, t, p, theta):
    """The multiplier C + beta'(alpha(theta)) H(t, p); >= C/2 unless H == 0."""
    return fh.g(t, np.asarray(p, dtype=float), theta)


def vector_field_dressed(fh: DressedHamiltonian, t, p, z, theta) -> np.ndarray:
    """Hamiltonian field at one split point; returns a (dim,) vector."""
    state = np.concatenate(
        [np.atleast_1d(p).astype(float), np.atleast_1d(z).astype(float), [float(theta)]]
    )
    return fh.field(t, state)


def iterate_hamiltonian(obj, k: int):
    """The k-th iterate H -> k H(k t, p), for base or dressed Hamiltonians.

    For a dressed input the prefactor scales exactly to k*C (no
    re-estimation), which keeps iteration and dressing commuting to
    rounding.
    """
    if k < 1 or int(k) != k:
        raise ValueError(f"iterate count must be a positive integer, got {k}")
    k = int(k)
    if isinstance(obj, DressedHamiltonian):
        return DressedHamiltonian(
            base=iterate_hamiltonian(obj.base, k),
            profiles=obj.profiles,
            torus=obj.torus,
            C=k * obj.C,
        )
    if not isinstance(obj, BaseHamiltonian):
        raise TypeError(f"cannot iterate object of type {type(obj)!r}")
    if k == 1:
        return obj
    base = obj
    return BaseHamiltonian(
        dim=base.dim,
        value=lambda t, p: k * base.value(np.asarray(t) * k, p),
        grad=lambda t, p: k * base.grad(np.asarray(t) * k, p),
        hess=lambda t, p: k * base.hess(np.asarray(t) * k, p),
        autonomous=base.autonomous,
        sup_bound=None if base.sup_bound is None else k * base.sup_bound,
        label=f"{base.label}#^{k}",
    )


def spectrum_closed_form(fh: DressedHamiltonian) -> set[float]:
    """Action spectrum {C alpha(theta_1), C alpha(theta_2)}.

    Constant loops at the fixed levels carry zero area term, so the
    action reduces to the time integral of the Hamiltonian there and the
    beta factor kills the base contribution.  For H == 0 the spectrum
    collapses to {0}; callers should consult ``fh.degenerate``.
    """
    if fh.degenerate:
        return {0.0}
    return {
        fh.C * float(fh.profiles.alpha(fh.profiles.theta1)),
        fh.C * float(fh.profiles.alpha(fh.profiles.theta2)),
    }


def constant_loop_action(fh: DressedHamiltonian, state: np.ndarray, quad_tol: float = 1e-12) -> float:
    """Quadrature of the dressed value over one period at a frozen point.

    This is the action of the constant loop at ``state`` (no area term),
    used as the independent check of the closed-form spectrum.
    """
    state = np.asarray(state, dtype=float)
    val, _ = quad(
        lambda t: float(fh.value(t, state[None, :])[0]),
        0.0,
        1.0,
        epsabs=quad_tol,
        epsrel=quad_tol,
        limit=200,
    )
    return val


def average_g(fh: DressedHamiltonian, p: np.ndarray, theta: float, quad_tol: float = 1e-12) -> float:
    """Time average of g over one period at frozen (p, theta).

    At fixed points the trajectory is constant, so this equals the
    flow-averaged multiplier that scales the transverse shear there.
    """
    p = np.asarray(p, dtype=float)
    val, _ = quad(
        lambda t: float(fh.g(t, p[None, :], theta)[0]),
        0.0,
        1.0,
        epsabs=quad_tol,
        epsrel=quad_tol,
        limit=200,
    )
    return val
