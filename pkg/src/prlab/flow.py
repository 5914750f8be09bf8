"""Flows on the product phase space: trajectories, monodromy, and the checks
that localize fixed sets, measure transverse non-degeneracy, and verify the
slice semiconjugacy.

All heavy routines are batched: a set of initial conditions is flattened
into one ODE system and advanced together, which amortizes the stepper
overhead across thousands of samples.  The theta coordinate has an
identically zero derivative slot, so it stays bitwise constant along
every computed trajectory.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from prlab.dressing import DressedHamiltonian
from prlab.integrators import check_tol, implicit_midpoint, solve_to_times
from prlab.symplectic import ProductSymplecticStructure


def circle_dist(a, b):
    """Distance on R/Z, elementwise."""
    r = np.abs(np.asarray(a) - np.asarray(b)) % 1.0
    return np.minimum(r, 1.0 - r)


def torus_distance(a, b):
    """Max over coordinates of the circular distance (the metric used
    for every displacement and residual in this package)."""
    return np.max(circle_dist(a, b), axis=-1)


@dataclass(frozen=True)
class ProductPoint:
    """A point (p, z, theta) on (base torus) x T^{2n-1} x (R/Z).

    ``z`` collects the torus coordinates (x_1, y_1, ..., x_{n-1}, y_{n-1},
    x_n); theta is the distinguished last coordinate y_n.
    """

    p: np.ndarray
    z: np.ndarray
    theta: float

    @classmethod
    def from_state(cls, state: np.ndarray, base_dim: int) -> "ProductPoint":
        state = np.asarray(state, dtype=float)
        return cls(p=state[:base_dim].copy(), z=state[base_dim:-1].copy(),
                   theta=float(state[-1]))

    @property
    def state(self) -> np.ndarray:
        return np.concatenate([self.p, self.z, [self.theta]])

    def reduced(self) -> "ProductPoint":
        return ProductPoint(p=self.p % 1.0, z=self.z % 1.0, theta=self.theta % 1.0)


@dataclass(frozen=True)
class Monodromy:
    """Linearized time-k map with its symplecticity defect."""

    k: int
    matrix: np.ndarray
    basepoint: ProductPoint
    symplectic_residual: float


@dataclass
class Trajectory:
    times: np.ndarray
    states: np.ndarray
    dense: object | None = None

    def at(self, t: float) -> np.ndarray:
        if self.dense is None:
            raise ValueError("trajectory was integrated without dense output")
        return self.dense(t)

    @property
    def theta_drift(self) -> float:
        return float(np.max(np.abs(self.states[:, -1] - self.states[0, -1])))


def _flat_rhs(fh: DressedHamiltonian, n: int):
    d = fh.dim

    def rhs(t, y):
        return fh.field(t, y.reshape(n, d)).ravel()

    return rhs


def integrate_dressed(
    fh: DressedHamiltonian,
    x0: ProductPoint,
    t_span=(0.0, 1.0),
    tol: float = 1e-10,
    n_samples: int = 33,
    method: str = "dop853",
    steps: int | None = None,
) -> Trajectory:
    """Integrate one trajectory of the dressed flow.

    ``method="dop853"`` gives adaptive order-8 stepping with dense
    output; ``method="midpoint"`` uses the fixed-step symplectic rule
    with ``steps`` substeps (mandatory) and no dense interpolant.
    """
    check_tol(tol)
    times = np.linspace(t_span[0], t_span[1], n_samples)
    y0 = x0.state
    if method == "dop853":
        states, sol = solve_to_times(
            _flat_rhs(fh, 1), y0, t_span, times, tol, dense=True
        )
        return Trajectory(times=times, states=states, dense=sol)
    if method == "midpoint":
        if steps is None:
            raise ValueError("midpoint integration needs an explicit step count")
        rhs = lambda t, y: fh.field(t, y)
        jac = lambda t, y: fh.field_jacobian(t, y)
        sub = max(1, steps // (n_samples - 1))
        states = [y0]
        for i in range(n_samples - 1):
            states.append(
                implicit_midpoint(rhs, jac, states[-1], times[i], times[i + 1], sub)
            )
        return Trajectory(times=times, states=np.asarray(states), dense=None)
    raise ValueError(f"unknown method {method!r}")


def time_k_states(
    fh: DressedHamiltonian, states0: np.ndarray, k: int, tol: float
) -> np.ndarray:
    """Batch time-k map: states at integer times 1..k, shape (k, N, dim).

    Composes k unit-time integrations, reducing mod 1 between them; the
    field is 1-periodic in every coordinate so the reduction commutes
    with the exact flow.
    """
    if k < 1:
        raise ValueError("iterate count must be >= 1")
    pts = np.atleast_2d(np.asarray(states0, dtype=float)) % 1.0
    n = pts.shape[0]
    rhs = _flat_rhs(fh, n)
    out = np.empty((k,) + pts.shape)
    for j in range(k):
        y = solve_to_times(rhs, pts.ravel(), (float(j), float(j + 1)), [float(j + 1)], tol)[0]
        pts = y.reshape(pts.shape) % 1.0
        out[j] = pts
    return out


def time_k_map(fh: DressedHamiltonian, x0: ProductPoint, k: int, tol: float = 1e-10) -> ProductPoint:
    """The k-th iterate of the time-one map at a single point."""
    states = time_k_states(fh, x0.state[None, :], k, tol)
    return ProductPoint.from_state(states[-1, 0], fh.base.dim)


def product_structure(fh: DressedHamiltonian) -> ProductSymplecticStructure:
    return ProductSymplecticStructure(base_dim=fh.base.dim, torus=fh.torus)


def _variational_rhs(fh: DressedHamiltonian, n: int):
    d = fh.dim

    def rhs(t, y):
        arr = y.reshape(n, d + d * d)
        x = arr[:, :d]
        mats = arr[:, d:].reshape(n, d, d)
        dx = fh.field(t, x)
        dm = np.einsum("nij,njk->nik", fh.field_jacobian(t, x), mats)
        return np.concatenate([dx, dm.reshape(n, d * d)], axis=1).ravel()

    return rhs


def monodromy_batch(
    fh: DressedHamiltonian, states0: np.ndarray, k: int, tol: float
) -> np.ndarray:
    """Linearizations of the time-k map at a batch of points, (N, d, d).

    Integrates the variational equation dM/dt = DX(t, x(t)) M in unit
    chunks, composing the chunk monodromies with the state reduced mod 1
    in between (DX is 1-periodic in all coordinates).
    """
    pts = np.atleast_2d(np.asarray(states0, dtype=float)) % 1.0
    n, d = pts.shape
    rhs = _variational_rhs(fh, n)
    total = np.broadcast_to(np.eye(d), (n, d, d)).copy()
    for j in range(k):
        y0 = np.concatenate([pts, np.broadcast_to(np.eye(d).ravel(), (n, d * d))], axis=1)
        y = solve_to_times(rhs, y0.ravel(), (float(j), float(j + 1)), [float(j + 1)], tol)[0]
        arr = y.reshape(n, d + d * d)
        pts = arr[:, :d] % 1.0
        chunk = arr[:, d:].reshape(n, d, d)
        total = np.einsum("nij,njk->nik", chunk, total)
    return total


def symplectic_residual(fh: DressedHamiltonian, m: np.ndarray) -> float:
    omega = product_structure(fh).matrix
    return float(np.max(np.abs(m.T @ omega @ m - omega)))


def monodromy(fh: DressedHamiltonian, x0: ProductPoint, k: int, tol: float = 1e-10) -> Monodromy:
    """Linearized time-k map at x0 with its symplecticity defect."""
    mat = monodromy_batch(fh, x0.state[None, :], k, tol)[0]
    return Monodromy(
        k=k, matrix=mat, basepoint=x0, symplectic_residual=symplectic_residual(fh, mat)
    )


@dataclass
class MorseBottReport:
    kernel_dim: int
    gap: float
    singular_values: np.ndarray
    k: int
    degenerate: bool = False


def morse_bott_rank(
    fh: DressedHamiltonian,
    y: ProductPoint,
    tol: float = 1e-10,
    k: int = 1,
    sv_threshold: float = 1e-5,
) -> MorseBottReport:
    """Numerical kernel of (Dphi^k - I) at a point of the fixed set.

    Expected shape away from the degenerate case: exactly one singular
    value of order |average g| * |alpha''| and a (dim-1)-dimensional
    numerical kernel, i.e. the fixed levels are transversally
    non-degenerate with a large spectral gap.
    """
    if fh.degenerate:
        mono = monodromy(fh, y, k, tol)
        sv = np.linalg.svd(mono.matrix - np.eye(fh.dim), compute_uv=False)
        return MorseBottReport(
            kernel_dim=int(np.sum(sv <= sv_threshold)), gap=np.inf,
            singular_values=sv, k=k, degenerate=True,
        )
    disp = torus_distance(time_k_map(fh, y, 1, tol).state, y.reduced().state)
    if disp > 1e3 * tol:
        raise ValueError(
            f"point displaces by {disp:.3e} under the time-one map; "
            "not on a critical level"
        )
    mono = monodromy(fh, y, k, tol)
    sv = np.linalg.svd(mono.matrix - np.eye(fh.dim), compute_uv=False)
    kernel_dim = int(np.sum(sv <= sv_threshold))
    rank = fh.dim - kernel_dim
    if rank == 0:
        gap = 0.0
    else:
        below = sv[rank] if rank < fh.dim else 0.0
        gap = np.inf if below == 0.0 else float(sv[rank - 1] / below)
    return MorseBottReport(kernel_dim=kernel_dim, gap=gap, singular_values=sv, k=k)


@dataclass
class ScanSample:
    theta: float
    alpha_slope: float
    on_level: bool
    displacements: np.ndarray  # per iterate 1..k


@dataclass
class ScanReport:
    samples: list[ScanSample]
    k: int
    tol: float
    threshold: float
    on_level_max: float = field(init=False)
    off_level_min: float = field(init=False)

    def __post_init__(self):
        on = [float(np.max(s.displacements)) for s in self.samples if s.on_level]
        off = [float(np.min(s.displacements)) for s in self.samples if not s.on_level]
        self.on_level_max = max(on) if on else 0.0
        self.off_level_min = min(off) if off else np.inf

    def off_level_fraction_above(self, floor: float, min_slope: float = 0.1) -> float:
        """Fraction of off-level samples with |alpha'| > min_slope whose
        displacement stays >= floor at every iterate."""
        pool = [
            s for s in self.samples
            if not s.on_level and abs(s.alpha_slope) > min_slope
        ]
        if not pool:
            return 1.0
        good = sum(1 for s in pool if float(np.min(s.displacements)) >= floor)
        return good / len(pool)

    def classification_consistent(self) -> bool:
        """True if displacement <= threshold exactly on the critical levels."""
        for s in self.samples:
            small = float(np.max(s.displacements)) <= self.threshold
            if small != s.on_level:
                return False
        return True

    def histogram(self, bins=None) -> dict:
        """Displacement histograms (log-decade bins) for both populations."""
        if bins is None:
            bins = [0.0] + [10.0**e for e in range(-16, 1)]
        on = [np.max(s.displacements) for s in self.samples if s.on_level]
        off = [np.min(s.displacements) for s in self.samples if not s.on_level]
        h_on, _ = np.histogram(on, bins=bins)
        h_off, _ = np.histogram(off, bins=bins)
        return {
            "bins": [float(b) for b in bins],
            "on_level": [int(c) for c in h_on],
            "off_level": [int(c) for c in h_off],
        }


def fixed_set_scan(
    fh: DressedHamiltonian,
    grid_density: int = 64,
    k: int = 8,
    tol: float = 1e-10,
    samples_per_theta: int = 4,
    seed: int = 0,
) -> ScanReport:
    """Sweep theta levels and measure displacement under iterates 1..k.

    The theta grid always contains the two critical levels exactly; for
    each level a batch of random (p, z) companions is drawn.  A sample
    counts as fixed when its displacement stays below 1e3 * tol, which
    separates stepper noise from the slowest genuine drift by several
    orders of magnitude.
    """
    rng = np.random.default_rng(seed)
    pr = fh.profiles
    thetas = list(np.arange(grid_density) / grid_density)
    for tc in (pr.theta1, pr.theta2):
        if not any(abs(t - tc) < 1e-15 for t in thetas):
            thetas.append(tc)
    thetas = sorted(thetas)

    states = []
    meta = []
    for th in thetas:
        on = th in (pr.theta1, pr.theta2)
        companions = rng.uniform(0.0, 1.0, (samples_per_theta, fh.dim - 1))
        for c in companions:
            states.append(np.concatenate([c, [th]]))
            meta.append((th, float(pr.alpha_d1(th)), on))
    states = np.asarray(states)

    iterates = time_k_states(fh, states, k, tol)  # (k, N, d)
    disp = np.empty((k, states.shape[0]))
    for j in range(k):
        disp[j] = torus_distance(iterates[j], states % 1.0)

    samples = [
        ScanSample(theta=th, alpha_slope=sl, on_level=on, displacements=disp[:, i])
        for i, (th, sl, on) in enumerate(meta)
    ]
    return ScanReport(samples=samples, k=k, tol=tol, threshold=1e3 * tol)


def semiconjugacy_residuals_batch(
    fh: DressedHamiltonian, ps: np.ndarray, z0: np.ndarray, k: int, tol: float
) -> np.ndarray:
    """Residuals of the slice identity for iterates 1..k, shape (k, N).

    The base flow and the dressed flow started on the slice
    {z = z0, theta = eta} are advanced as one coupled system, so both
    copies of the base point march through the same accepted steps.  Two
    independent adaptive runs of a chaotic base would drift apart like
    tol * e^{lambda k} and say nothing about the construction; with a
    shared step sequence the comparison isolates the structural identity
    (the base block of the dressed field on the slice IS the base field),
    and any wiring error would be amplified exponentially instead of
    hidden.  Integration runs at tol/10.
    """
    ps = np.atleast_2d(np.asarray(ps, dtype=float)) % 1.0
    n, b = ps.shape
    d = fh.dim
    eta = fh.profiles.eta
    z0 = np.asarray(z0, dtype=float)

    def rhs(t, y):
        arr = y.reshape(n, b + d)
        dp = fh.base.vector_field(t, arr[:, :b])
        dfull = fh.field(t, arr[:, b:])
        return np.concatenate([dp, dfull], axis=1).ravel()

    full0 = np.concatenate(
        [ps, np.broadcast_to(z0, (n, z0.size)), np.full((n, 1), eta)], axis=1
    )
    y = np.concatenate([ps, full0], axis=1)
    res = np.empty((k, n))
    sub_tol = max(tol / 10.0, 1e-13)
    for j in range(k):
        out = solve_to_times(rhs, y.ravel(), (float(j), float(j + 1)), [float(j + 1)], sub_tol)[0]
        y = out.reshape(n, b + d) % 1.0
        res[j] = torus_distance(y[:, :b], y[:, b : b + b])
    return res


def semiconjugacy_residual(
    fh: DressedHamiltonian, p: np.ndarray, z0: np.ndarray, k: int, tol: float = 1e-10
) -> float:
    """Torus distance between the projected dressed iterate and the base
    iterate of a single slice point, after k periods."""
    if k < 1:
        raise ValueError("iterate count must be >= 1")
    res = semiconjugacy_residuals_batch(fh, np.asarray(p)[None, :], z0, k, tol)
    return float(res[-1, 0])
