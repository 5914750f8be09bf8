"""Independent brute-force oracles used by the test suite only.

Everything here recomputes quantities by a different route than the
package (dense F2 elimination, cofactor Pfaffians, exhaustive matchings,
plain bisection) so agreement is evidence, not tautology.
"""

from __future__ import annotations

import itertools
import math

import numpy as np


def f2_rank(mat: np.ndarray) -> int:
    """Rank over F2 by dense Gaussian elimination."""
    m = (np.asarray(mat, dtype=np.uint8) & 1).copy()
    rows, cols = m.shape
    r = 0
    for c in range(cols):
        if r >= rows:
            break
        piv = np.nonzero(m[r:, c])[0]
        if piv.size == 0:
            continue
        p = r + int(piv[0])
        if p != r:
            m[[r, p]] = m[[p, r]]
        ones = np.nonzero(m[:, c])[0]
        ones = ones[ones != r]
        if ones.size:
            m[ones] ^= m[r]
        r += 1
    return r


def pfaffian(mat: np.ndarray) -> float:
    """Pfaffian of an antisymmetric matrix by cofactor expansion."""
    a = np.asarray(mat, dtype=float)
    n = a.shape[0]
    if n == 0:
        return 1.0
    if n % 2:
        return 0.0
    total = 0.0
    for j in range(1, n):
        sign = 1.0 if j % 2 == 1 else -1.0
        keep = [i for i in range(n) if i not in (0, j)]
        total += sign * a[0, j] * pfaffian(a[np.ix_(keep, keep)])
    return total


def bisection_root(f, lo: float, hi: float, tol: float = 1e-14) -> float:
    """Plain midpoint bisection; assumes a sign change on [lo, hi]."""
    flo = f(lo)
    if flo == 0.0:
        return lo
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0.0 or hi - lo < tol:
            return mid
        if (fm < 0) == (flo < 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


# ---------------------------------------------------------------------------
# persistent Betti numbers by rank-nullity over F2


def _boundary_matrix(cells, boundary, degree, col_filter, rows_of):
    """Dense F2 matrix of the boundary from selected ``degree``-cells."""
    cols = [c for c in cells if c.degree == degree and col_filter(c)]
    mat = np.zeros((len(rows_of), len(cols)), dtype=np.uint8)
    for j, c in enumerate(cols):
        for f in boundary.get(c.id, ()):
            mat[rows_of[f], j] = 1
    return mat


def persistent_betti_bruteforce(complex_, a: float, b: float, degree: int) -> int:
    """Rank of H_degree({<=a}) -> H_degree({<=b}) by rank computations.

    Uses dim Z_d^a - dim(B_d^b  intersect  C_d^a) with
    dim(U cap W) = dim U + dim W - dim(U + W), everything over F2.
    """
    cells = complex_.cells
    boundary = complex_.boundary
    d_cells = [c for c in cells if c.degree == degree]
    rows_of = {c.id: i for i, c in enumerate(d_cells)}
    dm1_cells = [c for c in cells if c.degree == degree - 1]
    rows_dm1 = {c.id: i for i, c in enumerate(dm1_cells)}

    in_a = [c for c in d_cells if c.value <= a]
    if not in_a:
        return 0
    bd_a = _boundary_matrix(cells, boundary, degree, lambda c: c.value <= a, rows_dm1)
    dim_z = len(in_a) - f2_rank(bd_a) if dm1_cells else len(in_a)

    bplus = _boundary_matrix(cells, boundary, degree + 1, lambda c: c.value <= b, rows_of)
    rank_b = f2_rank(bplus)
    ea = np.zeros((len(d_cells), len(in_a)), dtype=np.uint8)
    for j, c in enumerate(in_a):
        ea[rows_of[c.id], j] = 1
    rank_union = f2_rank(np.concatenate([bplus, ea], axis=1))
    dim_intersection = rank_b + len(in_a) - rank_union
    return dim_z - dim_intersection


def betti_bruteforce(complex_, degree: int) -> int:
    values = [c.value for c in complex_.cells]
    top = max(values)
    return persistent_betti_bruteforce(complex_, top, top, degree)


# ---------------------------------------------------------------------------
# random monotone simplicial complexes (d^2 = 0 holds by construction)


def random_monotone_complex(rng: np.random.Generator, max_cells: int = 60):
    from prlab.persistence import Cell, FilteredComplex

    n_vert = int(rng.integers(4, 9))
    values = {}
    cells = []
    boundary = {}
    for i in range(n_vert):
        vid = ("v", i)
        values[vid] = round(float(rng.uniform(0, 1)), 3)
        cells.append(Cell(id=vid, degree=0, value=values[vid]))
    pairs = list(itertools.combinations(range(n_vert), 2))
    rng.shuffle(pairs)
    edges = set()
    for i, j in pairs:
        if len(cells) >= max_cells - 1:
            break
        if rng.uniform() < 0.6:
            eid = ("e", i, j)
            base = max(values[("v", i)], values[("v", j)])
            # ties on purpose: plateaus exercise the empty-interval pruning
            bump = round(float(rng.exponential(0.2)), 3) if rng.uniform() < 0.7 else 0.0
            values[eid] = base + bump
            cells.append(Cell(id=eid, degree=1, value=values[eid]))
            boundary[eid] = (("v", i), ("v", j))
            edges.add((i, j))
    for i, j, k in itertools.combinations(range(n_vert), 3):
        if len(cells) >= max_cells:
            break
        if (i, j) in edges and (j, k) in edges and (i, k) in edges and rng.uniform() < 0.5:
            tid = ("t", i, j, k)
            base = max(values[("e", i, j)], values[("e", j, k)], values[("e", i, k)])
            bump = round(float(rng.exponential(0.2)), 3) if rng.uniform() < 0.7 else 0.0
            values[tid] = base + bump
            cells.append(Cell(id=tid, degree=2, value=values[tid]))
            boundary[tid] = (("e", i, j), ("e", j, k), ("e", i, k))
    return FilteredComplex(cells=tuple(cells), boundary=boundary)


# ---------------------------------------------------------------------------
# exhaustive bottleneck distance for tiny barcodes


def _cost(u, v) -> float:
    u_inf = math.isinf(u[1])
    v_inf = math.isinf(v[1])
    if u_inf != v_inf:
        return math.inf
    if u_inf:
        return abs(u[0] - v[0])
    return max(abs(u[0] - v[0]), abs(u[1] - v[1]))


def _half(u) -> float:
    return math.inf if math.isinf(u[1]) else (u[1] - u[0]) / 2.0


def bottleneck_bruteforce(bars1, bars2) -> float:
    """Minimum over all partial matchings of the max assignment cost.

    ``bars1``/``bars2`` are (birth, death) tuples of a single degree.
    Exponential enumeration; keep inputs at <= 4 bars a side.
    """
    n1, n2 = len(bars1), len(bars2)
    best = math.inf
    idx2 = range(n2)
    for r in range(min(n1, n2) + 1):
        for sub1 in itertools.combinations(range(n1), r):
            for sub2 in itertools.permutations(idx2, r):
                cost = 0.0
                for i, j in zip(sub1, sub2):
                    cost = max(cost, _cost(bars1[i], bars2[j]))
                for i in range(n1):
                    if i not in sub1:
                        cost = max(cost, _half(bars1[i]))
                matched2 = set(sub2)
                for j in range(n2):
                    if j not in matched2:
                        cost = max(cost, _half(bars2[j]))
                best = min(best, cost)
    return best
