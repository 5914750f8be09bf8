"""Barcodes over F2: filtered-complex reduction, circle lower-star
filtrations, Kunneth assembly to product spaces, and bottleneck distance.

The reduction is the standard column algorithm: cells are ordered by
(filtration value, degree, id), boundary columns are XOR-reduced until
their lowest entries are distinct, pairings give finite intervals and
unpaired positive cells give infinite ones.  Degrees throughout are the
degrees of the underlying cells in the sublevel model; no spectral-flow
grading is attached.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

INF = math.inf


@dataclass(frozen=True)
class Cell:
    id: object
    degree: int
    value: float


@dataclass(frozen=True)
class FilteredComplex:
    """Cells plus F2 boundary lists.

    ``boundary`` maps a cell id to the ids of its facets (coefficients
    are all 1 over F2).  Ids must be unique and mutually orderable, since
    they break ties in the reduction order.
    """

    cells: tuple[Cell, ...]
    boundary: dict

    def validate(self) -> None:
        by_id = {c.id: c for c in self.cells}
        if len(by_id) != len(self.cells):
            raise ValueError("duplicate cell ids")
        for c in self.cells:
            facets = self.boundary.get(c.id, ())
            for f in facets:
                if f not in by_id:
                    raise ValueError(f"cell {c.id!r} has unknown facet {f!r}")
                if by_id[f].degree != c.degree - 1:
                    raise ValueError(f"facet {f!r} of {c.id!r} has wrong degree")
                if by_id[f].value > c.value:
                    raise ValueError(
                        f"filtration not monotone: value({f!r}) > value({c.id!r})"
                    )
            # boundary of boundary must cancel over F2
            dd: set = set()
            for f in facets:
                dd ^= set(self.boundary.get(f, ()))
            if dd:
                raise ValueError(f"boundary of boundary of {c.id!r} is nonzero over F2")


@dataclass(frozen=True)
class Bar:
    birth: float
    death: float  # math.inf for essential classes
    degree: int

    @property
    def finite(self) -> bool:
        return self.death != INF

    @property
    def length(self) -> float:
        return self.death - self.birth


@dataclass(frozen=True)
class Barcode:
    bars: tuple[Bar, ...]

    def __iter__(self):
        return iter(self.bars)

    def __len__(self):
        return len(self.bars)

    def finite(self) -> tuple[Bar, ...]:
        return tuple(b for b in self.bars if b.finite)

    def infinite(self) -> tuple[Bar, ...]:
        return tuple(b for b in self.bars if not b.finite)

    def degrees(self) -> tuple[int, ...]:
        return tuple(sorted({b.degree for b in self.bars}))

    def in_degree(self, d: int) -> tuple[Bar, ...]:
        return tuple(b for b in self.bars if b.degree == d)

    def infinite_counts(self) -> dict[int, int]:
        out: dict[int, int] = {}
        for b in self.infinite():
            out[b.degree] = out.get(b.degree, 0) + 1
        return out

    def persistent_betti(self, a: float, b: float, degree: int) -> int:
        """Rank of the sublevel map H({<=a}) -> H({<=b}) read off the bars."""
        return sum(
            1 for bar in self.bars
            if bar.degree == degree and bar.birth <= a and bar.death > b
        )

    def as_multiset(self) -> dict:
        out: dict = {}
        for b in self.bars:
            key = (b.birth, b.death, b.degree)
            out[key] = out.get(key, 0) + 1
        return out


def sorted_cells(complex_: FilteredComplex) -> list[Cell]:
    return sorted(complex_.cells, key=lambda c: (c.value, c.degree, c.id))


def reduce_filtered_complex(complex_: FilteredComplex) -> Barcode:
    """Persistence pairing of a filtered complex by column reduction.

    Empty intervals (birth == death) are discarded; unpaired positive
    cells become infinite bars.  The resulting multiset of bars is
    invariant under relabelings of the ids (ties pair differently but
    produce the same intervals).
    """
    complex_.validate()
    order = sorted_cells(complex_)
    index = {c.id: i for i, c in enumerate(order)}
    columns: list[set[int]] = [
        {index[f] for f in complex_.boundary.get(c.id, ())} for c in order
    ]
    pivot_of: dict[int, int] = {}
    pairs: list[tuple[int, int]] = []
    for j, col in enumerate(columns):
        while col:
            low = max(col)
            other = pivot_of.get(low)
            if other is None:
                break
            col ^= columns[other]
        if col:
            low = max(col)
            pivot_of[low] = j
            pairs.append((low, j))

    killed = {i for i, _ in pairs}
    emptied = {j for j, col in enumerate(columns) if not col}
    bars = []
    for i, j in pairs:
        birth, death = order[i].value, order[j].value
        if birth < death:
            bars.append(Bar(birth=birth, death=death, degree=order[i].degree))
    for j in sorted(emptied - killed):
        bars.append(Bar(birth=order[j].value, death=INF, degree=order[j].degree))
    bars.sort(key=lambda b: (b.degree, b.birth, b.death))
    return Barcode(bars=tuple(bars))


def lower_star_circle(alpha, grid_size: int) -> FilteredComplex:
    """Lower-star filtration of the circle graph on ``grid_size`` vertices.

    Vertex i carries alpha(i/N); the edge (i, i+1) enters at the larger
    endpoint value, which is the sublevel filtration of the piecewise
    linear interpolation.
    """
    if grid_size < 16:
        raise ValueError("grid_size must be >= 16")
    theta = np.arange(grid_size) / grid_size
    vals = np.asarray(alpha(theta), dtype=float)
    cells = []
    boundary: dict = {}
    for i in range(grid_size):
        cells.append(Cell(id=("v", i), degree=0, value=float(vals[i])))
    for i in range(grid_size):
        j = (i + 1) % grid_size
        cells.append(
            Cell(id=("e", i), degree=1, value=float(max(vals[i], vals[j])))
        )
        boundary[("e", i)] = (("v", i), ("v", j))
    return FilteredComplex(cells=tuple(cells), boundary=boundary)


def betti_torus(m: int) -> tuple[int, ...]:
    """Betti numbers of T^m over a field: binomial(m, k)."""
    if m < 0:
        raise ValueError("m must be >= 0")
    return tuple(math.comb(m, k) for k in range(m + 1))


def kunneth_assemble(circle_barcode: Barcode, betti_factor: Iterable[int]) -> Barcode:
    """Tensor a circle barcode of infinite bars with a factor's homology.

    A function pulled back through the projection onto the circle factor
    has sublevel sets of the form (factor) x (circle sublevel); over a
    field the homology tensors, so each circle bar (b, inf, d) is
    replicated betti_factor[j] times in degree d + j.
    """
    factor = tuple(int(x) for x in betti_factor)
    if any(b.finite for b in circle_barcode):
        raise ValueError("Kunneth assembly expects only infinite bars in the input")
    bars = []
    for bar in circle_barcode:
        for j, mult in enumerate(factor):
            bars.extend([Bar(birth=bar.birth, death=INF, degree=bar.degree + j)] * mult)
    bars.sort(key=lambda b: (b.degree, b.birth, b.death))
    return Barcode(bars=tuple(bars))


def model_floer_barcode(fh) -> Barcode:
    """Closed-form model barcode of a dressed Hamiltonian.

    The dressed function deforms to C * alpha pulled back from the
    distinguished circle without changing critical values, so its
    barcode is the circle barcode of C * alpha tensored with the
    homology of (base) x T^{2n-1}: dim H_*((base) x T^{2n-1}) infinite
    bars starting at each of the two spectral values, and no finite bars.
    """
    if fh.degenerate:
        raise ValueError("model barcode undefined for an identically zero Hamiltonian")
    pr = fh.profiles
    v1 = fh.C * float(pr.alpha(pr.theta1))
    v2 = fh.C * float(pr.alpha(pr.theta2))
    vmin, vmax = min(v1, v2), max(v1, v2)
    circle = Barcode(bars=(Bar(vmin, INF, 0), Bar(vmax, INF, 1)))
    factor = betti_torus(fh.base.dim + fh.torus.dim - 1)
    return kunneth_assemble(circle, factor)


def model_barcode_crosscheck(fh, grid_size: int = 4096) -> dict:
    """Compare the closed-form model barcode against the gridded route.

    The gridded route reduces the lower-star filtration of C * alpha on
    the circle and tensors it by the same factor homology.  Returns the
    two barcodes plus count agreement and the largest birth discrepancy.
    """
    model = model_floer_barcode(fh)
    scaled = lambda t: fh.C * fh.profiles.alpha(t)
    circle = reduce_filtered_complex(lower_star_circle(scaled, grid_size))
    finite_circle = circle.finite()
    gridded = kunneth_assemble(
        Barcode(bars=circle.infinite()),
        betti_torus(fh.base.dim + fh.torus.dim - 1),
    )
    counts_equal = _counts_by_degree(model) == _counts_by_degree(gridded)
    birth_gap = 0.0
    if counts_equal:
        for d in model.degrees():
            mb = sorted(b.birth for b in model.in_degree(d))
            gb = sorted(b.birth for b in gridded.in_degree(d))
            birth_gap = max(
                birth_gap, max(abs(x - y) for x, y in zip(mb, gb)) if mb else 0.0
            )
    return {
        "model": model,
        "gridded": gridded,
        "counts_equal": counts_equal,
        "max_birth_gap": birth_gap,
        "circle_finite_bars": len(finite_circle),
    }


def _counts_by_degree(barcode: Barcode) -> dict[int, int]:
    out: dict[int, int] = {}
    for b in barcode:
        out[b.degree] = out.get(b.degree, 0) + 1
    return out


# ---------------------------------------------------------------------------
# bottleneck distance


def _half_length(bar: Bar) -> float:
    return (bar.death - bar.birth) / 2.0


def _pair_cost(u: Bar, v: Bar) -> float:
    if u.finite != v.finite:
        return INF
    if not u.finite:
        return abs(u.birth - v.birth)
    return max(abs(u.birth - v.birth), abs(u.death - v.death))


def _augment(u: int, adj: list[list[int]], match_u, match_v, seen) -> bool:
    for v in adj[u]:
        if seen[v]:
            continue
        seen[v] = True
        if match_v[v] == -1 or _augment(match_v[v], adj, match_u, match_v, seen):
            match_u[u] = v
            match_v[v] = u
            return True
    return False


def _perfect_matching_exists(adj: list[list[int]], n_right: int) -> bool:
    match_u = [-1] * len(adj)
    match_v = [-1] * n_right
    for u in range(len(adj)):
        seen = [False] * n_right
        if not _augment(u, adj, match_u, match_v, seen):
            return False
    return True


def _finite_bottleneck(bars1: list[Bar], bars2: list[Bar]) -> float:
    """Optimal sup-cost matching allowing diagonal moves at half-length."""
    if not bars1 and not bars2:
        return 0.0
    n1, n2 = len(bars1), len(bars2)
    costs = np.full((n1, n2), INF)
    for i, u in enumerate(bars1):
        for j, v in enumerate(bars2):
            costs[i, j] = _pair_cost(u, v)
    half1 = [_half_length(u) for u in bars1]
    half2 = [_half_length(v) for v in bars2]

    candidates = sorted(
        {0.0}
        | {float(c) for c in costs.ravel() if c < INF}
        | set(half1)
        | set(half2)
    )

    def feasible(t: float) -> bool:
        # left: bars1 then diagonal proxies for bars2
        # right: bars2 then diagonal proxies for bars1
        adj: list[list[int]] = []
        for i in range(n1):
            edges = [j for j in range(n2) if costs[i, j] <= t]
            if half1[i] <= t:
                edges.append(n2 + i)  # own diagonal proxy
            adj.append(edges)
        # left proxies for bars2: free against right proxies, or bars2[j]
        # retires to the diagonal when its half-length fits under t
        proxy_targets = list(range(n2, n2 + n1))
        for j in range(n2):
            edges = list(proxy_targets)
            if half2[j] <= t:
                edges.append(j)
            adj.append(edges)
        return _perfect_matching_exists(adj, n1 + n2)

    lo, hi = 0, len(candidates) - 1
    if not feasible(candidates[hi]):
        return INF
    while lo < hi:
        mid = (lo + hi) // 2
        if feasible(candidates[mid]):
            hi = mid
        else:
            lo = mid + 1
    return candidates[lo]


def _infinite_bottleneck(bars1: list[Bar], bars2: list[Bar]) -> float:
    if len(bars1) != len(bars2):
        return INF
    b1 = sorted(b.birth for b in bars1)
    b2 = sorted(b.birth for b in bars2)
    return max((abs(x - y) for x, y in zip(b1, b2)), default=0.0)


def bottleneck_distance(b1: Barcode, b2: Barcode) -> float:
    """Bottleneck distance between barcodes, compared degree by degree.

    Finite bars match under the sup metric on endpoints or retire to the
    diagonal at half their length; infinite bars must match infinite
    bars of the same degree (sorted births give the optimal sup cost) and
    mismatched essential counts make the distance infinite.
    """
    total = 0.0
    for d in sorted(set(b1.degrees()) | set(b2.degrees())):
        fin1 = [b for b in b1.in_degree(d) if b.finite]
        fin2 = [b for b in b2.in_degree(d) if b.finite]
        inf1 = [b for b in b1.in_degree(d) if not b.finite]
        inf2 = [b for b in b2.in_degree(d) if not b.finite]
        total = max(total, _infinite_bottleneck(inf1, inf2))
        if total == INF:
            return INF
        total = max(total, _finite_bottleneck(fin1, fin2))
        if total == INF:
            return INF
    return total
