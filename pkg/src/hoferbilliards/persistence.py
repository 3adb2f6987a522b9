"""Sublevel-set persistence of grid functions on the torus, and bottleneck
distances between the resulting barcodes.

The complex is cubical: a periodic n-grid of resolution m has (2m)^n cells,
a cell being a product of vertices (even coordinates) and edges (odd
coordinates).  The lower-star filtration assigns every cell the maximum of
its vertex values; ties are broken by dimension and then lexicographic cell
index, which makes the reduction deterministic while leaving the barcode
unchanged.  Boundary reduction is over GF(2) with columns stored as Python
integers (bitmasks over filtration ranks) and the standard clearing of
columns that were already killed one dimension up.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import permutations
from math import comb, inf

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_bipartite_matching

from .curves import TableCurve
from .dynamics import FunctionalGap, functional_gap, sample_functional_values
from .errors import ResolutionTooLarge, StabilityViolated

CELL_BUDGET = 1 << 24


@dataclass
class GridFunction:
    """Values of a function on the uniform m^n grid of the n-torus."""

    dim: int
    resolution: int
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.resolution,) * self.dim:
            raise ValueError("value array must be an m^n cube")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("grid values must be finite")

    def shifted(self, c: float) -> "GridFunction":
        return GridFunction(self.dim, self.resolution, self.values + c)


def sample_orbit_functional(table: TableCurve, n: int, m: int) -> GridFunction:
    """Chord-length functional on the m^n torus grid.

    Chord terms of coinciding parameters evaluate to 0 (the continuous
    extension of the norm); raises ResolutionTooLarge over the cell budget.
    """
    if m**n > CELL_BUDGET:
        raise ResolutionTooLarge(f"{m}^{n} grid exceeds the configured budget")
    return GridFunction(n, m, sample_functional_values(table, n, m))


@dataclass
class Barcode:
    """Per-degree multisets of (birth, death] intervals, death possibly inf."""

    dim: int
    bars: dict = field(default_factory=dict)

    def degree(self, d: int):
        return self.bars.get(d, [])

    def finite(self, d: int):
        return [(b, e) for (b, e) in self.degree(d) if e != inf]

    def infinite_births(self, d: int):
        return [b for (b, e) in self.degree(d) if e == inf]

    def shifted(self, c: float) -> "Barcode":
        out = {
            d: [(b + c, e + c if e != inf else inf) for (b, e) in bars]
            for d, bars in self.bars.items()
        }
        return Barcode(self.dim, out)

    def to_json(self):
        return [
            {"degree": d, "birth": b, "death": ("inf" if e == inf else e)}
            for d in sorted(self.bars)
            for (b, e) in self.bars[d]
        ]


def _cell_values(values: np.ndarray):
    """Lower-star values on the doubled grid: max over each cell's vertices."""
    out = values
    for axis in range(values.ndim):
        nxt = np.roll(out, -1, axis=axis)
        out = np.stack([out, np.maximum(out, nxt)], axis=axis + 1)
        shape = list(out.shape)
        shape[axis : axis + 2] = [shape[axis] * shape[axis + 1]]
        out = out.reshape(shape)
    return out


def sublevel_barcode(g: GridFunction, tie_break: str = "lex") -> Barcode:
    """Persistence barcode of the sublevel filtration of a torus grid function.

    Zero-length pairs are dropped; every essential class appears as an
    infinite bar, so degree-d infinite bars always number binomial(n, d).
    """
    n, m = g.dim, g.resolution
    side = 2 * m
    values = _cell_values(g.values).ravel()
    total = side**n
    coords = np.unravel_index(np.arange(total), (side,) * n)
    dims = np.zeros(total, dtype=np.int8)
    for axis in range(n):
        dims += (coords[axis] % 2).astype(np.int8)
    if tie_break == "lex":
        order = np.lexsort((np.arange(total), dims, values))
    elif tie_break == "revlex":
        order = np.lexsort((np.arange(total)[::-1], dims, values))
    else:
        raise ValueError("tie_break must be 'lex' or 'revlex'")
    rank = np.empty(total, dtype=np.int64)
    rank[order] = np.arange(total)

    strides = np.array([side ** (n - 1 - a) for a in range(n)], dtype=np.int64)

    def faces(flat: int):
        out = []
        rem = flat
        idx = []
        for a in range(n):
            idx.append(rem // strides[a])
            rem %= strides[a]
        for a in range(n):
            if idx[a] % 2 == 1:
                lo = flat - strides[a]
                hi = flat + strides[a] if idx[a] + 1 < side else flat - (side - 1) * strides[a]
                out.append(lo)
                out.append(hi)
        return out

    cells_by_dim = [np.flatnonzero(dims == d) for d in range(n + 1)]
    pairs = []  # (birth rank, death rank, degree)
    killed = set()
    cleared: set[int] = set()
    for d in range(n, 0, -1):
        pivots: dict[int, int] = {}
        pivot_cells: dict[int, int] = {}
        cells = cells_by_dim[d]
        for flat in cells[np.argsort(rank[cells])]:
            flat = int(flat)
            if flat in cleared:
                continue
            col = 0
            for f in faces(flat):
                col ^= 1 << int(rank[f])
            while col:
                low = col.bit_length() - 1
                other = pivots.get(low)
                if other is None:
                    pivots[low] = col
                    pivot_cells[low] = flat
                    pairs.append((low, int(rank[flat]), d - 1))
                    killed.add(int(rank[flat]))
                    break
                col ^= other
        # the (d-1)-cells that just died as pivots have zero-reducing
        # columns of their own; skip them next pass
        cleared = {int(order[low]) for low in pivots}

    born = {p[0] for p in pairs}
    value_by_rank = values[order]
    dim_by_rank = dims[order]
    bars: dict[int, list] = {d: [] for d in range(n + 1)}
    for birth_rank, death_rank, degree in pairs:
        b = float(value_by_rank[birth_rank])
        e = float(value_by_rank[death_rank])
        if e > b:
            bars[degree].append((b, e))
    for r in range(total):
        if r in born or r in killed:
            continue
        bars[int(dim_by_rank[r])].append((float(value_by_rank[r]), inf))
    for d in bars:
        bars[d].sort(key=lambda be: (be[0], be[1]))
    return Barcode(n, bars)


# ---------------------------------------------------------------------------
# bottleneck distance
# ---------------------------------------------------------------------------


def _matching_feasible(costA_B, halfA, halfB, r):
    nA, nB = len(halfA), len(halfB)
    size = nA + nB
    if size == 0:
        return True
    rows, cols = [], []
    for i in range(nA):
        for j in range(nB):
            if costA_B[i][j] <= r:
                rows.append(i)
                cols.append(j)
        if halfA[i] <= r:
            rows.append(i)
            cols.append(nB + i)
    for j in range(nB):
        if halfB[j] <= r:
            rows.append(nA + j)
            cols.append(j)
        for i in range(nA):
            rows.append(nA + j)
            cols.append(nB + i)
    graph = csr_matrix((np.ones(len(rows), dtype=np.int8), (rows, cols)), shape=(size, size))
    match = maximum_bipartite_matching(graph, perm_type="column")
    return int((match >= 0).sum()) == size


def bottleneck_distance(a: Barcode, b: Barcode, degree: int) -> float:
    """Optimal-matching bottleneck distance in one homological degree.

    Finite bars may match the diagonal at half their length; infinite bars
    must match infinite bars (sorted by birth), else the distance is +inf.
    The optimum is found by binary search over the exact candidate radii.
    """
    infA = sorted(a.infinite_births(degree))
    infB = sorted(b.infinite_births(degree))
    if len(infA) != len(infB):
        return inf
    base = max((abs(x - y) for x, y in zip(infA, infB)), default=0.0)

    A = a.finite(degree)
    B = b.finite(degree)
    halfA = [(e - bb) / 2 for (bb, e) in A]
    halfB = [(e - bb) / 2 for (bb, e) in B]
    cost = [
        [max(abs(b1 - b2), abs(e1 - e2)) for (b2, e2) in B]
        for (b1, e1) in A
    ]
    candidates = sorted(
        {0.0, base}
        | set(halfA)
        | set(halfB)
        | {c for row in cost for c in row}
    )
    lo, hi = 0, len(candidates) - 1
    # smallest feasible candidate >= base
    while lo < hi:
        mid = (lo + hi) // 2
        if candidates[mid] >= base and _matching_feasible(cost, halfA, halfB, candidates[mid]):
            hi = mid
        else:
            lo = mid + 1
    r = candidates[lo]
    if r < base or not _matching_feasible(cost, halfA, halfB, r):
        return inf
    return float(r)


def bottleneck_brute_force(a: Barcode, b: Barcode, degree: int) -> float:
    """Exhaustive matching oracle for small barcodes (tests only)."""
    infA = sorted(a.infinite_births(degree))
    infB = sorted(b.infinite_births(degree))
    if len(infA) != len(infB):
        return inf
    base = max((abs(x - y) for x, y in zip(infA, infB)), default=0.0)
    A = a.finite(degree)
    B = b.finite(degree)
    if len(A) + len(B) > 8:
        raise ValueError("brute force oracle is for small barcodes")
    nA, nB = len(A), len(B)
    best = inf
    # pad with diagonal slots and try every assignment
    size = nA + nB
    targets = list(range(size))
    for perm in permutations(targets):
        worst = base
        for i in range(size):
            j = perm[i]
            if i < nA and j < nB:
                worst = max(worst, max(abs(A[i][0] - B[j][0]), abs(A[i][1] - B[j][1])))
            elif i < nA:
                worst = max(worst, (A[i][1] - A[i][0]) / 2)
            elif j < nB:
                worst = max(worst, (B[j][1] - B[j][0]) / 2)
        best = min(best, worst)
    return float(best)


# ---------------------------------------------------------------------------
# stability
# ---------------------------------------------------------------------------


@dataclass
class StabilityReport:
    """Per-degree bottleneck distances against the functional-gap bound."""

    gap: FunctionalGap
    slack: float
    bottlenecks: dict
    passed: bool

    def to_json(self):
        return {
            "gap": self.gap.to_json(),
            "slack": self.slack,
            "bottlenecks": {str(k): v for k, v in self.bottlenecks.items()},
            "pass": bool(self.passed),
        }


def _cell_oscillation(values: np.ndarray) -> float:
    """Max over cells of the value spread across the cell's vertices."""
    spread_hi = values
    spread_lo = values
    for axis in range(values.ndim):
        spread_hi = np.maximum(spread_hi, np.roll(spread_hi, -1, axis=axis))
        spread_lo = np.minimum(spread_lo, np.roll(spread_lo, -1, axis=axis))
    return float((spread_hi - spread_lo).max())


def stability_check(ta: TableCurve, tb: TableCurve, n: int, m: int = 64) -> StabilityReport:
    """Assert per-degree bottleneck <= sup-gap + one-cell oscillation slack.

    Discrete stability on a shared grid makes the bound a theorem, so a
    violation raises StabilityViolated.
    """
    ga = sample_orbit_functional(ta, n, m)
    gb = sample_orbit_functional(tb, n, m)
    bar_a = sublevel_barcode(ga)
    bar_b = sublevel_barcode(gb)
    gap = functional_gap(ta, tb, n, m)
    slack = _cell_oscillation(ga.values - gb.values)
    out = {}
    ok = True
    for d in range(n + 1):
        bd = bottleneck_distance(bar_a, bar_b, d)
        out[d] = bd
        if not bd <= gap.gap + slack + 1e-12:
            ok = False
    if not ok:
        raise StabilityViolated(f"bottleneck {out!r} exceeds gap {gap.gap!r} + slack {slack!r}")
    return StabilityReport(gap=gap, slack=slack, bottlenecks=out, passed=ok)


def betti_numbers(bar: Barcode) -> list[int]:
    """Infinite-bar counts per degree; the n-torus expects binomial(n, d)."""
    return [len(bar.infinite_births(d)) for d in range(bar.dim + 1)]


def expected_torus_betti(n: int) -> list[int]:
    return [comb(n, d) for d in range(n + 1)]


def save_grid(path, g: GridFunction):
    """Write a grid as a one-line JSON header followed by raw row-major doubles."""
    import json

    header = json.dumps(
        {"dim": g.dim, "resolution": g.resolution, "dtype": "float64", "order": "C"},
        sort_keys=True,
    )
    with open(path, "wb") as fh:
        fh.write(header.encode() + b"\n")
        fh.write(np.ascontiguousarray(g.values, dtype="<f8").tobytes())


def load_grid(path) -> GridFunction:
    import json

    with open(path, "rb") as fh:
        header = json.loads(fh.readline().decode())
        data = np.frombuffer(fh.read(), dtype="<f8")
    n, m = int(header["dim"]), int(header["resolution"])
    return GridFunction(n, m, data.reshape((m,) * n))
