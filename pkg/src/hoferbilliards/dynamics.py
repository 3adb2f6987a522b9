"""Periodic orbits through the cyclic chord-length functional, and table
reconstruction from chord data.

The action of an n-tuple (q_1, ..., q_n) is the closed polygon length
sum_i ||gamma(q_{i+1}) - gamma(q_i)||; its critical points are exactly the
period-n billiard trajectories, searched here by a damped Newton method on
the torus and cross-validated as phase-space fixed points of the bounce
map.  Reconstruction inverts the two-point chord function: distances to the
two anchor points gamma(0) and gamma(1/2) pin every boundary point up to a
rigid motion.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .billiard import forward_arrays
from .curves import SampledCurve, TableCurve, c0_distance, circ_dist
from .errors import BoundViolated, DiagonalPoint, InconsistentChords

ACCEPT_RESIDUAL = 1e-10
PHASE_TOL = 1e-8
DEDUP_TOL = 1e-6


def _chords(table: TableCurve, qs):
    """Positions, consecutive unit chords and lengths of a cyclic tuple."""
    qs = np.asarray(qs, dtype=float)
    pos = table.position(qs)
    nxt = np.roll(pos, -1, axis=-2)
    d = nxt - pos
    dist = np.linalg.norm(d, axis=-1)
    if np.any(dist < 1e-14) or np.any(circ_dist(qs, np.roll(qs, -1, axis=-1)) < 1e-12):
        raise DiagonalPoint("consecutive orbit points coincide")
    return pos, d / dist[..., None], dist


def orbit_functional(table: TableCurve, qs) -> float:
    """Total chord length of the closed tuple; cyclic-shift invariant."""
    return float(_chords(table, qs)[2].sum(axis=-1))


def orbit_gradient(table: TableCurve, qs):
    """d/dq_i of the functional: incoming momentum minus outgoing momentum.

    Component i vanishes exactly when the reflection law holds at bounce i.
    """
    qs = np.asarray(qs, dtype=float)
    _, u, _ = _chords(table, qs)
    tan = table.tangent(qs)
    outgoing = np.sum(u * tan, axis=-1)
    incoming = np.sum(np.roll(u, 1, axis=-2) * tan, axis=-1)
    return incoming - outgoing


def orbit_hessian(table: TableCurve, qs):
    """Analytic Hessian of the functional, assembled chord by chord."""
    qs = np.asarray(qs, dtype=float)
    n = qs.size
    _, u, dist = _chords(table, qs)
    tan = table.tangent(qs)
    kappa = table.curvature(qs)
    # gamma'' = kappa * (tangent rotated by +90)
    gpp = kappa[:, None] * np.stack([-tan[:, 1], tan[:, 0]], axis=-1)
    H = np.zeros((n, n))
    for i in range(n):
        j = (i + 1) % n
        ui = u[i]
        p = float(ui @ tan[i])
        P = float(ui @ tan[j])
        H[i, i] += (1 - p * p) / dist[i] - float(ui @ gpp[i])
        H[j, j] += (1 - P * P) / dist[i] + float(ui @ gpp[j])
        cross = -(float(tan[i] @ tan[j]) - p * P) / dist[i]
        H[i, j] += cross
        H[j, i] += cross
    return H


@dataclass
class PeriodicOrbitCandidate:
    """A converged critical tuple with its validation data."""

    qs: tuple
    n: int
    action: float
    residual: float
    accepted: bool
    degenerate_family: bool
    phase_error: float
    winding: int = 0

    def to_json(self):
        return {
            "n": self.n,
            "qs": list(self.qs),
            "action": self.action,
            "residual": self.residual,
            "accepted": bool(self.accepted),
            "degenerate_family": bool(self.degenerate_family),
            "phase_error": self.phase_error,
            "winding": self.winding,
        }


def orbit_phase_point(table: TableCurve, qs):
    """Outgoing phase point (q_1, p) of the first bounce of the tuple."""
    qs = np.asarray(qs, dtype=float)
    _, u, _ = _chords(table, qs)
    p = float(u[0] @ table.tangent(qs[0]))
    return float(np.mod(qs[0], 1.0)), p


def _phase_validation(table: TableCurve, qs):
    """Max phase-space deviation of the tuple from a bounce trajectory."""
    qs = np.asarray(qs, dtype=float)
    n = qs.size
    q, p = orbit_phase_point(table, qs)
    err = 0.0
    for i in range(n):
        if not abs(p) < 1.0 - 1e-9:
            return np.inf
        Q, P = forward_arrays(table, np.array([q]), np.array([p]))
        q, p = float(np.mod(Q[0], 1.0)), float(P[0])
        err = max(err, float(circ_dist(q, qs[(i + 1) % n])))
    # after n bounces the trajectory must close up
    err = max(err, float(circ_dist(q, qs[0])))
    return err


def _newton_orbit(table: TableCurve, qs0, maxiter=60):
    qs = np.array(qs0, dtype=float)
    for _ in range(maxiter):
        try:
            g = orbit_gradient(table, qs)
        except DiagonalPoint:
            return None
        if np.abs(g).max() < 1e-13:
            break
        H = orbit_hessian(table, qs)
        step, *_ = np.linalg.lstsq(H, -g, rcond=None)
        norm = np.abs(step).max()
        if norm > 0.1:
            step *= 0.1 / norm
        qs = qs + step
        if norm < 1e-15:
            break
    try:
        g = orbit_gradient(table, qs)
    except DiagonalPoint:
        return None
    return np.mod(qs, 1.0), float(np.abs(g).max())


def _canonical_images(qs):
    qs = np.mod(np.asarray(qs, dtype=float), 1.0)
    n = qs.size
    images = []
    for arr in (qs, qs[::-1]):
        for k in range(n):
            images.append(np.roll(arr, k))
    return images


def _same_orbit(a: PeriodicOrbitCandidate, b: PeriodicOrbitCandidate) -> bool:
    qa = np.asarray(a.qs)
    for img in _canonical_images(b.qs):
        if circ_dist(qa, img).max() < DEDUP_TOL:
            return True
    if a.degenerate_family and b.degenerate_family:
        # members of a rotational family match after a common rotation
        for img in _canonical_images(b.qs):
            diff = np.mod(qa - img, 1.0)
            mean = np.angle(np.exp(2j * np.pi * diff).mean()) / (2 * np.pi)
            if circ_dist(diff, mean).max() < 1e-4:
                return True
    return False


def find_periodic_orbits(
    table: TableCurve, n: int, seed_count: int = 32, rng=None
) -> list[PeriodicOrbitCandidate]:
    """Multi-start Newton search for period-n orbits on the parameter torus.

    Seeds combine rotational tuples q_i = q0 + i k/n (k coprime to n) with
    uniform random tuples.  Converged candidates are deduplicated modulo
    cyclic shift and reversal (and common rotation for degenerate families)
    and accepted only when the critical residual is below 1e-10 and the
    tuple closes up as a phase-space trajectory within 1e-8.
    """
    if n < 2:
        raise ValueError("period must be at least 2")
    rng = np.random.default_rng(rng)
    seeds = []
    for k in range(1, n):
        if np.gcd(k, n) != 1:
            continue
        for q0 in np.linspace(0.0, 1.0 / n, 8, endpoint=False):
            seeds.append(np.mod(q0 + np.arange(n) * k / n, 1.0))
    for _ in range(seed_count):
        cand = np.sort(rng.uniform(0.0, 1.0, n))
        if circ_dist(cand, np.roll(cand, -1)).min() > 0.05 / n:
            seeds.append(cand)

    found: list[PeriodicOrbitCandidate] = []
    for seed in seeds:
        res = _newton_orbit(table, seed)
        if res is None:
            continue
        qs, residual = res
        if residual > ACCEPT_RESIDUAL:
            continue
        if circ_dist(qs, np.roll(qs, -1)).min() < 1e-9:
            continue
        H = orbit_hessian(table, qs)
        eig = np.linalg.eigvalsh(H)
        degenerate = bool(np.abs(eig).min() < 1e-6 * max(1.0, np.abs(eig).max()))
        phase_err = _phase_validation(table, qs)
        winding = int(np.rint(np.sum(np.mod(np.diff(np.concatenate([qs, qs[:1]])), 1.0))))
        cand = PeriodicOrbitCandidate(
            qs=tuple(float(v) for v in qs),
            n=n,
            action=orbit_functional(table, qs),
            residual=residual,
            accepted=bool(residual < ACCEPT_RESIDUAL and phase_err < PHASE_TOL),
            degenerate_family=degenerate,
            phase_error=float(phase_err),
            winding=winding,
        )
        if not cand.accepted:
            continue
        if any(_same_orbit(cand, other) for other in found):
            continue
        found.append(cand)
    found.sort(key=lambda c: (c.action, c.qs))
    return found


def _iterate_batch(table: TableCurve, pts: np.ndarray, n: int):
    """n-fold lifted bounce map of a batch of (q, p) rows."""
    if np.any(np.abs(pts[:, 1]) >= 1 - 1e-9):
        raise FloatingPointError("batch leaves the solvable annulus")
    Q, P = pts[:, 0].copy(), pts[:, 1].copy()
    for _ in range(n):
        Q, P = forward_arrays(table, Q, P)
        if np.any(np.abs(P) >= 1 - 1e-9):
            raise FloatingPointError("batch leaves the solvable annulus")
    return np.stack([Q, P], axis=-1)


def phase_fixed_points(
    table: TableCurve, n: int, seed_count: int = 24, rng=None, seeds=None, tol=1e-11
) -> list[tuple]:
    """Fixed points of the n-fold bounce map by Newton in phase space.

    Independent of the torus search; used as its validation oracle.
    Returns deduplicated (q, p) pairs.
    """
    rng = np.random.default_rng(rng)
    starts = [np.asarray(s, dtype=float) for s in (seeds or [])]
    starts += [
        np.array([rng.uniform(), rng.uniform(-0.8, 0.8)]) for _ in range(seed_count)
    ]
    h = 1e-7
    stencil = np.array([[0.0, 0.0], [h, 0.0], [-h, 0.0], [0.0, h], [0.0, -h]])
    out = []
    for x in starts:
        ok = False
        for _ in range(40):
            try:
                ys = _iterate_batch(table, x[None, :] + stencil, n)
            except (FloatingPointError, ArithmeticError):
                break
            G = ys[0] - (x + stencil[0])
            G[0] -= np.rint(G[0])
            if np.abs(G).max() < tol:
                ok = True
                break
            J = np.empty((2, 2))
            J[:, 0] = (ys[1] - ys[2]) / (2 * h)
            J[:, 1] = (ys[3] - ys[4]) / (2 * h)
            J -= np.eye(2)
            step, *_ = np.linalg.lstsq(J, -G, rcond=None)
            norm = np.abs(step).max()
            if norm > 0.1:
                step *= 0.1 / norm
            x = x + step
            x[0] = np.mod(x[0], 1.0)
            x[1] = np.clip(x[1], -0.995, 0.995)
        if not ok:
            continue
        q, p = float(np.mod(x[0], 1.0)), float(x[1])
        if all(circ_dist(q, q2) + abs(p - p2) > 1e-6 for q2, p2 in out):
            out.append((q, p))
    return out


def tuple_from_phase_point(table: TableCurve, q: float, p: float, n: int):
    """Bounce parameters visited over n iterations from (q, p)."""
    qs = [float(np.mod(q, 1.0))]
    for _ in range(n - 1):
        Q, P = forward_arrays(table, np.array([q]), np.array([p]))
        q, p = float(np.mod(Q[0], 1.0)), float(P[0])
        qs.append(q)
    return np.array(qs)


# ---------------------------------------------------------------------------
# C^0 control of the functional
# ---------------------------------------------------------------------------


def sample_functional_values(table: TableCurve, n: int, m: int):
    """F on the uniform m^n torus grid; chords of equal parameters count 0."""
    q = np.arange(m) / m
    pos = table.position(q)
    diff = pos[None, :, :] - pos[:, None, :]
    D = np.linalg.norm(diff, axis=-1)
    if n == 2:
        return 2.0 * D
    if n == 3:
        return D[:, :, None] + D[None, :, :] + D[:, None, :]
    raise ValueError("torus grids are supported for n in {2, 3}")


def _adjacent_mask(n: int, m: int):
    """True where some cyclically consecutive coordinates coincide."""
    idx = np.arange(m)
    if n == 2:
        return idx[:, None] == idx[None, :]
    eq01 = idx[:, None, None] == idx[None, :, None]
    eq12 = idx[None, :, None] == idx[None, None, :]
    eq20 = idx[None, None, :] == idx[:, None, None]
    return eq01 | eq12 | eq20


@dataclass
class FunctionalGap:
    gap: float
    bound: float
    c0: float

    def to_json(self):
        return {"gap": self.gap, "bound": self.bound, "c0": self.c0}


def functional_gap(a: TableCurve, b: TableCurve, n: int, m: int = 64) -> FunctionalGap:
    """sup |F_a - F_b| over the torus grid, checked against 2 n C^0 distance.

    The bound is unconditional (triangle inequality chord by chord), so a
    violation signals a numerics bug and raises BoundViolated.
    """
    Fa = sample_functional_values(a, n, m)
    Fb = sample_functional_values(b, n, m)
    mask = _adjacent_mask(n, m)
    gap = float(np.abs(np.where(mask, 0.0, Fa - Fb)).max())
    q = np.arange(m) / m
    grid_c0 = float(np.linalg.norm(a.position(q) - b.position(q), axis=-1).max())
    c0 = max(c0_distance(a, b), grid_c0)
    bound = 2.0 * n * c0
    if gap > bound * (1.0 + 1e-9):
        raise BoundViolated(f"functional gap {gap!r} exceeds 2n * C0 = {bound!r}")
    return FunctionalGap(gap=gap, bound=bound, c0=c0)


# ---------------------------------------------------------------------------
# almost periodicity
# ---------------------------------------------------------------------------


@dataclass
class AlmostPeriodicityReport:
    """Closeness of the perturbed-table trajectory cloud to the reference one."""

    min_distance: float
    argmin_start: tuple
    radius: float
    samples: int
    n: int
    geometric_upper_bound: float | None
    cloud_b: np.ndarray = field(repr=False, default=None)
    cloud_a: np.ndarray = field(repr=False, default=None)

    def to_json(self):
        return {
            "min_distance": self.min_distance,
            "argmin_start": list(self.argmin_start),
            "radius": self.radius,
            "samples": self.samples,
            "n": self.n,
            "geometric_upper_bound": self.geometric_upper_bound,
        }


def _phase_metric(a, b):
    dq = circ_dist(a[..., 0], b[..., 0])
    dp = a[..., 1] - b[..., 1]
    return np.hypot(dq, dp)


def almost_periodicity_experiment(
    a: TableCurve,
    b: TableCurve,
    orbit: PeriodicOrbitCandidate,
    n: int,
    radius: float = 0.05,
    samples: int = 200,
    rng=None,
) -> AlmostPeriodicityReport:
    """Sample a phase ball at a periodic point of ``a`` and iterate under ``b``.

    Reports min over sample starts x of the distance from the n-th iterate
    under b to the cloud of n-th iterates under a, together with the
    geometric path upper bound between the tables when both expose support
    specs (context for the displacement-energy threshold, which itself is
    not computable).
    """
    rng = np.random.default_rng(rng)
    q0, p0 = orbit_phase_point(a, np.asarray(orbit.qs))
    ang = rng.uniform(0.0, 2 * np.pi, samples - 1)
    rad = radius * np.sqrt(rng.uniform(0.0, 1.0, samples - 1))
    qs = np.concatenate([[q0], q0 + rad * np.cos(ang)])
    ps = np.concatenate([[p0], np.clip(p0 + rad * np.sin(ang), -0.999, 0.999)])

    def iterate_cloud(table):
        Q, P = qs.copy(), ps.copy()
        for _ in range(n):
            Q, P = forward_arrays(table, Q, P)
        return np.stack([np.mod(Q, 1.0), P], axis=-1)

    cloud_a = iterate_cloud(a)
    cloud_b = iterate_cloud(b)
    dists = _phase_metric(cloud_b[:, None, :], cloud_a[None, :, :]).min(axis=1)
    j = int(np.argmin(dists))

    upper = None
    spec_a = getattr(a, "spec", None)
    spec_b = getattr(b, "spec", None)
    if spec_a is not None and spec_b is not None:
        from .homotopy import path_geometric_length, support_interp_path

        try:
            upper = path_geometric_length(
                support_interp_path(spec_a, spec_b), s_nodes=17, q_nodes=512
            )
        except Exception:
            upper = None
    return AlmostPeriodicityReport(
        min_distance=float(dists[j]),
        argmin_start=(float(qs[j] % 1.0), float(ps[j])),
        radius=radius,
        samples=samples,
        n=n,
        geometric_upper_bound=upper,
        cloud_b=cloud_b,
        cloud_a=cloud_a,
    )


# ---------------------------------------------------------------------------
# reconstruction from chord data
# ---------------------------------------------------------------------------


@dataclass
class ChordData:
    """Samples of F(0, t) and F(t, 1/2) plus the anchor distance F(0, 1/2)."""

    t: np.ndarray
    from_start: np.ndarray
    from_half: np.ndarray
    anchor: float

    def __post_init__(self):
        self.t = np.asarray(self.t, dtype=float)
        self.from_start = np.asarray(self.from_start, dtype=float)
        self.from_half = np.asarray(self.from_half, dtype=float)
        if self.anchor <= 0:
            raise InconsistentChords("anchor distance F(0, 1/2) must be positive")

    def to_json(self):
        return {
            "t": self.t.tolist(),
            "from_start": self.from_start.tolist(),
            "from_half": self.from_half.tolist(),
            "anchor": self.anchor,
        }


def table_chord_data(table: TableCurve, samples: int = 256) -> ChordData:
    """Chord data of a table on the uniform grid (skipping t = 0, 1/2)."""
    t = np.arange(1, samples) / samples
    t = t[np.abs(t - 0.5) > 1e-12]
    pos = table.position(t)
    p0 = table.position(0.0)
    ph = table.position(0.5)
    return ChordData(
        t=t,
        from_start=np.linalg.norm(pos - p0, axis=-1),
        from_half=np.linalg.norm(pos - ph, axis=-1),
        anchor=float(np.linalg.norm(ph - p0)),
    )


def reconstruct_table(chords: ChordData, slack: float = 1e-9):
    """Recover boundary points from two-anchor chord data, up to rigid motion.

    Anchors are placed at S = (0, 0) and R = (anchor, 0); each t determines
    the circle-circle intersection with the orientation convention that the
    basis (point - S, R - S) is negative for t < 1/2 and positive for
    t > 1/2 (counterclockwise traversal).  Returns (t, points) including the
    pinned anchor parameters 0 and 1/2.  Raises InconsistentChords when the
    circles fail to intersect beyond ``slack``.
    """
    d = float(chords.anchor)
    r1 = chords.from_start
    r2 = chords.from_half
    t = chords.t
    if np.any(r1 <= 0) or np.any(r2 <= 0):
        raise InconsistentChords("chord lengths must be positive off the anchors")
    x = (d * d + r1 * r1 - r2 * r2) / (2.0 * d)
    y2 = r1 * r1 - x * x
    if np.any(y2 < -slack * max(1.0, float(np.abs(r1).max()) ** 2)):
        raise InconsistentChords("chord circles fail to intersect")
    y = np.sqrt(np.maximum(y2, 0.0))
    sign = np.where(t < 0.5, -1.0, 1.0)
    pts = np.stack([x, sign * y], axis=-1)
    t_full = np.concatenate([[0.0], t[t < 0.5], [0.5], t[t > 0.5]])
    pts_full = np.vstack(
        [[0.0, 0.0], pts[t < 0.5], [d, 0.0], pts[t > 0.5]]
    )
    return t_full, pts_full


def align_two_anchors(points, t, table: TableCurve):
    """Rigid motion taking the reconstructed anchors onto the table's anchors."""
    S = table.position(0.0)
    R = table.position(0.5)
    ang = np.arctan2(*(R - S)[::-1]) - np.arctan2(points[np.searchsorted(t, 0.5), 1] - points[0, 1], points[np.searchsorted(t, 0.5), 0] - points[0, 0])
    c, s = np.cos(ang), np.sin(ang)
    rot = np.array([[c, -s], [s, c]])
    return (points - points[0]) @ rot.T + S


def reconstruction_roundtrip_error(table: TableCurve, samples: int = 256) -> float:
    """Max aligned point error of the chord-data reconstruction."""
    data = table_chord_data(table, samples)
    t, pts = reconstruct_table(data)
    aligned = align_two_anchors(pts, t, table)
    true = table.position(t)
    return float(np.linalg.norm(aligned - true, axis=-1).max())


def reconstructed_table(chords: ChordData) -> TableCurve:
    """Spectral table built from reconstructed samples (uniform grids only)."""
    t, pts = reconstruct_table(chords)
    gaps = np.diff(np.concatenate([t, [1.0]]))
    if np.abs(gaps - gaps[0]).max() > 1e-9:
        raise ValueError("reconstructed_table needs a uniform parameter grid")
    return SampledCurve.from_points(pts, kind="reconstructed_samples")
