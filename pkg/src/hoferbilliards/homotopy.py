"""Paths of billiard tables, their geometric and Hofer lengths, and certificates.

A path of tables induces a path of annulus maps psi_s generated by the
time-dependent Hamiltonian

    H_s(Q, P) = -dF_s/ds (q_s(Q, P), Q),      F_s(q, Q) = ||gamma_s(q) - gamma_s(Q)||,

where (q_s, p_s) = psi_s^{-1}(Q, P).  With u the unit chord from gamma(q_s)
to gamma(Q) this evaluates to <u, dgamma/ds(q_s) - dgamma/ds(Q)>, which is
what this module computes; no differencing of F itself is involved.  The
module certifies the comparison l_H <= 4 l_B path by path.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .billiard import forward_arrays, forward_chord
from .curves import (
    CURVATURE_FLOOR,
    TWO_PI,
    FourierSupportSpec,
    FourierTable,
    SampledCurve,
    TableCurve,
    c0_distance,
)
from .errors import BracketInverted, CurvatureNotPositive, NearGrazing, PerturbationTooLarge

DEFAULT_DS = 1e-4


def simpson_nodes(n: int):
    """Nodes and weights of the composite Simpson rule on [0, 1]; n odd."""
    if n < 3 or n % 2 == 0:
        raise ValueError("Simpson rule needs an odd node count >= 3")
    x = np.linspace(0.0, 1.0, n)
    w = np.ones(n)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    w *= (x[1] - x[0]) / 3.0
    return x, w


class TablePath:
    """One-parameter family s in [0,1] of length-1 tables with s-derivative.

    ``table_of_s`` builds the slice at s (cached); ``velocity_fn(s, q)``, when
    given, evaluates dgamma_s/ds(q) analytically, otherwise second-order
    finite differences in s with step ``ds`` are used (one-sided at the
    endpoints).
    """

    def __init__(self, table_of_s, velocity_fn=None, tag: str = "custom", ds: float = DEFAULT_DS):
        self._build = table_of_s
        self._velocity_fn = velocity_fn
        self.tag = tag
        self.ds = float(ds)
        self._cache: dict[float, TableCurve] = {}

    def table(self, s: float) -> TableCurve:
        s = float(s)
        hit = self._cache.get(s)
        if hit is None:
            hit = self._build(s)
            self._cache[s] = hit
        return hit

    def velocity(self, s: float, q):
        """dgamma_s/ds at fixed arc-length parameter q; shape q.shape + (2,)."""
        if self._velocity_fn is not None:
            return self._velocity_fn(s, q)
        h = self.ds
        if s < h:
            a, b, c = self.table(s), self.table(s + h), self.table(s + 2 * h)
            return (-3.0 * a.position(q) + 4.0 * b.position(q) - c.position(q)) / (2.0 * h)
        if s > 1.0 - h:
            a, b, c = self.table(s), self.table(s - h), self.table(s - 2 * h)
            return (3.0 * a.position(q) - 4.0 * b.position(q) + c.position(q)) / (2.0 * h)
        return (self.table(s + h).position(q) - self.table(s - h).position(q)) / (2.0 * h)

    def speed_max(self, s: float, q_nodes: int = 1024, refine: bool = True) -> float:
        """Grid max of ||velocity|| over q with one local refinement pass."""
        q = np.arange(q_nodes) / q_nodes
        mag = np.linalg.norm(self.velocity(s, q), axis=-1)
        best = float(mag.max())
        if refine:
            j = int(np.argmax(mag))
            local = q[j] + np.linspace(-1.0, 1.0, 17) / q_nodes
            mag2 = np.linalg.norm(self.velocity(s, local), axis=-1)
            best = max(best, float(mag2.max()))
        return best


def translation_path(table: TableCurve, v) -> TablePath:
    """gamma_s = gamma + s*v; the velocity field is constantly v."""
    v = np.asarray(v, dtype=float)

    def build(s):
        from .curves import rigid_motion

        return rigid_motion(table, 0.0, s * v)

    def vel(s, q):
        q = np.asarray(q, dtype=float)
        return np.broadcast_to(v, q.shape + (2,)).copy()

    return TablePath(build, vel, tag="translation")


def rigid_motion_path(table: TableCurve, angle: float, v=(0.0, 0.0)) -> TablePath:
    """Isometry path g_s(gamma), g_s = rotation by s*angle plus s*v; Hofer-null."""
    v = np.asarray(v, dtype=float)
    angle = float(angle)

    def build(s):
        from .curves import rigid_motion

        return rigid_motion(table, s * angle, s * v)

    def vel(s, q):
        pos = table.position(q)
        c, sn = np.cos(s * angle), np.sin(s * angle)
        rot = np.array([[c, -sn], [sn, c]])
        dr = angle * np.array([[-sn, -c], [c, -sn]])
        return pos @ dr.T + v

    return TablePath(build, vel, tag="rigid")


def support_interp_path(
    a: FourierSupportSpec,
    b: FourierSupportSpec,
    s_check: int = 64,
    theta_check: int = 1024,
) -> TablePath:
    """Linear interpolation of raw support functions, each slice renormalized.

    The renormalization factor tau(s) = 1/(2 pi c0(s)) is part of the path,
    and the velocity field is evaluated in closed form: with g the
    s-derivative of the normalized support function,

        dgamma_s/ds = g(theta) e_r + (g'(theta) - int_0^theta (g + g'')) e_t.

    Raises CurvatureNotPositive (with the failing s) when some slice leaves
    the positively curved class.
    """
    n = max(a.cos.size, b.cos.size)
    ca = np.pad(a.cos, (0, n - a.cos.size))
    sa = np.pad(a.sin, (0, n - a.sin.size))
    cb = np.pad(b.cos, (0, n - b.cos.size))
    sb = np.pad(b.sin, (0, n - b.sin.size))

    def raw(s):
        return FourierSupportSpec(
            (1 - s) * a.c0 + s * b.c0, (1 - s) * ca + s * cb, (1 - s) * sa + s * sb
        )

    theta = np.linspace(0.0, TWO_PI, theta_check, endpoint=False)
    for s in np.linspace(0.0, 1.0, s_check):
        spec = raw(s)
        if spec.c0 <= 0.0 or spec.rho(theta).min() <= CURVATURE_FLOOR:
            raise CurvatureNotPositive(f"interpolated support not convex at s={s:.6f}", where=s)

    def build(s):
        return FourierTable(raw(s).normalized())

    def vel(s, q):
        spec = raw(s)
        c0s = spec.c0
        dc0 = b.c0 - a.c0
        tau = 1.0 / (TWO_PI * c0s)
        dtau = -dc0 / (TWO_PI * c0s * c0s)
        g = FourierSupportSpec(
            dtau * spec.c0 + tau * dc0,
            dtau * spec.cos + tau * (cb - ca),
            dtau * spec.sin + tau * (sb - sa),
        )
        table = build(s)
        th = table.theta_of_q(q)
        basis = g._basis(th)
        gv = g.h(th, basis=basis)
        gp = g.h(th, deriv=1, basis=basis)
        gacc = g.arclength(th, basis=basis)
        e_r = np.stack([np.cos(th), np.sin(th)], axis=-1)
        e_t = np.stack([-np.sin(th), np.cos(th)], axis=-1)
        return gv[..., None] * e_r + (gp - gacc)[..., None] * e_t

    return TablePath(build, vel, tag="support_interp")


@dataclass
class NormalPerturbationPath:
    """Rescaled, arc-length reparametrized normal-perturbation path with its bound.

    ``bound`` is constant * (sup|f| + sup|f'|) where the constant is derived
    from the renormalization and reparametrization inequalities using only
    the curvature of the base table; it is recorded in ``constant``.
    """

    path: TablePath
    bound: float
    constant: float
    sup_f: float
    sup_df: float

    def __iter__(self):
        return iter((self.path, self.bound))


def normal_perturbation_path(
    table: TableCurve,
    f_samples,
    slices_check: int = 9,
    curve_samples: int = 513,
) -> NormalPerturbationPath:
    """Path gamma_s = alpha + s f n, renormalized to length 1 and reparametrized.

    ``f_samples``: N >= 256 uniform samples of a smooth 1-periodic function,
    interpolated spectrally.  Requires sup|f| * max-curvature <= 1/2 (the
    C^2-smallness hypothesis that keeps the renormalization well posed),
    else PerturbationTooLarge; per-slice positive curvature is checked on a
    grid, else CurvatureNotPositive.
    """
    from .curves import _TrigSeries

    f_samples = np.asarray(f_samples, dtype=float)
    if f_samples.size < 256:
        raise ValueError("need at least 256 samples of f")
    f = _TrigSeries(f_samples.astype(complex))
    dense = np.arange(4096) / 4096.0
    fv = np.real(f(dense))
    dfv = np.real(f(dense, deriv=1))
    sup_f = float(np.abs(fv).max())
    sup_df = float(np.abs(dfv).max())
    k_max = float(np.abs(table.curvature(dense[::2])).max())
    if sup_f * k_max > 0.5:
        raise PerturbationTooLarge(
            f"sup|f| * max curvature = {sup_f * k_max:.3f} exceeds 1/2; "
            "the renormalization estimates require a C^2-small perturbation"
        )

    def build(s):
        def raw(u):
            u = np.asarray(u, dtype=float)
            return table.position(u) + float(s) * np.real(f(u))[..., None] * table.normal(u)

        return SampledCurve.from_function(raw, samples=curve_samples, kind="reconstructed_samples")

    for s in np.linspace(0.0, 1.0, slices_check):
        slc = build(s)
        if slc.min_curvature <= 0.0:
            raise CurvatureNotPositive(
                f"perturbed slice loses convexity at s={s:.4f}", where=float(s)
            )

    constant = 2.0 + 6.4 * k_max
    bound = constant * (sup_f + sup_df)
    return NormalPerturbationPath(
        path=TablePath(build, tag="normal_perturbation"),
        bound=bound,
        constant=constant,
        sup_f=sup_f,
        sup_df=sup_df,
    )


# ---------------------------------------------------------------------------
# lengths
# ---------------------------------------------------------------------------


def path_geometric_length(
    path: TablePath, s_nodes: int = 65, q_nodes: int = 1024, with_error: bool = False
):
    """Simpson quadrature of max_q ||dgamma_s/ds|| over s in [0, 1].

    The q-sweep is a grid max with one refinement pass, so the integrand and
    hence the value approximate the true path length from below up to
    quadrature error; ``with_error`` also returns the Simpson doubling
    estimate |I_n - I_(n//2+1)|.
    """
    x, w = simpson_nodes(s_nodes)
    vals = np.array([path.speed_max(float(s), q_nodes) for s in x])
    full = float(vals @ w)
    if not with_error:
        return full
    xc, wc = simpson_nodes(s_nodes // 2 + 1)
    coarse = float(vals[::2] @ wc)
    return full, abs(full - coarse)


class HamiltonianField:
    """Evaluator of the generating Hamiltonian H_s(Q, P) of a table path."""

    GRAZING = 1e-6

    def __init__(self, path: TablePath):
        self.path = path

    def value_arrays(self, s: float, Q, P, seed=None, return_seed=False, q_frame=None, vel_Q=None):
        """Vectorized H_s on arrays; |P| <= 1 - 1e-6 required.

        ``seed`` warm-starts the inverse bounce solve (e.g. with the
        solution from a nearby s); ``return_seed`` also returns it.
        ``q_frame`` and ``vel_Q`` allow grid sweeps to reuse the frame and
        velocity at the Q samples.
        """
        Q = np.asarray(Q, dtype=float)
        P = np.asarray(P, dtype=float)
        if np.any(np.abs(P) > 1.0 - self.GRAZING):
            raise NearGrazing("Hamiltonian evaluation too close to the annulus boundary")
        table = self.path.table(s)
        # time reversal: the backward chord from Q at momentum -P lands on q_s
        qs, _, pos_Q, _, pos_qs, _ = forward_chord(
            table, Q, -P, seed=seed, start_frame=q_frame
        )
        d = pos_Q - pos_qs
        u = d / np.linalg.norm(d, axis=-1, keepdims=True)
        if vel_Q is None:
            vel_Q = self.path.velocity(s, Q)
        dv = self.path.velocity(s, qs) - vel_Q
        H = np.sum(u * dv, axis=-1)
        if return_seed:
            return H, qs
        return H

    def value(self, s: float, Q: float, P: float) -> float:
        return float(self.value_arrays(s, np.asarray(Q), np.asarray(P)))


def hamiltonian_value(hf: HamiltonianField, s: float, Q: float, P: float) -> float:
    """H_s(Q,P) = -dF_s/ds(q_s(Q,P), Q), evaluated through the velocity field."""
    return hf.value(s, Q, P)


def _extreme_refine(hf: HamiltonianField, s, Qg, Pg, H, pmax, sign):
    """One local refinement pass around the grid extreme of sign*H."""
    flat = int(np.argmax(sign * H))
    i, j = np.unravel_index(flat, H.shape)
    dq = Qg[1] - Qg[0] if len(Qg) > 1 else 0.5
    dp = Pg[1] - Pg[0] if len(Pg) > 1 else 0.1
    ql = Qg[i] + np.linspace(-dq, dq, 9)
    pl = np.clip(Pg[j] + np.linspace(-dp, dp, 9), -pmax, pmax)
    QQ, PP = np.meshgrid(ql, pl, indexing="ij")
    Hl = hf.value_arrays(s, QQ.ravel(), PP.ravel())
    return float(np.max(sign * Hl) * sign)


def hofer_oscillation(
    hf: HamiltonianField, s: float, q_grid: int = 256, p_grid: int = 127, seed=None, return_seed=False
):
    """max H_s - min H_s over the (Q, P) grid, extremes locally refined."""
    pmax = 1.0 - 1.0 / 128.0
    Qg = np.arange(q_grid) / q_grid
    Pg = np.linspace(-pmax, pmax, p_grid)
    table = hf.path.table(s)
    pos_g, tan_g = table.frame(Qg)
    vel_g = hf.path.velocity(s, Qg)
    QQ, PP = np.meshgrid(Qg, Pg, indexing="ij")
    rep = (
        np.repeat(pos_g, p_grid, axis=0),
        np.repeat(tan_g, p_grid, axis=0),
    )
    H, qs = hf.value_arrays(
        s,
        QQ.ravel(),
        PP.ravel(),
        seed=seed,
        return_seed=True,
        q_frame=rep,
        vel_Q=np.repeat(vel_g, p_grid, axis=0),
    )
    H = H.reshape(q_grid, p_grid)
    hi = max(float(H.max()), _extreme_refine(hf, s, Qg, Pg, H, pmax, +1.0))
    lo = min(float(H.min()), _extreme_refine(hf, s, Qg, Pg, H, pmax, -1.0))
    if return_seed:
        return hi - lo, qs
    return hi - lo


def hofer_length(
    path: TablePath, s_nodes: int = 17, q_grid: int = 256, p_grid: int = 127
) -> float:
    """Simpson quadrature of the Hamiltonian oscillation along the path.

    Approximates the Hofer length of this particular path (an upper bound
    for the Hofer distance of its endpoints, up to grid error).  Consecutive
    s-nodes warm-start each other's inverse solves.
    """
    hf = HamiltonianField(path)
    x, w = simpson_nodes(s_nodes)
    vals = np.empty(s_nodes)
    seed = None
    for i, s in enumerate(x):
        vals[i], seed = hofer_oscillation(hf, float(s), q_grid, p_grid, seed=seed, return_seed=True)
    return float(vals @ w)


def generating_rate_integral(path: TablePath, s_nodes: int = 33, pair_grid: int = 256) -> float:
    """int_0^1 sup_(q,Q) |dF_s/ds| ds over an off-diagonal pair grid."""
    x, w = simpson_nodes(s_nodes)
    qg = np.arange(pair_grid) / pair_grid
    vals = []
    for s in x:
        table = path.table(float(s))
        pos = table.position(qg)
        vel = path.velocity(float(s), qg)
        d = pos[None, :, :] - pos[:, None, :]
        dist = np.linalg.norm(d, axis=-1)
        np.fill_diagonal(dist, 1.0)
        u = d / dist[..., None]
        dv = vel[None, :, :] - vel[:, None, :]
        rate = np.abs(np.sum(u * dv, axis=-1))
        np.fill_diagonal(rate, 0.0)
        vals.append(float(rate.max()))
    return float(np.asarray(vals) @ w)


# ---------------------------------------------------------------------------
# certificates
# ---------------------------------------------------------------------------


@dataclass
class ComparisonCertificate:
    """Numerical witness for the Hofer-vs-geometric length comparison."""

    hofer: float
    geometric: float
    ratio: float
    passed: bool
    slack: float = 1e-2
    grids: dict = field(default_factory=dict)

    def to_json(self):
        return {
            "l_H": self.hofer,
            "l_B": self.geometric,
            "ratio": self.ratio,
            "pass": bool(self.passed),
            "slack": self.slack,
            "grids": self.grids,
        }


def verify_comparison(
    path: TablePath,
    s_nodes: int = 17,
    q_grid: int = 256,
    p_grid: int = 127,
    lb_s_nodes: int = 65,
    lb_q_nodes: int = 1024,
    slack: float = 1e-2,
) -> ComparisonCertificate:
    """Check l_H <= 4 l_B (1 + slack) for the given path."""
    l_h = hofer_length(path, s_nodes, q_grid, p_grid)
    l_b = path_geometric_length(path, lb_s_nodes, lb_q_nodes)
    if l_b == 0.0:
        ratio = 0.0 if l_h <= 1e-12 else float("inf")
    else:
        ratio = l_h / l_b
    return ComparisonCertificate(
        hofer=l_h,
        geometric=l_b,
        ratio=ratio,
        passed=bool(ratio <= 4.0 * (1.0 + slack)),
        slack=slack,
        grids={"s_nodes": s_nodes, "q_grid": q_grid, "p_grid": p_grid, "lb_s_nodes": lb_s_nodes},
    )


def hamilton_jacobi_residual(
    path: TablePath,
    s: float,
    points,
    h: float = 1e-4,
    grad_step: float = 1e-5,
    per_point: bool = False,
):
    """Residual of d psi_s/ds = (dH/dP, -dH/dQ) o psi_s at sample points.

    The left side is a central difference of the lifted bounce map in s, the
    right side the symplectic gradient of the Hamiltonian by central
    differences; both are independent discretizations, so the residual
    certifies the Hamilton-Jacobi identity to O(h^2).
    """
    pts = np.asarray(
        [(pt.q, pt.p) if hasattr(pt, "q") else tuple(pt) for pt in points], dtype=float
    )
    q, p = pts[:, 0], pts[:, 1]
    hf = HamiltonianField(path)

    Qp, Pp = forward_arrays(path.table(s + h), q, p)
    Qm, Pm = forward_arrays(path.table(s - h), q, p)
    flow = np.stack([(Qp - Qm) / (2 * h), (Pp - Pm) / (2 * h)], axis=-1)

    Q0, P0 = forward_arrays(path.table(s), q, p)
    dH_dQ = (
        hf.value_arrays(s, Q0 + grad_step, P0) - hf.value_arrays(s, Q0 - grad_step, P0)
    ) / (2 * grad_step)
    dH_dP = (
        hf.value_arrays(s, Q0, P0 + grad_step) - hf.value_arrays(s, Q0, P0 - grad_step)
    ) / (2 * grad_step)
    sym = np.stack([dH_dP, -dH_dQ], axis=-1)

    res = np.linalg.norm(flow - sym, axis=-1)
    if per_point:
        return float(res.max()), res
    return float(res.max())


@dataclass
class DistanceBracket:
    """Certified two-sided estimate: lower <= geometric distance <= upper."""

    lower: float
    upper: float

    def to_json(self):
        return {"lower": self.lower, "upper": self.upper}


def bracket_dB(path: TablePath, s_nodes: int = 65, q_nodes: int = 1024) -> DistanceBracket:
    """C^0 distance of the endpoints below, path length above."""
    lower = c0_distance(path.table(0.0), path.table(1.0))
    upper = path_geometric_length(path, s_nodes, q_nodes)
    if lower > upper * (1.0 + 1e-6) + 1e-15:
        raise BracketInverted(f"lower {lower!r} exceeds upper {upper!r}")
    return DistanceBracket(lower=lower, upper=upper)
