"""Smoothing convex polygons into families of convex tables.

A polygon corner locally reads as the graph of a|x| in corner coordinates.
Replacing it by a smooth convex profile f (equal to a|x| outside [-w, w])
at every corner, scaled by s, yields a family gamma_s of smooth convex
curves that coincide with the polygon boundary outside shrinking corner
neighborhoods.  gamma_s carries the constant-speed parametrization with
speed L(s) = length(gamma_s); the normalized family is the homothety
lambda(s) gamma_s with lambda = 1/L about the polygon centroid, which is
then arc-length parametrized by construction.

L(s) is affine: L(s) = L_K - s * sum(delta_i), with delta_i the per-corner
length defect of the profile graph against the corner graph.  The module
also certifies the Cauchy behaviour of the family as s -> 0 and the O(s)
independence of the profile choice.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import PchipInterpolator

from .curves import TWO_PI, FourierSupportSpec, PolygonSpec, TableCurve, build_fourier_table, shift_mark
from .errors import InvalidWidth, MarkInCorner
from .homotopy import TablePath, simpson_nodes

# ---------------------------------------------------------------------------
# the standard mollifier and its integrals
# ---------------------------------------------------------------------------

_MOLLIFIER_GRID = 16385


class _Mollifier:
    """Standard bump exp(-1/(1-x^2)) on (-1,1), normalized to unit mass.

    Tabulates Phi(u) = int_-1^u rho and Psi(u) = int_-1^u t rho(t) dt with a
    fourth-order cumulative rule; both enter the closed form of the
    convolution (a|.|) * rho_w.
    """

    def __init__(self, n=_MOLLIFIER_GRID):
        x = np.linspace(-1.0, 1.0, n)
        with np.errstate(divide="ignore", over="ignore"):
            vals = np.where(np.abs(x) < 1.0, np.exp(-1.0 / np.maximum(1.0 - x * x, 1e-300)), 0.0)
        phi = _cumulative(x, vals)
        mass = phi[-1]
        vals /= mass
        phi /= mass
        psi = _cumulative(x, x * vals)
        self.x = x
        self.density = PchipInterpolator(x, vals)
        self.phi = PchipInterpolator(x, phi)
        self.psi = PchipInterpolator(x, psi)
        # first absolute moment; Psi(1) = 0 by symmetry
        self.abs_moment = float(-2.0 * self.psi(0.0))


def _cumulative(x, y):
    """Fourth-order cumulative integral on a uniform grid."""
    h = x[1] - x[0]
    inc = h / 12.0 * (5.0 * y[:-1] + 8.0 * y[1:] - np.append(y[2:], y[-2]))
    inc[-1] = h / 12.0 * (-y[-3] + 8.0 * y[-2] + 5.0 * y[-1])
    return np.concatenate([[0.0], np.cumsum(inc)])


_mollifier: _Mollifier | None = None


def standard_mollifier() -> _Mollifier:
    global _mollifier
    if _mollifier is None:
        _mollifier = _Mollifier()
    return _mollifier


# ---------------------------------------------------------------------------
# corner profiles
# ---------------------------------------------------------------------------

_ARC_GRID = 2049


@dataclass
class CornerProfile:
    """Smooth convex even function equal to slope*|x| for |x| >= width."""

    slope: float
    width: float
    f: object
    df: object
    ddf: object
    _arc: tuple | None = field(default=None, repr=False)

    def _tables(self):
        if self._arc is None:
            xi = np.linspace(-self.width, self.width, _ARC_GRID)
            speed = np.sqrt(1.0 + self.df(xi) ** 2)
            arc = _cumulative(xi, speed)
            self._arc = (xi, arc, PchipInterpolator(arc, xi))
        return self._arc

    @property
    def arc_length(self) -> float:
        """Length of the profile graph over [-width, width]."""
        return float(self._tables()[1][-1])

    @property
    def delta(self) -> float:
        """Length defect against the corner graph slope*|x| on [-width, width]."""
        return 2.0 * self.width * np.hypot(1.0, self.slope) - self.arc_length

    def xi_of_arc(self, arc):
        """Invert the graph arc length measured from x = -width."""
        xi_grid, arc_grid, inv = self._tables()
        xi = np.clip(inv(np.clip(arc, 0.0, arc_grid[-1])), -self.width, self.width)
        for _ in range(2):
            resid = np.interp(xi, xi_grid, arc_grid) - arc
            xi = np.clip(xi - resid / np.sqrt(1.0 + self.df(xi) ** 2), -self.width, self.width)
        return xi

    def blend(self, other: "CornerProfile", t: float) -> "CornerProfile":
        """Pointwise convex combination (1-t) self + t other; slopes must match."""
        if abs(self.slope - other.slope) > 1e-12:
            raise ValueError("blending profiles with different slopes")
        t = float(t)
        return CornerProfile(
            slope=self.slope,
            width=max(self.width, other.width),
            f=lambda x: (1 - t) * self.f(x) + t * other.f(x),
            df=lambda x: (1 - t) * self.df(x) + t * other.df(x),
            ddf=lambda x: (1 - t) * self.ddf(x) + t * other.ddf(x),
        )


def make_profile(slope: float, width: float) -> CornerProfile:
    """Corner profile by mollification: f = (slope*|.|) convolved with rho_width.

    Convolving the corner graph with the standard compactly supported even
    mollifier gives a smooth convex function that matches slope*|x| exactly
    for |x| >= width, with f(0) = slope*width*m0 (m0 the mollifier's first
    absolute moment); everything evaluates in closed form through the
    tabulated mollifier integrals.
    """
    if width <= 0.0:
        raise InvalidWidth(f"profile width must be positive, got {width!r}")
    a = float(slope)
    w = float(width)
    if a <= 0.0:
        raise ValueError("corner slope must be positive")
    m = standard_mollifier()

    def f(x):
        x = np.asarray(x, dtype=float)
        ax = np.abs(x)
        u = np.clip(ax / w, 0.0, 1.0)
        inner = a * (ax * (2.0 * m.phi(u) - 1.0) - 2.0 * w * m.psi(u))
        return np.where(ax >= w, a * ax, inner)

    def df(x):
        x = np.asarray(x, dtype=float)
        u = np.clip(np.abs(x) / w, 0.0, 1.0)
        inner = a * (2.0 * m.phi(u) - 1.0)
        return np.sign(x) * np.where(np.abs(x) >= w, a, inner)

    def ddf(x):
        x = np.asarray(x, dtype=float)
        u = np.abs(x) / w
        return np.where(u >= 1.0, 0.0, 2.0 * a * m.density(np.clip(u, 0.0, 1.0)) / w)

    return CornerProfile(slope=a, width=w, f=f, df=df, ddf=ddf)


def corner_slope(e_in, e_out) -> float:
    """Graph slope of a corner with incoming/outgoing unit edge directions.

    The interior angle theta satisfies slope = tan((pi - theta)/2).
    """
    num = np.linalg.norm(np.asarray(e_out) - np.asarray(e_in))
    den = np.linalg.norm(np.asarray(e_out) + np.asarray(e_in))
    return float(num / den)


# ---------------------------------------------------------------------------
# the smoothing family
# ---------------------------------------------------------------------------


class _FamilyCurve(TableCurve):
    """Normalized slice: homothety of the constant-speed gamma_s to length 1."""

    kind = "smoothed_polygon"
    strictly_convex = False

    def __init__(self, family: "SmoothingFamily", s: float):
        self.family = family
        self.s = float(s)

    def position(self, q):
        fam = self.family
        pos = fam.raw_position(self.s, q)
        lam = 1.0 / fam.length_at(self.s)
        return fam.center + lam * (pos - fam.center)

    def tangent(self, q):
        return self.family.raw_tangent(self.s, q)

    def frame(self, q):
        return self.position(q), self.tangent(q)

    def curvature(self, q):
        return self.family.raw_curvature(self.s, q) * self.family.length_at(self.s)


class SmoothingFamily:
    """Polygon plus one corner profile per vertex, generating gamma_s, s in (0, 1]."""

    def __init__(self, polygon: PolygonSpec, profiles: list[CornerProfile]):
        self.polygon = polygon
        self.profiles = profiles
        V = polygon.vertices
        n = len(V)
        if len(profiles) != n:
            raise ValueError("need one profile per vertex")
        edges = np.roll(V, -1, axis=0) - V
        self.edge_len = np.hypot(edges[:, 0], edges[:, 1])
        self.edge_dir = edges / self.edge_len[:, None]
        # corner frames: x along the bisector of the edge directions, y inward
        slopes = []
        self.x_hat = np.empty_like(V)
        self.y_hat = np.empty_like(V)
        for i in range(n):
            e_in = self.edge_dir[i - 1]
            e_out = self.edge_dir[i]
            a = corner_slope(e_in, e_out)
            if abs(a - profiles[i].slope) > 1e-9:
                raise ValueError(
                    f"profile slope {profiles[i].slope!r} does not match corner {i} slope {a!r}"
                )
            slopes.append(a)
            xh = e_in + e_out
            xh /= np.linalg.norm(xh)
            yh = e_out - e_in
            yh /= np.linalg.norm(yh)
            self.x_hat[i] = xh
            self.y_hat[i] = yh
        self.slopes = np.array(slopes)
        self.widths = np.array([p.width for p in profiles])
        # distance along each adjacent edge consumed by the corner at s = 1
        self.cut = self.widths * np.hypot(1.0, self.slopes)
        for i in range(n):
            adj = min(self.edge_len[i - 1], self.edge_len[i])
            if self.widths[i] > adj / 2.0:
                raise InvalidWidth(f"width {self.widths[i]!r} exceeds half the shortest edge at corner {i}")
        margin = 1.0 + 1e-3
        for i in range(n):
            if margin * (self.cut[i] + self.cut[(i + 1) % n]) >= self.edge_len[i]:
                raise InvalidWidth(f"corner neighborhoods collide on edge {i}")
        self.deltas = np.array([p.delta for p in profiles])
        self.total_delta = float(self.deltas.sum())
        self.base_length = float(self.edge_len.sum())
        self.profile_arcs = np.array([p.arc_length for p in profiles])
        self.center = V.mean(axis=0)
        # locate the mark on the polygon boundary
        cums = np.concatenate([[0.0], np.cumsum(self.edge_len)])
        t = polygon.mark * self.base_length
        j = int(np.clip(np.searchsorted(cums, t, side="right") - 1, 0, n - 1))
        self.mark_edge = j
        self.mark_offset = float(t - cums[j])
        if self.mark_offset <= self.cut[j] or self.mark_offset >= self.edge_len[j] - self.cut[(j + 1) % n]:
            raise MarkInCorner(
                "marked point lies inside a corner neighborhood at s = 1; "
                "use a shifted mark and pass to the limit"
            )
        self._curves: dict[float, _FamilyCurve] = {}

    @property
    def n_corners(self) -> int:
        return len(self.polygon.vertices)

    def length_at(self, s: float) -> float:
        """L(s) = L_K - s * sum(delta_i), affine in the scale."""
        return self.base_length - s * self.total_delta

    def scale_factor(self, s: float) -> float:
        return 1.0 / self.length_at(s)

    # piece layout: [corner 0, edge 0, corner 1, edge 1, ...] with corner i
    # covering vertex i from M_i (on edge i-1) to N_i (on edge i)
    def _piece_lengths(self, s: float):
        n = self.n_corners
        lengths = np.empty(2 * n)
        lengths[0::2] = s * self.profile_arcs
        cut_next = np.roll(self.cut, -1)
        lengths[1::2] = self.edge_len - s * (self.cut + cut_next)
        return lengths

    def _mark_arc(self, s: float) -> float:
        """Arc position of the mark from the cycle start (start of corner 0)."""
        j = self.mark_edge
        lengths = self._piece_lengths(s)
        return float(lengths[: 2 * j + 1].sum() + self.mark_offset - s * self.cut[j])

    def _locate(self, s, q):
        L = self.length_at(s)
        lengths = self._piece_lengths(s)
        starts = np.concatenate([[0.0], np.cumsum(lengths)])
        arc = np.mod(np.mod(np.asarray(q, dtype=float), 1.0) * L + self._mark_arc(s), L)
        idx = np.clip(np.searchsorted(starts, arc, side="right") - 1, 0, 2 * self.n_corners - 1)
        return idx, arc - starts[idx]

    def _eval(self, s, q, want):
        """Vectorized piecewise evaluation; want in {'pos', 'tan', 'kappa'}."""
        q = np.asarray(q, dtype=float)
        shape = q.shape
        qf = np.atleast_1d(q).ravel()
        idx, loc = self._locate(s, qf)
        if want == "kappa":
            out = np.zeros(qf.size)
        else:
            out = np.empty((qf.size, 2))
        V = self.polygon.vertices
        for piece in np.unique(idx):
            m = idx == piece
            i = piece // 2
            if piece % 2 == 1:
                if want == "pos":
                    start = V[i] + s * self.cut[i] * self.edge_dir[i]
                    out[m] = start + loc[m, None] * self.edge_dir[i]
                elif want == "tan":
                    out[m] = self.edge_dir[i]
                continue
            prof = self.profiles[i]
            xi = prof.xi_of_arc(loc[m] / s)
            if want == "kappa":
                out[m] = prof.ddf(xi) / (s * (1.0 + prof.df(xi) ** 2) ** 1.5)
                continue
            if want == "pos":
                x = s * xi
                y = s * prof.f(xi)
                out[m] = V[i] + x[:, None] * self.x_hat[i] + y[:, None] * self.y_hat[i]
            else:
                fp = prof.df(xi)
                norm = np.sqrt(1.0 + fp * fp)
                out[m] = (self.x_hat[i][None, :] + fp[:, None] * self.y_hat[i][None, :]) / norm[:, None]
        if want == "kappa":
            return out.reshape(shape)
        return out.reshape(shape + (2,))

    def raw_position(self, s, q):
        """gamma_s(q): constant-speed parametrization, speed L(s), mark at S."""
        return self._eval(s, q, "pos")

    def raw_tangent(self, s, q):
        return self._eval(s, q, "tan")

    def raw_curvature(self, s, q):
        return self._eval(s, q, "kappa")

    def curve(self, s: float) -> TableCurve:
        """Normalized slice: length-1, arc-length parametrized, convex."""
        if not 0.0 < s <= 1.0:
            raise ValueError("scale must lie in (0, 1]")
        return self._curve_unchecked(s)

    def _curve_unchecked(self, s: float) -> TableCurve:
        s = float(s)
        hit = self._curves.get(s)
        if hit is None:
            hit = _FamilyCurve(self, s)
            self._curves[s] = hit
        return hit

    def edge_point_parameter(self, s: float, edge: int, offset: float) -> float:
        """Parameter of the plane point at ``offset`` along edge ``edge``.

        The point must lie outside the corner neighborhoods at scale s.
        """
        n = self.n_corners
        if not s * self.cut[edge] < offset < self.edge_len[edge] - s * self.cut[(edge + 1) % n]:
            raise ValueError("point is inside a corner neighborhood")
        lengths = self._piece_lengths(s)
        arc = lengths[: 2 * edge + 1].sum() + offset - s * self.cut[edge]
        L = self.length_at(s)
        return float(np.mod(arc - self._mark_arc(s), L) / L)

    def edge_speed_bound(self) -> float:
        """Uniform on-edge bound 2 L_K sum(delta) / (L_K - sum(delta))."""
        return 2.0 * self.base_length * self.total_delta / (self.base_length - self.total_delta)


def family_from_polygon(
    polygon: PolygonSpec,
    width: float | None = None,
    profiles: list[CornerProfile] | None = None,
) -> SmoothingFamily:
    """Build the smoothing family; profiles default to mollified corners.

    The default width is min(0.01, shortest edge / 4), which keeps the
    corner neighborhoods disjoint for every s <= 1.
    """
    V = polygon.vertices
    edges = np.roll(V, -1, axis=0) - V
    lens = np.hypot(edges[:, 0], edges[:, 1])
    dirs = edges / lens[:, None]
    if profiles is None:
        if width is None:
            width = min(0.01, float(lens.min()) / 4.0)
        if width <= 0.0:
            raise InvalidWidth(f"profile width must be positive, got {width!r}")
        profiles = [
            make_profile(corner_slope(dirs[i - 1], dirs[i]), width) for i in range(len(V))
        ]
    return SmoothingFamily(polygon, profiles)


# ---------------------------------------------------------------------------
# speeds, tails during s -> 0, profile independence
# ---------------------------------------------------------------------------


def family_speed(fam: SmoothingFamily, s: float, q_nodes: int = 4096) -> float:
    """max_q ||d(normalized gamma_s)/ds|| by arc-length-matched central differences."""
    h = min(1e-4, s / 10.0)
    q = np.arange(q_nodes) / q_nodes
    a = fam._curve_unchecked(s + h).position(q)
    b = fam._curve_unchecked(s - h).position(q)
    return float(np.linalg.norm(a - b, axis=-1).max() / (2.0 * h))


@dataclass
class CauchyTailReport:
    """Tail integral of the family speed on a geometric scale grid.

    ``partial_sums`` are the trapezoid sums down to each node;
    ``corrected`` adds the first-order remainder estimate s_k * speed(s_k);
    ``value`` is the final corrected sum.
    """

    nodes: np.ndarray
    speeds: np.ndarray
    increments: np.ndarray
    partial_sums: np.ndarray
    corrected: np.ndarray
    value: float

    def to_json(self):
        return {
            "nodes": self.nodes.tolist(),
            "speeds": self.speeds.tolist(),
            "partial_sums": self.partial_sums.tolist(),
            "corrected": self.corrected.tolist(),
            "value": self.value,
        }


def cauchy_tail(fam: SmoothingFamily, s0: float, levels: int = 8, q_nodes: int = 4096) -> CauchyTailReport:
    """Approximate int_0^s0 family_speed ds on the dyadic grid s0 * 2^-k."""
    nodes = s0 * 0.5 ** np.arange(levels + 1)
    speeds = np.array([family_speed(fam, float(s), q_nodes) for s in nodes])
    inc = 0.5 * (speeds[:-1] + speeds[1:]) * (nodes[:-1] - nodes[1:])
    partial = np.concatenate([[0.0], np.cumsum(inc)])
    corrected = partial + nodes * speeds
    return CauchyTailReport(
        nodes=nodes,
        speeds=speeds,
        increments=inc,
        partial_sums=partial,
        corrected=corrected,
        value=float(corrected[-1]),
    )


def _family_with_blend(base: SmoothingFamily, other: SmoothingFamily, t: float) -> SmoothingFamily:
    profiles = [p.blend(q, t) for p, q in zip(base.profiles, other.profiles)]
    return SmoothingFamily(base.polygon, profiles)


def profile_independence_gap(
    fam_a: SmoothingFamily,
    fam_b: SmoothingFamily,
    s: float,
    t_nodes: int = 17,
    q_nodes: int = 4096,
) -> float:
    """int_0^1 max_q ||d gamma(t) / dt|| dt across the monotone profile blend.

    ``t`` interpolates the corner profiles of the two families (pointwise
    ordered; families are swapped if needed so the lower one comes first).
    The value is O(s) as s -> 0, which `independence_slope` certifies.
    """
    if fam_a.polygon is not fam_b.polygon and not np.allclose(
        fam_a.polygon.vertices, fam_b.polygon.vertices
    ):
        raise ValueError("families must share the polygon")
    xs = np.linspace(-1.0, 1.0, 257)
    order = []
    for pa, pb in zip(fam_a.profiles, fam_b.profiles):
        grid = xs * max(pa.width, pb.width)
        d = pb.f(grid) - pa.f(grid)
        if np.all(d >= -1e-14):
            order.append(+1)
        elif np.all(d <= 1e-14):
            order.append(-1)
        else:
            raise ValueError("corner profiles are not pointwise ordered")
    if all(o <= 0 for o in order):
        fam_a, fam_b = fam_b, fam_a
    elif not all(o >= 0 for o in order):
        raise ValueError("profile ordering differs between corners")

    tq, tw = simpson_nodes(t_nodes)
    q = np.arange(q_nodes) / q_nodes
    h = 1.0 / (4.0 * (t_nodes - 1))

    def blend_positions(t):
        return _family_with_blend(fam_a, fam_b, t)._curve_unchecked(s).position(q)

    total = 0.0
    for t, w in zip(tq, tw):
        if t < h:
            d = (
                -3.0 * blend_positions(t)
                + 4.0 * blend_positions(t + h)
                - blend_positions(t + 2 * h)
            ) / (2 * h)
        elif t > 1.0 - h:
            d = (
                3.0 * blend_positions(t)
                - 4.0 * blend_positions(t - h)
                + blend_positions(t - 2 * h)
            ) / (2 * h)
        else:
            d = (blend_positions(t + h) - blend_positions(t - h)) / (2 * h)
        total += w * float(np.linalg.norm(d, axis=-1).max())
    return total


def independence_slope(
    fam_a: SmoothingFamily,
    fam_b: SmoothingFamily,
    scales=(0.25, 0.125, 0.0625, 0.03125, 0.015625, 0.0078125),
    t_nodes: int = 17,
    q_nodes: int = 4096,
):
    """Log-log slope of the independence gap over the scale sweep."""
    scales = np.asarray(scales, dtype=float)
    gaps = np.array([profile_independence_gap(fam_a, fam_b, float(s), t_nodes, q_nodes) for s in scales])
    slope = float(np.polyfit(np.log(scales), np.log(gaps), 1)[0])
    return slope, gaps


def restricted_path(fam: SmoothingFamily, s_lo: float, s_hi: float) -> TablePath:
    """The family restricted to [s_lo, s_hi], reparametrized to [0, 1]."""
    if not 0.0 < s_lo < s_hi <= 1.0:
        raise ValueError("need 0 < s_lo < s_hi <= 1")

    def build(u):
        return fam._curve_unchecked(s_lo + u * (s_hi - s_lo))

    return TablePath(build, tag="smoothing_restriction", ds=1e-4)


# ---------------------------------------------------------------------------
# lifting a merely convex slice into the strictly convex class
# ---------------------------------------------------------------------------


def _support_samples(curve: TableCurve, center, n_theta: int = 2048, n_q: int = 8192):
    """Support function of the curve about ``center`` on a uniform angle grid."""
    q = np.arange(n_q) / n_q
    pts = curve.position(q) - center
    theta = TWO_PI * np.arange(n_theta) / n_theta
    h = np.empty(n_theta)
    block = 256
    for start in range(0, n_theta, block):
        e = np.stack([np.cos(theta[start : start + block]), np.sin(theta[start : start + block])], axis=-1)
        proj = e @ pts.T
        j = np.argmax(proj, axis=1)
        rows = np.arange(proj.shape[0])
        # parabolic refinement through the three neighboring samples
        y0 = proj[rows, (j - 1) % n_q]
        y1 = proj[rows, j]
        y2 = proj[rows, (j + 1) % n_q]
        denom = np.maximum(np.abs(y0 - 2 * y1 + y2), 1e-30)
        corr = np.where(denom > 1e-28, (y0 - y2) ** 2 / (8 * denom), 0.0)
        h[start : start + block] = y1 + corr
    return theta, h


def _jackson_coefficients(order: int, n: int):
    """Fourier coefficients of the (nonnegative) Jackson kernel of the given order."""
    phi = TWO_PI * np.arange(n) / n
    small = 1e-9
    x = np.where(np.abs(np.sin(phi / 2.0)) < small, small, np.sin(phi / 2.0))
    kern = (np.sin(order * phi / 2.0) / x) ** 4
    kern[0] = float(order) ** 4
    coef = np.fft.fft(kern)
    return np.real(coef) / np.real(coef[0])


def positive_curvature_lift(fam: SmoothingFamily, s: float, eps: float) -> TableCurve:
    """Round a normalized slice into the strictly convex class.

    The slice's support function is sampled, smoothed by a nonnegative
    Jackson kernel (keeping the curvature measure nonnegative), and a disc
    of radius eps/2 is added before renormalizing to length 1, giving a
    radius-of-curvature floor of about eps/2 / (1 + pi eps).  The C^0
    distance to the slice stays below 2 eps; eps = 0 returns the slice
    unchanged.
    """
    curve = fam._curve_unchecked(s)
    if eps == 0.0:
        return curve
    if eps < 0.0:
        raise ValueError("eps must be nonnegative")
    center = fam.center
    n_theta = 2048
    theta, h = _support_samples(curve, center, n_theta=n_theta)
    order = int(min(420, max(48, 0.9 / eps)))
    jack = _jackson_coefficients(order, n_theta)
    coef = np.fft.fft(h) / n_theta * jack
    keep = 2 * order
    c0 = float(np.real(coef[0])) + eps / 2.0
    k = np.arange(1, keep + 1)
    cos = 2.0 * np.real(coef[1 : keep + 1])
    sin = -2.0 * np.imag(coef[1 : keep + 1])
    built = build_fourier_table(FourierSupportSpec(c0, cos, sin))
    # the built table lives about the origin in the support frame; move it back
    from .curves import rigid_motion

    table = rigid_motion(built, 0.0, center)
    # re-anchor the mark at the point nearest the slice's marked point
    target = curve.position(0.0)
    grid = np.arange(4096) / 4096
    gaps = np.linalg.norm(table.position(grid) - target, axis=-1)
    j = int(np.argmin(gaps))
    local = grid[j] + np.linspace(-1, 1, 65) / 4096
    gaps2 = np.linalg.norm(table.position(local) - target, axis=-1)
    r = float(local[int(np.argmin(gaps2))])
    return shift_mark(table, r)
