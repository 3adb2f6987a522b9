"""Billiard tables: closed convex plane curves of length 1 in arc-length parameter.

Every table is parametrized by q in [0,1) with the marked point at q = 0,
counterclockwise orientation and unit-speed parametrization.  Concrete
representations:

* ``DiscTable`` -- the round table of radius 1/(2*pi), all queries closed form.
* ``FourierTable`` -- built from a trigonometric support function h(theta);
  positions, tangents, curvature and the cumulative arc length are all exact
  (the arc-length inversion is a guarded Newton solve on the closed-form
  cumulative integral).
* ``SampledCurve`` -- spectral (trigonometric-interpolation) representation of
  a smooth closed curve given by samples or a callable; used for perturbed
  and reconstructed tables.
* smoothed polygon boundaries live in :mod:`hoferbilliards.smoothing`.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._solve import newton_bisect
from .errors import CurvatureNotPositive

TWO_PI = 2.0 * np.pi

# Radius-of-curvature floor separating strictly convex tables from the
# merely convex ones (flat edges allowed).
CURVATURE_FLOOR = 1e-8


def rotate_cw(v):
    """Rotate plane vectors by -90 degrees: (x, y) -> (y, -x), last axis."""
    out = np.empty_like(v)
    out[..., 0] = v[..., 1]
    out[..., 1] = -v[..., 0]
    return out


def circ_dist(a, b):
    """Distance on R/Z."""
    d = np.mod(np.asarray(a) - np.asarray(b), 1.0)
    return np.minimum(d, 1.0 - d)


class TableCurve:
    """Abstract closed convex curve of total length 1.

    position(q) is 1-periodic, tangent(q) is the unit derivative and
    curvature(q) >= 0 is the signed curvature (counterclockwise).
    ``strictly_convex`` marks membership in the class accepted by the
    billiard ball map.
    """

    kind = "abstract"
    strictly_convex = False
    length = 1.0

    def position(self, q):
        raise NotImplementedError

    def tangent(self, q):
        raise NotImplementedError

    def curvature(self, q):
        raise NotImplementedError

    def normal(self, q):
        """Outward unit normal (tangent rotated by -90 degrees)."""
        return rotate_cw(self.tangent(q))

    def frame(self, q):
        """(position, tangent) in one call; subclasses fuse the inversion."""
        return self.position(q), self.tangent(q)

    def marked_point(self):
        return self.position(0.0)


class DiscTable(TableCurve):
    """Circle of radius 1/(2*pi) centered at the origin, marked at angle 0."""

    kind = "disc"
    strictly_convex = True
    radius = 1.0 / TWO_PI

    @property
    def spec(self):
        """Support-function view of the disc (constant h = radius)."""
        return FourierSupportSpec(self.radius)

    def position(self, q):
        ang = TWO_PI * np.asarray(q, dtype=float)
        return self.radius * np.stack([np.cos(ang), np.sin(ang)], axis=-1)

    def tangent(self, q):
        ang = TWO_PI * np.asarray(q, dtype=float)
        return np.stack([-np.sin(ang), np.cos(ang)], axis=-1)

    def curvature(self, q):
        return np.full(np.shape(np.asarray(q, dtype=float)), TWO_PI)

    def frame(self, q):
        ang = TWO_PI * np.asarray(q, dtype=float)
        c, s = np.cos(ang), np.sin(ang)
        return self.radius * np.stack([c, s], axis=-1), np.stack([-s, c], axis=-1)


def disc_table() -> DiscTable:
    """The round table: boundary length 1, marked point at (1/(2*pi), 0)."""
    return DiscTable()


@dataclass
class FourierSupportSpec:
    """Support function h(theta) = c0 + sum_k (cos_k cos k theta + sin_k sin k theta).

    The radius of curvature of the associated convex body is h + h''; the
    spec is admissible when that stays positive.  First harmonics translate
    the body and do not affect curvature or length.
    """

    c0: float
    cos: np.ndarray = field(default_factory=lambda: np.zeros(0))
    sin: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def __post_init__(self):
        self.cos = np.atleast_1d(np.asarray(self.cos, dtype=float))
        self.sin = np.atleast_1d(np.asarray(self.sin, dtype=float))
        n = max(self.cos.size, self.sin.size, 1)
        self.cos = np.pad(self.cos, (0, n - self.cos.size))
        self.sin = np.pad(self.sin, (0, n - self.sin.size))

    @property
    def harmonics(self):
        return np.arange(1, self.cos.size + 1)

    def scaled(self, factor: float) -> "FourierSupportSpec":
        return FourierSupportSpec(self.c0 * factor, self.cos * factor, self.sin * factor)

    def normalized(self) -> "FourierSupportSpec":
        """Uniform rescale so the boundary length 2*pi*c0 equals 1."""
        if self.c0 <= 0.0:
            raise CurvatureNotPositive("support function has nonpositive mean")
        return self.scaled(1.0 / (TWO_PI * self.c0))

    def _basis(self, theta):
        """cos(k theta), sin(k theta) matrices shared by the evaluators.

        Built from powers of e^(i theta): one transcendental pass regardless
        of the harmonic count.
        """
        theta = np.asarray(theta, dtype=float)
        n = self.cos.size
        e = np.exp(1j * theta)
        out = np.empty(theta.shape + (n,), dtype=complex)
        out[..., 0] = e
        for k in range(1, n):
            np.multiply(out[..., k - 1], e, out=out[..., k])
        return out.real, out.imag

    def h(self, theta, deriv=0, basis=None):
        """Evaluate h or its theta-derivatives (deriv in 0..2)."""
        c, s = self._basis(theta) if basis is None else basis
        k = self.harmonics
        if deriv == 0:
            return self.c0 + c @ self.cos + s @ self.sin
        if deriv == 1:
            return s @ (-k * self.cos) + c @ (k * self.sin)
        if deriv == 2:
            return c @ (-k * k * self.cos) + s @ (-k * k * self.sin)
        raise ValueError("deriv must be 0, 1 or 2")

    def rho(self, theta, basis=None):
        """Radius of curvature h + h''."""
        c, s = self._basis(theta) if basis is None else basis
        w = 1.0 - self.harmonics.astype(float) ** 2
        return self.c0 + c @ (w * self.cos) + s @ (w * self.sin)

    def arclength(self, theta, basis=None):
        """Cumulative arc length int_0^theta rho, closed form."""
        theta = np.asarray(theta, dtype=float)
        c, s = self._basis(theta) if basis is None else basis
        k = self.harmonics
        w = (1.0 - k.astype(float) ** 2) / k
        return self.c0 * theta + s @ (w * self.cos) + (1.0 - c) @ (w * self.sin)

    def sigma_rho(self, theta):
        """(arclength, rho) with one shared basis evaluation."""
        basis = self._basis(theta)
        return self.arclength(theta, basis=basis), self.rho(theta, basis=basis)

    def boundary_point(self, theta, basis=None):
        """Boundary point h*e_r + h'*e_t at outward normal angle theta."""
        theta = np.asarray(theta, dtype=float)
        basis = self._basis(theta) if basis is None else basis
        h = self.h(theta, basis=basis)
        hp = self.h(theta, deriv=1, basis=basis)
        c, s = np.cos(theta), np.sin(theta)
        return np.stack([h * c - hp * s, h * s + hp * c], axis=-1)


class FourierTable(TableCurve):
    """Strictly convex table defined by a normalized support function."""

    kind = "fourier_support"
    strictly_convex = True

    def __init__(self, spec: FourierSupportSpec):
        self.spec = spec

    def theta_of_q(self, q):
        """Invert the cumulative arc length; q may be any real array."""
        q = np.asarray(q, dtype=float)
        qr = np.mod(q, 1.0)
        wind = q - qr
        qflat = np.atleast_1d(qr).ravel()

        def fun(theta, idx):
            sig, rho = self.spec.sigma_rho(theta)
            return sig - qflat[idx], rho

        theta = newton_bisect(
            fun,
            lo=np.zeros_like(qr) - 1e-12,
            hi=np.full_like(qr, TWO_PI + 1e-12),
            seed=TWO_PI * qr,
            increasing=True,
            tol=1e-13,
        )
        return theta + TWO_PI * wind

    def position(self, q):
        return self.spec.boundary_point(self.theta_of_q(q))

    def tangent(self, q):
        theta = self.theta_of_q(q)
        return np.stack([-np.sin(theta), np.cos(theta)], axis=-1)

    def frame(self, q):
        theta = self.theta_of_q(q)
        pos = self.spec.boundary_point(theta)
        tan = np.stack([-np.sin(theta), np.cos(theta)], axis=-1)
        return pos, tan

    def curvature(self, q):
        return 1.0 / self.spec.rho(self.theta_of_q(q))


def build_fourier_table(spec: FourierSupportSpec, validation_grid: int = 4096) -> FourierTable:
    """Normalize a support spec to boundary length 1 and validate convexity.

    Raises CurvatureNotPositive when the radius of curvature h + h'' drops
    to the floor (1e-8) anywhere on the validation grid.
    """
    norm = spec.normalized()
    theta = np.linspace(0.0, TWO_PI, validation_grid, endpoint=False)
    rho = norm.rho(theta)
    m = float(rho.min())
    if m <= CURVATURE_FLOOR:
        raise CurvatureNotPositive(
            f"radius of curvature reaches {m:.3e} (floor {CURVATURE_FLOOR:.0e})",
            where=float(theta[int(np.argmin(rho))]),
        )
    return FourierTable(norm)


class MarkShiftedTable(TableCurve):
    """Same curve with the marked point moved by r along the boundary."""

    def __init__(self, base: TableCurve, r: float):
        self.base = base
        self.shift = float(r)
        self.kind = base.kind
        self.strictly_convex = base.strictly_convex

    def position(self, q):
        return self.base.position(np.asarray(q, dtype=float) + self.shift)

    def tangent(self, q):
        return self.base.tangent(np.asarray(q, dtype=float) + self.shift)

    def frame(self, q):
        return self.base.frame(np.asarray(q, dtype=float) + self.shift)

    def curvature(self, q):
        return self.base.curvature(np.asarray(q, dtype=float) + self.shift)


def shift_mark(table: TableCurve, r: float) -> TableCurve:
    return MarkShiftedTable(table, r)


class RigidMotionTable(TableCurve):
    """Image of a table under a rotation plus translation, marking preserved."""

    def __init__(self, base: TableCurve, angle: float = 0.0, offset=(0.0, 0.0)):
        self.base = base
        self.angle = float(angle)
        self.offset = np.asarray(offset, dtype=float)
        c, s = np.cos(self.angle), np.sin(self.angle)
        self._rot = np.array([[c, -s], [s, c]])
        self.kind = base.kind
        self.strictly_convex = base.strictly_convex

    def position(self, q):
        return self.base.position(q) @ self._rot.T + self.offset

    def tangent(self, q):
        return self.base.tangent(q) @ self._rot.T

    def frame(self, q):
        pos, tan = self.base.frame(q)
        return pos @ self._rot.T + self.offset, tan @ self._rot.T

    def curvature(self, q):
        return self.base.curvature(q)


def rigid_motion(table: TableCurve, angle: float = 0.0, offset=(0.0, 0.0)) -> TableCurve:
    return RigidMotionTable(table, angle, offset)


# ---------------------------------------------------------------------------
# spectral representation of a smooth closed curve
# ---------------------------------------------------------------------------


class _TrigSeries:
    """Trigonometric interpolant of periodic complex samples."""

    def __init__(self, samples: np.ndarray):
        m = samples.size
        coef = np.fft.fft(samples) / m
        self.k = np.fft.fftfreq(m, d=1.0 / m)  # integer frequencies
        if m % 2 == 0:
            # split the Nyquist mode symmetrically so evaluation stays real-analytic
            coef = coef.copy()
            ny = m // 2
            idx = np.argmin(np.abs(self.k + ny))
            self.k = np.append(self.k, ny)
            coef = np.append(coef, 0.5 * coef[idx])
            coef[idx] *= 0.5
        self.coef = coef

    def __call__(self, u, deriv=0):
        u = np.asarray(u, dtype=float)
        w = self.coef * (2j * np.pi * self.k) ** deriv
        phase = np.exp(2j * np.pi * np.multiply.outer(u, self.k))
        return phase @ w


class SampledCurve(TableCurve):
    """Arc-length reparametrized, length-normalized spectral closed curve.

    Built from uniform samples of any smooth regular parametrization; the
    raw curve is trig-interpolated, its speed integrated in closed form from
    Fourier coefficients, and the arc-length inversion is a guarded Newton
    solve.  The curve is rescaled to length 1 by a homothety about its
    arc-length centroid.
    """

    kind = "reconstructed_samples"

    def __init__(self, samples: np.ndarray, kind: str | None = None):
        z = np.asarray(samples[:, 0] + 1j * samples[:, 1])
        m = z.size
        self._z = _TrigSeries(z)
        grid = np.arange(m) / m
        dz = self._z(grid, deriv=1)
        speed = np.abs(dz)
        if speed.min() <= 0.0:
            raise ValueError("raw parametrization is singular")
        self._speed = _TrigSeries(speed.astype(complex))
        self.raw_length = float(np.real(self._speed.coef[0]))
        centroid = np.sum(z * speed) / np.sum(speed)
        self._center = centroid
        self._scale = 1.0 / self.raw_length
        if kind is not None:
            self.kind = kind
        kappa = self._raw_curvature(grid)
        self.min_curvature = float(kappa.min() * self.raw_length)
        self.strictly_convex = bool(self.min_curvature > CURVATURE_FLOOR)

    @classmethod
    def from_function(cls, fn, samples: int = 1024, kind: str | None = None):
        grid = np.arange(samples) / samples
        return cls(np.asarray(fn(grid), dtype=float), kind=kind)

    @classmethod
    def from_points(cls, points: np.ndarray, kind: str = "reconstructed_samples"):
        return cls(np.asarray(points, dtype=float), kind=kind)

    def _arclength(self, u):
        """Cumulative raw arc length from parameter 0, closed form in coefficients."""
        u = np.asarray(u, dtype=float)
        c = self._speed.coef
        k = self._speed.k
        nz = k != 0
        w = np.zeros_like(c)
        w[nz] = c[nz] / (2j * np.pi * k[nz])
        osc = (np.exp(2j * np.pi * np.multiply.outer(u, k)) - 1.0) @ w
        return self.raw_length * u + np.real(osc)

    def u_of_q(self, q):
        q = np.asarray(q, dtype=float)
        qr = np.mod(q, 1.0)
        qflat = np.atleast_1d(qr).ravel()

        def fun(u, idx):
            return (
                self._arclength(u) * self._scale - qflat[idx],
                np.abs(self._z(u, deriv=1)) * self._scale,
            )

        return newton_bisect(
            fun,
            lo=qr - 0.75,
            hi=qr + 0.75,
            seed=qr,
            increasing=True,
            tol=1e-13,
        )

    def _raw_curvature(self, u):
        dz = self._z(u, deriv=1)
        ddz = self._z(u, deriv=2)
        return np.imag(np.conj(dz) * ddz) / np.abs(dz) ** 3

    def position(self, q):
        u = self.u_of_q(q)
        z = self._center + self._scale * (self._z(u) - self._center)
        return np.stack([np.real(z), np.imag(z)], axis=-1)

    def tangent(self, q):
        dz = self._z(self.u_of_q(q), deriv=1)
        t = dz / np.abs(dz)
        return np.stack([np.real(t), np.imag(t)], axis=-1)

    def frame(self, q):
        u = self.u_of_q(q)
        z = self._center + self._scale * (self._z(u) - self._center)
        dz = self._z(u, deriv=1)
        t = dz / np.abs(dz)
        return (
            np.stack([np.real(z), np.imag(z)], axis=-1),
            np.stack([np.real(t), np.imag(t)], axis=-1),
        )

    def curvature(self, q):
        return self._raw_curvature(self.u_of_q(q)) * self.raw_length


# ---------------------------------------------------------------------------
# polygons
# ---------------------------------------------------------------------------


@dataclass
class PolygonSpec:
    """Strictly convex polygon with counterclockwise vertices, perimeter 1.

    ``mark`` is the boundary arc-length parameter of the marked point,
    measured counterclockwise from vertices[0].
    """

    vertices: np.ndarray
    mark: float = 0.0

    def __post_init__(self):
        self.vertices = np.asarray(self.vertices, dtype=float)
        if self.vertices.ndim != 2 or self.vertices.shape[1] != 2 or len(self.vertices) < 3:
            raise ValueError("vertices must be an (n, 2) array, n >= 3")
        e = np.roll(self.vertices, -1, axis=0) - self.vertices
        cross = e[:, 0] * np.roll(e, -1, axis=0)[:, 1] - e[:, 1] * np.roll(e, -1, axis=0)[:, 0]
        if np.any(cross <= 0.0):
            raise ValueError("vertices must be strictly convex in counterclockwise order")
        per = float(np.sum(np.hypot(e[:, 0], e[:, 1])))
        if abs(per - 1.0) > 1e-10:
            raise ValueError(f"perimeter must be 1, got {per!r}")
        self.mark = float(np.mod(self.mark, 1.0))

    @property
    def edge_lengths(self):
        e = np.roll(self.vertices, -1, axis=0) - self.vertices
        return np.hypot(e[:, 0], e[:, 1])

    def boundary_point(self, t):
        """Point at arc length t (mod 1) counterclockwise from vertices[0]."""
        t = np.mod(np.asarray(t, dtype=float), 1.0)
        lengths = self.edge_lengths
        cums = np.concatenate([[0.0], np.cumsum(lengths)])
        idx = np.clip(np.searchsorted(cums, t, side="right") - 1, 0, len(lengths) - 1)
        local = (t - cums[idx]) / lengths[idx]
        a = self.vertices[idx]
        b = self.vertices[(idx + 1) % len(lengths)]
        return a + local[..., None] * (b - a)


def unit_square(mark: float = 0.125) -> PolygonSpec:
    """Axis-aligned square of perimeter 1, marked mid-edge by default."""
    s = 0.125
    verts = np.array([[s, -s], [s, s], [-s, s], [-s, -s]])
    return PolygonSpec(verts, mark=mark)


def regular_polygon(n: int, mark: float | None = None) -> PolygonSpec:
    """Regular n-gon of perimeter 1; default mark at the first edge midpoint."""
    ang = TWO_PI * (np.arange(n) + 0.5) / n
    r = 1.0 / (2.0 * n * np.sin(np.pi / n))
    verts = r * np.stack([np.cos(ang), np.sin(ang)], axis=-1)
    if mark is None:
        mark = 0.5 / n
    return PolygonSpec(verts, mark=mark)


class PolygonBoundary(TableCurve):
    """Piecewise-linear boundary curve of a polygon, marked at spec.mark.

    Convex but neither smooth nor strictly convex; used as the C^0 limit
    object of smoothing families.  Tangents are right-continuous at corners.
    """

    kind = "polygon"
    strictly_convex = False

    def __init__(self, spec: PolygonSpec):
        self.spec = spec

    def position(self, q):
        return self.spec.boundary_point(np.asarray(q, dtype=float) + self.spec.mark)

    def tangent(self, q):
        t = np.mod(np.asarray(q, dtype=float) + self.spec.mark, 1.0)
        lengths = self.spec.edge_lengths
        cums = np.concatenate([[0.0], np.cumsum(lengths)])
        idx = np.clip(np.searchsorted(cums, t, side="right") - 1, 0, len(lengths) - 1)
        e = np.roll(self.spec.vertices, -1, axis=0) - self.spec.vertices
        return (e / lengths[:, None])[idx]

    def curvature(self, q):
        return np.zeros(np.shape(np.asarray(q, dtype=float)))


# ---------------------------------------------------------------------------
# distances
# ---------------------------------------------------------------------------


def c0_distance(a: TableCurve, b: TableCurve, grid: int = 4096, refine: bool = True) -> float:
    """max_q ||a(q) - b(q)|| over a dense grid with one local refinement pass.

    A grid maximum never exceeds the true maximum, so the value is a lower
    bound estimate of the C^0 distance.
    """
    q = np.arange(grid) / grid
    gap = np.linalg.norm(a.position(q) - b.position(q), axis=-1)
    best = float(gap.max())
    if refine:
        j = int(np.argmax(gap))
        local = q[j] + np.linspace(-1.0, 1.0, 33) / grid
        gap2 = np.linalg.norm(a.position(local) - b.position(local), axis=-1)
        best = max(best, float(gap2.max()))
    return best


def curve_centroid(t: TableCurve, grid: int = 2048) -> np.ndarray:
    """Arc-length centroid of the boundary curve."""
    q = np.arange(grid) / grid
    return t.position(q).mean(axis=0)
