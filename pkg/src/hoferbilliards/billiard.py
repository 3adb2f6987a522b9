"""The billiard ball map of a strictly convex table and its generating function.

Phase space is the open annulus: q in [0,1) the arc-length footpoint of a
chord, p in (-1,1) the tangential momentum <u, gamma'(q)> of the outgoing
unit chord direction u.  The chord length F(q, Q) generates the map:
dF/dq = -p and dF/dQ = P.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._solve import newton_bisect
from .curves import TableCurve, circ_dist
from .errors import DiagonalPoint, NearGrazing, NotStrictlyConvex

GRAZING_CUTOFF = 1e-9
DIAGONAL_TOL = 1e-12
SOLVE_TOL = 1e-13


@dataclass(frozen=True)
class AnnulusPoint:
    """Phase point (q, p): q cyclic in [0,1), momentum |p| < 1."""

    q: float
    p: float

    def __post_init__(self):
        object.__setattr__(self, "q", float(np.mod(self.q, 1.0)))
        object.__setattr__(self, "p", float(self.p))
        if not abs(self.p) < 1.0:
            raise ValueError(f"momentum must satisfy |p| < 1, got {self.p!r}")

    def as_tuple(self):
        return (self.q, self.p)


def _check_offdiagonal(q, Q):
    if np.any(circ_dist(q, Q) < DIAGONAL_TOL):
        raise DiagonalPoint("chord endpoints coincide mod 1")


def chord_length(table: TableCurve, q, Q):
    """Euclidean distance between the boundary points at parameters q and Q."""
    _check_offdiagonal(q, Q)
    d = table.position(Q) - table.position(q)
    return np.linalg.norm(d, axis=-1)


def generating_partials(table: TableCurve, q, Q):
    """(dF/dq, dF/dQ) of the chord length; equals (-p, P) of the ball map."""
    _check_offdiagonal(q, Q)
    d = table.position(Q) - table.position(q)
    u = d / np.linalg.norm(d, axis=-1, keepdims=True)
    dq = -np.sum(u * table.tangent(q), axis=-1)
    dQ = np.sum(u * table.tangent(Q), axis=-1)
    return dq, dQ


def forward_chord(table: TableCurve, q, p, newton_tol=SOLVE_TOL, seed=None, start_frame=None):
    """Vectorized bounce solve returning the full chord data.

    The residual r(Q) = <u, gamma'(q)> - p decreases strictly from 1-p to
    -1-p on (q, q+1), so a bracketed Newton (seeded with the round-table
    closed form, or a caller-provided warm start) with bisection fallback
    is well posed.  Returns (Q, P, pos_q, tan_q, pos_Q, tan_Q) with Q
    unreduced in (q, q+1); ``start_frame`` lets callers reuse a precomputed
    (pos_q, tan_q) pair.
    """
    q = np.asarray(q, dtype=float)
    p = np.asarray(p, dtype=float)
    q, p = np.broadcast_arrays(q, p)
    shape = q.shape
    qf = np.atleast_1d(q).ravel()
    pf = np.atleast_1d(p).ravel()
    if start_frame is None:
        pos_q, tan_q = table.frame(qf)
    else:
        pos_q = np.atleast_2d(start_frame[0]).reshape(-1, 2)
        tan_q = np.atleast_2d(start_frame[1]).reshape(-1, 2)

    def fun(Q, idx):
        pos_Q, tQ = table.frame(Q)
        d = pos_Q - pos_q[idx]
        dist = np.linalg.norm(d, axis=-1)
        u = d / dist[..., None]
        tq = tan_q[idx]
        pc = np.sum(u * tq, axis=-1)
        PQ = np.sum(u * tQ, axis=-1)
        dr = (np.sum(tQ * tq, axis=-1) - PQ * pc) / dist
        return pc - pf[idx], dr

    delta = 1e-13
    if seed is None:
        seed = qf + np.arccos(np.clip(pf, -1.0, 1.0)) / np.pi
    else:
        seed = np.atleast_1d(np.asarray(seed, dtype=float)).ravel()
    Q = newton_bisect(
        fun,
        lo=qf + delta,
        hi=qf + 1.0 - delta,
        seed=seed,
        increasing=False,
        tol=newton_tol,
        maxiter=100,
    )
    pos_Q, tan_Q = table.frame(Q)
    u = pos_Q - pos_q
    u /= np.linalg.norm(u, axis=-1, keepdims=True)
    P = np.sum(u * tan_Q, axis=-1)
    return (
        Q.reshape(shape),
        P.reshape(shape),
        pos_q.reshape(shape + (2,)),
        tan_q.reshape(shape + (2,)),
        pos_Q.reshape(shape + (2,)),
        tan_Q.reshape(shape + (2,)),
    )


def forward_arrays(table: TableCurve, q, p, newton_tol=SOLVE_TOL, seed=None):
    """Vectorized bounce solve; returns (Q, P) with Q unreduced in (q, q+1)."""
    Q, P = forward_chord(table, q, p, newton_tol, seed)[:2]
    return Q, P


def inverse_arrays(table: TableCurve, Q, P, seed=None):
    """Time reversal R o forward o R with R(q, p) = (q, -p); unreduced output."""
    q, p = forward_arrays(table, Q, -np.asarray(P, dtype=float), seed=seed)
    return q, -p


def _require_map_input(table: TableCurve, p):
    if not table.strictly_convex:
        raise NotStrictlyConvex(f"{table.kind} table is not strictly convex")
    if np.any(np.abs(p) > 1.0 - GRAZING_CUTOFF):
        raise NearGrazing(f"|p| exceeds {1.0 - GRAZING_CUTOFF!r}")


def forward_map(table: TableCurve, x: AnnulusPoint) -> AnnulusPoint:
    """One bounce of the billiard ball map."""
    _require_map_input(table, x.p)
    Q, P = forward_arrays(table, x.q, x.p)
    return AnnulusPoint(float(Q), float(P))


def inverse_map(table: TableCurve, x: AnnulusPoint) -> AnnulusPoint:
    """Inverse bounce; forward_map(inverse_map(x)) == x to solver accuracy."""
    _require_map_input(table, x.p)
    q, p = inverse_arrays(table, x.q, x.p)
    return AnnulusPoint(float(q), float(p))


def iterate(table: TableCurve, x: AnnulusPoint, n: int):
    """Trajectory [x, psi(x), ..., psi^n(x)]; negative n uses the inverse map.

    NearGrazing raised mid-flight carries the failing step index.
    """
    step = forward_map if n >= 0 else inverse_map
    out = [x]
    for i in range(abs(int(n))):
        try:
            x = step(table, x)
        except NearGrazing as exc:
            raise NearGrazing(f"grazing at step {i + 1}: {exc}", step=i + 1) from exc
        out.append(x)
    return out


def map_jacobian(table: TableCurve, q, p, step: float = 1e-5):
    """Central-difference Jacobian of the ball map at (q, p), unreduced in Q."""
    Qp, Pp = forward_arrays(table, q + step, p)
    Qm, Pm = forward_arrays(table, q - step, p)
    Qu, Pu = forward_arrays(table, q, p + step)
    Qd, Pd = forward_arrays(table, q, p - step)
    return np.array(
        [
            [(Qp - Qm) / (2 * step), (Qu - Qd) / (2 * step)],
            [(Pp - Pm) / (2 * step), (Pu - Pd) / (2 * step)],
        ]
    )
