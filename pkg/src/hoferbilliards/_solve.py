"""Vectorized bracketed Newton with bisection fallback.

Used for every monotone 1-d inversion in the package: the bounce solve of
the billiard map and arc-length / profile-length inversions.  The residual
is assumed strictly monotone between the brackets, so the bisection
fallback cannot stall.  Only the not-yet-converged components are
re-evaluated, which matters on the 30k-point phase-space grids.
"""

import numpy as np


def newton_bisect(
    fun,
    lo,
    hi,
    seed,
    increasing,
    tol=1e-13,
    maxiter=100,
    relax_after=30,
    relax_tol=1e-10,
    fail_tol=1e-9,
):
    """Solve fun(x, idx) == 0 componentwise for x in (lo, hi).

    ``fun`` maps an active-subset array x and its flat indices into the
    original problem to a pair (residual, derivative).  ``increasing``
    states the residual's monotonicity, so the bracket is updated from the
    sign of the residual at each iterate without ever evaluating the
    endpoints (where the residual may be ill-conditioned).  Newton steps
    that leave the bracket fall back to bisection.

    Components stop at |residual| <= tol; after ``relax_after`` iterations
    the acceptance widens to ``relax_tol`` (the solves near a grazing chord
    are noise-limited well above machine epsilon).  Raises ArithmeticError
    only if some component stays above ``fail_tol``.
    """
    x = np.array(seed, dtype=float, copy=True)
    shape = x.shape
    x = np.atleast_1d(x).ravel()
    lo = np.broadcast_to(np.asarray(lo, dtype=float), shape).copy().ravel()
    hi = np.broadcast_to(np.asarray(hi, dtype=float), shape).copy().ravel()
    np.clip(x, lo, hi, out=x)

    active = np.arange(x.size)
    worst = 0.0
    for it in range(maxiter):
        r, dr = fun(x[active], active)
        tol_now = tol if it < relax_after else relax_tol
        keep = np.abs(r) > tol_now
        if not keep.any():
            active = active[:0]
            break
        act = active[keep]
        r = r[keep]
        dr = dr[keep]
        xa = x[act]
        pos = r > 0
        if increasing:
            hi[act[pos]] = xa[pos]
            lo[act[~pos]] = xa[~pos]
        else:
            lo[act[pos]] = xa[pos]
            hi[act[~pos]] = xa[~pos]
        with np.errstate(divide="ignore", invalid="ignore"):
            xn = xa - r / dr
        bad = ~np.isfinite(xn) | (xn <= lo[act]) | (xn >= hi[act])
        xn[bad] = 0.5 * (lo[act][bad] + hi[act][bad])
        x[act] = xn
        active = act
        worst = float(np.max(np.abs(r)))
    if active.size:
        r, _ = fun(x[active], active)
        worst = float(np.max(np.abs(r)))
        if worst > fail_tol:
            raise ArithmeticError(f"newton_bisect: no convergence, residual {worst:.3e}")
    return x.reshape(shape)
