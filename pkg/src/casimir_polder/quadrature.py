"""Batched adaptive Gauss-Kronrod (7/15) quadrature over finite intervals.

Many integrals that share one integrand family are refined together: every
panel of every integral is evaluated in one vectorised call per pass, and
only the panels that miss their error budget are bisected.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .errors import QuadratureNotConvergedError

# Kronrod abscissae on [0, 1] (symmetric), largest first, and weights.
_XK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
])
_WK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.0,
    0.129484966168869693270611432679082,
    0.0,
    0.279705391489276667901467771423780,
    0.0,
    0.381830050505118944950369775488975,
    0.0,
    0.417959183673469387755102040816327,
])

NODES = np.concatenate((-_XK[:-1], _XK[::-1]))
KRONROD_WEIGHTS = np.concatenate((_WK[:-1], _WK[::-1]))
GAUSS_WEIGHTS = np.concatenate((_WG[:-1], _WG[::-1]))


@dataclass(frozen=True)
class BatchResult:
    value: np.ndarray  # integral per batch member
    error: np.ndarray  # summed error estimate per member
    panels: np.ndarray  # accepted panels per member
    converged: np.ndarray  # bool per member


def gk15(f, owner, lo, hi):
    """Kronrod estimate and its error on panels [lo, hi] belonging to ``owner``.

    The error uses the QUADPACK scaling of |K15 - G7| against the panel's
    mean absolute deviation, floored at 50 ulp of the panel's absolute integral.
    """
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    x = mid[:, None] + half[:, None] * NODES[None, :]
    fx = f(owner, x)
    k_raw = fx @ KRONROD_WEIGHTS
    diff = np.abs(k_raw - fx @ GAUSS_WEIGHTS)
    resabs = np.abs(fx) @ KRONROD_WEIGHTS
    resasc = np.abs(fx - 0.5 * k_raw[:, None]) @ KRONROD_WEIGHTS
    with np.errstate(divide="ignore", invalid="ignore"):
        err = np.where(resasc > 0, resasc * np.minimum(1.0, (200.0 * diff / resasc) ** 1.5), diff)
    err = np.maximum(err, 50.0 * np.finfo(float).eps * resabs)
    return half * k_raw, np.abs(half) * err


def vectorised_rule(f):
    """Panel rule built from a numpy integrand ``f(owner, x)``.

    ``owner`` has shape (m,) and indexes the batch member, ``x`` has shape
    (m, 15); ``f`` returns integrand values of the same shape as ``x``.
    """
    return lambda owner, lo, hi: gk15(f, owner, lo, hi)


def integrate_batch(rule, breaks, n, rel_tol, abs_tol=0.0, max_panels=60):
    """Integrate ``n`` integrals over a common set of initial ``breaks``.

    Parameters
    ----------
    rule : callable
        ``rule(owner, lo, hi)`` returning the (value, error) of the GK15 rule
        on each panel [lo, hi] of batch member ``owner``; see
        :func:`vectorised_rule`.
    breaks : array_like
        Increasing panel boundaries, either shared by all members (1-D) or
        one row per member (2-D, shape ``(n, m + 1)``).
    n : int
        Number of integrals in the batch.
    rel_tol, abs_tol : float
        A member is converged once its summed error estimate is at most
        ``max(rel_tol * |I|, abs_tol)``. Until then its worst panels are
        bisected: every panel whose error exceeds the average share of the
        budget.
    max_panels : int
        A member is marked unconverged once bisection would exceed this many panels.

    Returns
    -------
    BatchResult
        Panel contributions are summed per member in order of descending
        magnitude, so results are deterministic for a fixed panel schedule.
    """
    breaks = np.asarray(breaks, dtype=float)
    if breaks.ndim == 1:
        breaks = np.broadcast_to(breaks, (n, breaks.size))
    owner = np.repeat(np.arange(n), breaks.shape[1] - 1)
    lo = breaks[:, :-1].ravel()
    hi = breaks[:, 1:].ravel()
    val, err = rule(owner, lo, hi)

    done_owner, done_val, done_err = [], [], []
    failed = np.zeros(n, dtype=bool)

    while owner.size:
        total = np.bincount(owner, weights=val, minlength=n)
        error = np.bincount(owner, weights=err, minlength=n)
        count = np.bincount(owner, minlength=n)
        budget = np.maximum(rel_tol * np.abs(total), abs_tol)
        finished = error <= budget
        # an unfinished member always has a panel above its average share
        split = ~finished[owner] & (err > budget[owner] / count[owner])
        n_split = np.bincount(owner[split], minlength=n)
        blocked = ~finished & (count + n_split > max_panels)
        failed |= blocked
        finished |= blocked
        split &= ~finished[owner]

        retire = finished[owner]
        done_owner.append(owner[retire])
        done_val.append(val[retire])
        done_err.append(err[retire])

        stay = ~retire & ~split
        mid = 0.5 * (lo[split] + hi[split])
        new_owner = np.repeat(owner[split], 2)
        new_lo = np.column_stack((lo[split], mid)).ravel()
        new_hi = np.column_stack((mid, hi[split])).ravel()
        new_val, new_err = rule(new_owner, new_lo, new_hi) if new_owner.size else (new_lo, new_lo)
        owner = np.concatenate((owner[stay], new_owner))
        lo = np.concatenate((lo[stay], new_lo))
        hi = np.concatenate((hi[stay], new_hi))
        val = np.concatenate((val[stay], new_val))
        err = np.concatenate((err[stay], new_err))

    value, error, panels = _reduce_panels(
        np.concatenate(done_owner), np.concatenate(done_val), np.concatenate(done_err), n
    )
    return BatchResult(value=value, error=error, panels=panels, converged=~failed)


@njit(cache=True, nogil=True)
def _reduce_panels(owner, val, err, n):
    """Per-member sums of panel values (descending magnitude) and errors."""
    panels = np.zeros(n, dtype=np.int64)
    for o in owner:
        panels[o] += 1
    start = np.zeros(n + 1, dtype=np.int64)
    for o in range(n):
        start[o + 1] = start[o] + panels[o]
    fill = start[:-1].copy()
    bucket = np.empty(owner.size)
    value = np.zeros(n)
    error = np.zeros(n)
    for i in range(owner.size):
        o = owner[i]
        bucket[fill[o]] = val[i]
        fill[o] += 1
        error[o] += err[i]
    for o in range(n):
        group = bucket[start[o]:start[o + 1]]
        # insertion sort by descending magnitude; groups are small
        for i in range(1, group.size):
            v = group[i]
            j = i - 1
            while j >= 0 and abs(group[j]) < abs(v):
                group[j + 1] = group[j]
                j -= 1
            group[j + 1] = v
        acc = 0.0
        for v in group:
            acc += v
        value[o] = acc
    return value, error, panels


def integrate(f, a, b, rel_tol=1e-10, abs_tol=0.0, max_panels=200, initial=1):
    """Adaptive integral of a scalar-vectorised ``f(x)`` over [a, b].

    Raises QuadratureNotConvergedError when the panel limit is hit.
    """
    breaks = np.linspace(a, b, initial + 1)
    res = integrate_batch(vectorised_rule(lambda owner, x: f(x)), breaks, 1, rel_tol, abs_tol, max_panels)
    if not res.converged[0]:
        raise QuadratureNotConvergedError(
            "adaptive quadrature did not converge", float(res.error[0]), int(res.panels[0])
        )
    return float(res.value[0]), float(res.error[0])
