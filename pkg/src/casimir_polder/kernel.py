"""Green's-function trace g(i xi, z) for an atom in a solvent facing a half-space.

    g = -k_B T int_0^inf dk k [r_p (2 gamma_w/eps_w - xi^2/(c^2 gamma_w))
                               - r_s xi^2/(c^2 gamma_w)] exp(-2 gamma_w z)

The integral is evaluated in the variable u = 2 gamma_w z, which turns the
exponential into a bare exp(-u) on [u0, inf) with u0 = 2 z sqrt(eps_w) xi / c.
With s = 2 z xi / c and Gamma = 2 z gamma this gives

    g = -k_B T / (8 z^3) int_{u0}^inf [r_p (2 u^2/eps_w - s^2) - r_s s^2] exp(-u) du.

The static term (xi = 0) has the closed form -k_B T r_p(0) / (2 eps_w(0) z^3)
and never goes through the quadrature.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .constants import BOLTZMANN, SPEED_OF_LIGHT
from .errors import (
    DegeneratePointError,
    NegativeFrequencyError,
    NonpositiveSeparationError,
    NonpositiveTemperatureError,
    QuadratureNotConvergedError,
)
from .materials import DielectricModel, evaluate
from .quadrature import GAUSS_WEIGHTS, KRONROD_WEIGHTS, NODES, integrate_batch

CHUNK = 65536


@dataclass(frozen=True)
class HalfSpacePair:
    """Solvent (atom side, eps_w) and the medium across the interface (eps)."""

    solvent: DielectricModel
    medium: DielectricModel


@dataclass(frozen=True)
class QuadratureConfig:
    rel_tol: float = 1e-9
    max_subdivisions: int = 60  # panels per integral
    u_cutoff: float = 60.0  # integration length in u beyond u0

    def __post_init__(self):
        if not self.rel_tol > 0:
            raise ValueError("rel_tol must be > 0")
        if not self.u_cutoff >= 30:
            raise ValueError("u_cutoff must be >= 30")
        if self.max_subdivisions < 7:
            raise ValueError("max_subdivisions must be >= 7")

    @property
    def breaks(self):
        inner = np.array([0.0, 1.5, 4.0, 9.0, 18.0, 32.0])
        return np.append(inner[inner < self.u_cutoff - 2.0], self.u_cutoff)


@dataclass(frozen=True)
class KernelResult:
    """Batch of g values with per-frequency quadrature diagnostics."""

    value: np.ndarray  # J/m^3
    error: np.ndarray  # J/m^3, absolute error estimate
    panels: np.ndarray
    converged: np.ndarray


def gamma_factors(k, xi, pair: HalfSpacePair, *, light_speed=SPEED_OF_LIGHT):
    """Return (gamma, gamma_w) in 1/m."""
    q2 = (np.asarray(xi, dtype=float) / light_speed) ** 2
    eps = evaluate(pair.medium, xi)
    eps_w = evaluate(pair.solvent, xi)
    k2 = np.asarray(k, dtype=float) ** 2
    gamma = np.sqrt(k2 + eps * q2)
    gamma_w = np.sqrt(k2 + eps_w * q2)
    if np.ndim(gamma) == 0:
        return float(gamma), float(gamma_w)
    return gamma, gamma_w


def fresnel(k, xi, pair: HalfSpacePair, *, light_speed=SPEED_OF_LIGHT):
    """Return the TM and TE reflection coefficients (r_p, r_s)."""
    k_arr = np.asarray(k, dtype=float)
    xi_arr = np.asarray(xi, dtype=float)
    if np.any((k_arr == 0) & (xi_arr == 0)):
        raise DegeneratePointError("Fresnel coefficients undefined at k = 0, xi = 0")
    if np.any(k_arr < 0):
        raise ValueError("wavevector must be >= 0")
    eps = evaluate(pair.medium, xi)
    eps_w = evaluate(pair.solvent, xi)
    gamma, gamma_w = gamma_factors(k, xi, pair, light_speed=light_speed)
    r_p = (eps * gamma_w - eps_w * gamma) / (eps * gamma_w + eps_w * gamma)
    r_s = (gamma_w - gamma) / (gamma_w + gamma)
    return r_p, r_s


def _check(z, T):
    if not z > 0:
        raise NonpositiveSeparationError(f"separation must be > 0, got {z!r}")
    if not T > 0:
        raise NonpositiveTemperatureError(f"temperature must be > 0 K, got {T!r}")


def g_static(z: float, pair: HalfSpacePair, T: float) -> float:
    """Exact xi = 0 value of g in J/m^3."""
    _check(z, T)
    eps = evaluate(pair.medium, 0.0)
    eps_w = evaluate(pair.solvent, 0.0)
    r_p0 = (eps - eps_w) / (eps + eps_w)
    return -BOLTZMANN * T * r_p0 / (2.0 * eps_w * z**3)


_PARTS = {"total": 0, "tm": 1, "te": 2}


@njit(cache=True, nogil=True, fastmath=True)
def _panels(u0, s2, eps, eps_w, part, owner, lo, hi, nodes, wk, wg):
    """GK15 value and error of the u-integrand on each panel (t = u - u0)."""
    m = owner.size
    val = np.empty(m)
    err = np.empty(m)
    fx = np.empty(15)
    tiny = 50.0 * np.finfo(np.float64).eps
    for i in range(m):
        o = owner[i]
        a, b2, e, ew = u0[o], s2[o], eps[o], eps_w[o]
        contrast = e - ew
        half = 0.5 * (hi[i] - lo[i])
        mid = 0.5 * (hi[i] + lo[i])
        k = 0.0
        g = 0.0
        resabs = 0.0
        for j in range(15):
            t = mid + half * nodes[j]
            u = a + t
            gam = np.sqrt(t * (t + 2.0 * a) + e * b2)
            # numerators written so both vanish identically for eps == eps_w
            r_p = contrast * (u - ew * b2 / (gam + u)) / (e * u + ew * gam)
            r_s = -contrast * b2 / ((u + gam) * (u + gam))
            if part == 1:
                v = r_p * (2.0 * u * u / ew - b2)
            elif part == 2:
                v = -r_s * b2
            else:
                v = r_p * (2.0 * u * u / ew - b2) - r_s * b2
            v *= np.exp(-t)
            fx[j] = v
            k += wk[j] * v
            g += wg[j] * v
            resabs += wk[j] * abs(v)
        mean = 0.5 * k
        resasc = 0.0
        for j in range(15):
            resasc += wk[j] * abs(fx[j] - mean)
        diff = abs(k - g)
        if resasc > 0.0:
            est = resasc * min(1.0, (200.0 * diff / resasc) ** 1.5)
        else:
            est = diff
        val[i] = half * k
        err[i] = abs(half) * max(est, tiny * resabs)
    return val, err


def _rule(u0, s2, eps, eps_w, part):
    code = _PARTS[part]

    def rule(owner, lo, hi):
        return _panels(u0, s2, eps, eps_w, code, owner, lo, hi, NODES, KRONROD_WEIGHTS, GAUSS_WEIGHTS)

    return rule


def g_batch(
    xi,
    z: float,
    pair: HalfSpacePair,
    T: float,
    quad: QuadratureConfig = QuadratureConfig(),
    *,
    light_speed: float = SPEED_OF_LIGHT,
    part: str = "total",
    abs_tol=None,
) -> KernelResult:
    """g(i xi_j, z) for an array of xi > 0, with diagnostics (never raises on non-convergence).

    ``part`` selects the full trace (``"total"``) or only its TM (``"tm"``) or
    TE (``"te"``) contribution. ``abs_tol`` (J/m^3, scalar or one per xi) lets
    an integral stop once its error is below it even if ``quad.rel_tol`` is
    not yet met.
    """
    _check(z, T)
    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    if np.any(xi < 0):
        raise NegativeFrequencyError("frequency must be >= 0")
    if np.any(xi == 0):
        raise ValueError("xi = 0 is handled by g_static")
    eps = np.atleast_1d(evaluate(pair.medium, xi))
    eps_w = np.atleast_1d(evaluate(pair.solvent, xi))
    s = 2.0 * z * xi / light_speed
    u0 = np.sqrt(eps_w) * s
    prefactor = -BOLTZMANN * T / (8.0 * z**3)
    abs_g = np.zeros(xi.size) if abs_tol is None else np.broadcast_to(np.asarray(abs_tol, dtype=float), xi.shape)

    out = KernelResult(*(np.empty(xi.size) for _ in range(3)), np.empty(xi.size, dtype=bool))
    for start in range(0, xi.size, CHUNK):
        sl = slice(start, start + CHUNK)
        rule = _rule(u0[sl], s[sl] ** 2, eps[sl], eps_w[sl], part)
        scale = prefactor * np.exp(-u0[sl])
        with np.errstate(divide="ignore", invalid="ignore"):
            abs_u = np.where(scale != 0.0, abs_g[sl] / np.abs(scale), np.inf)
        res = integrate_batch(rule, quad.breaks, u0[sl].size, quad.rel_tol, abs_u, quad.max_subdivisions)
        out.value[sl] = scale * res.value
        out.error[sl] = np.abs(scale) * res.error
        out.panels[sl] = res.panels
        out.converged[sl] = res.converged
    return out


def g_of_xi(
    xi: float,
    z: float,
    pair: HalfSpacePair,
    T: float,
    quad: QuadratureConfig = QuadratureConfig(),
    *,
    light_speed: float = SPEED_OF_LIGHT,
    part: str = "total",
) -> float:
    """g(i xi, z) in J/m^3 for a single xi > 0.

    Multiplying by an excess polarizability in m^3 gives joules.
    """
    if not xi > 0:
        if xi == 0:
            raise ValueError("xi = 0 is handled by g_static")
        raise NegativeFrequencyError(f"frequency must be >= 0, got {xi!r}")
    res = g_batch([xi], z, pair, T, quad, light_speed=light_speed, part=part)
    if not res.converged[0]:
        raise QuadratureNotConvergedError(
            f"g(xi={xi:g}, z={z:g}) did not converge",
            error_estimate=float(res.error[0]),
            panels=int(res.panels[0]),
        )
    return float(res.value[0])
