"""Slow, non-adaptive reference evaluations used to check the engine.

Nothing here shares code with the adaptive path beyond the material and
polarizability models: the trace g is integrated literally over the
transverse wavevector k (no change of variable to u), the n = 0 term goes
through the same quadrature instead of the closed form, and the Matsubara
sum runs over a fixed number of terms.
"""
from __future__ import annotations

import numpy as np

from .constants import BOLTZMANN, SPEED_OF_LIGHT
from .materials import evaluate
from .polarizability import excess_polarizability
from .spectrum import MatsubaraSpectrum


def trapezoid_g(xi, z, pair, T, nodes=1_000_001, u_cutoff=60.0, *, light_speed=SPEED_OF_LIGHT):
    """g(i xi, z) by a uniform composite trapezoid rule on u = 2 gamma_w z.

    The integrand is assembled from k, gamma and gamma_w in SI units.
    """
    eps = evaluate(pair.medium, xi)
    eps_w = evaluate(pair.solvent, xi)
    q2 = (xi / light_speed) ** 2
    u0 = 2.0 * z * np.sqrt(eps_w * q2)
    u = np.linspace(u0, u0 + u_cutoff, nodes)
    gamma_w = u / (2.0 * z)
    k = np.sqrt(np.maximum(gamma_w**2 - eps_w * q2, 0.0))
    gamma = np.sqrt(k**2 + eps * q2)
    r_p = (eps * gamma_w - eps_w * gamma) / (eps * gamma_w + eps_w * gamma)
    r_s = (gamma_w - gamma) / (gamma_w + gamma)
    bracket = r_p * (2.0 * gamma_w / eps_w - q2 / gamma_w) - r_s * q2 / gamma_w
    # k dk = gamma_w d gamma_w = u du / (4 z^2)
    f = bracket * np.exp(-u) * u / (4.0 * z * z)
    h = (u[-1] - u[0]) / (nodes - 1)
    return -BOLTZMANN * T * h * (f.sum() - 0.5 * (f[0] + f[-1]))


def _exp_sinh_grid(step, t_max):
    """Nodes and weights of the exp-sinh trapezoid rule on (0, inf)."""
    t = np.arange(-t_max, t_max + 0.5 * step, step)
    x = np.exp(0.5 * np.pi * np.sinh(t))
    w = step * 0.5 * np.pi * np.cosh(t) * x
    return x, w


def k_integral_g(xi, z, pair, T, step=1.0 / 32.0, t_max=4.0, *, light_speed=SPEED_OF_LIGHT):
    """g(i xi_j, z) for an array of xi >= 0 by a fixed exp-sinh trapezoid rule in k.

    Works at xi = 0 as well, where it reproduces the static limit numerically.
    """
    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    kappa, weight = _exp_sinh_grid(step, t_max)
    k = kappa / (2.0 * z)
    wk = weight / (2.0 * z)
    eps = np.atleast_1d(evaluate(pair.medium, xi))[:, None]
    eps_w = np.atleast_1d(evaluate(pair.solvent, xi))[:, None]
    q2 = (xi[:, None] / light_speed) ** 2
    k2 = (k * k)[None, :]
    gamma = np.sqrt(k2 + eps * q2)
    gamma_w = np.sqrt(k2 + eps_w * q2)
    r_p = (eps * gamma_w - eps_w * gamma) / (eps * gamma_w + eps_w * gamma)
    r_s = (gamma_w - gamma) / (gamma_w + gamma)
    bracket = r_p * (2.0 * gamma_w / eps_w - q2 / gamma_w) - r_s * q2 / gamma_w
    f = k[None, :] * bracket * np.exp(-2.0 * gamma_w * z)
    return -BOLTZMANN * T * (f @ wk)


def oracle_energy(z, atom, pair, T, n_terms=100_000, *, chunk=2000, light_speed=SPEED_OF_LIGHT, **quad):
    """Retarded free energy in J from a fixed number of Matsubara terms."""
    xi = MatsubaraSpectrum(T).frequencies(np.arange(n_terms + 1))
    weights = np.where(np.arange(n_terms + 1) == 0, 0.5, 1.0)
    terms = np.empty(n_terms + 1)
    for start in range(0, n_terms + 1, chunk):
        sl = slice(start, start + chunk)
        g = k_integral_g(xi[sl], z, pair, T, light_speed=light_speed, **quad)
        terms[sl] = weights[sl] * excess_polarizability(atom, pair.solvent, xi[sl]) * g
    return float(np.sum(terms))
