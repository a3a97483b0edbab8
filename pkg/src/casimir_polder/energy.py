"""Casimir-Polder free energy of a dissolved atom near a planar interface.

Retarded:      F = sum'_n alpha*(i xi_n) g(i xi_n, z)
Non-retarded:  F = -k_B T / (2 z^3) sum'_n alpha*_n / eps_w,n (eps_n - eps_w,n) / (eps_n + eps_w,n)

The primed sum gives the n = 0 term half weight. F < 0 is attraction and
F > 0 repulsion. Energies are in joules.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .constants import BOLTZMANN, SPEED_OF_LIGHT
from .errors import (
    CasimirPolderError,
    NonpositiveSeparationError,
    QuadratureNotConvergedError,
    SumNotConvergedError,
    SweepError,
)
from .kernel import HalfSpacePair, QuadratureConfig, g_batch, g_static
from .materials import evaluate
from .polarizability import AtomModel, excess_polarizability
from .spectrum import MatsubaraSpectrum, truncation_index

RETARDED = "retarded"
NONRETARDED = "nonretarded"
REGIMES = (RETARDED, NONRETARDED)


@dataclass(frozen=True)
class Tolerances:
    sum_rel_tol: float = 1e-8
    quad: QuadratureConfig = field(default_factory=QuadratureConfig)
    abs_floor: float = 1e-60  # J; convergence floor for sums that vanish identically
    null_rel_tol: float = 1e-12  # |F| below this times k_B T R^3 / z^3 counts as zero
    n_floor: int = 64
    n_ceiling: int = 1_000_000
    scan_points: int = 128
    root_rel_tol: float = 1e-6


@dataclass(frozen=True)
class EnergySample:
    z: float  # m
    energy: float  # J
    regime: str
    n_max: int
    panels: int = 0  # quadrature panels summed over all frequencies
    tail: float = 0.0  # estimate of the neglected remainder of the frequency sum, J
    static_term: float = 0.0  # half-weighted n = 0 contribution, J
    magnitude: float = 0.0  # sum of |terms|, J
    converged: bool = True
    error: str | None = None


@dataclass(frozen=True)
class EnergyCurve:
    regime: str
    samples: tuple[EnergySample, ...]

    @property
    def z(self) -> np.ndarray:
        return np.array([s.z for s in self.samples])

    @property
    def energy(self) -> np.ndarray:
        return np.array([s.energy for s in self.samples])

    @property
    def converged(self) -> bool:
        return all(s.converged for s in self.samples)


@dataclass(frozen=True)
class CrossoverReport:
    brackets: list[tuple[float, float]]
    roots: list[float]
    residuals: list[float]  # F at each root, J
    tolerances: list[float]  # bound on |F(root)|: max |F| at the final bracket ends
    sign_pattern: str
    scan: EnergyCurve
    root_rel_tol: float


def _check_z(z):
    if not z > 0:
        raise NonpositiveSeparationError(f"separation must be > 0, got {z!r}")


def _retarded_terms(n, z, atom, pair, T, tols, light_speed, budget=0.0):
    """Terms alpha*_n g_n for n >= 1 and their total quadrature panel count.

    ``budget`` (J) is an absolute error allowance for the whole block, shared
    equally between its terms; integrals of negligible terms stop early.
    """
    spectrum = MatsubaraSpectrum(T)
    xi = spectrum.frequencies(n)
    alpha = np.atleast_1d(excess_polarizability(atom, pair.solvent, xi))
    with np.errstate(divide="ignore", invalid="ignore"):
        abs_g = np.where(alpha != 0.0, budget / n.size / np.abs(alpha), np.inf)
    kern = g_batch(xi, z, pair, T, tols.quad, light_speed=light_speed, abs_tol=abs_g)
    if not np.all(kern.converged):
        bad = int(np.argmin(kern.converged))
        raise QuadratureNotConvergedError(
            f"g(xi_{int(n[bad])}, z={z:g} m) did not converge",
            error_estimate=float(kern.error[bad]),
            panels=int(kern.panels[bad]),
        )
    return alpha * kern.value, int(kern.panels.sum())


FIRST_BLOCK = 256


def _term_blocks(lo, hi, z, atom, pair, T, tols, light_speed, scale):
    """Terms for n in [lo, hi] in doubling blocks.

    The first block of the whole sum is integrated to ``quad.rel_tol`` alone.
    Later blocks may stop at an absolute error of ``quad.rel_tol`` times the
    running sum of |terms|, prorated by block length, so the total quadrature
    error stays within about twice ``quad.rel_tol`` of the sum.
    """
    parts, panels = [], 0
    start, block = lo, FIRST_BLOCK
    while start <= hi:
        n = np.arange(start, min(start + block, hi + 1))
        budget = 0.0 if start == 1 else tols.quad.rel_tol * scale * n.size / hi
        t, p = _retarded_terms(n, z, atom, pair, T, tols, light_speed, budget)
        parts.append(t)
        panels += p
        scale += float(np.abs(t).sum())
        start += block
        block *= 2
    return np.concatenate(parts), panels


def retarded_sample(
    z: float,
    atom: AtomModel,
    pair: HalfSpacePair,
    T: float,
    tols: Tolerances = Tolerances(),
    *,
    light_speed: float = SPEED_OF_LIGHT,
) -> EnergySample:
    """Retarded free energy at one separation, with convergence diagnostics."""
    _check_z(z)
    spectrum = MatsubaraSpectrum(T)
    static = 0.5 * excess_polarizability(atom, pair.solvent, 0.0) * g_static(z, pair, T)
    n_max = truncation_index(
        spectrum, z, pair.solvent, tols.sum_rel_tol,
        light_speed=light_speed, n_floor=tols.n_floor, n_ceiling=tols.n_ceiling,
    )
    terms, panels = _term_blocks(1, n_max, z, atom, pair, T, tols, light_speed, abs(static))
    while True:
        scale = abs(static) + float(np.abs(terms).sum())
        tail = tail_estimate(np.r_[static, terms][-2:])
        if tail <= max(tols.sum_rel_tol * scale, tols.abs_floor):
            break
        if n_max >= tols.n_ceiling:
            raise SumNotConvergedError(
                f"Matsubara sum at z={z:g} m not converged after {n_max} terms",
                n_reached=n_max,
                last_term=abs(float(terms[-1])),
            )
        n_next = min(2 * n_max, tols.n_ceiling)
        more, p = _term_blocks(n_max + 1, n_next, z, atom, pair, T, tols, light_speed, scale)
        terms = np.concatenate((terms, more))
        panels += p
        n_max = n_next
    energy = math.fsum([static, *terms])
    return EnergySample(z, energy, RETARDED, n_max, panels, tail, static, scale)


def tail_estimate(last_two) -> float:
    """Remainder of a sum from its last two terms, assuming geometric decay.

    Returns inf when the terms are not decaying.
    """
    a, b = (abs(float(v)) for v in last_two)
    if b == 0.0:
        return 0.0
    if b >= a:
        return math.inf
    q = b / a
    return b * q / (1.0 - q)


def cp_energy_retarded(z, atom, pair, T, tols: Tolerances = Tolerances(), *, light_speed=SPEED_OF_LIGHT) -> float:
    """Retarded Casimir-Polder free energy in J (negative means attraction)."""
    return retarded_sample(z, atom, pair, T, tols, light_speed=light_speed).energy


def nonretarded_terms(atom, pair, T, n):
    """Summands alpha*/eps_w (eps - eps_w)/(eps + eps_w) in m^3, without the n = 0 half weight."""
    xi = MatsubaraSpectrum(T).frequencies(n)
    eps = evaluate(pair.medium, xi)
    eps_w = evaluate(pair.solvent, xi)
    alpha = excess_polarizability(atom, pair.solvent, xi)
    return alpha / eps_w * (eps - eps_w) / (eps + eps_w)


def nonretarded_sample(
    z: float, atom: AtomModel, pair: HalfSpacePair, T: float, tols: Tolerances = Tolerances()
) -> EnergySample:
    """Non-retarded (c -> infinity) free energy at one separation.

    The sum stops at the first n >= ``n_floor`` where the geometric tail
    estimate from the last two terms is below ``sum_rel_tol`` times the running
    sum of magnitudes. The truncation does not depend on z.
    """
    _check_z(z)
    MatsubaraSpectrum(T)
    prefactor = -BOLTZMANN * T / 2.0
    parts = []
    running = 0.0
    previous = math.nan
    start, block = 0, 256
    n_max = None
    while start <= tols.n_ceiling:
        n = np.arange(start, min(start + block, tols.n_ceiling + 1))
        t = np.atleast_1d(nonretarded_terms(atom, pair, T, n))
        w = np.where(n == 0, 0.5, 1.0) * t
        mag = np.abs(w)
        cum = running + np.cumsum(mag)
        before = np.r_[previous, mag[:-1]]
        with np.errstate(divide="ignore", invalid="ignore"):
            q = mag / before
            tail = np.where(mag == 0, 0.0, np.where(q < 1, mag * q / (1 - q), np.inf))
        ok = (n >= tols.n_floor) & (tail <= tols.sum_rel_tol * cum)
        hit = np.nonzero(ok)[0]
        if hit.size:
            k = hit[0]
            parts.append(w[: k + 1])
            n_max = int(n[k])
            tail_sum = float(tail[k])
            break
        parts.append(w)
        running = float(cum[-1])
        previous = float(mag[-1])
        start += block
        block *= 2
    if n_max is None:
        raise SumNotConvergedError(
            "non-retarded sum not converged", n_reached=tols.n_ceiling, last_term=float(abs(parts[-1][-1]))
        )
    weighted = np.concatenate(parts)
    total = math.fsum(weighted)
    energy = prefactor * total / z**3
    static = prefactor * float(weighted[0]) / z**3
    tail = abs(prefactor) * tail_sum / z**3
    magnitude = abs(prefactor) * float(np.abs(weighted).sum()) / z**3
    return EnergySample(z, energy, NONRETARDED, n_max, 0, tail, static, magnitude)


def cp_energy_nonretarded(z, atom, pair, T, tols: Tolerances = Tolerances()) -> float:
    """Non-retarded van der Waals free energy in J; scales exactly as 1/z^3."""
    return nonretarded_sample(z, atom, pair, T, tols).energy


def sample(regime, z, atom, pair, T, tols=Tolerances(), *, light_speed=SPEED_OF_LIGHT) -> EnergySample:
    if regime == RETARDED:
        return retarded_sample(z, atom, pair, T, tols, light_speed=light_speed)
    if regime == NONRETARDED:
        return nonretarded_sample(z, atom, pair, T, tols)
    raise ValueError(f"unknown regime {regime!r}")


def sweep(
    regime: str,
    z_grid,
    atom: AtomModel,
    pair: HalfSpacePair,
    T: float,
    tols: Tolerances = Tolerances(),
    *,
    workers: int = 1,
    light_speed: float = SPEED_OF_LIGHT,
) -> EnergyCurve:
    """Evaluate F on every separation in ``z_grid`` (sorted, positive).

    Samples may be computed concurrently; the curve keeps grid order. If any
    sample fails a :class:`SweepError` carrying the partial curve is raised,
    with the failed samples marked ``converged=False``.
    """
    z_grid = [float(z) for z in z_grid]
    if not z_grid:
        raise ValueError("empty separation grid")
    if any(z <= 0 for z in z_grid):
        raise NonpositiveSeparationError("all separations must be > 0")
    if any(b <= a for a, b in zip(z_grid, z_grid[1:])):
        raise ValueError("separation grid must be strictly increasing")

    def one(z):
        try:
            return sample(regime, z, atom, pair, T, tols, light_speed=light_speed)
        except CasimirPolderError as exc:
            n_reached = getattr(exc, "n_reached", None) or 0
            return EnergySample(z, math.nan, regime, n_reached, converged=False, error=f"{exc.code}: {exc}")

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            samples = tuple(pool.map(one, z_grid))
    else:
        samples = tuple(one(z) for z in z_grid)
    curve = EnergyCurve(regime, samples)
    failures = [s for s in samples if not s.converged]
    if failures:
        raise SweepError(f"{len(failures)} of {len(samples)} samples failed: {failures[0].error}", curve, failures)
    return curve


def null_floor(z: float, atom: AtomModel, T: float, tols: Tolerances = Tolerances()) -> float:
    """Energy magnitude (J) below which F at separation z is treated as zero.

    Relative to the natural scale k_B T R^3 / z^3, so rounding noise from
    index-matched inputs is classified as null at every separation.
    """
    return max(tols.abs_floor, tols.null_rel_tol * BOLTZMANN * T * atom.radius**3 / z**3)


def sign_of(energy: float, floor: float) -> int:
    if abs(energy) <= floor:
        return 0
    return 1 if energy > 0 else -1


_LABELS = {1: "repulsive", -1: "attractive", 0: "null"}


def sign_pattern(energies, floors) -> str:
    """Compress the sign sequence of ``energies`` into e.g. ``"repulsive->attractive"``."""
    signs = [sign_of(e, f) for e, f in zip(energies, np.broadcast_to(floors, np.shape(energies)))]
    if all(s == 0 for s in signs):
        return "null"
    runs = []
    for s in signs:
        if s == 0:
            continue
        if not runs or runs[-1] != s:
            runs.append(s)
    return "->".join(_LABELS[s] for s in runs)


def find_crossover(
    atom: AtomModel,
    pair: HalfSpacePair,
    T: float,
    z_min: float,
    z_max: float,
    tols: Tolerances = Tolerances(),
    *,
    points: int | None = None,
    workers: int = 1,
    light_speed: float = SPEED_OF_LIGHT,
) -> CrossoverReport:
    """Locate every sign change of the retarded energy in [z_min, z_max].

    A log-spaced scan (``points`` or ``tols.scan_points``) brackets sign
    changes, and each bracket is bisected in log z down to a relative width
    of ``tols.root_rel_tol``.
    """
    if not 0 < z_min < z_max:
        raise ValueError("need 0 < z_min < z_max")
    points = points or tols.scan_points
    grid = np.geomspace(z_min, z_max, points)
    scan = sweep(RETARDED, grid, atom, pair, T, tols, workers=workers, light_speed=light_speed)

    def energy(z):
        return retarded_sample(z, atom, pair, T, tols, light_speed=light_speed).energy

    floors = [null_floor(s.z, atom, T, tols) for s in scan.samples]
    nonzero = [(s.z, s.energy) for s, f in zip(scan.samples, floors) if sign_of(s.energy, f) != 0]
    brackets, roots, residuals, bounds = [], [], [], []
    for (z_lo, f_lo), (z_hi, f_hi) in zip(nonzero, nonzero[1:]):
        if np.sign(f_lo) == np.sign(f_hi):
            continue
        brackets.append((z_lo, z_hi))
        lo, hi = z_lo, z_hi
        while hi / lo - 1.0 > tols.root_rel_tol:
            mid = math.sqrt(lo * hi)
            f_mid = energy(mid)
            if f_mid == 0.0:
                lo = hi = mid
                f_lo = f_hi = 0.0
                break
            if np.sign(f_mid) == np.sign(f_lo):
                lo, f_lo = mid, f_mid
            else:
                hi, f_hi = mid, f_mid
        root = math.sqrt(lo * hi)
        roots.append(root)
        residuals.append(energy(root) if lo != hi else 0.0)
        bounds.append(max(abs(f_lo), abs(f_hi)))
    pattern = sign_pattern(scan.energy, floors)
    return CrossoverReport(brackets, roots, residuals, bounds, pattern, scan, tols.root_rel_tol)


def with_quad(tols: Tolerances, **changes) -> Tolerances:
    """Copy of ``tols`` with the quadrature settings replaced."""
    return replace(tols, quad=replace(tols.quad, **changes))
