"""Matsubara frequency ladder and a-priori truncation of the frequency sum."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .constants import BOLTZMANN, HBAR, SPEED_OF_LIGHT
from .errors import NonpositiveSeparationError, NonpositiveTemperatureError
from .materials import DielectricModel, evaluate

N_FLOOR = 64
N_CEILING = 1_000_000


@dataclass(frozen=True)
class MatsubaraSpectrum:
    """xi_n = n * 2 pi k_B T / hbar, with the n = 0 term carrying half weight."""

    temperature: float  # K

    def __post_init__(self):
        if not self.temperature > 0:
            raise NonpositiveTemperatureError(f"temperature must be > 0 K, got {self.temperature!r}")

    @property
    def xi1(self) -> float:
        return 2.0 * math.pi * BOLTZMANN * self.temperature / HBAR

    def frequencies(self, n):
        """xi_n for an integer or an integer array ``n``."""
        return np.asarray(n, dtype=float) * self.xi1

    @staticmethod
    def weights(n):
        n = np.asarray(n)
        return np.where(n == 0, 0.5, 1.0)


def matsubara_frequency(spectrum: MatsubaraSpectrum, n: int) -> float:
    if n < 0:
        raise ValueError(f"Matsubara index must be >= 0, got {n}")
    return n * spectrum.xi1


def truncation_index(
    spectrum: MatsubaraSpectrum,
    z: float,
    solvent: DielectricModel,
    rel_tol: float,
    *,
    light_speed: float = SPEED_OF_LIGHT,
    n_floor: int = N_FLOOR,
    n_ceiling: int = N_CEILING,
) -> int:
    """Smallest N with exp(-2 z sqrt(eps_w(i xi_N)) xi_N / c) < rel_tol, clamped.

    The search scans n in blocks so the result is the true smallest index
    even if sqrt(eps_w) xi is not monotone.
    """
    if not z > 0:
        raise NonpositiveSeparationError(f"separation must be > 0, got {z!r}")
    if not 0 < rel_tol < 1:
        raise ValueError(f"rel_tol must lie in (0, 1), got {rel_tol!r}")
    threshold = -math.log(rel_tol)
    start, block = 1, 256
    while start <= n_ceiling:
        n = np.arange(start, min(start + block, n_ceiling + 1))
        xi = spectrum.frequencies(n)
        decay = 2.0 * z * np.sqrt(evaluate(solvent, xi)) * xi / light_speed
        hit = np.nonzero(decay > threshold)[0]
        if hit.size:
            return int(min(max(n[hit[0]], n_floor), n_ceiling))
        start += block
        block *= 2
    return n_ceiling
