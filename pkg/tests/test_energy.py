import math

import numpy as np
import pytest

from casimir_polder.constants import BOLTZMANN, SPEED_OF_LIGHT
from casimir_polder.energy import (
    NONRETARDED,
    RETARDED,
    Tolerances,
    cp_energy_nonretarded,
    cp_energy_retarded,
    find_crossover,
    nonretarded_sample,
    nonretarded_terms,
    retarded_sample,
    sign_pattern,
    sweep,
    tail_estimate,
)
from casimir_polder.errors import NonpositiveSeparationError, SumNotConvergedError, SweepError
from casimir_polder.kernel import HalfSpacePair, g_static
from casimir_polder.oracle import oracle_energy
from casimir_polder.polarizability import excess_polarizability

from conftest import NM, T, constant_toy, matched_atom, rel


@pytest.fixture(scope="module")
def crossover_pair(water, oils):
    return HalfSpacePair(water, oils["crossover_oil"])


@pytest.mark.parametrize("z", [1 * NM, 10 * NM, 100 * NM])
def test_index_matched(z, water, oils, atoms):
    same = HalfSpacePair(water, water)
    assert cp_energy_retarded(z, atoms["Kr"], same, T) == 0.0
    assert cp_energy_nonretarded(z, atoms["Kr"], same, T) == 0.0
    pair = HalfSpacePair(water, oils["crossover_oil"])
    atom = matched_atom(water)
    assert abs(cp_energy_retarded(z, atom, pair, T)) < 1e-35
    assert abs(cp_energy_nonretarded(z, atom, pair, T)) < 1e-35


@pytest.mark.parametrize("z", [1 * NM, 30 * NM, 1e-6])
def test_static_term_consistency(z, crossover_pair, atoms):
    atom = atoms["Ar"]
    w = crossover_pair.solvent
    alpha0 = excess_polarizability(atom, w, 0.0)
    s = retarded_sample(z, atom, crossover_pair, T)
    assert s.static_term == 0.5 * alpha0 * g_static(z, crossover_pair, T)
    eps, eps_w = crossover_pair.medium(0.0), w(0.0)
    analytic = -BOLTZMANN * T * alpha0 * (eps - eps_w) / (eps + eps_w) / (4 * eps_w * z**3)
    assert rel(s.static_term, analytic) < 1e-14
    assert rel(nonretarded_sample(z, atom, crossover_pair, T).static_term, analytic) < 1e-14


def test_nonretarded_scaling(crossover_pair, atoms):
    for z in (1 * NM, 3.7 * NM, 50 * NM):
        f1 = cp_energy_nonretarded(z, atoms["Kr"], crossover_pair, T)
        f2 = cp_energy_nonretarded(2 * z, atoms["Kr"], crossover_pair, T)
        assert f2 * 8 == f1


def test_term_sign_rule(water, oils, atoms):
    """A term is attractive when alpha* and eps - eps_w share a sign."""
    n = np.arange(0, 400)
    xi = 2 * math.pi * BOLTZMANN * T / 1.054571817e-34 * n
    for oil in oils.values():
        pair = HalfSpacePair(water, oil)
        for atom in atoms.values():
            contribution = -BOLTZMANN * T / 2 * nonretarded_terms(atom, pair, T, n)
            a = excess_polarizability(atom, water, xi)
            d = oil(xi) - water(xi)
            nonzero = (a != 0) & (d != 0)
            attractive = contribution[nonzero] < 0
            assert np.array_equal(attractive, (np.sign(a) == np.sign(d))[nonzero])


def test_constant_toy_matches_oracle():
    atom, pair = constant_toy()
    z = 5 * NM
    engine = cp_energy_retarded(z, atom, pair, T)
    reference = oracle_energy(z, atom, pair, T, step=1 / 32)
    assert rel(engine, reference) < 1e-6


def test_constant_toy_nonretarded_sum_diverges():
    # with no frequency cutoff every term is the same size
    atom, pair = constant_toy()
    with pytest.raises(SumNotConvergedError) as info:
        cp_energy_nonretarded(5 * NM, atom, pair, T)
    assert info.value.n_reached == 1_000_000


def test_large_separation_static_dominance(water, atoms):
    from casimir_polder.materials import vacuum

    pair = HalfSpacePair(water, vacuum())
    z = 1e-5
    atom = atoms["Ne"]
    static_only = 0.5 * excess_polarizability(atom, water, 0.0) * g_static(z, pair, T)
    assert rel(oracle_energy(z, atom, pair, T, n_terms=2000), static_only) < 1e-3
    assert rel(cp_energy_retarded(z, atom, pair, T), static_only) < 1e-3


def test_sweep_single_point(crossover_pair, atoms):
    curve = sweep(RETARDED, [20 * NM], atoms["Kr"], crossover_pair, T)
    assert len(curve.samples) == 1
    assert curve.samples[0] == retarded_sample(20 * NM, atoms["Kr"], crossover_pair, T)


def test_sweep_order_and_threads(crossover_pair, atoms):
    grid = np.geomspace(1 * NM, 300 * NM, 12)
    serial = sweep(NONRETARDED, grid, atoms["Ar"], crossover_pair, T)
    threaded = sweep(NONRETARDED, grid, atoms["Ar"], crossover_pair, T, workers=3)
    assert np.array_equal(serial.z, grid)
    assert serial == threaded
    ret = sweep(RETARDED, grid[:4], atoms["Ar"], crossover_pair, T, workers=2)
    assert np.array_equal(ret.energy, [cp_energy_retarded(z, atoms["Ar"], crossover_pair, T) for z in grid[:4]])


def test_sweep_validation(crossover_pair, atoms):
    with pytest.raises(ValueError):
        sweep(RETARDED, [2 * NM, 1 * NM], atoms["Kr"], crossover_pair, T)
    with pytest.raises(NonpositiveSeparationError):
        sweep(RETARDED, [0.0, 1 * NM], atoms["Kr"], crossover_pair, T)


def test_sweep_partial_failure(crossover_pair, atoms):
    tols = Tolerances(n_ceiling=64)
    with pytest.raises(SweepError) as info:
        sweep(RETARDED, [1 * NM, 1e-6], atoms["Kr"], crossover_pair, T, tols)
    curve = info.value.curve
    assert [s.converged for s in curve.samples] == [False, True]
    assert math.isnan(curve.samples[0].energy)
    assert "SUM_NOT_CONVERGED" in curve.samples[0].error


def test_tail_estimate():
    assert tail_estimate([1.0, 0.5]) == pytest.approx(0.5)
    assert tail_estimate([1.0, 0.0]) == 0.0
    assert tail_estimate([1.0, 1.0]) == math.inf


def test_sign_pattern():
    assert sign_pattern([3.0, 2.0, -1.0, -2.0], 0.0) == "repulsive->attractive"
    assert sign_pattern([0.0, 0.0], 0.0) == "null"
    assert sign_pattern([-1.0, 1e-40, -2.0], 1e-30) == "attractive"


def test_pure_attraction_has_no_root(water, oils, atoms):
    pair = HalfSpacePair(water, oils["repulsive_oil"])
    atom = atoms["weak"]
    xi = np.r_[0.0, np.geomspace(1e10, 1e19, 300)]
    assert np.all(pair.medium(xi) < water(xi))
    assert np.all(excess_polarizability(atom, water, xi) < 0)
    rep = find_crossover(atom, pair, T, 1 * NM, 300 * NM, points=32)
    assert rep.roots == [] and rep.brackets == []
    assert rep.sign_pattern == "attractive"


def test_index_matched_crossover_is_null(water, atoms):
    rep = find_crossover(atoms["Kr"], HalfSpacePair(water, water), T, 1 * NM, 300 * NM, points=16)
    assert rep.roots == []
    assert rep.sign_pattern == "null"
    assert np.all(rep.scan.energy == 0.0)


def test_crossover_root(crossover_pair, atoms):
    rep = find_crossover(atoms["Kr"], crossover_pair, T, 1 * NM, 300 * NM)
    assert rep.sign_pattern == "repulsive->attractive"
    assert len(rep.roots) == 1
    (lo, hi), root = rep.brackets[0], rep.roots[0]
    assert lo < root < hi
    assert abs(rep.residuals[0]) <= rep.tolerances[0]


@pytest.mark.slow
def test_crossover_root_against_denser_scan(crossover_pair, atoms):
    coarse = find_crossover(atoms["Kr"], crossover_pair, T, 1 * NM, 300 * NM, points=128)
    dense = find_crossover(atoms["Kr"], crossover_pair, T, 1 * NM, 300 * NM, points=1280)
    assert len(coarse.roots) == len(dense.roots) == 1
    assert rel(coarse.roots[0], dense.roots[0]) < 1e-6


def test_light_speed_scaling_reaches_nonretarded_limit():
    from conftest import lorentz_toy

    atom, pair = lorentz_toy()
    z = 5 * NM
    fast = cp_energy_retarded(z, atom, pair, T, light_speed=SPEED_OF_LIGHT * 1e6)
    assert rel(fast, cp_energy_nonretarded(z, atom, pair, T)) < 1e-3
