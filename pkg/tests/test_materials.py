import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from casimir_polder.errors import (
    InvariantViolationError,
    MaterialParseError,
    NegativeFrequencyError,
    SchemaViolationError,
    TableRangeUnderflowError,
)
from casimir_polder.materials import (
    PROBE_GRID,
    DebyeTerm,
    DielectricModel,
    LorentzTerm,
    Table,
    check_invariants,
    eval_permittivity,
    load_material,
    load_shipped_material,
    material_to_dict,
    shipped_materials,
    vacuum,
)

HEXANE = {
    "name": "hexane",
    "form": "oscillator",
    "lorentz_terms": [{"c": 0.85, "omega_rad_s": 1.9e16}, {"c": 0.03, "omega_rad_s": 5.4e14, "g_rad_s": 1e13}],
}

TABLE = {
    "name": "tab",
    "form": "tabulated",
    "table": {
        "eps_static": 3.0,
        "points": [
            {"xi_rad_s": 1e13, "eps": 2.5},
            {"xi_rad_s": 1e15, "eps": 2.0},
            {"xi_rad_s": 1e17, "eps": 1.2},
        ],
    },
}


def test_water_static_value(water):
    assert eval_permittivity(water, 0.0) == pytest.approx(77.9, rel=1e-12)


def test_vacuum_is_one():
    xi = np.r_[0.0, np.geomspace(1e3, 1e20, 9)]
    assert np.all(eval_permittivity(vacuum(), xi) == 1.0)


def test_single_lorentz_term():
    m = DielectricModel("l", "oscillator", lorentz_terms=(LorentzTerm(1.0, 1e16),))
    assert eval_permittivity(m, 1e16) == pytest.approx(1.5, rel=1e-15)


def test_debye_and_damped_lorentz():
    m = DielectricModel("m", "oscillator", debye_terms=(DebyeTerm(10.0, 1e-11),), lorentz_terms=(LorentzTerm(2.0, 1e15, 3e14),))
    xi = 2e14
    expected = 1 + 10 / (1 + xi * 1e-11) + 2 / (1 + (xi / 1e15) ** 2 + 3e14 * xi / 1e15**2)
    assert eval_permittivity(m, xi) == pytest.approx(expected, rel=1e-15)


def test_scalar_and_array_shapes(water):
    assert isinstance(eval_permittivity(water, 1e14), float)
    assert eval_permittivity(water, np.ones((2, 3)) * 1e14).shape == (2, 3)


def test_negative_frequency(water):
    with pytest.raises(NegativeFrequencyError):
        eval_permittivity(water, -1.0)
    with pytest.raises(NegativeFrequencyError):
        eval_permittivity(water, np.array([1.0, math.nan]))


def test_pure(water):
    xi = np.geomspace(1e10, 1e18, 50)
    a = eval_permittivity(water, xi)
    b = eval_permittivity(water, xi)
    assert a.tobytes() == b.tobytes()


def test_load_hexane_round_trip():
    m = load_material(HEXANE)
    assert m.name == "hexane"
    assert m.lorentz_terms[0] == LorentzTerm(0.85, 1.9e16, 0.0)
    assert m.lorentz_terms[1].g == 1e13
    again = load_material(material_to_dict(m))
    assert again == m


def test_load_from_text_and_path(tmp_path):
    text = json.dumps(HEXANE)
    assert load_material(text).name == "hexane"
    p = tmp_path / "hexane.json"
    p.write_text(text)
    assert load_material(p).name == "hexane"


def test_negative_strength_violates_minimum():
    doc = {"name": "bad", "form": "oscillator", "lorentz_terms": [{"c": -0.5, "omega_rad_s": 1e16}]}
    with pytest.raises(InvariantViolationError) as info:
        load_material(doc)
    assert info.value.invariant == "MINIMUM"
    assert info.value.xi is not None


def test_non_monotone_table():
    doc = json.loads(json.dumps(TABLE))
    doc["table"]["points"][1]["eps"] = 2.8
    with pytest.raises(InvariantViolationError) as info:
        load_material(doc)
    assert info.value.invariant == "MONOTONICITY"


def test_unsorted_table_is_schema_violation():
    doc = json.loads(json.dumps(TABLE))
    doc["table"]["points"].reverse()
    with pytest.raises(SchemaViolationError):
        load_material(doc)


@pytest.mark.parametrize(
    "patch",
    [
        {"colour": "blue"},
        {"form": "plasma"},
        {"lorentz_terms": [{"c": 1.0}]},
        {"lorentz_terms": [{"c": 1.0, "omega_rad_s": 0.0}]},
        {"lorentz_terms": [{"c": 1.0, "omega_rad_s": 1e16, "g_rad_s": -1.0}]},
        {"debye_terms": [{"d": 1.0, "tau_s": -1e-12}]},
    ],
)
def test_schema_violations(patch):
    with pytest.raises(SchemaViolationError):
        load_material({**HEXANE, **patch})


def test_missing_name():
    doc = dict(HEXANE)
    del doc["name"]
    with pytest.raises(SchemaViolationError):
        load_material(doc)


def test_constant_requires_value():
    with pytest.raises(SchemaViolationError):
        load_material({"name": "c", "form": "constant"})


def test_non_finite_number():
    with pytest.raises(SchemaViolationError):
        load_material('{"name": "c", "form": "constant", "constant_eps": NaN}')


def test_malformed_json():
    with pytest.raises(MaterialParseError):
        load_material('{"name": "c", "form": ')


def test_table_reproduces_nodes():
    m = load_material(TABLE)
    nodes = [p["xi_rad_s"] for p in TABLE["table"]["points"]]
    vals = [p["eps"] for p in TABLE["table"]["points"]]
    assert np.all(np.abs(eval_permittivity(m, np.array(nodes)) / vals - 1) < 1e-12)


def test_table_bridge_and_clamp():
    m = load_material(TABLE)
    assert eval_permittivity(m, 0.0) == 3.0
    assert eval_permittivity(m, 5e12) == pytest.approx(3.0 + (2.5 - 3.0) * 0.5, rel=1e-15)
    assert eval_permittivity(m, 1e18) == 1.0
    # halfway between nodes in log xi
    assert eval_permittivity(m, 1e14) == pytest.approx(2.25, rel=1e-14)


def test_table_underflow_without_bridge():
    m = DielectricModel("t", "tabulated", table=Table((1e13, 1e15), (2.0, 1.5), 2.2), bridge_low=False)
    assert eval_permittivity(m, 0.0) == 2.2
    assert eval_permittivity(m, 1e14) > 1.5
    with pytest.raises(TableRangeUnderflowError):
        eval_permittivity(m, 1e12)


def test_shipped_models_valid():
    names = shipped_materials()
    assert {"water", "vacuum", "crossover_oil", "repulsive_oil", "attractive_oil"} <= set(names)
    for name in names:
        m = load_shipped_material(name)
        check_invariants(m)
        eps = eval_permittivity(m, PROBE_GRID)
        assert np.all(eps >= 1.0)
        assert np.all(np.diff(eps) <= 0.0)


terms = st.lists(
    st.tuples(
        st.floats(0.0, 50.0),
        st.floats(1e12, 1e18),
        st.floats(0.0, 1e17),
    ),
    min_size=1,
    max_size=4,
)


@settings(max_examples=60, deadline=None)
@given(lorentz=terms, debye=st.lists(st.tuples(st.floats(0.0, 80.0), st.floats(1e-15, 1e-9)), max_size=2))
def test_random_oscillators_are_passive(lorentz, debye):
    m = DielectricModel(
        "rand",
        "oscillator",
        debye_terms=tuple(DebyeTerm(d, tau) for d, tau in debye),
        lorentz_terms=tuple(LorentzTerm(c, w, g) for c, w, g in lorentz),
    )
    check_invariants(m)
    eps = eval_permittivity(m, np.r_[0.0, PROBE_GRID])
    assert np.all(eps >= 1.0)
    assert np.all(np.diff(eps) <= 1e-12 * eps[:-1])
