"""Excess polarizability of an atom dissolved in a solvent.

The atom is modelled as a dielectric sphere of radius R whose effective
permittivity follows from its vacuum polarizability,

    eps_a = 1 + 4 pi alpha / V,    V = 4/3 pi R^3,

and its excess polarizability in a solvent of permittivity eps_w is

    alpha* = R^3 (eps_a - eps_w) / (eps_a + 2 eps_w).

Polarizabilities are volumes (Gaussian convention) in m^3.
"""
from __future__ import annotations

import copy
import math
from dataclasses import dataclass
from typing import ClassVar

import jsonschema

from .errors import SchemaViolationError
from .materials import (
    MATERIAL_SCHEMA,
    DielectricModel,
    build_model,
    check_invariants,
    evaluate,
    read_json,
    shipped_path,
)


@dataclass(frozen=True)
class PolarizabilityModel(DielectricModel):
    """Vacuum dynamic polarizability alpha(i xi) in m^3.

    Same forms as :class:`DielectricModel` but the response decays to 0
    instead of 1; Lorentz strengths ``c`` and table values are in m^3.
    """

    floor: ClassVar[float] = 0.0


_POL_SCHEMA = copy.deepcopy(MATERIAL_SCHEMA)
_POL_SCHEMA["required"] = ["form"]

ATOM_SCHEMA = {
    "type": "object",
    "properties": {
        "name": {"type": "string"},
        "radius_m": {"type": "number", "exclusiveMinimum": 0},
        "polarizability": {"type": "object"},
    },
    "required": ["name", "radius_m", "polarizability"],
    "additionalProperties": False,
}


@dataclass(frozen=True)
class AtomModel:
    name: str
    radius: float  # m
    polarizability: PolarizabilityModel

    def __post_init__(self):
        if not self.radius > 0:
            raise SchemaViolationError(f"{self.name}: radius must be > 0")

    @property
    def volume(self) -> float:
        return 4.0 / 3.0 * math.pi * self.radius**3

    def alpha(self, xi):
        """Vacuum polarizability alpha(i xi) in m^3."""
        return evaluate(self.polarizability, xi)


def atom_from_eps(name: str, radius: float, eps_a: float) -> AtomModel:
    """Atom whose effective permittivity is ``eps_a`` at every frequency."""
    volume = 4.0 / 3.0 * math.pi * radius**3
    alpha = (eps_a - 1.0) * volume / (4.0 * math.pi)
    pol = PolarizabilityModel(name=name, form="constant", constant_eps=alpha)
    return AtomModel(name=name, radius=radius, polarizability=pol)


def atom_effective_permittivity(atom: AtomModel, xi):
    """eps_a(i xi) = 1 + 4 pi alpha(i xi) / V."""
    return 1.0 + 4.0 * math.pi * atom.alpha(xi) / atom.volume


def excess_polarizability(atom: AtomModel, solvent: DielectricModel, xi):
    """alpha*(i xi) in m^3. Negative when the solvent out-polarizes the atom."""
    eps_a = atom_effective_permittivity(atom, xi)
    eps_w = evaluate(solvent, xi)
    return atom.radius**3 * (eps_a - eps_w) / (eps_a + 2.0 * eps_w)


def load_atom(source) -> AtomModel:
    """Parse and validate an atom document (path, JSON text or mapping)."""
    doc = read_json(source)
    try:
        jsonschema.validate(doc, ATOM_SCHEMA)
    except jsonschema.ValidationError as exc:
        raise SchemaViolationError(f"atom file: {exc.message}") from exc
    if not math.isfinite(doc["radius_m"]):
        raise SchemaViolationError("atom file: radius_m must be finite")
    pol_doc = dict(doc["polarizability"])
    pol_doc.setdefault("name", doc["name"])
    pol = build_model(pol_doc, cls=PolarizabilityModel, schema=_POL_SCHEMA)
    check_invariants(pol)
    return AtomModel(name=doc["name"], radius=float(doc["radius_m"]), polarizability=pol)


def load_shipped_atom(name: str) -> AtomModel:
    return load_atom(shipped_path(f"atoms/{name}.json"))
