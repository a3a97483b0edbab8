"""Dielectric response on the imaginary frequency axis.

A model evaluates eps(i xi) for real xi >= 0 in one of four forms:

* ``oscillator``: 1 + sum d/(1 + xi tau) + sum c/(1 + (xi/omega)^2 + g xi/omega^2)
* ``tabulated``: linear interpolation in (log xi, eps) between samples, with a
  linear bridge from the static value to the first node and eps = 1 beyond the
  last node
* ``constant``: a frequency independent value
* ``vacuum``: identically 1

Models are frozen dataclasses and evaluation is pure.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import ClassVar

import jsonschema
import numpy as np

from .errors import (
    InvariantViolationError,
    MaterialParseError,
    NegativeFrequencyError,
    SchemaViolationError,
    TableRangeUnderflowError,
)

FORMS = ("oscillator", "tabulated", "constant", "vacuum")

#: Validation probe grid in rad/s (microwave to far UV); xi = 0 is checked as well.
PROBE_GRID = np.logspace(10.0, 18.0, 200)

_NUMBER = {"type": "number"}

MATERIAL_SCHEMA = {
    "type": "object",
    "properties": {
        "name": {"type": "string"},
        "form": {"enum": list(FORMS)},
        "debye_terms": {
            "type": "array",
            "items": {
                "type": "object",
                "properties": {"d": _NUMBER, "tau_s": _NUMBER},
                "required": ["d", "tau_s"],
                "additionalProperties": False,
            },
        },
        "lorentz_terms": {
            "type": "array",
            "items": {
                "type": "object",
                "properties": {"c": _NUMBER, "omega_rad_s": _NUMBER, "g_rad_s": _NUMBER},
                "required": ["c", "omega_rad_s"],
                "additionalProperties": False,
            },
        },
        "table": {
            "type": "object",
            "properties": {
                "eps_static": _NUMBER,
                "points": {
                    "type": "array",
                    "minItems": 1,
                    "items": {
                        "type": "object",
                        "properties": {"xi_rad_s": _NUMBER, "eps": _NUMBER},
                        "required": ["xi_rad_s", "eps"],
                        "additionalProperties": False,
                    },
                },
            },
            "required": ["eps_static", "points"],
            "additionalProperties": False,
        },
        "constant_eps": _NUMBER,
    },
    "required": ["name", "form"],
    "additionalProperties": False,
}


@dataclass(frozen=True)
class DebyeTerm:
    d: float
    tau: float  # s


@dataclass(frozen=True)
class LorentzTerm:
    c: float
    omega: float  # rad/s
    g: float = 0.0  # rad/s


@dataclass(frozen=True)
class Table:
    """Samples of the response at xi > 0 plus the static value at xi = 0."""

    xi: tuple[float, ...]
    eps: tuple[float, ...]
    eps_static: float


@dataclass(frozen=True)
class DielectricModel:
    """Relative permittivity eps(i xi) of a passive medium.

    ``bridge_low`` selects how a tabulated model is evaluated between xi = 0 and
    the first node. When False, such queries raise
    :class:`~casimir_polder.errors.TableRangeUnderflowError`.
    """

    name: str
    form: str
    debye_terms: tuple[DebyeTerm, ...] = ()
    lorentz_terms: tuple[LorentzTerm, ...] = ()
    table: Table | None = None
    constant_eps: float | None = None
    bridge_low: bool = True

    #: Asymptotic value at infinite frequency and lower bound of the response.
    floor: ClassVar[float] = 1.0

    def __call__(self, xi):
        return evaluate(self, xi)


def vacuum() -> DielectricModel:
    return DielectricModel(name="vacuum", form="vacuum")


def constant(value: float, name: str | None = None) -> DielectricModel:
    return DielectricModel(name=name or f"constant-{value:g}", form="constant", constant_eps=float(value))


def evaluate(model, xi):
    """Evaluate any response model (permittivity or polarizability) at xi >= 0.

    Accepts a scalar or an array; returns the same shape (a Python float for
    scalar input).
    """
    x = np.asarray(xi, dtype=float)
    if np.any(x < 0) or np.any(np.isnan(x)):
        raise NegativeFrequencyError(f"frequency must be >= 0, got {xi!r}")
    form = model.form
    if form == "vacuum":
        out = np.full_like(x, model.floor)
    elif form == "constant":
        out = np.full_like(x, model.constant_eps)
    elif form == "oscillator":
        out = np.full_like(x, model.floor)
        for t in model.debye_terms:
            out = out + t.d / (1.0 + x * t.tau)
        for t in model.lorentz_terms:
            w = x / t.omega
            out = out + t.c / (1.0 + w * w + t.g * x / t.omega**2)
    elif form == "tabulated":
        out = _eval_table(model, x)
    else:
        raise SchemaViolationError(f"unknown form {form!r}")
    if out.ndim == 0:
        return float(out)
    return out


def eval_permittivity(model: DielectricModel, xi):
    """Return eps(i xi) for ``model`` at angular frequency ``xi`` (rad/s)."""
    return evaluate(model, xi)


def _eval_table(model, x):
    tab = model.table
    nodes = np.asarray(tab.xi)
    vals = np.asarray(tab.eps)
    out = np.empty_like(x)
    zero = x == 0
    below = (x > 0) & (x < nodes[0])
    above = x > nodes[-1]
    inside = ~(zero | below | above)
    out[zero] = tab.eps_static
    if np.any(below):
        if not model.bridge_low:
            raise TableRangeUnderflowError(
                f"{model.name}: xi below first table node {nodes[0]:g} rad/s and no bridge configured"
            )
        out[below] = tab.eps_static + (vals[0] - tab.eps_static) * (x[below] / nodes[0])
    out[above] = model.floor
    if np.any(inside):
        out[inside] = np.interp(np.log(x[inside]), np.log(nodes), vals)
    return out


def check_invariants(model, probe=PROBE_GRID) -> None:
    """Raise InvariantViolationError unless the model is >= floor and non-increasing.

    The probe runs over ``probe`` with xi = 0 prepended.
    """
    xi = np.concatenate(([0.0], np.asarray(probe, dtype=float)))
    vals = np.asarray(evaluate(model, xi))
    if not np.all(np.isfinite(vals)):
        k = int(np.argmin(np.isfinite(vals)))
        raise InvariantViolationError(
            f"{model.name}: non-finite value at xi={xi[k]:g} rad/s", "MINIMUM", xi[k], vals[k]
        )
    low = vals < model.floor
    if np.any(low):
        k = int(np.argmax(low))
        raise InvariantViolationError(
            f"{model.name}: MINIMUM violated, value {vals[k]:.6g} < {model.floor:g} at xi={xi[k]:.6g} rad/s",
            "MINIMUM",
            xi[k],
            vals[k],
        )
    slack = 1e-12 * np.abs(vals[:-1])
    rising = vals[1:] > vals[:-1] + slack
    if np.any(rising):
        k = int(np.argmax(rising))
        raise InvariantViolationError(
            f"{model.name}: MONOTONICITY violated, value rises from {vals[k]:.6g} at xi={xi[k]:.6g} "
            f"to {vals[k + 1]:.6g} at xi={xi[k + 1]:.6g} rad/s",
            "MONOTONICITY",
            (xi[k], xi[k + 1]),
            (vals[k], vals[k + 1]),
        )


def read_json(source) -> dict:
    """Load a JSON document from a path, a JSON string or an already parsed mapping."""
    if isinstance(source, dict):
        return source
    if isinstance(source, Path) or (isinstance(source, str) and not source.lstrip().startswith("{")):
        try:
            text = Path(source).read_text()
        except OSError as exc:
            raise MaterialParseError(f"cannot read {source}: {exc}") from exc
    else:
        text = source

    def _reject(token):
        raise SchemaViolationError(f"non-finite number {token} in document")

    try:
        doc = json.loads(text, parse_constant=_reject)
    except json.JSONDecodeError as exc:
        raise MaterialParseError(f"malformed JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise SchemaViolationError("document must be a JSON object")
    return doc


def _check_finite(obj, where="document"):
    if isinstance(obj, bool):
        return
    if isinstance(obj, float) and not math.isfinite(obj):
        raise SchemaViolationError(f"non-finite number in {where}")
    if isinstance(obj, dict):
        for k, v in obj.items():
            _check_finite(v, f"{where}.{k}")
    elif isinstance(obj, list):
        for i, v in enumerate(obj):
            _check_finite(v, f"{where}[{i}]")


def build_model(doc: dict, cls=DielectricModel, schema=MATERIAL_SCHEMA):
    """Construct an unvalidated model of type ``cls`` from a parsed document."""
    try:
        jsonschema.validate(doc, schema)
    except jsonschema.ValidationError as exc:
        path = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise SchemaViolationError(f"{path}: {exc.message}") from exc
    _check_finite(doc)
    form = doc["form"]
    name = doc["name"]
    kwargs = {"name": name, "form": form}
    if form == "oscillator":
        debye = tuple(DebyeTerm(float(t["d"]), float(t["tau_s"])) for t in doc.get("debye_terms", []))
        lorentz = tuple(
            LorentzTerm(float(t["c"]), float(t["omega_rad_s"]), float(t.get("g_rad_s", 0.0)))
            for t in doc.get("lorentz_terms", [])
        )
        for t in debye:
            if t.tau < 0:
                raise SchemaViolationError(f"{name}: Debye relaxation time must be >= 0")
        for t in lorentz:
            if t.omega <= 0:
                raise SchemaViolationError(f"{name}: Lorentz resonance frequency must be > 0")
            if t.g < 0:
                raise SchemaViolationError(f"{name}: Lorentz damping must be >= 0")
        kwargs.update(debye_terms=debye, lorentz_terms=lorentz)
    elif form == "tabulated":
        if "table" not in doc:
            raise SchemaViolationError(f"{name}: form 'tabulated' requires 'table'")
        pts = doc["table"]["points"]
        xi = tuple(float(p["xi_rad_s"]) for p in pts)
        eps = tuple(float(p["eps"]) for p in pts)
        if xi[0] <= 0 or any(b <= a for a, b in zip(xi, xi[1:])):
            raise SchemaViolationError(f"{name}: table xi must be positive and strictly increasing")
        static = float(doc["table"]["eps_static"])
        if min(eps + (static,)) < cls.floor:
            raise SchemaViolationError(f"{name}: table values must be >= {cls.floor:g}")
        kwargs["table"] = Table(xi=xi, eps=eps, eps_static=static)
    elif form == "constant":
        if "constant_eps" not in doc:
            raise SchemaViolationError(f"{name}: form 'constant' requires 'constant_eps'")
        kwargs["constant_eps"] = float(doc["constant_eps"])
    return cls(**kwargs)


def load_material(source) -> DielectricModel:
    """Parse and validate a material document (path, JSON text or mapping)."""
    model = build_model(read_json(source))
    check_invariants(model)
    return model


def material_to_dict(model) -> dict:
    """Inverse of :func:`build_model` for any response model."""
    doc = {"name": model.name, "form": model.form}
    if model.form == "oscillator":
        doc["debye_terms"] = [{"d": t.d, "tau_s": t.tau} for t in model.debye_terms]
        doc["lorentz_terms"] = [
            {"c": t.c, "omega_rad_s": t.omega, "g_rad_s": t.g} for t in model.lorentz_terms
        ]
    elif model.form == "tabulated":
        doc["table"] = {
            "eps_static": model.table.eps_static,
            "points": [{"xi_rad_s": x, "eps": e} for x, e in zip(model.table.xi, model.table.eps)],
        }
    elif model.form == "constant":
        doc["constant_eps"] = model.constant_eps
    return doc


def shipped_path(filename: str) -> Path:
    """Path of a data file bundled with the package."""
    return Path(str(resources.files("casimir_polder") / "data" / filename))


def shipped_materials() -> list[str]:
    """Names of the bundled (synthetic) material files."""
    folder = resources.files("casimir_polder") / "data" / "materials"
    return sorted(p.name[:-5] for p in folder.iterdir() if p.name.endswith(".json"))


def load_shipped_material(name: str) -> DielectricModel:
    return load_material(shipped_path(f"materials/{name}.json"))
