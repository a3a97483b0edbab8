"""Casimir-Polder free energy of an atom dissolved in a solvent near a dielectric interface."""
from .constants import DEFAULT_TEMPERATURE
from .energy import (
    NONRETARDED,
    RETARDED,
    CrossoverReport,
    EnergyCurve,
    EnergySample,
    Tolerances,
    cp_energy_nonretarded,
    cp_energy_retarded,
    find_crossover,
    sweep,
)
from .kernel import HalfSpacePair, QuadratureConfig, fresnel, g_of_xi, g_static
from .materials import (
    DebyeTerm,
    DielectricModel,
    LorentzTerm,
    Table,
    eval_permittivity,
    load_material,
    load_shipped_material,
)
from .polarizability import (
    AtomModel,
    PolarizabilityModel,
    atom_effective_permittivity,
    excess_polarizability,
    load_atom,
    load_shipped_atom,
)
from .spectrum import MatsubaraSpectrum, truncation_index

__version__ = "0.1.0"
