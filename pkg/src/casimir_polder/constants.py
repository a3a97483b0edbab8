"""Physical constants, frozen at CODATA-2018 values so outputs are reproducible."""

BOLTZMANN = 1.380649e-23  # J/K (exact)
HBAR = 1.054571817e-34  # J s
SPEED_OF_LIGHT = 299792458.0  # m/s (exact)

ANGSTROM = 1e-10  # m
ANGSTROM3 = 1e-30  # m^3
ZEPTOJOULE = 1e-21  # J

DEFAULT_TEMPERATURE = 300.0  # K
