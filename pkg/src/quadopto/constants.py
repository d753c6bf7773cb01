"""Physical constants (SI, CODATA 2018; all three are exact since the 2019 SI redefinition)."""

import math

PLANCK = 6.62607015e-34  # J s
HBAR = PLANCK / (2.0 * math.pi)  # J s
BOLTZMANN = 1.380649e-23  # J / K
SPEED_OF_LIGHT = 299792458.0  # m / s

TWO_PI = 2.0 * math.pi
