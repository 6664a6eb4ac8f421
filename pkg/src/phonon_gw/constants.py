"""Physical constants used throughout the package.

Values are the exact SI-2019 defining constants, so golden-number tests are
bit-stable regardless of which CODATA release a third-party library ships.
"""

import math

CONSTANTS_VERSION = "SI2019-exact"

PLANCK_H = 6.62607015e-34  # J s
HBAR = PLANCK_H / (2.0 * math.pi)  # J s
BOLTZMANN_K = 1.380649e-23  # J / K

TABLE = {
    "version": CONSTANTS_VERSION,
    "planck_h": PLANCK_H,
    "hbar": HBAR,
    "boltzmann_k": BOLTZMANN_K,
}
