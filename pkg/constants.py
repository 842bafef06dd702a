import os

from scipy import constants as sc

# Atomic-unit conversion factors (CODATA via scipy)
HARTREE_EV = sc.physical_constants["Hartree energy in eV"][0]
AU_FIELD_V_PER_ANGSTROM = sc.physical_constants["atomic unit of electric field"][0] * 1e-10
AU_TIME_FS = sc.physical_constants["atomic unit of time"][0] * 1e15
BOHR_UM = sc.physical_constants["Bohr radius"][0] * 1e6
SPEED_OF_LIGHT_AU = 1.0 / sc.fine_structure

HBAR = 1.0
ELECTRON_CHARGE = 1.0

# Reference working point used by g0 calibration
REFERENCE_E0_V_PER_ANGSTROM = 0.5
REFERENCE_N_Z = 6.6e6

THREADS = int(os.getenv("HHGQ_THREADS") or 1)

# Fixed K-batch size; must not depend on the thread count
K_BATCH_SIZE = 32

ENVELOPE_TAIL = 1e-8
MIN_SAMPLES_PER_PERIOD = 400
BAND_SCAN_POINTS = 10_000
