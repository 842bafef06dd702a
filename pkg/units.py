from dataclasses import dataclass

import numpy as np

from constants import HARTREE_EV, AU_FIELD_V_PER_ANGSTROM, AU_TIME_FS, BOHR_UM, SPEED_OF_LIGHT_AU


@dataclass(frozen=True)
class UnitSystem:
    """
    Conversion between lab units (eV, V/Å, µm, fs) and atomic units.

    Everything past the config boundary is in atomic units; lab units only
    appear when reading a config file or writing a report.
    """
    energy_ev: float = HARTREE_EV
    field_v_per_angstrom: float = AU_FIELD_V_PER_ANGSTROM
    time_fs: float = AU_TIME_FS
    length_um: float = BOHR_UM
    speed_of_light: float = SPEED_OF_LIGHT_AU

    def ev_to_au(self, value):
        return np.divide(value, self.energy_ev)

    def au_to_ev(self, value):
        return np.multiply(value, self.energy_ev)

    def field_to_au(self, value):
        return np.divide(value, self.field_v_per_angstrom)

    def field_from_au(self, value):
        return np.multiply(value, self.field_v_per_angstrom)

    def fs_to_au(self, value):
        return np.divide(value, self.time_fs)

    def au_to_fs(self, value):
        return np.multiply(value, self.time_fs)

    def um_to_au(self, value):
        return np.divide(value, self.length_um)

    def au_to_um(self, value):
        return np.multiply(value, self.length_um)

    def wavelength_to_omega(self, wavelength_um: float) -> float:
        """Angular frequency (a.u.) of light with the given vacuum wavelength in µm."""
        return 2.0 * np.pi * self.speed_of_light / self.um_to_au(wavelength_um)

    def omega_to_wavelength(self, omega: float) -> float:
        return self.au_to_um(2.0 * np.pi * self.speed_of_light / omega)


UNITS = UnitSystem()
