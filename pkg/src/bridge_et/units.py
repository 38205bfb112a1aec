"""Physical constants and unit conversions.

Internal units: energy eV, length angstrom, time fs, temperature K.
Rates are kept per-fs internally and converted to per-second only when reported.
"""

HBAR = 0.6582119569  # eV fs
K_B = 8.617333262e-5  # eV / K
COULOMB = 14.3996  # e^2 / (4 pi eps0), eV angstrom
WAVENUMBER = 1.23984193e-4  # eV per cm^-1

FS_PER_S = 1e15


def wavenumber_to_energy(w):
    """Convert a wavenumber in cm^-1 to eV."""
    return w * WAVENUMBER


def energy_to_wavenumber(e):
    return e / WAVENUMBER


def rate_internal_to_si(r):
    """Per-fs rate to per-second."""
    return r * FS_PER_S


def rate_si_to_internal(r):
    return r / FS_PER_S


def energy_to_angular_frequency(e):
    """eV to rad/fs."""
    return e / HBAR


def thermal_energy(temperature):
    return K_B * temperature
