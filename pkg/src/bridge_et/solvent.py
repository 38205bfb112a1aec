"""Solvent-dependent energetics of the porphyrin-porphyrin-quinone triad.

Marcus-type continuum estimates for the free energy differences and the
solvent reorganization energies, plus the nine-solvent reference dataset.
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable

from scipy import integrate

from .units import COULOMB, HBAR, WAVENUMBER

# Channels are written as (m, n) with the electron moving from block n to m.
CHANNELS = ((2, 1), (3, 1))

CSV_HEADER = [
    "name",
    "eps_s",
    "eps_inf",
    "dG21_eV",
    "dG31_eV",
    "lam21s_eV",
    "lam31s_eV",
    "gamma_per_s",
    "k_el_per_s",
    "k_vib_per_s",
]


def _channel(channel) -> tuple[int, int]:
    if isinstance(channel, str):
        channel = [int(c) for c in channel if c.isdigit()]
    m, n = channel
    if (m, n) not in CHANNELS:
        raise ValueError(f"unknown channel {channel!r}; expected one of {CHANNELS}")
    return m, n


@dataclass(frozen=True)
class TriadGeometry:
    """Radii, distances (angstrom), couplings and internal parameters (eV)."""

    r1: float = 5.5
    r2: float = 5.5
    r3: float = 3.2
    r12: float = 12.5
    r13: float = 14.4
    V12: float = 0.065
    V23: float = 0.0022
    V13: float = 0.0
    lambda_internal: float = 0.3
    hbar_omega_vib: float = 1500 * WAVENUMBER

    def __post_init__(self):
        for name in ("r1", "r2", "r3", "r12", "r13", "hbar_omega_vib"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if not self.r12 < self.r13:
            raise ValueError("the bridge must sit between donor and acceptor (r12 < r13)")
        if self.V13 != 0:
            raise ValueError("donor and acceptor are not directly coupled (V13 = 0)")
        if self.lambda_internal < 0:
            raise ValueError("lambda_internal must be non-negative")

    def radius(self, k: int) -> float:
        return (self.r1, self.r2, self.r3)[k - 1]

    def distance(self, m: int, n: int) -> float:
        return {(2, 1): self.r12, (3, 1): self.r13}[(m, n)]

    def coulomb_coeff(self, channel) -> float:
        """e^2/(4 pi eps0) * (1/(2 r_m) + 1/(2 r_n) - 1/r_mn), in eV."""
        m, n = _channel(channel)
        return COULOMB * (
            0.5 / self.radius(m) + 0.5 / self.radius(n) - 1.0 / self.distance(m, n)
        )


@dataclass(frozen=True)
class SolventRecord:
    name: str
    eps_s: float
    eps_inf: float
    dG21: float
    dG31: float
    lam21_s: float
    lam31_s: float
    gamma_tb: float  # s^-1
    k_el_ref: float = math.nan  # s^-1
    k_vib_ref: float = math.nan  # s^-1

    def __post_init__(self):
        if not self.eps_s >= self.eps_inf >= 1.0:
            raise ValueError(f"{self.name}: need eps_s >= eps_inf >= 1")

    def dG(self, channel) -> float:
        return {(2, 1): self.dG21, (3, 1): self.dG31}[_channel(channel)]

    def lam_s(self, channel) -> float:
        return {(2, 1): self.lam21_s, (3, 1): self.lam31_s}[_channel(channel)]


@dataclass(frozen=True)
class ChannelConstants:
    """Solvent-independent offsets c_mn and Coulomb coefficients (eV).

    dG_mn(eps_s) = c_mn + coulomb_coeff_mn / eps_s.  The offsets absorb the
    redox and excitation energies and the reference-solvent correction, none of
    which are known individually.
    """

    c21: float
    c31: float
    coulomb_coeff21: float
    coulomb_coeff31: float

    def offset(self, channel) -> float:
        return {(2, 1): self.c21, (3, 1): self.c31}[_channel(channel)]

    def coeff(self, channel) -> float:
        return {(2, 1): self.coulomb_coeff21, (3, 1): self.coulomb_coeff31}[_channel(channel)]


# Columns: eps_s, eps_inf, dG21, dG31 (eV), lam21_s, lam31_s (eV),
# Gamma (1e11/s), k_el (1e8/s), k_vib (1e8/s).
_TABLE1 = [
    ("cyclohexane", 2.02, 2.00, 0.976, 0.393, 0.007, 0.012, 0.042, 0.181, 0.7),
    ("toluene", 2.38, 2.24, 0.867, 0.202, 0.039, 0.069, 0.227, 1.04, 0.8),
    ("anisole", 4.33, 2.29, 0.590, -0.281, 0.300, 0.524, 1.751, 4.24, 2.30),
    ("dibromoethane", 4.78, 2.37, 0.558, -0.336, 0.312, 0.544, 1.817, 4.63, 2.45),
    ("chlorobenzene", 5.29, 1.93, 0.529, -0.388, 0.481, 0.839, 2.804, 3.21, 3.63),
    ("MTHF", 6.24, 2.00, 0.486, -0.462, 0.497, 0.868, 2.900, 3.59, 3.58),
    ("methyl acetate", 6.68, 1.85, 0.471, -0.489, 0.571, 0.996, 3.328, 2.96, 4.15),
    ("trichloroethane", 7.25, 2.06, 0.454, -0.512, 0.508, 0.887, 2.960, 3.98, 3.50),
    ("dichloromethane", 9.08, 2.03, 0.413, -0.590, 0.559, 0.977, 3.264, 4.00, 3.80),
]

REFERENCE_SOLVENT = "MTHF"


def table1() -> tuple[SolventRecord, ...]:
    """The built-in nine-solvent dataset, ordered by static dielectric constant."""
    return tuple(
        SolventRecord(
            name=name,
            eps_s=es,
            eps_inf=ei,
            dG21=g21,
            dG31=g31,
            lam21_s=l21,
            lam31_s=l31,
            gamma_tb=gam * 1e11,
            k_el_ref=kel * 1e8,
            k_vib_ref=kvib * 1e8,
        )
        for name, es, ei, g21, g31, l21, l31, gam, kel, kvib in _TABLE1
    )


def find_solvent(name: str, dataset: Iterable[SolventRecord] | None = None) -> SolventRecord:
    dataset = table1() if dataset is None else dataset
    key = name.strip().lower()
    for rec in dataset:
        if rec.name.lower() == key:
            return rec
    raise KeyError(f"unknown solvent {name!r}")


def load_csv(path) -> tuple[SolventRecord, ...]:
    """Read a solvent dataset using the CSV_HEADER schema."""
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        missing = set(CSV_HEADER) - set(reader.fieldnames or ())
        if missing:
            raise ValueError(f"{path}: missing columns {sorted(missing)}")
        rows = []
        for line in reader:
            rows.append(
                SolventRecord(
                    name=line["name"],
                    eps_s=float(line["eps_s"]),
                    eps_inf=float(line["eps_inf"]),
                    dG21=float(line["dG21_eV"]),
                    dG31=float(line["dG31_eV"]),
                    lam21_s=float(line["lam21s_eV"]),
                    lam31_s=float(line["lam31s_eV"]),
                    gamma_tb=float(line["gamma_per_s"]),
                    k_el_ref=float(line["k_el_per_s"] or "nan"),
                    k_vib_ref=float(line["k_vib_per_s"] or "nan"),
                )
            )
    return tuple(rows)


def record_row(rec: SolventRecord) -> list:
    return [
        rec.name,
        rec.eps_s,
        rec.eps_inf,
        rec.dG21,
        rec.dG31,
        rec.lam21_s,
        rec.lam31_s,
        rec.gamma_tb,
        rec.k_el_ref,
        rec.k_vib_ref,
    ]


def write_csv(records: Iterable[SolventRecord], path) -> None:
    with open(Path(path), "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_HEADER)
        for rec in records:
            writer.writerow([v if isinstance(v, str) else repr(float(v)) for v in record_row(rec)])


def solvent_reorganization(geom: TriadGeometry, eps_s: float, eps_inf: float, channel) -> float:
    """Marcus solvent reorganization energy of a channel (eV)."""
    if eps_inf < 1.0:
        raise ValueError("eps_inf must be >= 1")
    if eps_inf > eps_s:
        raise ValueError(f"eps_inf ({eps_inf}) exceeds eps_s ({eps_s})")
    return geom.coulomb_coeff(channel) * (1.0 / eps_inf - 1.0 / eps_s)


def channel_constants(geom: TriadGeometry, c21: float = 0.0, c31: float = 0.0) -> ChannelConstants:
    return ChannelConstants(c21, c31, geom.coulomb_coeff((2, 1)), geom.coulomb_coeff((3, 1)))


def calibrate_channel_constants(reference: SolventRecord, geom: TriadGeometry) -> ChannelConstants:
    """Fix the offsets so the reference row's free energies are reproduced exactly."""
    k21 = geom.coulomb_coeff((2, 1))
    k31 = geom.coulomb_coeff((3, 1))
    if not (math.isfinite(reference.dG21) and math.isfinite(reference.dG31)):
        raise ValueError("reference row needs finite free energies")
    return ChannelConstants(
        c21=reference.dG21 - k21 / reference.eps_s,
        c31=reference.dG31 - k31 / reference.eps_s,
        coulomb_coeff21=k21,
        coulomb_coeff31=k31,
    )


def free_energy_difference(consts: ChannelConstants, eps_s: float, channel) -> float:
    if eps_s < 1.0:
        raise ValueError("eps_s must be >= 1")
    return consts.offset(channel) + consts.coeff(channel) / eps_s


def scaled_gamma(reference: SolventRecord, target_lam21_s: float) -> float:
    """Tight-binding damping scaled in proportion to the donor-bridge solvent
    reorganization energy (s^-1)."""
    if reference.lam21_s == 0:
        raise ZeroDivisionError("reference solvent reorganization energy is zero")
    return reference.gamma_tb * target_lam21_s / reference.lam21_s


def lambda_from_spectral_density(
    J: Callable[[float], float],
    *,
    points: Iterable[float] | None = None,
    upper: float = math.inf,
) -> float:
    """hbar * integral_0^inf J(w)/w dw with w in rad/fs and J in 1/fs.

    ``points`` marks narrow features for the adaptive quadrature; it forces a
    finite ``upper`` limit.  Raises ValueError when the quadrature does not converge.
    """
    integrand = lambda w: J(w) / w if w > 0 else 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            if points is not None:
                pts = sorted(points)
                if not math.isfinite(upper):
                    upper = 20.0 * max(pts)
                val, _ = integrate.quad(integrand, 0.0, upper, points=pts, limit=500)
            else:
                val, _ = integrate.quad(integrand, 0.0, upper, limit=500)
        except integrate.IntegrationWarning as exc:
            raise ValueError(f"reorganization integral did not converge: {exc}") from exc
    return HBAR * val


@dataclass(frozen=True)
class Energetics:
    """Everything the rate models need for one solvent (eV).

    ``lam21_s``/``lam31_s`` are the solvent parts; total reorganization adds
    ``lambda_internal`` from the geometry.
    """

    dG21: float
    dG31: float
    lam21_s: float
    lam31_s: float
    label: str = ""
    extra: dict = field(default_factory=dict, compare=False)

    def lam(self, channel, geom: TriadGeometry, include_internal: bool = True) -> float:
        lam_s = {(2, 1): self.lam21_s, (3, 1): self.lam31_s}[_channel(channel)]
        return lam_s + (geom.lambda_internal if include_internal else 0.0)


def energetics_from_record(rec: SolventRecord) -> Energetics:
    return Energetics(rec.dG21, rec.dG31, rec.lam21_s, rec.lam31_s, label=rec.name)


def energetics_from_dielectric(
    eps_s: float,
    eps_inf: float,
    consts: ChannelConstants,
    geom: TriadGeometry,
    label: str = "",
) -> Energetics:
    return Energetics(
        dG21=free_energy_difference(consts, eps_s, (2, 1)),
        dG31=free_energy_difference(consts, eps_s, (3, 1)),
        lam21_s=solvent_reorganization(geom, eps_s, eps_inf, (2, 1)),
        lam31_s=solvent_reorganization(geom, eps_s, eps_inf, (3, 1)),
        label=label or f"eps_s={eps_s:g}",
    )
