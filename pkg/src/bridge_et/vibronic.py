"""Vibronic donor-bridge-acceptor model.

Three diabatic harmonic surfaces share one reaction coordinate.  Each carries a
truncated vibrational ladder; inter-surface couplings are dressed by
Franck-Condon overlaps, and a thermal bath relaxes every ladder independently.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import liouville
from .franck_condon import build_fc_table, displacement_from_lambda
from .solvent import Energetics, TriadGeometry
from .units import HBAR, K_B

DEFAULT_ETA = 0.372
DEFAULT_TEMPERATURE = 298.0
DEFAULT_NVIB = 12


@dataclass(frozen=True, eq=False)
class VibronicSystem:
    n_vib: int
    hbar_omega_vib: float
    minima: tuple  # surface minimum energies (eV)
    displacements: tuple  # dimensionless, donor at 0
    hamiltonian: np.ndarray
    eta: float
    temperature: float
    geometry: TriadGeometry
    energetics: Energetics
    diagnostics: dict = field(default_factory=dict)

    basis = "vibronic"

    @property
    def dim(self) -> int:
        return 3 * self.n_vib

    @property
    def energies(self) -> np.ndarray:
        return np.real(np.diag(self.hamiltonian)).copy()

    def index(self, m: int, M: int) -> int:
        """Basis index of surface m (1-based) and vibrational level M."""
        return (m - 1) * self.n_vib + M

    def couplings(self) -> np.ndarray:
        return self.hamiltonian - np.diag(np.diag(self.hamiltonian))

    def block(self, m: int, n: int) -> np.ndarray:
        i, j = (m - 1) * self.n_vib, (n - 1) * self.n_vib
        return self.hamiltonian[i : i + self.n_vib, j : j + self.n_vib]

    def to_dict(self) -> dict:
        diss = build_dissipator(self)
        return {
            "n_vib": self.n_vib,
            "hbar_omega_vib_eV": self.hbar_omega_vib,
            "eta": self.eta,
            "temperature_K": self.temperature,
            "surface_minima_eV": list(self.minima),
            "displacements": list(self.displacements),
            "energies_eV": self.energies.tolist(),
            "coupling_12_eV": self.block(1, 2).tolist(),
            "coupling_23_eV": self.block(2, 3).tolist(),
            "gamma_down_per_fs": diss.gamma_down,
            "gamma_up_per_fs": diss.gamma_up,
        }

    def to_json(self, path=None) -> str:
        text = json.dumps(self.to_dict(), indent=2, sort_keys=True)
        if path is not None:
            with open(path, "w") as fh:
                fh.write(text + "\n")
        return text


def _displacements(energetics: Energetics, geom: TriadGeometry, include_internal: bool):
    hw = geom.hbar_omega_vib
    d2 = displacement_from_lambda(energetics.lam((2, 1), geom, include_internal), hw)
    d3 = displacement_from_lambda(energetics.lam((3, 1), geom, include_internal), hw)
    return 0.0, d2, d3


def build_vibronic_system(
    geom: TriadGeometry,
    energetics: Energetics,
    n_vib: int = DEFAULT_NVIB,
    eta: float = DEFAULT_ETA,
    temperature: float = DEFAULT_TEMPERATURE,
    include_internal: bool = True,
    headroom: float = 1.0,
) -> VibronicSystem:
    """Hamiltonian over the (surface, level) basis plus bath parameters.

    Surface minima sit at 0, dG21, dG31; displacements follow from the
    reorganization energies (internal part included unless told otherwise).
    """
    if n_vib < 2:
        raise ValueError("n_vib must be >= 2")
    if eta < 0:
        raise ValueError("eta must be non-negative")
    if temperature <= 0:
        raise ValueError("temperature must be positive")
    hw = geom.hbar_omega_vib
    disp = _displacements(energetics, geom, include_internal)
    minima = (0.0, energetics.dG21, energetics.dG31)

    n = n_vib
    H = np.zeros((3 * n, 3 * n))
    ladder = (np.arange(n) + 0.5) * hw
    for m in range(3):
        H[m * n : (m + 1) * n, m * n : (m + 1) * n] = np.diag(minima[m] + ladder)
    F12 = build_fc_table(disp[1] - disp[0], n - 1).F
    F23 = build_fc_table(disp[2] - disp[1], n - 1).F
    H[0:n, n : 2 * n] = geom.V12 * F12
    H[n : 2 * n, 0:n] = geom.V12 * F12.T
    H[n : 2 * n, 2 * n : 3 * n] = geom.V23 * F23
    H[2 * n : 3 * n, n : 2 * n] = geom.V23 * F23.T

    lam_max = max(
        energetics.lam((2, 1), geom, include_internal), energetics.lam((3, 1), geom, include_internal)
    )
    window = max(abs(energetics.dG21), abs(energetics.dG31)) + lam_max + headroom * hw
    diagnostics = {"energy_window_eV": window, "ladder_span_eV": n * hw}
    if window > n * hw:
        diagnostics["truncation_warning"] = True
        warnings.warn(
            f"n_vib={n} spans {n * hw:.3f} eV but the transfer window needs {window:.3f} eV",
            RuntimeWarning,
            stacklevel=2,
        )
    return VibronicSystem(
        n_vib=n,
        hbar_omega_vib=hw,
        minima=minima,
        displacements=disp,
        hamiltonian=H,
        eta=eta,
        temperature=temperature,
        geometry=geom,
        energetics=energetics,
        diagnostics=diagnostics,
    )


@dataclass(frozen=True, eq=False)
class Dissipator:
    channels: list  # (jump operator, rate per fs)
    gamma_down: float  # per fs, multiplies M for the M -> M-1 transition
    gamma_up: float

    @property
    def detailed_balance_ratio(self) -> float:
        return self.gamma_up / self.gamma_down if self.gamma_down else float("nan")


def bath_rates(eta: float, hbar_omega: float, temperature: float) -> tuple[float, float]:
    """Downward and upward ladder rates (per fs): eta*w*(n+1) and eta*w*n."""
    x = hbar_omega / (K_B * temperature)
    omega = hbar_omega / HBAR
    down = eta * omega / -np.expm1(-x)  # eta w (n + 1)
    return down, down * np.exp(-x)


def build_dissipator(sys: VibronicSystem) -> Dissipator:
    """Lowering and raising operators of each surface's ladder."""
    down, up = bath_rates(sys.eta, sys.hbar_omega_vib, sys.temperature)
    n = sys.n_vib
    a = np.diag(np.sqrt(np.arange(1, n)), 1)
    channels = []
    for m in range(3):
        A = np.zeros((3 * n, 3 * n))
        A[m * n : (m + 1) * n, m * n : (m + 1) * n] = a
        channels.append((A, down))
        channels.append((A.T.copy(), up))
    return Dissipator(channels=channels, gamma_down=down, gamma_up=up)


def liouvillian_generator(sys: VibronicSystem, dissipator: Dissipator | None = None) -> liouville.Generator:
    dissipator = build_dissipator(sys) if dissipator is None else dissipator
    return liouville.Generator(sys.hamiltonian, dissipator.channels)


def minima_positions(
    energetics: Energetics, geom: TriadGeometry, include_internal: bool = True
) -> list[tuple[float, float]]:
    """(coordinate, energy) of the donor, bridge and acceptor minima."""
    d = _displacements(energetics, geom, include_internal)
    return [(d[0], 0.0), (d[1], energetics.dG21), (d[2], energetics.dG31)]


def vibronic_rate(
    sys: VibronicSystem,
    backend: str = "spectral",
    thermal_donor: bool = False,
    dt: float | None = None,
) -> liouville.RateResult:
    """ET rate of the vibronic model from the donor ground vibrational level."""
    gen = liouvillian_generator(sys)
    rho0 = liouville.initial_state(sys, thermal_donor=thermal_donor)
    if backend in ("spectral", "resolvent"):
        res = liouville.rate_from_generator(gen, rho0, backend=backend, method="vibronic")
    else:
        res = liouville.adaptive_rate(gen, rho0, backend=backend, dt=dt, method="vibronic")
    res.diagnostics.update(n_vib=sys.n_vib, eta=sys.eta, temperature=sys.temperature, backend=backend)
    return res
