"""Three-level (electronic only) donor-bridge-acceptor model.

Relaxation acts between electronic states.  Rates follow from generalized
transfer coefficients g_mn that combine the incoherent hopping rate d_mn with
coherent transfer through the coupling v_mn; the same physics is also
realized as an explicit master equation for numerical cross-checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from . import liouville
from .franck_condon import displacement_from_lambda, lambda_from_displacement
from .solvent import Energetics, TriadGeometry
from .units import HBAR, K_B, rate_internal_to_si, rate_si_to_internal

DEGENERACY_FLOOR = 1e-6  # eV
PAIRS = ((0, 1), (1, 2))  # coupled pairs (donor-bridge, bridge-acceptor), 0-based


class DegenerateLevelsError(ValueError):
    pass


def bose_occupation(delta_e: float, temperature: float) -> float:
    """1/(exp(|dE|/kT) - 1) for an energy gap in eV."""
    if temperature <= 0:
        raise ValueError("temperature must be positive")
    if abs(delta_e) < DEGENERACY_FLOOR:
        raise DegenerateLevelsError(f"gap {delta_e:g} eV is below the degeneracy floor")
    return 1.0 / math.expm1(abs(delta_e) / (K_B * temperature))


def _down_up(delta_e: float, temperature: float) -> tuple[float, float]:
    # (n + 1, n) with n = (n + 1) exp(-x), so the ratio is exactly Boltzmann
    if abs(delta_e) < DEGENERACY_FLOOR:
        raise DegenerateLevelsError(f"gap {delta_e:g} eV is below the degeneracy floor")
    x = abs(delta_e) / (K_B * temperature)
    n1 = -1.0 / math.expm1(-x)
    return n1, n1 * math.exp(-x)


@dataclass(frozen=True)
class TightBindingSystem:
    E1: float
    E2: float
    E3: float
    v12: float
    v23: float
    gamma: float  # s^-1, shared by both channels unless overridden
    temperature: float = 298.0
    fc_scaled: bool = False
    gamma12: float | None = None
    gamma23: float | None = None

    basis = "tight-binding"
    n_vib = 1

    def __post_init__(self):
        if self.temperature <= 0:
            raise ValueError("temperature must be positive")
        if self.gamma < 0:
            raise ValueError("gamma must be non-negative")

    @property
    def energies(self) -> np.ndarray:
        return np.array([self.E1, self.E2, self.E3])

    def pair_gamma(self, pair) -> float:
        """Damping of a coupled pair in s^-1."""
        override = self.gamma12 if tuple(pair) == (0, 1) else self.gamma23
        return self.gamma if override is None else override

    def pair_coupling(self, pair) -> float:
        return self.v12 if tuple(pair) == (0, 1) else self.v23

    def hamiltonian(self) -> np.ndarray:
        H = np.diag(self.energies).astype(float)
        H[0, 1] = H[1, 0] = self.v12
        H[1, 2] = H[2, 1] = self.v23
        return H


def fc_scale_couplings(geom: TriadGeometry, lam21: float, lam23: float) -> tuple[float, float]:
    """Couplings scaled by the ground-state overlap exp(-|lam|/(2 hbar w))."""
    hw2 = 2.0 * geom.hbar_omega_vib
    return geom.V12 * math.exp(-abs(lam21) / hw2), geom.V23 * math.exp(-abs(lam23) / hw2)


def geometric_lambda23(lam21: float, lam31: float, hbar_omega: float) -> float:
    """Bridge-acceptor reorganization from the separation of the two minima."""
    d2 = displacement_from_lambda(lam21, hbar_omega)
    d3 = displacement_from_lambda(lam31, hbar_omega)
    return lambda_from_displacement(d3 - d2, hbar_omega)


def tight_binding_system(
    energetics: Energetics,
    geom: TriadGeometry,
    gamma: float,
    temperature: float = 298.0,
    fc_scaled: bool = False,
    include_internal: bool = False,
) -> TightBindingSystem:
    """Levels at the surface minima; couplings bare or overlap-scaled.

    The scaled couplings use the solvent reorganization only unless
    ``include_internal`` is set.
    """
    v12, v23 = geom.V12, geom.V23
    if fc_scaled:
        lam21 = energetics.lam((2, 1), geom, include_internal)
        lam31 = energetics.lam((3, 1), geom, include_internal)
        lam23 = geometric_lambda23(lam21, lam31, geom.hbar_omega_vib)
        v12, v23 = fc_scale_couplings(geom, lam21, lam23)
    return TightBindingSystem(
        E1=0.0,
        E2=energetics.dG21,
        E3=energetics.dG31,
        v12=v12,
        v23=v23,
        gamma=gamma,
        temperature=temperature,
        fc_scaled=fc_scaled,
    )


@dataclass(frozen=True)
class GCoefficients:
    """Directed rates per fs, indexed [from][to] with 0 = donor.

    ``d`` holds the incoherent hopping rates, ``g`` adds the coherent transfer,
    ``omega`` the transition frequencies (E_m - E_n)/hbar in rad/fs.
    """

    d: np.ndarray
    g: np.ndarray
    omega: np.ndarray

    def __getitem__(self, key: str) -> float:
        # "g12" -> g[0, 1]
        kind, m, n = key[0], int(key[1]) - 1, int(key[2]) - 1
        return float(getattr(self, kind)[m, n])


def hopping_rates(sys: TightBindingSystem) -> np.ndarray:
    """d[a, b]: rate a -> b; downhill gamma*(n+1), uphill gamma*n."""
    E = sys.energies
    d = np.zeros((3, 3))
    for a, b in PAIRS:
        gam = rate_si_to_internal(sys.pair_gamma((a, b)))
        if gam == 0:
            continue
        down, up = _down_up(E[a] - E[b], sys.temperature)
        if E[a] > E[b]:
            d[a, b], d[b, a] = gam * down, gam * up
        else:
            d[a, b], d[b, a] = gam * up, gam * down
    return d


def g_coefficients(sys: TightBindingSystem) -> GCoefficients:
    E = sys.energies
    for a, b in PAIRS:
        if abs(E[a] - E[b]) < DEGENERACY_FLOOR:
            raise DegenerateLevelsError(f"levels {a + 1} and {b + 1} are degenerate")
    d = hopping_rates(sys)
    omega = (E[:, None] - E[None, :]) / HBAR
    g = d.copy()
    decay = d.sum(axis=1)  # total population loss of each level
    for a, b in PAIRS:
        v = sys.pair_coupling((a, b))
        s = decay[a] + decay[b]  # twice the damping of the a-b coherence
        coherent = v * v * s / (HBAR**2 * (omega[a, b] ** 2 + 0.25 * s * s))
        g[a, b] += coherent
        g[b, a] += coherent
    return GCoefficients(d=d, g=g, omega=omega)


def kinetic_rates(g: np.ndarray) -> tuple[float, float]:
    """(relaxation rate, P3(inf)) of donor -> bridge -> acceptor with a
    sparsely populated bridge."""
    g12, g21, g23, g32 = g[0, 1], g[1, 0], g[1, 2], g[2, 1]
    denom = g21 + g23
    relax = g32 + g23 * (g12 - g32) / denom
    return relax, g12 * g23 / (denom * relax)


def analytic_rate(sys: TightBindingSystem) -> liouville.RateResult:
    coeffs = g_coefficients(sys)
    g = coeffs.g
    diagnostics = {"g_per_fs": g.tolist(), "temperature": sys.temperature}
    if g[1, 0] + g[1, 2] == 0:
        if np.any(g != 0):
            raise ZeroDivisionError("g21 + g23 vanishes")
        # undamped limit: every g scales with gamma, so the yield is gamma-independent
        _, p_inf = kinetic_rates(g_coefficients(replace(sys, gamma=1.0, gamma12=None, gamma23=None)).g)
        diagnostics["limit"] = "gamma -> 0"
        return liouville.RateResult(0.0, p_inf, "tb-analytic", 0.0, diagnostics=diagnostics)
    relax, p_inf = kinetic_rates(g)
    if not -1e-9 <= p_inf <= 1 + 1e-9:
        raise ValueError(f"analytic P3(inf) = {p_inf} outside [0, 1]")
    return liouville.RateResult(
        k_et=rate_internal_to_si(p_inf * relax),
        p3_infinity=p_inf,
        method="tb-analytic",
        relaxation_rate=rate_internal_to_si(relax),
        diagnostics=diagnostics,
    )


def master_equation(sys: TightBindingSystem) -> liouville.Generator:
    """Coherent couplings plus population-transfer jumps between coupled pairs."""
    d = hopping_rates(sys)
    channels = []
    for a in range(3):
        for b in range(3):
            if d[a, b] > 0:
                A = np.zeros((3, 3))
                A[b, a] = 1.0
                channels.append((A, d[a, b]))
    return liouville.Generator(sys.hamiltonian(), channels)


def numeric_rate(sys: TightBindingSystem, backend: str = "spectral", dt: float | None = None) -> liouville.RateResult:
    gen = master_equation(sys)
    rho0 = liouville.initial_state(sys)
    if backend in ("spectral", "resolvent"):
        res = liouville.rate_from_generator(gen, rho0, backend=backend, method="tb-numeric")
    else:
        res = liouville.adaptive_rate(gen, rho0, backend=backend, dt=dt, method="tb-numeric")
    res.diagnostics["backend"] = backend
    return res
