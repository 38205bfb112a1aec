"""One-parameter fits of a damping strength to a target transfer rate.

The rate is evaluated on a logarithmic scan of the search bracket; the first
adjacent pair of scan points that straddles the target is then refined by
bisection in log(parameter) on log(rate).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from . import tightbinding, vibronic
from .solvent import Energetics, TriadGeometry

ETA_BRACKET = (1e-3, 10.0)
GAMMA_BRACKET = (1e9, 1e14)
RTOL = 1e-3
MAX_ITER = 100


class CalibrationError(RuntimeError):
    def __init__(self, message: str, scan: list):
        lines = "\n".join(f"  {p:.6g} -> {k:.6g}" for p, k in scan)
        super().__init__(f"{message}\nscan:\n{lines}")
        self.scan = scan


@dataclass
class CalibrationResult:
    parameter: str
    value: float
    target: float
    achieved: float
    residual: float  # |achieved/target - 1|
    bracket: tuple[float, float]
    iterations: int
    scan: list = field(default_factory=list)  # (parameter, rate) pairs of the initial scan
    monotone_scan: bool = True

    def to_dict(self) -> dict:
        return {
            "parameter": self.parameter,
            "value": self.value,
            "target_per_s": self.target,
            "achieved_per_s": self.achieved,
            "residual": self.residual,
            "bracket": list(self.bracket),
            "iterations": self.iterations,
            "monotone_scan": self.monotone_scan,
            "scan": [[p, k] for p, k in self.scan],
        }

    def to_json(self, path=None) -> str:
        text = json.dumps(self.to_dict(), indent=2, sort_keys=True)
        if path is not None:
            with open(path, "w") as fh:
                fh.write(text + "\n")
        return text


def fit_parameter(
    rate: Callable[[float], float],
    target: float,
    bracket: tuple[float, float],
    parameter: str = "x",
    *,
    points_per_decade: int = 2,
    rtol: float = RTOL,
    max_iter: int = MAX_ITER,
) -> CalibrationResult:
    """Find x in ``bracket`` with rate(x) = target to relative tolerance ``rtol``."""
    if not target > 0:
        raise ValueError("target rate must be positive")
    lo, hi = bracket
    if not 0 < lo < hi:
        raise ValueError("bracket must satisfy 0 < lo < hi")

    n = max(2, int(math.ceil(points_per_decade * math.log10(hi / lo))) + 1)
    grid = np.geomspace(lo, hi, n)
    scan = []
    for x in grid:
        scan.append((float(x), float(rate(float(x)))))
    ks = np.array([k for _, k in scan])
    steps = np.diff(ks)
    monotone = bool(np.all(steps > 0) or np.all(steps < 0))

    log_t = math.log(target)
    evals = 0
    for (xa, ka), (xb, kb) in zip(scan, scan[1:]):
        for x, k in ((xa, ka), (xb, kb)):
            if k > 0 and abs(k / target - 1.0) <= rtol:
                return CalibrationResult(parameter, x, target, k, abs(k / target - 1.0), (lo, hi), 0, scan, monotone)
        if ka > 0 and kb > 0 and (math.log(ka) - log_t) * (math.log(kb) - log_t) < 0:
            break
    else:
        raise CalibrationError(f"target {target:.6g} is not bracketed by {parameter} in [{lo:g}, {hi:g}]", scan)

    fa = math.log(ka) - log_t
    ua, ub = math.log(xa), math.log(xb)
    for evals in range(1, max_iter + 1):
        um = 0.5 * (ua + ub)
        xm = math.exp(um)
        km = float(rate(xm))
        if not km > 0:
            raise CalibrationError(f"non-positive rate at {parameter}={xm:.6g}", scan)
        res = abs(km / target - 1.0)
        if res <= rtol:
            return CalibrationResult(parameter, xm, target, km, res, (lo, hi), evals, scan, monotone)
        fm = math.log(km) - log_t
        if fa * fm < 0:
            ub = um
        else:
            ua, fa = um, fm
    raise CalibrationError(f"bisection did not converge in {max_iter} iterations", scan)


def vibronic_rate_function(
    geom: TriadGeometry,
    energetics: Energetics,
    n_vib: int = vibronic.DEFAULT_NVIB,
    temperature: float = vibronic.DEFAULT_TEMPERATURE,
    backend: str = "resolvent",
) -> Callable[[float], float]:
    """eta -> k_ET (s^-1); the Hamiltonian is built once and reused."""
    base = vibronic.build_vibronic_system(geom, energetics, n_vib=n_vib, temperature=temperature)

    def rate(eta: float) -> float:
        return vibronic.vibronic_rate(replace(base, eta=eta), backend=backend).k_et

    return rate


def tight_binding_rate_function(
    geom: TriadGeometry,
    energetics: Energetics,
    fc_scaled: bool = True,
    temperature: float = 298.0,
) -> Callable[[float], float]:
    """gamma (s^-1) -> analytic tight-binding k_ET (s^-1)."""
    base = tightbinding.tight_binding_system(energetics, geom, 1.0, temperature, fc_scaled=fc_scaled)

    def rate(gamma: float) -> float:
        return tightbinding.analytic_rate(replace(base, gamma=gamma)).k_et

    return rate


def fit_eta(target_rate: float, rate_of_eta: Callable[[float], float], bracket=ETA_BRACKET, **kw) -> CalibrationResult:
    return fit_parameter(rate_of_eta, target_rate, bracket, "eta", **kw)


def fit_gamma(
    target_rate: float, rate_of_gamma: Callable[[float], float], bracket=GAMMA_BRACKET, **kw
) -> CalibrationResult:
    return fit_parameter(rate_of_gamma, target_rate, bracket, "gamma", **kw)
