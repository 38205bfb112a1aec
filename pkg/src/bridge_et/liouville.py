"""Density-matrix propagation under a Lindblad-form generator and extraction
of the acceptor population and electron-transfer rate.

Superoperators act on row-major vectorized density matrices, so
vec(A rho B) = kron(A, B.T) @ vec(rho).
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.linalg as sla
from scipy.integrate import trapezoid

from .units import HBAR, K_B, rate_internal_to_si

BACKENDS = ("step-exponential", "rk4", "spectral", "resolvent")
NULL_TOL = 1e-11  # relative size below which an eigenvalue of L counts as stationary
PLATEAU_TOL = 1e-4


class RateConvergenceError(RuntimeError):
    """The acceptor population did not settle, so no rate can be assigned."""

    def __init__(self, message, residual=math.nan):
        super().__init__(f"{message} (residual {residual:.3g})")
        self.residual = residual


class Generator:
    """L(rho) = -(i/hbar)[H, rho] + sum_k g_k (A rho A^+ - {A^+ A, rho}/2).

    ``channels`` is a sequence of (jump operator, rate per fs).
    """

    def __init__(self, hamiltonian, channels=(), hbar=HBAR):
        self.hamiltonian = np.asarray(hamiltonian, dtype=complex)
        self.channels = [(np.asarray(A, dtype=complex), float(g)) for A, g in channels if g != 0]
        self.hbar = hbar
        n = self.hamiltonian.shape[0]
        if self.hamiltonian.shape != (n, n):
            raise ValueError("Hamiltonian must be square")
        for A, g in self.channels:
            if A.shape != (n, n):
                raise ValueError("jump operator dimension mismatch")
            if g < 0:
                raise ValueError("negative channel rate")

    @property
    def dim(self) -> int:
        return self.hamiltonian.shape[0]

    @cached_property
    def _effective(self):
        # -(i/hbar) H - (1/2) sum g A^+ A, used by ``apply``
        K = -1j / self.hbar * self.hamiltonian
        for A, g in self.channels:
            K = K - 0.5 * g * (A.conj().T @ A)
        return K

    def apply(self, rho: np.ndarray) -> np.ndarray:
        K = self._effective
        out = K @ rho + rho @ K.conj().T
        for A, g in self.channels:
            out += g * (A @ rho @ A.conj().T)
        return out

    def __call__(self, rho):
        return self.apply(rho)

    @cached_property
    def matrix(self) -> np.ndarray:
        n = self.dim
        eye = np.eye(n)
        K = self._effective
        L = np.kron(K, eye) + np.kron(eye, K.conj())
        for A, g in self.channels:
            L += g * np.kron(A, A.conj())
        return L


@dataclass
class DensityMatrix:
    """Density matrix over ``n_levels`` electronic blocks of ``n_vib`` states each."""

    data: np.ndarray
    basis: str = "tight-binding"
    n_vib: int = 1
    n_levels: int = 3

    def __post_init__(self):
        self.data = np.asarray(self.data, dtype=complex)
        if self.data.shape != (self.dim, self.dim):
            raise ValueError(f"expected a {self.dim}x{self.dim} matrix, got {self.data.shape}")

    @property
    def dim(self) -> int:
        return self.n_levels * self.n_vib

    def like(self, data) -> "DensityMatrix":
        return DensityMatrix(data, self.basis, self.n_vib, self.n_levels)

    def populations(self) -> np.ndarray:
        return electronic_populations(self.data, self.n_vib, self.n_levels)

    def check(self) -> dict:
        return physicality(self.data)


def electronic_populations(rho: np.ndarray, n_vib: int, n_levels: int = 3) -> np.ndarray:
    return np.real(np.diagonal(rho)).reshape(n_levels, n_vib).sum(axis=1)


def physicality(rho: np.ndarray) -> dict:
    herm = rho - rho.conj().T
    return {
        "trace_error": float(abs(np.trace(rho) - 1.0)),
        "hermiticity_defect": float(np.abs(herm).max()),
        "min_eigenvalue": float(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))[0]),
    }


def initial_state(system, thermal_donor: bool = False) -> DensityMatrix:
    """All population on the donor, no coherences.

    Vibronic systems start in the donor vibrational ground state, or in a
    Boltzmann distribution over the donor ladder when ``thermal_donor`` is set.
    """
    n_vib = getattr(system, "n_vib", 1)
    basis = getattr(system, "basis", "tight-binding")
    rho = np.zeros((3 * n_vib, 3 * n_vib), dtype=complex)
    if thermal_donor and n_vib > 1:
        x = system.hbar_omega_vib / (K_B * system.temperature)
        w = np.exp(-x * np.arange(n_vib))
        rho[np.arange(n_vib), np.arange(n_vib)] = w / w.sum()
    else:
        rho[0, 0] = 1.0
    return DensityMatrix(rho, basis=basis, n_vib=n_vib)


def acceptor_population(rho: DensityMatrix) -> float:
    """Summed population of the acceptor block (level 3)."""
    n = rho.n_vib
    return float(np.real(np.trace(rho.data[2 * n : 3 * n, 2 * n : 3 * n])))


def _projector(n_vib: int, level: int = 3, n_levels: int = 3) -> np.ndarray:
    P = np.zeros((n_levels * n_vib, n_levels * n_vib))
    lo = (level - 1) * n_vib
    P[lo : lo + n_vib, lo : lo + n_vib] = np.eye(n_vib)
    return P


@dataclass
class Trajectory:
    times: np.ndarray  # fs
    populations: np.ndarray  # (n_samples, n_levels)
    purity: np.ndarray
    states: np.ndarray | None = None
    diagnostics: dict = field(default_factory=dict)

    @property
    def p3(self) -> np.ndarray:
        return self.populations[:, 2]

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t_fs", "P1", "P2", "P3", "purity"])
            for t, p, pur in zip(self.times, self.populations, self.purity):
                w.writerow([f"{t:.6g}", f"{p[0]:.6g}", f"{p[1]:.6g}", f"{p[2]:.6g}", f"{pur:.6g}"])


def _rk4_step(gen: Generator, rho: np.ndarray, dt: float) -> np.ndarray:
    k1 = gen.apply(rho)
    k2 = gen.apply(rho + 0.5 * dt * k1)
    k3 = gen.apply(rho + 0.5 * dt * k2)
    k4 = gen.apply(rho + dt * k3)
    return rho + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)


def _spectral_factors(L: np.ndarray, null_tol: float = NULL_TOL):
    """Eigenvalues, right eigenvectors and an LU factorization of the latter.

    Eigenvalues within ``null_tol`` (relative) of zero are set to exactly zero.
    Trace conservation makes the stationary eigenvalue exactly zero, while eig
    returns it as O(1e-15); left in place, exp(w t) drifts the trace by w t.
    """
    w, R = sla.eig(L)
    scale = max(1.0, float(np.abs(w).max()))
    w = np.where(np.abs(w) <= null_tol * scale, 0.0, w)
    lu = sla.lu_factor(R)
    return w, R, lu


def _trace_preserving(step: np.ndarray, n: int) -> np.ndarray:
    """Remove the rounding residue of expm from the trace row of a step map.

    The exact map conserves the trace; without this the O(1e-13) residue per
    step accumulates over thousands of steps.
    """
    diag = np.arange(n) * (n + 1)  # positions of rho_ii in the row-major vector
    trace_row = np.zeros(n * n)
    trace_row[diag] = 1.0
    deficit = trace_row - step[diag].sum(axis=0)
    step = step.copy()
    step[diag] += deficit / n
    return step


class _HermitianCoordinates:
    """Real coordinates of an n x n Hermitian matrix.

    The diagonal comes first, then the real and imaginary parts of the upper
    triangle.  A Hermiticity-preserving generator is a real matrix in these
    coordinates, so its eigenvalues come in exact conjugate pairs and every
    reconstructed state is Hermitian by construction.
    """

    def __init__(self, n: int):
        self.n = n
        self.upper = np.triu_indices(n, 1)
        self.diag_flat = np.arange(n) * (n + 1)
        self.upper_flat = self.upper[0] * n + self.upper[1]
        self.lower_flat = self.upper[1] * n + self.upper[0]

    def to_real(self, rho: np.ndarray) -> np.ndarray:
        v = np.asarray(rho).ravel()
        return np.concatenate([v[self.diag_flat].real, v[self.upper_flat].real, v[self.upper_flat].imag])

    def from_real(self, x: np.ndarray) -> np.ndarray:
        n, m = self.n, len(self.upper_flat)
        rho = np.zeros(n * n, dtype=complex)
        rho[self.diag_flat] = x[:n]
        off = x[n : n + m] + 1j * x[n + m :]
        rho[self.upper_flat] = off
        rho[self.lower_flat] = off.conj()
        return rho.reshape(n, n)

    def real_generator(self, L: np.ndarray) -> np.ndarray:
        up, lo = L[:, self.upper_flat], L[:, self.lower_flat]
        images = np.hstack([L[:, self.diag_flat], up + lo, 1j * (up - lo)])  # L applied to each basis matrix
        rows = np.vstack([images[self.diag_flat].real, images[self.upper_flat].real, images[self.upper_flat].imag])
        return rows


def _trace_free_modes(w: np.ndarray, R: np.ndarray, n: int) -> np.ndarray:
    """Remove the stationary-state component that rounding leaves in decaying modes.

    Every eigenvector with w != 0 is traceless because the trace is conserved.
    Near-collinear slow modes otherwise carry a spurious trace that cancels
    against the stationary mode only at t = 0.  Columns are in the real
    coordinates, where the first n entries are the diagonal.
    """
    null = np.flatnonzero(w == 0)
    if len(null) != 1:
        return R
    k0 = null[0]
    traces = R[:n].sum(axis=0)
    traces[k0] = 0.0
    stationary = R[:, k0] / R[:n, k0].sum()
    return R - np.outer(stationary, traces)


def _chain(first, rest):
    yield first
    yield from rest


def propagate(
    gen: Generator,
    rho0: DensityMatrix,
    t_end: float,
    dt: float,
    backend: str = "step-exponential",
    keep_states: bool = False,
) -> Trajectory:
    """Sample rho(t) on the grid 0, dt, ..., t_end (fs)."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    if gen.dim != rho0.dim:
        raise ValueError(f"generator dimension {gen.dim} does not match state dimension {rho0.dim}")
    if backend not in ("step-exponential", "rk4", "spectral"):
        raise ValueError(f"unknown propagation backend {backend!r}")
    n_steps = max(1, int(round(t_end / dt)))
    times = dt * np.arange(n_steps + 1)
    n = gen.dim
    diagnostics = {"backend": backend, "dt": dt, "n_steps": n_steps}

    def spectral_states():
        coords = _HermitianCoordinates(n)
        w, R, lu = _spectral_factors(coords.real_generator(gen.matrix))
        R = _trace_free_modes(w, R, n)
        lu = sla.lu_factor(R)
        c = sla.lu_solve(lu, coords.to_real(rho0.data))
        for t in times:
            # the imaginary part cancels between conjugate modes up to rounding
            yield coords.from_real((R @ (np.exp(w * t) * c)).real)

    def exponential_states():
        step = _trace_preserving(sla.expm(gen.matrix * dt), n)
        v = rho0.data.ravel().copy()
        yield v.reshape(n, n)
        for _ in range(n_steps):
            v = step @ v
            yield v.reshape(n, n)

    def rk4_states():
        rho = rho0.data.copy()
        yield rho
        for _ in range(n_steps):
            rho = _rk4_step(gen, rho, dt)
            yield rho

    if backend == "spectral":
        try:
            source = spectral_states()
            first = next(source)
        except (np.linalg.LinAlgError, ValueError) as exc:
            diagnostics["fallback"] = f"eigendecomposition failed ({exc}); used step-exponential"
            backend = "step-exponential"
    if backend == "step-exponential":
        source = exponential_states()
        first = next(source)
    elif backend == "rk4":
        source = rk4_states()
        first = next(source)

    pops = np.empty((len(times), rho0.n_levels))
    purity = np.empty(len(times))
    kept = [] if keep_states else None
    worst = {"trace_error": 0.0, "hermiticity_defect": 0.0, "min_eigenvalue": math.inf}
    for k, rho in enumerate(_chain(first, source)):
        pops[k] = electronic_populations(rho, rho0.n_vib, rho0.n_levels)
        purity[k] = float(np.real(np.vdot(rho, rho)))
        chk = physicality(rho)
        worst["trace_error"] = max(worst["trace_error"], chk["trace_error"])
        worst["hermiticity_defect"] = max(worst["hermiticity_defect"], chk["hermiticity_defect"])
        worst["min_eigenvalue"] = min(worst["min_eigenvalue"], chk["min_eigenvalue"])
        if kept is not None:
            kept.append(rho.copy())
    diagnostics.update(worst, backend=backend)
    return Trajectory(
        times=times,
        populations=pops,
        purity=purity,
        states=np.array(kept) if keep_states else None,
        diagnostics=diagnostics,
    )


@dataclass
class RateResult:
    """Electron-transfer rate and acceptor yield.

    ``k_et`` = P3(inf) / int_0^inf (1 - P3(t)/P3(inf)) dt, i.e. the yield times
    the relaxation rate; ``relaxation_rate`` = P3(inf) / int (P3(inf) - P3(t)) dt.
    Both in s^-1.
    """

    k_et: float
    p3_infinity: float
    method: str
    relaxation_rate: float = math.nan
    p3_trace: tuple | None = None  # (times fs, P3)
    diagnostics: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = {
            "method": self.method,
            "k_et_per_s": self.k_et,
            "relaxation_rate_per_s": self.relaxation_rate,
            "p3_infinity": self.p3_infinity,
            "diagnostics": _jsonable(self.diagnostics),
        }
        if self.p3_trace is not None:
            out["p3_trace"] = {
                "t_fs": [float(t) for t in self.p3_trace[0]],
                "p3": [float(p) for p in self.p3_trace[1]],
            }
        return out

    def to_json(self, path=None, indent=2) -> str:
        text = json.dumps(self.to_dict(), indent=indent, sort_keys=True)
        if path is not None:
            with open(path, "w") as fh:
                fh.write(text + "\n")
        return text


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    return obj


def _rates(p_inf: float, integral: float, method: str, diagnostics: dict, trace=None) -> RateResult:
    """Assemble a RateResult from P3(inf) and int (P3(inf) - P3) dt (fs)."""
    diagnostics = dict(diagnostics, integral_fs=integral)
    if p_inf < -1e-9 or p_inf > 1 + 1e-9:
        raise RateConvergenceError("P3(inf) outside [0, 1]", residual=p_inf)
    if p_inf <= 1e-14:
        return RateResult(0.0, max(p_inf, 0.0), method, 0.0, trace, diagnostics)
    if integral <= 0:
        raise RateConvergenceError("non-positive accumulation integral", residual=integral)
    relax = p_inf / integral
    return RateResult(
        k_et=rate_internal_to_si(p_inf * relax),
        p3_infinity=min(p_inf, 1.0),
        method=method,
        relaxation_rate=rate_internal_to_si(relax),
        p3_trace=trace,
        diagnostics=diagnostics,
    )


def _spectral_rate(gen, rho0, p, method, null_tol):
    w, R, lu = _spectral_factors(gen.matrix, null_tol)
    c = sla.lu_solve(lu, rho0.data.ravel())
    a = (p @ R) * c
    scale = max(1.0, float(np.abs(w).max()))
    null = np.abs(w) <= null_tol * scale
    if not null.any():
        raise RateConvergenceError("generator has no stationary state", residual=float(np.abs(w).min()))
    stuck = (~null) & (np.abs(w.real) <= null_tol * scale) & (np.abs(a) > 1e-12)
    if stuck.any():
        raise RateConvergenceError(
            "undamped oscillation in the acceptor population", residual=float(np.abs(a[stuck]).max())
        )
    p_inf = float(np.real(a[null].sum()))
    integral = float(np.real(np.sum(a[~null] / w[~null])))
    slow = np.sort(-w.real[~null])
    diagnostics = {
        "n_null_modes": int(null.sum()),
        "slowest_decay_per_fs": float(slow[0]) if slow.size else math.nan,
        "imag_residual": float(abs(np.imag(a[null].sum()))),
    }
    return _rates(p_inf, integral, method, diagnostics)


def _resolvent_rate(gen, rho0, p, method):
    L = gen.matrix
    n = gen.dim
    tr = np.eye(n).ravel()
    A = L.copy()
    A[0, :] = tr  # replaces the rho_00 equation, implied by trace conservation
    lu = sla.lu_factor(A)
    b = np.zeros(n * n, dtype=complex)
    b[0] = 1.0
    rho_inf = sla.lu_solve(lu, b)
    residual = float(np.abs(L @ rho_inf).max())
    if not np.all(np.isfinite(rho_inf)) or residual > 1e-9:
        raise np.linalg.LinAlgError(f"stationary state not unique (residual {residual:.3g})")
    rhs = rho_inf - rho0.data.ravel()
    rhs[0] = 0.0
    x = sla.lu_solve(lu, rhs)  # x = int_0^inf (rho(t) - rho_inf) dt
    p_inf = float(np.real(p @ rho_inf))
    integral = float(-np.real(p @ x))
    return _rates(p_inf, integral, method, {"stationary_residual": residual})


def rate_from_generator(
    gen: Generator,
    rho0: DensityMatrix,
    backend: str = "spectral",
    method: str = "",
    null_tol: float = NULL_TOL,
) -> RateResult:
    """Exact infinite-horizon rate from the generator.

    ``spectral`` expands P3(t) in eigenmodes of L; ``resolvent`` solves the
    stationary and accumulated-state linear systems directly.  A failing
    resolvent solve falls back to the spectral path.
    """
    p = _projector(rho0.n_vib, 3, rho0.n_levels).ravel().astype(complex)
    method = method or backend
    if backend == "resolvent":
        try:
            return _resolvent_rate(gen, rho0, p, method)
        except (np.linalg.LinAlgError, sla.LinAlgError) as exc:
            res = _spectral_rate(gen, rho0, p, method, null_tol)
            res.diagnostics["fallback"] = f"resolvent failed ({exc}); used spectral"
            return res
    if backend != "spectral":
        raise ValueError(f"backend {backend!r} does not give a closed-form rate")
    return _spectral_rate(gen, rho0, p, method, null_tol)


def _plateau_residual(times, p3) -> float:
    half = np.interp(0.5 * times[-1], times, p3)
    return float(abs(p3[-1] - half))


def rate_from_trace(times, p3, method: str = "time-domain", plateau_tol: float = PLATEAU_TOL) -> RateResult:
    """Rate from a sampled P3(t): trapezoid rule plus an exponential tail.

    The tail is fitted through three equally spaced late samples,
    P3(t) ~ P_inf - A exp(-k t).
    """
    times = np.asarray(times, dtype=float)
    p3 = np.asarray(p3, dtype=float)
    residual = _plateau_residual(times, p3)
    if residual >= plateau_tol:
        raise RateConvergenceError("acceptor population has not reached a plateau", residual)

    p_inf = float(p3[-1])
    tail = 0.0
    i_c = len(times) - 1
    i_a = int(0.5 * i_c)
    i_b = (i_a + i_c) // 2
    i_a = 2 * i_b - i_c
    diagnostics = {"plateau_residual": residual}
    if i_a >= 0 and i_b > i_a:
        pa, pb, pc = p3[i_a], p3[i_b], p3[i_c]
        d1, d2 = pb - pa, pc - pb
        if d1 != 0 and d2 != 0 and d2 / d1 > 0 and d2 / d1 < 1:
            ratio = d2 / d1
            k = -math.log(ratio) / (times[i_b] - times[i_a])
            p_inf = float(pc + d2 * ratio / (1 - ratio))
            tail = (p_inf - pc) / k
            diagnostics["tail_rate_per_fs"] = k
    integral = float(trapezoid(p_inf - p3, times) + tail)
    diagnostics["tail_fs"] = tail
    return _rates(p_inf, integral, method, diagnostics, trace=(times, p3))


def extract_rate(source, rho0: DensityMatrix | None = None, backend: str = "spectral", method: str = "") -> RateResult:
    """Rate from a Trajectory (time domain) or from a Generator plus initial state."""
    if isinstance(source, Trajectory):
        return rate_from_trace(source.times, source.p3, method=method or "time-domain")
    if rho0 is None:
        raise ValueError("an initial state is required when extracting from a generator")
    return rate_from_generator(source, rho0, backend=backend, method=method)


def adaptive_rate(
    gen: Generator,
    rho0: DensityMatrix,
    backend: str = "step-exponential",
    dt: float | None = None,
    n_samples: int = 4000,
    t_start: float = 1000.0,
    max_doublings: int = 60,
    method: str = "",
) -> RateResult:
    """Time-domain rate with an automatically chosen horizon.

    A pilot horizon is doubled until the plateau test passes; the final run
    extends to ten relaxation times of the pilot estimate.  Exact backends
    keep ``n_samples`` points per run; rk4 needs a fixed ``dt``.
    """
    if backend == "rk4" and dt is None:
        raise ValueError("rk4 needs an explicit dt")

    def run(t_end):
        if backend == "rk4" or (dt is not None and t_end / dt <= n_samples):
            return propagate(gen, rho0, t_end, dt, backend)
        return propagate(gen, rho0, t_end, t_end / n_samples, backend)

    t_end = t_start
    for _ in range(max_doublings):
        traj = run(t_end)
        if _plateau_residual(traj.times, traj.p3) < PLATEAU_TOL:
            pilot = rate_from_trace(traj.times, traj.p3)
            if pilot.relaxation_rate > 0:
                t_final = 10.0 / (pilot.relaxation_rate / 1e15)
                if t_final > t_end:
                    traj = run(t_final)
            res = rate_from_trace(traj.times, traj.p3, method=method or backend)
            res.diagnostics.update(traj.diagnostics)
            return res
        t_end *= 2.0
    raise RateConvergenceError("no plateau within the horizon budget", _plateau_residual(traj.times, traj.p3))
