"""Batch command-line entry point: ``bridge-et <command> [flags]``.

Commands write CSV (tables, sweeps, trajectories) or JSON (calibrations,
reports).  Exit status: 0 success, 1 invalid configuration, 2 computation
failure (partial results are still written, with failing rows marked).
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields
from pathlib import Path

import numpy as np

from . import calibrate, liouville, solvent, tightbinding, vibronic

COMMANDS = ("table1", "sweep", "fig3", "calibrate", "propagate")
MODELS = ("vibronic", "tb", "tb-fc", "both")
EXIT_OK, EXIT_INVALID, EXIT_FAILED = 0, 1, 2


@dataclass
class RunConfig:
    command: str = "table1"
    solvent: str = "all"  # name, "all", or "custom:<eps_s>,<eps_inf>"
    model: str = "both"
    nvib: int = vibronic.DEFAULT_NVIB
    temperature: float = 298.0
    eta: float | None = None  # None: fit on the reference solvent
    gamma: str | float = "table"  # "table", "scaled" or a rate in s^-1
    eps_start: float = 2.0
    eps_end: float = 10.0
    eps_steps: int = 33
    eps_inf: float = 2.0
    out: str | None = None
    backend: str = "resolvent"
    dt: float | None = None
    t_end: float | None = None
    workers: int = 1


class ConfigError(ValueError):
    def __init__(self, problems: list[str]):
        super().__init__("; ".join(problems))
        self.problems = problems


def _custom_pair(text: str) -> tuple[float, float]:
    es, ei = text.split(":", 1)[1].split(",")
    return float(es), float(ei)


def validate(cfg: RunConfig) -> list[str]:
    """All problems with ``cfg`` as 'field: message' strings."""
    problems = []

    def bad(name, msg):
        problems.append(f"{name}: {msg}")

    if cfg.command not in COMMANDS:
        bad("command", f"must be one of {', '.join(COMMANDS)}")
    if cfg.model not in MODELS:
        bad("model", f"must be one of {', '.join(MODELS)}")
    sel = str(cfg.solvent)
    if sel.lower().startswith("custom:"):
        try:
            es, ei = _custom_pair(sel)
            if not es >= ei >= 1.0:
                bad("solvent", "custom pair needs eps_s >= eps_inf >= 1")
        except ValueError:
            bad("solvent", "custom pair must look like custom:<eps_s>,<eps_inf>")
    elif sel.lower() != "all":
        try:
            solvent.find_solvent(sel)
        except KeyError:
            names = ", ".join(r.name for r in solvent.table1())
            bad("solvent", f"unknown solvent {sel!r} (known: {names})")
    if not isinstance(cfg.nvib, int) or isinstance(cfg.nvib, bool) or cfg.nvib < 2:
        bad("nvib", "must be an integer >= 2")
    if not _positive(cfg.temperature):
        bad("temperature", "must be a positive number")
    if cfg.eta is not None and not _positive(cfg.eta):
        bad("eta", "must be a positive number")
    if not (cfg.gamma in ("table", "scaled") or _nonnegative(cfg.gamma)):
        bad("gamma", "must be 'table', 'scaled' or a non-negative rate in 1/s")
    if not (_positive(cfg.eps_inf) and cfg.eps_inf >= 1):
        bad("eps_inf", "must be >= 1")
    if not (_positive(cfg.eps_start) and _positive(cfg.eps_end)) or cfg.eps_start > cfg.eps_end:
        bad("eps_start", "need 0 < eps_start <= eps_end")
    elif _positive(cfg.eps_inf) and cfg.eps_start < cfg.eps_inf:
        bad("eps_start", "must not be below eps_inf")
    if not isinstance(cfg.eps_steps, int) or cfg.eps_steps < 1:
        bad("eps_steps", "must be a positive integer")
    if cfg.backend not in liouville.BACKENDS:
        bad("backend", f"must be one of {', '.join(liouville.BACKENDS)}")
    if cfg.dt is not None and not _positive(cfg.dt):
        bad("dt", "must be positive")
    if cfg.t_end is not None and not _positive(cfg.t_end):
        bad("t_end", "must be positive")
    if cfg.command == "propagate":
        if cfg.model == "both":
            bad("model", "propagate needs a single model")
        if cfg.backend == "resolvent":
            bad("backend", "propagate needs a time-stepping backend (step-exponential, rk4, spectral)")
        if cfg.backend == "rk4" and cfg.dt is None:
            bad("dt", "rk4 needs an explicit time step")
        if str(cfg.solvent).lower() == "all":
            bad("solvent", "propagate needs a single solvent")
    if not isinstance(cfg.workers, int) or cfg.workers < 1:
        bad("workers", "must be a positive integer")
    return problems


def _positive(x) -> bool:
    return isinstance(x, (int, float)) and not isinstance(x, bool) and math.isfinite(x) and x > 0


def _nonnegative(x) -> bool:
    return isinstance(x, (int, float)) and not isinstance(x, bool) and math.isfinite(x) and x >= 0


# ---------------------------------------------------------------- formatting


def fmt(value) -> str:
    if isinstance(value, str):
        return value
    if value is None:
        return ""
    return f"{float(value):.6g}"


def write_table(header: list[str], rows: list[list], out: str | None) -> str:
    lines = [",".join(header)] + [",".join(_csv_cell(fmt(v)) for v in row) for row in rows]
    text = "\n".join(lines) + "\n"
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)
    return text


def _csv_cell(s: str) -> str:
    return f'"{s.replace(chr(34), chr(34) * 2)}"' if any(c in s for c in ',"\n') else s


def write_json(obj, path: str | None) -> str:
    text = json.dumps(liouville._jsonable(obj), indent=2, sort_keys=True) + "\n"
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)
    return text


def _report_path(out: str | None) -> str | None:
    return None if out is None else str(Path(out).with_suffix(".report.json"))


def _map(fn, items, workers: int):
    """Order-preserving map, optionally across processes."""
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _guard(fn, *args):
    try:
        return fn(*args), ""
    except Exception as exc:  # noqa: BLE001 - row-level isolation
        return None, f"{type(exc).__name__}: {exc}"


# ------------------------------------------------------------ shared pieces


GEOMETRY = solvent.TriadGeometry()


def _reference():
    return solvent.find_solvent(solvent.REFERENCE_SOLVENT)


def _selected_records(cfg: RunConfig):
    sel = str(cfg.solvent)
    if sel.lower() == "all":
        return list(solvent.table1())
    if sel.lower().startswith("custom:"):
        es, ei = _custom_pair(sel)
        return [_custom_record(es, ei)]
    return [solvent.find_solvent(sel)]


def _custom_record(eps_s: float, eps_inf: float) -> solvent.SolventRecord:
    ref = _reference()
    consts = solvent.calibrate_channel_constants(ref, GEOMETRY)
    e = solvent.energetics_from_dielectric(eps_s, eps_inf, consts, GEOMETRY)
    return solvent.SolventRecord(
        name=f"custom:{eps_s:g},{eps_inf:g}",
        eps_s=eps_s,
        eps_inf=eps_inf,
        dG21=e.dG21,
        dG31=e.dG31,
        lam21_s=e.lam21_s,
        lam31_s=e.lam31_s,
        gamma_tb=solvent.scaled_gamma(ref, e.lam21_s),
    )


def _gamma_for(cfg: RunConfig, rec: solvent.SolventRecord, lam21_s: float) -> float:
    if cfg.gamma == "table":
        return rec.gamma_tb
    if cfg.gamma == "scaled":
        return solvent.scaled_gamma(_reference(), lam21_s)
    return float(cfg.gamma)


def _wants(cfg: RunConfig, model: str) -> bool:
    return cfg.model == "both" or cfg.model == model


def _resolve_eta(cfg: RunConfig, report: dict) -> float:
    if cfg.eta is not None:
        report["eta"] = {"value": cfg.eta, "source": "configured"}
        return cfg.eta
    ref = _reference()
    rate = calibrate.vibronic_rate_function(
        GEOMETRY, solvent.energetics_from_record(ref), cfg.nvib, cfg.temperature, cfg.backend
    )
    fit = calibrate.fit_eta(ref.k_vib_ref, rate)
    report["eta"] = {"value": fit.value, "source": f"fitted to {ref.name}", "fit": fit.to_dict()}
    return fit.value


def _vibronic_k(cfg: RunConfig, energetics: solvent.Energetics, eta: float) -> float:
    sys_ = vibronic.build_vibronic_system(GEOMETRY, energetics, cfg.nvib, eta, cfg.temperature)
    backend = cfg.backend if cfg.backend in ("spectral", "resolvent") else "spectral"
    return vibronic.vibronic_rate(sys_, backend=backend).k_et


def _tb(cfg, energetics, gamma, fc):
    return tightbinding.tight_binding_system(energetics, GEOMETRY, gamma, cfg.temperature, fc_scaled=fc)


def _rel(a, b) -> float:
    return (a - b) / b if b and math.isfinite(b) else math.nan


# ------------------------------------------------------------------ table1

TABLE1_EXTRA = [
    "ref_dG21_eV",
    "ref_dG31_eV",
    "ref_lam21s_eV",
    "ref_lam31s_eV",
    "ref_gamma_per_s",
    "ref_k_el_per_s",
    "ref_k_vib_per_s",
    "dev_lam21s_eV",
    "dev_lam31s_eV",
    "dev_dG21_eV",
    "dev_dG31_eV",
    "rel_dev_gamma",
    "k_el_numeric_per_s",
    "rel_numeric_vs_analytic",
    "k_tb_bare_per_s",
    "k_tb_bare_numeric_per_s",
    "rel_dev_k_el",
    "rel_dev_k_vib",
    "status",
]


def _table1_row(args):
    cfg, rec, eta = args
    consts = solvent.calibrate_channel_constants(_reference(), GEOMETRY)
    lam21 = solvent.solvent_reorganization(GEOMETRY, rec.eps_s, rec.eps_inf, (2, 1))
    lam31 = solvent.solvent_reorganization(GEOMETRY, rec.eps_s, rec.eps_inf, (3, 1))
    dG21 = solvent.free_energy_difference(consts, rec.eps_s, (2, 1))
    dG31 = solvent.free_energy_difference(consts, rec.eps_s, (3, 1))
    gamma_scaled = solvent.scaled_gamma(_reference(), lam21)
    gamma = _gamma_for(cfg, rec, lam21)
    # rates use the tabulated energetics, as the reference column does
    e = solvent.energetics_from_record(rec)
    errors = []
    k = {}

    def attempt(key, fn, *a):
        val, err = _guard(fn, *a)
        k[key] = math.nan if val is None else val
        if err:
            errors.append(f"{key}: {err}")

    if _wants(cfg, "tb-fc"):
        attempt("el", lambda: tightbinding.analytic_rate(_tb(cfg, e, gamma, True)).k_et)
        attempt("el_num", lambda: tightbinding.numeric_rate(_tb(cfg, e, gamma, True), backend="resolvent").k_et)
    if _wants(cfg, "tb"):
        attempt("bare", lambda: tightbinding.analytic_rate(_tb(cfg, e, gamma, False)).k_et)
        attempt("bare_num", lambda: tightbinding.numeric_rate(_tb(cfg, e, gamma, False), backend="resolvent").k_et)
    if _wants(cfg, "vibronic") and eta is not None:
        attempt("vib", _vibronic_k, cfg, e, eta)
    get = lambda key: k.get(key, math.nan)
    row = [
        rec.name,
        rec.eps_s,
        rec.eps_inf,
        dG21,
        dG31,
        lam21,
        lam31,
        gamma_scaled,
        get("el"),
        get("vib"),
        rec.dG21,
        rec.dG31,
        rec.lam21_s,
        rec.lam31_s,
        rec.gamma_tb,
        rec.k_el_ref,
        rec.k_vib_ref,
        lam21 - rec.lam21_s,
        lam31 - rec.lam31_s,
        dG21 - rec.dG21,
        dG31 - rec.dG31,
        _rel(gamma_scaled, rec.gamma_tb),
        get("el_num"),
        _rel(get("el_num"), get("el")),
        get("bare"),
        get("bare_num"),
        _rel(get("el"), rec.k_el_ref),
        _rel(get("vib"), rec.k_vib_ref),
        "ok" if not errors else "error: " + " | ".join(errors),
    ]
    return row


def cmd_table1(cfg: RunConfig) -> int:
    report = {"command": "table1", "config": asdict(cfg)}
    eta = None
    if _wants(cfg, "vibronic"):
        eta, err = _guard(_resolve_eta, cfg, report)
        if err:
            report["eta"] = {"error": err}
    records = _selected_records(cfg)
    rows = _map(_table1_row, [(cfg, r, eta) for r in records], cfg.workers)
    header = solvent.CSV_HEADER + TABLE1_EXTRA
    write_table(header, rows, cfg.out)

    col = {name: i for i, name in enumerate(header)}
    deviations = []
    for row in rows:
        deviations.append(
            {
                "solvent": row[0],
                "k_el_per_s": row[col["k_el_per_s"]],
                "ref_k_el_per_s": row[col["ref_k_el_per_s"]],
                "rel_dev_k_el": row[col["rel_dev_k_el"]],
                "k_vib_per_s": row[col["k_vib_per_s"]],
                "ref_k_vib_per_s": row[col["ref_k_vib_per_s"]],
                "rel_dev_k_vib": row[col["rel_dev_k_vib"]],
                "status": row[col["status"]],
            }
        )
    within = [d for d in deviations if abs(d["rel_dev_k_el"]) <= 0.30]
    report.update(
        temperature_K=cfg.temperature,
        rows=deviations,
        k_el_within_30_percent=len(within),
        max_abs_dev_lam_eV=max(
            (max(abs(r[col["dev_lam21s_eV"]]), abs(r[col["dev_lam31s_eV"]])) for r in rows), default=math.nan
        ),
        max_abs_dev_dG_eV=max(
            (max(abs(r[col["dev_dG21_eV"]]), abs(r[col["dev_dG31_eV"]])) for r in rows), default=math.nan
        ),
    )
    _emit_report(report, cfg)
    failed = any(r[-1] != "ok" for r in rows) or "error" in report.get("eta", {})
    return EXIT_FAILED if failed else EXIT_OK


def _emit_report(report, cfg):
    path = _report_path(cfg.out)
    if path is None:
        sys.stderr.write(json.dumps(liouville._jsonable(report), sort_keys=True) + "\n")
    else:
        write_json(report, path)


# ------------------------------------------------------------------- sweep

SWEEP_HEADER = [
    "eps_s",
    "eps_inf",
    "dG21_eV",
    "dG31_eV",
    "lam21s_eV",
    "lam31s_eV",
    "gamma_per_s",
    "k_vibronic_per_s",
    "k_tb_bare_per_s",
    "k_tb_fc_per_s",
    "status",
]


def _sweep_row(args):
    cfg, eps_s, eta = args
    ref = _reference()
    consts = solvent.calibrate_channel_constants(ref, GEOMETRY)
    e = solvent.energetics_from_dielectric(eps_s, cfg.eps_inf, consts, GEOMETRY)
    gamma = solvent.scaled_gamma(ref, e.lam21_s) if cfg.gamma in ("table", "scaled") else float(cfg.gamma)
    errors = []

    def attempt(label, fn, *a):
        val, err = _guard(fn, *a)
        if err:
            errors.append(f"{label}: {err}")
        return math.nan if val is None else val

    k_vib = k_bare = k_fc = math.nan
    if _wants(cfg, "vibronic") and eta is not None:
        k_vib = attempt("vibronic", _vibronic_k, cfg, e, eta)
    if _wants(cfg, "tb"):
        k_bare = attempt("tb", lambda: tightbinding.analytic_rate(_tb(cfg, e, gamma, False)).k_et)
    if _wants(cfg, "tb-fc"):
        k_fc = attempt("tb-fc", lambda: tightbinding.analytic_rate(_tb(cfg, e, gamma, True)).k_et)
    status = "ok" if not errors else "error: " + " | ".join(errors)
    return [eps_s, cfg.eps_inf, e.dG21, e.dG31, e.lam21_s, e.lam31_s, gamma, k_vib, k_bare, k_fc, status]


def sweep_grid(cfg: RunConfig) -> np.ndarray:
    return np.linspace(cfg.eps_start, cfg.eps_end, cfg.eps_steps)


def cmd_sweep(cfg: RunConfig) -> int:
    report = {"command": "sweep", "config": asdict(cfg)}
    eta = None
    if _wants(cfg, "vibronic"):
        eta, err = _guard(_resolve_eta, cfg, report)
        if err:
            report["eta"] = {"error": err}
    rows = _map(_sweep_row, [(cfg, float(x), eta) for x in sweep_grid(cfg)], cfg.workers)
    write_table(SWEEP_HEADER, rows, cfg.out)
    bare = [r[8] for r in rows]
    report["k_tb_bare_strictly_increasing"] = bool(np.all(np.diff(bare) > 0)) if len(bare) > 1 else True
    _emit_report(report, cfg)
    failed = any(r[-1] != "ok" for r in rows) or "error" in report.get("eta", {})
    return EXIT_FAILED if failed else EXIT_OK


# -------------------------------------------------------------------- fig3

FIG3_HEADER = ["name", "eps_s", "q_bridge", "E_bridge_eV", "q_acceptor", "E_acceptor_eV"]


def cmd_fig3(cfg: RunConfig) -> int:
    rows = []
    for rec in _selected_records(cfg):
        (_, _), (qb, eb), (qa, ea) = vibronic.minima_positions(solvent.energetics_from_record(rec), GEOMETRY)
        rows.append([rec.name, rec.eps_s, qb, eb, qa, ea])
    write_table(FIG3_HEADER, rows, cfg.out)
    return EXIT_OK


# --------------------------------------------------------------- calibrate


def cmd_calibrate(cfg: RunConfig) -> int:
    ref = _reference()
    e = solvent.energetics_from_record(ref)
    out = {"reference_solvent": ref.name, "temperature_K": cfg.temperature}
    status = EXIT_OK
    if _wants(cfg, "vibronic"):
        rate = calibrate.vibronic_rate_function(GEOMETRY, e, cfg.nvib, cfg.temperature, cfg.backend)
        fit, err = _guard(calibrate.fit_eta, ref.k_vib_ref, rate)
        out["eta"] = fit.to_dict() if fit else {"error": err}
        out["eta"]["n_vib"] = cfg.nvib
        status = status if fit else EXIT_FAILED
    for model, fc in (("tb-fc", True), ("tb", False)):
        if _wants(cfg, model):
            rate = calibrate.tight_binding_rate_function(GEOMETRY, e, fc_scaled=fc, temperature=cfg.temperature)
            fit, err = _guard(calibrate.fit_gamma, ref.k_el_ref, rate)
            out[f"gamma_{model}"] = fit.to_dict() if fit else {"error": err}
            status = status if fit else EXIT_FAILED
    write_json(out, cfg.out)
    return status


# --------------------------------------------------------------- propagate


def cmd_propagate(cfg: RunConfig) -> int:
    rec = _selected_records(cfg)[0]
    e = solvent.energetics_from_record(rec)
    if cfg.model == "vibronic":
        eta = cfg.eta if cfg.eta is not None else vibronic.DEFAULT_ETA
        system = vibronic.build_vibronic_system(GEOMETRY, e, cfg.nvib, eta, cfg.temperature)
        gen = vibronic.liouvillian_generator(system)
    else:
        gamma = _gamma_for(cfg, rec, rec.lam21_s)
        system = _tb(cfg, e, gamma, cfg.model == "tb-fc")
        gen = tightbinding.master_equation(system)
    rho0 = liouville.initial_state(system)
    t_end = cfg.t_end
    if t_end is None:
        exact = liouville.rate_from_generator(gen, rho0, backend="resolvent")
        # 25 relaxation times: the plateau test compares P3 at t_end and t_end/2
        t_end = 25.0 / (exact.relaxation_rate / 1e15) if exact.relaxation_rate > 0 else 1e6
    dt = cfg.dt if cfg.dt is not None else t_end / 2000
    traj = liouville.propagate(gen, rho0, t_end, dt, backend=cfg.backend)
    header = ["t_fs", "P1", "P2", "P3", "purity"]
    rows = [[t, *p, q] for t, p, q in zip(traj.times, traj.populations, traj.purity)]
    write_table(header, rows, cfg.out)
    report = {"command": "propagate", "config": asdict(cfg), "solvent": rec.name, "trajectory": traj.diagnostics}
    res, err = _guard(liouville.rate_from_trace, traj.times, traj.p3)
    report["rate"] = res.to_dict() if res else {"error": err}
    _emit_report(report, cfg)
    return EXIT_OK if res else EXIT_FAILED


HANDLERS = {
    "table1": cmd_table1,
    "sweep": cmd_sweep,
    "fig3": cmd_fig3,
    "calibrate": cmd_calibrate,
    "propagate": cmd_propagate,
}


# ------------------------------------------------------------------ parsing


class _Parser(argparse.ArgumentParser):
    # usage errors count as invalid configuration (exit 1), not argparse's 2
    def error(self, message):
        raise ConfigError([f"arguments: {message}"])


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="bridge-et", description=__doc__.splitlines()[0])
    p.add_argument("command", choices=COMMANDS)
    # defaults are None so that only explicit flags override the config file
    p.add_argument("--config", help="JSON file with RunConfig fields")
    p.add_argument("--solvent", help="solvent name, 'all', or custom:<eps_s>,<eps_inf>")
    p.add_argument("--model", help=f"one of {', '.join(MODELS)}")
    p.add_argument("--nvib", type=int, help="vibrational levels per surface")
    p.add_argument("--temperature", type=float, help="bath temperature (K)")
    p.add_argument("--eta", type=float, help="vibronic damping strength; fitted if omitted")
    p.add_argument("--gamma", help="tight-binding damping: 'table', 'scaled' or a rate in 1/s")
    p.add_argument("--eps-start", type=float, dest="eps_start")
    p.add_argument("--eps-end", type=float, dest="eps_end")
    p.add_argument("--eps-steps", type=int, dest="eps_steps")
    p.add_argument("--eps-inf", type=float, dest="eps_inf")
    p.add_argument("--out", help="output file (stdout if omitted)")
    p.add_argument("--backend", help=f"one of {', '.join(liouville.BACKENDS)}")
    p.add_argument("--dt", type=float, help="time step (fs)")
    p.add_argument("--t-end", type=float, dest="t_end", help="propagation horizon (fs)")
    p.add_argument("--workers", type=int, help="worker processes for rows")
    return p


def _coerce_gamma(value):
    if isinstance(value, str) and value not in ("table", "scaled"):
        try:
            return float(value)
        except ValueError:
            return value
    return value


def load_config(args: argparse.Namespace) -> RunConfig:
    problems = []
    values = {}
    names = {f.name for f in fields(RunConfig)}
    if args.config:
        try:
            data = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError([f"config: cannot read {args.config}: {exc}"]) from exc
        if not isinstance(data, dict):
            raise ConfigError(["config: top level must be a JSON object"])
        for key, val in data.items():
            key = key.replace("-", "_")
            if key not in names or key == "command":
                problems.append(f"config.{key}: unknown field")
            else:
                values[key] = val
    for name in names - {"command"}:
        val = getattr(args, name, None)
        if val is not None:
            values[name] = val
    values["command"] = args.command
    if args.command == "propagate" and "backend" not in values:
        values["backend"] = "step-exponential"  # the rate-only default cannot produce a trajectory
    if "gamma" in values:
        values["gamma"] = _coerce_gamma(values["gamma"])
    for key in ("temperature", "eps_start", "eps_end", "eps_inf", "dt", "t_end", "eta"):
        if isinstance(values.get(key), int) and not isinstance(values.get(key), bool):
            values[key] = float(values[key])
    cfg = RunConfig(**values)
    problems += validate(cfg)
    if problems:
        raise ConfigError(problems)
    return cfg


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        cfg = load_config(args)
    except ConfigError as exc:
        for line in exc.problems:
            print(f"invalid configuration: {line}", file=sys.stderr)
        return EXIT_INVALID
    try:
        return HANDLERS[cfg.command](cfg)
    except Exception as exc:  # noqa: BLE001 - reported as a computation failure
        print(f"computation failed: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
