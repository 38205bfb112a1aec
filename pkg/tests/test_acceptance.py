"""End-to-end acceptance checks.  Each test records one criterion line that is
printed in the terminal summary."""

import math
import time
import warnings

import numpy as np
import pytest
import scipy.linalg as sla

from bridge_et import calibrate, franck_condon, liouville, solvent, tightbinding as tb, vibronic
from bridge_et.units import HBAR, K_B

from test_tightbinding import g_oracle


def test_criterion_1_reorganization_energies(criterion, geom, records):
    c = criterion(1, "solvent reorganization energies regenerated within 0.002 eV")
    t0 = time.perf_counter()
    worst = (0.0, "")
    for rec in records:
        for ch, ref in (((2, 1), rec.lam21_s), ((3, 1), rec.lam31_s)):
            dev = solvent.solvent_reorganization(geom, rec.eps_s, rec.eps_inf, ch) - ref
            if abs(dev) > 0.002:
                c.note(f"{rec.name} lambda{ch[0]}{ch[1]}: deviation {dev:+.4f} eV")
            worst = max(worst, (abs(dev), f"{rec.name} lambda{ch[0]}{ch[1]}"))
    elapsed = time.perf_counter() - t0
    ok = worst[0] <= 0.002 and elapsed < 1.0
    c.verdict(ok, f"max |deviation| {worst[0]:.4f} eV ({worst[1]}), {elapsed:.3f} s")
    assert ok


def test_criterion_2_free_energies(criterion, geom, records, mthf):
    c = criterion(2, "free energies regenerated within 0.004 eV after single-row calibration")
    t0 = time.perf_counter()
    consts = solvent.calibrate_channel_constants(mthf, geom)
    worst = (0.0, "")
    count = 0
    for rec in records:
        if rec.name == mthf.name:
            continue
        for ch, ref in (((2, 1), rec.dG21), ((3, 1), rec.dG31)):
            count += 1
            dev = solvent.free_energy_difference(consts, rec.eps_s, ch) - ref
            if abs(dev) > 0.004:
                c.note(f"{rec.name} dG{ch[0]}{ch[1]}: deviation {dev:+.4f} eV")
            worst = max(worst, (abs(dev), f"{rec.name} dG{ch[0]}{ch[1]}"))
    elapsed = time.perf_counter() - t0
    ok = count == 16 and worst[0] <= 0.004 and elapsed < 1.0
    c.verdict(ok, f"{count} values, max |deviation| {worst[0]:.4f} eV ({worst[1]}), {elapsed:.3f} s")
    assert ok


def test_criterion_3_gamma_scaling(criterion, records, mthf):
    c = criterion(3, "damping column regenerated by reorganization scaling")
    t0 = time.perf_counter()
    ok = True
    worst = 0.0
    for rec in records:
        if rec.name == mthf.name:
            continue
        dev = solvent.scaled_gamma(mthf, rec.lam21_s) / rec.gamma_tb - 1
        bound = 0.04 if rec.name == "cyclohexane" else 0.02
        ok &= abs(dev) <= bound
        worst = max(worst, abs(dev))
        c.note(f"{rec.name}: {dev:+.2%} (bound {bound:.0%})")
    elapsed = time.perf_counter() - t0
    ok &= elapsed < 1.0
    c.verdict(ok, f"max |deviation| {worst:.2%}, {elapsed:.3f} s")
    assert ok


def test_criterion_4_analytic_numeric_equivalence(criterion, geom, records):
    c = criterion(4, "analytic and master-equation tight-binding rates agree within 1%")
    t0 = time.perf_counter()
    ok = True
    worst = 0.0
    for fc in (False, True):
        for rec in records:
            s = tb.tight_binding_system(solvent.energetics_from_record(rec), geom, rec.gamma_tb, fc_scaled=fc)
            a, n = tb.analytic_rate(s), tb.numeric_rate(s)
            dev = n.k_et / a.k_et - 1
            worst = max(worst, abs(dev))
            if abs(dev) > 0.01:
                ok = False
                c.note(f"{'scaled' if fc else 'bare'} couplings, {rec.name}: numeric/analytic - 1 = {dev:+.2%}")
    elapsed = time.perf_counter() - t0
    ok &= elapsed < 60
    c.verdict(ok, f"max |relative difference| {worst:.2%}, {elapsed:.2f} s")
    assert ok


def test_criterion_5_monotone_in_polarity(criterion, geom, mthf):
    c = criterion(5, "bare-coupling rate strictly increasing in eps_s on [2, 10]")
    t0 = time.perf_counter()
    consts = solvent.calibrate_channel_constants(mthf, geom)
    rates = []
    for es in np.linspace(2.0, 10.0, 33):
        e = solvent.energetics_from_dielectric(es, 2.0, consts, geom)
        gamma = solvent.scaled_gamma(mthf, e.lam21_s)
        rates.append(tb.analytic_rate(tb.tight_binding_system(e, geom, gamma)).k_et)
    steps = np.diff(rates)
    elapsed = time.perf_counter() - t0
    ok = bool(np.all(steps > 0)) and elapsed < 60
    c.verdict(ok, f"33 points, k from {rates[0]:.3g} to {rates[-1]:.3g} 1/s, min step {steps.min():.3g}, {elapsed:.2f} s")
    assert ok


def test_criterion_6_electronic_rate_column(criterion, geom, records):
    c = criterion(6, "tight-binding rates vs reference column at 298 K (diagnostic, 30%)")
    t0 = time.perf_counter()
    within = 0
    for rec in records:
        s = tb.tight_binding_system(solvent.energetics_from_record(rec), geom, rec.gamma_tb, 298.0, fc_scaled=True)
        k = tb.analytic_rate(s).k_et
        dev = k / rec.k_el_ref - 1
        within += abs(dev) <= 0.30
        c.note(f"{rec.name:16s} computed {k:.3e}  reference {rec.k_el_ref:.3e}  deviation {dev:+.1%}")
    elapsed = time.perf_counter() - t0
    ok = within >= 7 and elapsed < 60
    c.verdict(ok, f"{within}/9 within 30%, {elapsed:.2f} s")
    assert ok


@pytest.mark.slow
def test_criterion_7_vibronic_calibration(criterion, geom, records, mthf):
    c = criterion(7, "vibronic damping fit closes on the reference rate; polarity trend")
    t0 = time.perf_counter()
    rate = calibrate.vibronic_rate_function(geom, solvent.energetics_from_record(mthf), n_vib=12, backend="spectral")
    fit = calibrate.fit_eta(mthf.k_vib_ref, rate)
    rates = {}
    for rec in records:
        s = vibronic.build_vibronic_system(geom, solvent.energetics_from_record(rec), n_vib=12, eta=fit.value)
        rates[rec.name] = vibronic.vibronic_rate(s, backend="spectral").k_et
        c.note(f"{rec.name:16s} computed {rates[rec.name]:.3e}  reference {rec.k_vib_ref:.3e}")
    closure = abs(rates["MTHF"] / mthf.k_vib_ref - 1)
    ratio = rates["dichloromethane"] / rates["cyclohexane"]
    elapsed = time.perf_counter() - t0
    ok = closure <= 1e-3 and 2.5 <= ratio <= 11 and elapsed < 600
    c.verdict(ok, f"eta = {fit.value:.4g}, closure {closure:.1e}, k(9.08)/k(2.02) = {ratio:.2f}, {elapsed:.0f} s")
    assert ok


def _check_trajectory(traj, label, c):
    d = traj.diagnostics
    good = d["trace_error"] <= 1e-9 and d["hermiticity_defect"] <= 1e-10 and d["min_eigenvalue"] >= -1e-9
    if not good:
        c.note(f"{label}: {d}")
    return good


def test_criterion_8_physicality(criterion, geom, mthf):
    c = criterion(8, "physicality of trajectories, stationarity, FC orthonormality, detailed balance")
    t0 = time.perf_counter()
    ok = True
    e = solvent.energetics_from_record(mthf)
    n_traj = 0

    for fc in (False, True):
        s = tb.tight_binding_system(e, geom, mthf.gamma_tb, fc_scaled=fc)
        gen, rho0 = tb.master_equation(s), liouville.initial_state(s)
        horizon = 25.0 / (tb.analytic_rate(s).relaxation_rate * 1e-15)
        for backend in ("step-exponential", "spectral"):
            ok &= _check_trajectory(liouville.propagate(gen, rho0, horizon, horizon / 2000, backend), f"tb {backend}", c)
            n_traj += 1
        ok &= _check_trajectory(liouville.propagate(gen, rho0, 500.0, 0.1, "rk4"), "tb rk4", c)
        n_traj += 1

    vs = vibronic.build_vibronic_system(geom, e, n_vib=12, eta=0.372)
    vgen, vrho0 = vibronic.liouvillian_generator(vs), liouville.initial_state(vs)
    for backend, t_end, dt in (("step-exponential", 2000.0, 1.0), ("rk4", 300.0, 0.05), ("spectral", 2e6, 1e3)):
        ok &= _check_trajectory(liouville.propagate(vgen, vrho0, t_end, dt, backend), f"vibronic {backend}", c)
        n_traj += 1

    # closed subsystem: vibrational ladders without electronic coupling relax to Boltzmann
    closed = vibronic.build_vibronic_system(solvent.TriadGeometry(V12=0.0, V23=0.0), e, n_vib=12, eta=0.372)
    cgen = vibronic.liouvillian_generator(closed)
    start = np.zeros((36, 36))
    start[5, 5] = 1.0
    final = liouville.propagate(cgen, liouville.DensityMatrix(start, "vibronic", 12), 400.0, 200.0, "spectral", True)
    p = np.real(np.diag(final.states[-1]))[:12]
    w = np.exp(-np.arange(12) * vs.hbar_omega_vib / (K_B * 298.0))
    boltz = w / w.sum()
    lead = boltz > 1e-12
    stat_err = float(np.max(np.abs(p[lead] / boltz[lead] - 1)))
    ok &= stat_err <= 1e-6
    c.note(f"closed-ladder Boltzmann stationarity: max relative error {stat_err:.1e}")

    # FC overlaps used in the Hamiltonian are members of an orthonormal set
    d21 = vs.displacements[1] - vs.displacements[0]
    d32 = vs.displacements[2] - vs.displacements[1]
    fc_err = 0.0
    for d in (d21, d32, 1.0):
        big = franck_condon.build_fc_table(d, 80)
        fc_err = max(fc_err, big.defect(12))
        assert np.array_equal(big.F[:12, :12], franck_condon.build_fc_table(d, 11).F)
    ok &= fc_err <= 1e-8
    c.note(f"FC orthonormality defect over the 12 ladder levels: {fc_err:.1e}")

    diss = vibronic.build_dissipator(vs)
    db_err = abs(diss.detailed_balance_ratio / np.exp(-vs.hbar_omega_vib / (K_B * 298.0)) - 1)
    rates = tb.hopping_rates(tb.tight_binding_system(e, geom, mthf.gamma_tb))
    E = np.array([0.0, e.dG21, e.dG31])
    for a, b in tb.PAIRS:
        db_err = max(db_err, abs(rates[a, b] / rates[b, a] / np.exp(-(E[b] - E[a]) / (K_B * 298.0)) - 1))
    ok &= db_err <= 1e-12
    c.note(f"detailed-balance ratio error: {db_err:.1e}")

    elapsed = time.perf_counter() - t0
    ok &= elapsed < 120
    c.verdict(ok, f"{n_traj} trajectories checked, {elapsed:.1f} s")
    assert ok


def test_criterion_9_oracles(criterion, geom, mthf):
    c = criterion(9, "Rabi period, classical kinetics, and g-coefficient oracles")
    t0 = time.perf_counter()

    v = 0.065
    gen = liouville.Generator(np.array([[0.0, v], [v, 0.0]]))
    traj = liouville.propagate(gen, liouville.DensityMatrix(np.diag([1.0, 0.0]), n_levels=2), 70.0, 0.001, "spectral")
    p1, t = traj.populations[:, 0], traj.times
    idx = np.nonzero((p1[:-1] >= 0.5) & (p1[1:] < 0.5))[0][:2]
    cross = [t[i] + (p1[i] - 0.5) / (p1[i] - p1[i + 1]) * (t[i + 1] - t[i]) for i in idx]
    rabi_err = abs((cross[1] - cross[0]) / (math.pi * HBAR / v) - 1)
    c.note(f"Rabi period relative error {rabi_err:.1e}")

    s = tb.TightBindingSystem(0.2, 0.05, -0.1, 0.0, 0.0, 3e11, temperature=298.0)
    d = tb.hopping_rates(s)
    Q = d.T - np.diag(d.sum(axis=1))
    ktraj = liouville.propagate(tb.master_equation(s), liouville.initial_state(s), 20000.0, 500.0, "step-exponential")
    kin_err = max(
        float(np.abs(p - sla.expm(Q * tt) @ np.array([1.0, 0.0, 0.0])).max())
        for tt, p in zip(ktraj.times, ktraj.populations)
    )
    c.note(f"zero-coupling kinetics vs rate-matrix exponential: {kin_err:.1e}")

    sys_fc = tb.tight_binding_system(solvent.energetics_from_record(mthf), geom, 2.9e11, 298.0, fc_scaled=True)
    ref = g_oracle((sys_fc.E1, sys_fc.E2, sys_fc.E3), sys_fc.v12, sys_fc.v23, sys_fc.gamma, 298.0)
    got = tb.g_coefficients(sys_fc).g
    g_err = float(np.max(np.abs(got - ref)[ref != 0] / np.abs(ref[ref != 0])))
    c.note(f"g coefficients vs 40-digit transcription: relative {g_err:.1e}")

    elapsed = time.perf_counter() - t0
    ok = rabi_err <= 1e-3 and kin_err <= 1e-8 and g_err <= 1e-12 and elapsed < 60
    c.verdict(ok, f"{elapsed:.2f} s")
    assert ok
