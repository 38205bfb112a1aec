import math
import warnings

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bridge_et import franck_condon as fc

HW = 0.185976


def laguerre_overlap(M, N, d):
    """Closed-form displaced-oscillator overlap, evaluated in 30-digit arithmetic."""
    mp.mp.dps = 30
    a = mp.mpf(d) / mp.sqrt(2)
    pre = mp.exp(-a * a / 2)
    if M >= N:
        val = pre * mp.sqrt(mp.factorial(N) / mp.factorial(M)) * a ** (M - N) * mp.laguerre(N, M - N, a * a)
    else:
        val = pre * mp.sqrt(mp.factorial(M) / mp.factorial(N)) * (-a) ** (N - M) * mp.laguerre(M, N - M, a * a)
    return float(val)


@pytest.mark.parametrize("lam, d", [(0.0, 0.0), (0.797, 2.92763), (HW / 2, 1.0)])
def test_displacement_from_lambda(lam, d):
    assert fc.displacement_from_lambda(lam, HW) == pytest.approx(d, abs=5e-6)


def test_displacement_rejects_bad_frequency():
    with pytest.raises(ValueError):
        fc.displacement_from_lambda(0.1, 0.0)


def test_ground_overlap_matches_coupling_scale():
    d = fc.displacement_from_lambda(0.797, HW)
    assert fc.fc_amplitude(0, 0, d) == pytest.approx(math.exp(-0.797 / (2 * HW)), rel=1e-13)
    assert fc.fc_amplitude(0, 0, d) == pytest.approx(0.117332, abs=5e-7)


def test_first_excited_closed_form():
    assert fc.fc_amplitude(1, 0, 1.0) == pytest.approx(math.exp(-0.25) / math.sqrt(2), rel=1e-14)
    assert fc.fc_amplitude(1, 0, 1.0) == pytest.approx(0.5507, abs=1e-4)


def test_zero_displacement_is_identity():
    assert np.array_equal(fc.build_fc_table(0.0, 5).F, np.eye(6))
    for M in range(4):
        for N in range(4):
            assert fc.fc_amplitude(M, N, 0.0) == (1.0 if M == N else 0.0)


def test_negative_quantum_numbers_rejected():
    with pytest.raises(ValueError):
        fc.fc_amplitude(-1, 0, 1.0)
    with pytest.raises(ValueError):
        fc.build_fc_table(1.0, -1)


@settings(max_examples=60, deadline=None)
@given(st.floats(min_value=0.0, max_value=4.0), st.integers(0, 15), st.integers(0, 15))
def test_recursion_matches_laguerre_form(d, M, N):
    assert fc.fc_amplitude(M, N, d) == pytest.approx(laguerre_overlap(M, N, d), abs=1e-10)


@given(st.floats(min_value=0.0, max_value=5.0))
def test_inversion_symmetry_and_bounds(d):
    F = fc.build_fc_table(d, 14).F
    signs = (-1.0) ** np.subtract.outer(np.arange(15), np.arange(15))
    assert np.allclose(F, signs * F.T, atol=1e-14)
    assert np.abs(F).max() <= 1.0 + 1e-14
    assert F[0, 0] == pytest.approx(math.exp(-d * d / 4), rel=1e-14) and F[0, 0] > 0


@given(st.floats(min_value=0.0, max_value=2.0))
def test_huang_rhys_consistency(lam):
    d = fc.displacement_from_lambda(lam, HW)
    assert fc.fc_amplitude(0, 0, d) ** 2 == pytest.approx(math.exp(-lam / HW), rel=1e-12)


def test_row_zero_is_poisson():
    d = 2.9275
    S = d * d / 2
    row = fc.build_fc_table(d, 20).F[0]
    poisson = np.array([math.exp(-S) * S**n / math.factorial(n) for n in range(21)])
    assert np.allclose(row**2, poisson, rtol=1e-12, atol=0)
    assert int(np.argmax(row**2)) == 4
    assert (row**2).sum() == pytest.approx(1.0, abs=1e-7)


def test_orthonormal_rows_in_small_basis():
    # d = 1, n_max = 12: only the lowest three rows are orthonormal to 1e-8;
    # leakage out of the truncated basis grows quickly with M.
    table = fc.build_fc_table(1.0, 12)
    assert table.valid_rows(1e-8) == 3
    assert table.defect(3) <= 1e-8
    assert table.defect(4) > 1e-8
    assert table.defect(9) > 1e-8


def test_orthonormal_rows_in_larger_basis():
    table = fc.build_fc_table(1.0, 29)
    assert table.valid_rows(1e-8) >= 15
    assert table.defect(15) <= 1e-8


def test_valid_row_warning():
    with pytest.warns(RuntimeWarning, match="increase n_max"):
        fc.build_fc_table(3.0, 8, min_valid_rows=6)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        fc.build_fc_table(0.5, 30, min_valid_rows=6)


def test_lambda_round_trip():
    for lam in (0.0, 0.035, 0.797, 1.168):
        d = fc.displacement_from_lambda(lam, HW)
        assert fc.lambda_from_displacement(d, HW) == pytest.approx(lam, rel=1e-14, abs=1e-16)
