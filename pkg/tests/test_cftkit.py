import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from critchain import cftkit
from critchain.cftkit import (
    BoundaryCondition,
    boundary_entropy_change,
    ceff_boson,
    ceff_ising,
    dilog,
    entanglement_length,
    entanglement_spectrum_NN,
    euler_phi,
    g_function,
    ising_characters,
    series_divide,
    series_multiply,
    spectrum_normalization,
    spectrum_truncation_error,
    transmission_boson_interface,
    transmission_energy_defect,
    zero_mode_correction,
)

LN2 = math.log(2.0)


def test_ising_g_functions():
    assert g_function(BoundaryCondition("ising", "neumann")) == 1.0
    assert g_function(BoundaryCondition("ising", "dirichlet")) == pytest.approx(1 / math.sqrt(2), abs=1e-15)


@pytest.mark.parametrize("K", [0.5, 1.0, 1.5])
def test_boson_g_functions_give_boundary_entropy(K):
    gN = g_function(BoundaryCondition.boson("neumann", K=K))
    gD = g_function(BoundaryCondition.boson("dirichlet", K=K))
    assert math.log(gN / gD) == pytest.approx(boundary_entropy_change("boson", K), abs=1e-14)


def test_radius_and_luttinger_agree():
    R = 1 / math.sqrt(math.pi * 0.5)
    a = BoundaryCondition.boson("neumann", R=R)
    assert a.K == pytest.approx(0.5, abs=1e-15)
    assert a.R == pytest.approx(R, abs=1e-15)
    with pytest.raises(ValueError):
        BoundaryCondition.boson("neumann", K=1.0, R=1.0)
    with pytest.raises(ValueError):
        BoundaryCondition("ising", "free")


@pytest.mark.parametrize("K,expected", [(0.5, LN2), (1.0, LN2 / 2), (1.5, math.log(4 / 3) / 2)])
def test_boundary_entropy_values(K, expected):
    assert boundary_entropy_change("boson", K) == pytest.approx(expected, abs=1e-15)
    assert boundary_entropy_change("ising") == pytest.approx(LN2 / 2, abs=1e-15)


def test_transmission():
    assert transmission_energy_defect(1.0) == 1.0
    assert transmission_energy_defect(0.0) == 0.0
    assert transmission_energy_defect(0.2) == pytest.approx(0.4 / 1.04, abs=1e-15)
    assert transmission_energy_defect(5.0) == pytest.approx(transmission_energy_defect(0.2), abs=1e-15)
    r, t = transmission_boson_interface(0.6, 0.3)
    assert r * r + t * t == pytest.approx(1.0, abs=1e-15)
    assert transmission_boson_interface(0.6, 0.6) == (0.0, 1.0)


@given(st.floats(-1, 1))
def test_dilog_against_mpmath(x):
    assert dilog(x) == pytest.approx(float(mpmath.polylog(2, x)), abs=1e-13)


def test_dilog_domain():
    with pytest.raises(ValueError):
        dilog(1.5)


def test_ceff_limits():
    assert abs(ceff_ising(1.0) - 0.5) < 1e-10
    assert abs(ceff_ising(0.0)) < 1e-10
    assert abs(ceff_boson(1.0) - 1.0) < 1e-10
    assert abs(ceff_boson(0.0)) < 1e-10


def test_ceff_energy_defect_value():
    # quoted value for b = 0.2
    assert ceff_ising(transmission_energy_defect(0.2)) == pytest.approx(0.112, abs=5e-4)


def test_ceff_against_mpmath_formula():
    def bracket(t):
        t = mpmath.mpf(t)
        return (t + 1) * mpmath.log(t + 1) * mpmath.log(t) + (t - 1) * mpmath.polylog(2, 1 - t) \
            + (t + 1) * mpmath.polylog(2, -t)

    for t in (0.05, 0.3, 0.77, 0.999):
        ref_i = t / 2 - 0.5 - 3 / mpmath.pi**2 * bracket(t)
        ref_b = 0.5 + t + 3 / mpmath.pi**2 * bracket(t)
        assert ceff_ising(t) == pytest.approx(float(ref_i), abs=1e-13)
        assert ceff_boson(t) == pytest.approx(float(ref_b), abs=1e-13)


def test_ceff_monotone():
    ts = np.linspace(0, 1, 401)
    ci = [ceff_ising(t) for t in ts]
    cb = [ceff_boson(t) for t in ts]
    assert np.all(np.diff(ci) > 0) and np.all(np.diff(cb) > 0)


def test_zero_mode_correction():
    assert abs(zero_mode_correction(1.0) - LN2) < 1e-8
    x = 1e-3
    assert abs(zero_mode_correction(x) / x**2 - math.pi**2 / 12) < 1e-4
    assert zero_mode_correction(0.5) == pytest.approx(LN2 - 0.5, abs=1e-10)
    with pytest.raises(ValueError):
        zero_mode_correction(1.5)


def test_zero_mode_against_mpmath_quadrature():
    x = 0.3
    f = lambda h: mpmath.tanh(mpmath.pi * x * h) * (mpmath.coth(mpmath.pi * h) - 1)  # noqa: E731
    ref = mpmath.pi * x * mpmath.quad(f, [0, 1, mpmath.inf])
    assert zero_mode_correction(x) == pytest.approx(float(ref), abs=1e-12)


def _fermionic_degeneracies(N):
    # prod_{n >= 1} (1 + q^(n - 1/2)) in powers of q^(1/2): integer part -> chi_0, half-odd -> chi_eps
    M = 2 * N + 2
    c = [0] * (M + 1)
    c[0] = 1
    for part in range(1, M + 1, 2):
        for k in range(M, part - 1, -1):
            c[k] += c[k - part]
    return [c[2 * n] for n in range(N + 1)], [c[2 * n + 1] for n in range(N + 1)]


def test_character_degeneracies_exact():
    chi0, chie = ising_characters(10)
    assert list(chi0.degeneracies[:7]) == [1, 0, 1, 1, 2, 2, 3]
    assert list(chie.degeneracies[:7]) == [1, 1, 1, 1, 2, 2, 3]
    assert all(isinstance(p, int) for p in chi0.degeneracies)


def test_characters_against_fermionic_product():
    N = 200
    chi0, chie = ising_characters(N)
    f0, fe = _fermionic_degeneracies(N)
    assert list(chi0.degeneracies) == f0
    assert list(chie.degeneracies) == fe


def test_series_algebra():
    phi = euler_phi(30)
    one = series_divide(phi, phi)
    assert one == [1] + [0] * 30
    p = series_divide([1] + [0] * 30, phi)  # partition numbers
    assert p[:8] == [1, 1, 2, 3, 5, 7, 11, 15]
    assert series_multiply(p, phi, 30) == [1] + [0] * 30


def test_character_order_limit():
    with pytest.raises(ValueError):
        ising_characters(cftkit.MAX_CHARACTER_ORDER + 1)


def test_spectrum_gaps_exact():
    L, r = 200, 100
    Lbar = entanglement_length(L, r)
    levels = entanglement_spectrum_NN(L, r)
    ground = levels[0]
    for lv in levels:
        h = 0.5 if lv.sector == "epsilon" else 0.0
        assert lv.gap == math.pi / Lbar * (h + lv.level)
        assert lv.energy - ground.energy == pytest.approx(lv.gap, abs=1e-12)


@pytest.mark.parametrize("L,r", [(200, 100), (1000, 300), (60, 13)])
def test_spectrum_normalization(L, r):
    levels = entanglement_spectrum_NN(L, r, N=20)
    err = spectrum_truncation_error(L, r, N=20)
    assert abs(spectrum_normalization(levels) - 1.0) <= max(err, 1e-13)


def test_spectrum_rejects_edge_cut():
    with pytest.raises(ValueError):
        entanglement_spectrum_NN(10, 0)
