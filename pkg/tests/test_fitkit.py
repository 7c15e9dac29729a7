import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from critchain import fitkit
from critchain.fitkit import (
    FitResult,
    deparity,
    extrapolated_ceff,
    fit_interface_scaling,
    fit_open_chain,
    fit_scaling,
    local_slopes,
    offset_shift,
    scaling_abscissa,
    window_cuts,
)
from critchain.freefermion import free_fermion_profile
from critchain.models import DefectSpec, anisotropy_from_luttinger, build_ising, build_xxz
from critchain.mps import DmrgConfig, dmrg_profile
from critchain.profile import EntanglementProfile


def _synthetic(form, c, offset, L=200):
    r = np.arange(1, L) if form != fitkit.INTERFACE else np.array([50, 80, 120, 200, 400])
    S = c / fitkit.SLOPE_FACTOR[form] * scaling_abscissa(form, r, L) + offset
    return r, S


@pytest.mark.parametrize("form", [fitkit.INF_SYS, fitkit.PERIODIC_RING, fitkit.OPEN_CHAIN, fitkit.INTERFACE])
def test_exact_data_recovered(form):
    r, S = _synthetic(form, 0.5, 0.3)
    fit = fit_scaling(form, r, S, 200)
    assert abs(fit.c - 0.5) < 1e-10
    assert abs(fit.offset - 0.3) < 1e-10
    assert fit.residual_rms >= 0 and fit.residual_rms < 1e-12


@settings(max_examples=30)
@given(st.floats(0.01, 2.0), st.floats(-1, 1), st.sampled_from([(0.25, 0.75), (0.1, 0.9), (0.4, 0.6)]))
def test_open_chain_fit_window_insensitive_on_exact_data(c, offset, window):
    L = 120
    r = np.arange(1, L)
    S = c / 6 * scaling_abscissa(fitkit.OPEN_CHAIN, r, L) + offset
    prof = EntanglementProfile(L, tuple(r), tuple(S))
    fit = fit_open_chain(prof, window)
    assert abs(fit.c - c) < 1e-10 and abs(fit.offset - offset) < 1e-10


def test_fit_result_json():
    fit = fit_scaling(fitkit.OPEN_CHAIN, *_synthetic(fitkit.OPEN_CHAIN, 1.0, 0.1)[:2], L=200)
    d = fit.to_dict()
    assert set(d) >= {"slope", "c", "offset", "residual_rms", "window", "form"}
    assert isinstance(FitResult(**{k: v for k, v in d.items() if k != "c"} | {"window": tuple(d["window"])}),
                      FitResult)


def test_too_few_points():
    prof = EntanglementProfile(8, tuple(range(1, 8)), (0.1,) * 7)
    with pytest.raises(ValueError):
        fit_open_chain(prof, (0.4, 0.6))
    with pytest.raises(ValueError):
        fit_interface_scaling([(100, 0.1), (200, 0.2), (300, 0.3)])
    with pytest.raises(ValueError):
        fit_scaling(fitkit.INF_SYS, [3, 3], [0.1, 0.2])


def test_window_validation_and_defect_exclusion():
    L = 40
    plain = EntanglementProfile(L, tuple(range(1, L)), (0.0,) * (L - 1))
    assert 20 in window_cuts(plain)
    defect = EntanglementProfile(L, plain.cuts, plain.entropies, {"defect": {"kind": "energy"}})
    cuts = window_cuts(defect)
    assert np.all(np.abs(cuts - L / 2) >= fitkit.DEFECT_EXCLUSION)
    with pytest.raises(ValueError):
        window_cuts(plain, (0.5, 0.5))


def test_interface_fit_examples():
    Ls = [100, 200, 300, 400, 500]
    pts = [(L, 0.112 / 6 * math.log(L) + 0.2) for L in Ls]
    fit = fit_interface_scaling(pts)
    assert abs(fit.c - 0.112) < 1e-12
    assert offset_shift(pts, pts) == 0.0


def test_local_slopes_and_extrapolation():
    Ls = [100, 200, 300, 400, 500]
    pts = [(L, 0.3 / 6 * math.log(L) + 0.1 + 0.5 / L) for L in Ls]
    Lm, c = local_slopes(pts)
    assert np.all(np.diff(Lm) > 0)
    raw = fit_interface_scaling(pts).c
    ext = extrapolated_ceff(pts)
    assert abs(ext - 0.3) < abs(raw - 0.3)
    assert abs(ext - 0.3) < 5e-4


def test_deparity_examples():
    L = 20
    const = EntanglementProfile(L, tuple(range(1, L)), (0.7,) * (L - 1), {"model": "xxz"})
    out = deparity(const)
    assert set(out.entropies) == {0.7} and all(r % 2 == 0 for r in out.cuts)
    assert out.metadata["model"] == "xxz"
    alt = EntanglementProfile(L, tuple(range(1, L)), tuple(0.5 + 0.1 * (-1) ** r for r in range(1, L)))
    assert set(deparity(alt).entropies) == {0.6}


def test_window_robustness_free_fermion():
    L = 500
    prof = free_fermion_profile(build_ising(L), cuts=range(100, 401))
    c_wide = fit_open_chain(prof, (0.2, 0.8)).c
    c_narrow = fit_open_chain(prof, (0.3, 0.7)).c
    assert abs(c_wide - c_narrow) < 0.005


@pytest.mark.slow
def test_deparity_reduces_xxz_residual():
    prof = dmrg_profile(build_xxz(40, anisotropy_from_luttinger(0.5)), DmrgConfig(chi=48))
    raw = fit_open_chain(prof, (0.1, 0.9))
    even = fit_open_chain(deparity(prof), (0.1, 0.9))
    assert even.residual_rms < raw.residual_rms


def test_boundary_shift_needs_same_length():
    a = EntanglementProfile(10, (5,), (0.5,))
    b = EntanglementProfile(12, (6,), (0.4,))
    with pytest.raises(ValueError):
        fitkit.boundary_entropy_shift(a, b)
    assert fitkit.boundary_entropy_shift(a, EntanglementProfile(10, (5,), (0.2,))) == pytest.approx(0.3)


def test_energy_defect_small_sizes_trend():
    pts = [(L, free_fermion_profile(build_ising(L, defect=DefectSpec.energy(0.2)), [L // 2]).mid())
           for L in (40, 60, 80, 100)]
    assert fit_interface_scaling(pts).c == pytest.approx(0.112, abs=0.01)
