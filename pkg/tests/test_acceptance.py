"""Acceptance criteria, one test per criterion at the stated tolerances.

Every test records a one-line verdict; ``conftest.py`` prints them at the end
of the session, and ``python tests/test_acceptance.py`` prints them directly.
The DMRG criteria (6, 7, 8, 11) take tens of minutes on one core.
"""

from __future__ import annotations

import functools
import math

import numpy as np
import pytest

from critchain import cftkit, fitkit
from critchain.cli import oracle_specs
from critchain.exact import exact_diag_oracle
from critchain.freefermion import (
    complement_symmetry_error,
    diagonalize,
    free_fermion_profile,
    ground_correlations,
    interface_entropy,
    jordan_wigner,
)
from critchain.models import DefectSpec, anisotropy_from_luttinger, build_ising, build_xxz
from critchain.mps import DmrgConfig, dmrg_ground_state, schmidt_entropy_profile

LN2 = math.log(2.0)
DEFECT_SIZES = (100, 200, 300, 400, 500)
STRENGTHS = (0.0, 0.2, 0.4, 0.6, 0.8, 1.0)
INTERFACE_SIZES = (128, 192, 256)
K1 = 0.6
K2_TOLERANT = (0.3, 0.4, 0.5, 0.6)
K2_MONOTONE = (0.1, 0.2)

ISING_DMRG = DmrgConfig(chi=128)
# XXZ runs at L ~ 200: bond dimension 64 keeps the mid-chain EE within ~2e-3 of exact (XX check)
XXZ_DMRG = DmrgConfig(chi=64, threshold=1e-8)
# interfaces at L = 256 need more: chi = 64 pulls the last local slope down by ~0.06
INTERFACE_DMRG = DmrgConfig(chi=128, threshold=1e-8)
ORACLE_DMRG = DmrgConfig(chi=64, cutoff=1e-14)

VERDICTS: dict[int, str] = {}


def record(n: int, ok: bool, detail: str) -> None:
    VERDICTS[n] = f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    assert ok, VERDICTS[n]


# ---------------------------------------------------------------- cached runs


@functools.lru_cache(maxsize=None)
def defect_series(kind: str, b: float) -> tuple:
    ctor = DefectSpec.energy if kind == "energy" else DefectSpec.duality
    return tuple((L, interface_entropy(build_ising(L, defect=ctor(b)))) for L in DEFECT_SIZES)


@functools.lru_cache(maxsize=None)
def clean_series() -> tuple:
    return tuple((L, interface_entropy(build_ising(L))) for L in DEFECT_SIZES)


@functools.lru_cache(maxsize=None)
def dmrg_run(kind: str, L: int, param: float, h_b: float):
    if kind == "ising":
        spec, cfg = build_ising(L, h_b=h_b), ISING_DMRG
    elif kind == "xxz":
        spec, cfg = build_xxz(L, anisotropy_from_luttinger(param), h_b=h_b), XXZ_DMRG
    else:
        spec, cfg = build_xxz(L, anisotropy_from_luttinger(K1), anisotropy_from_luttinger(param)), INTERFACE_DMRG
    state = dmrg_ground_state(spec, cfg)
    return state, schmidt_entropy_profile(state)


def interface_ceff(K2: float) -> float:
    pts = [(L, dmrg_run("interface", L, K2, 0.0)[1].mid()) for L in INTERFACE_SIZES]
    # three sizes as specified; fit_interface_scaling itself insists on four
    Ls, S = zip(*pts)
    return fitkit.fit_scaling(fitkit.INTERFACE, Ls, S).c


def predicted_ising(b: float) -> float:
    return cftkit.ceff_ising(cftkit.transmission_energy_defect(b))


# ------------------------------------------------------------------- criteria


def test_criterion_01_analytic_limits():
    vals = {
        "ceff_ising(1)": (cftkit.ceff_ising(1.0), 0.5),
        "ceff_ising(0)": (cftkit.ceff_ising(0.0), 0.0),
        "ceff_boson(1)": (cftkit.ceff_boson(1.0), 1.0),
        "ceff_boson(0)": (cftkit.ceff_boson(0.0), 0.0),
    }
    worst = max(abs(v - e) for v, e in vals.values())
    record(1, worst <= 1e-10, f"max |deviation| of c_eff limits = {worst:.1e} (tol 1e-10)")


def test_criterion_02_energy_defect_b02():
    pts = defect_series("energy", 0.2)
    raw = fitkit.fit_interface_scaling(pts).c
    ext = fitkit.extrapolated_ceff(pts)
    ok = abs(raw - 0.112) <= 0.005 and abs(ext - 0.112) <= 0.001
    record(2, ok, f"b=0.2 raw c_eff={raw:.5f}, extrapolated={ext:.5f}, "
                  f"prediction {predicted_ising(0.2):.5f} (|.-0.112| tol 0.005 / 0.001)")


def test_criterion_03_energy_defect_sweep():
    devs = {b: fitkit.fit_interface_scaling(defect_series("energy", b)).c - predicted_ising(b) for b in STRENGTHS}
    worst_b = max(devs, key=lambda b: abs(devs[b]))
    ok = all(abs(d) <= 0.01 for d in devs.values())
    record(3, ok, f"energy defect b in 0..1: worst |c_fit - c_eff| = {abs(devs[worst_b]):.4f} at b={worst_b} (tol 0.01)")


def test_criterion_04_duality_defect():
    devs = {b: fitkit.fit_interface_scaling(defect_series("duality", b)).c - predicted_ising(b)
            for b in STRENGTHS[1:]}
    worst_b = max(devs, key=lambda b: abs(devs[b]))
    ds2 = fitkit.offset_shift(defect_series("duality", 1.0), clean_series())
    target = -0.25 + LN2 / 2
    ok = all(abs(d) <= 0.01 for d in devs.values()) and abs(ds2 - target) <= 0.01
    record(4, ok, f"duality b in 0.2..1: worst |c_fit - c_eff| = {abs(devs[worst_b]):.4f} at b={worst_b}; "
                  f"delta_s2(b=1) = {ds2:.4f} vs {target:.4f} (tol 0.01)")


def test_criterion_05_zero_mode_integral():
    e1 = abs(cftkit.zero_mode_correction(1.0) - LN2)
    x = 1e-3
    e2 = abs(cftkit.zero_mode_correction(x) / x**2 - math.pi**2 / 12)
    record(5, e1 <= 1e-8 and e2 <= 1e-4, f"|dS(1) - ln2| = {e1:.1e} (1e-8); |dS(x)/x^2 - pi^2/12| = {e2:.1e} (1e-4)")


def test_criterion_06_ising_boundary_entropy():
    L = 200
    sN = dmrg_run("ising", L, 0.0, 0.0)[1].mid()
    sD = dmrg_run("ising", L, 0.0, 1.0)[1].mid()
    dS = sN - sD
    target = cftkit.boundary_entropy_change("ising")
    record(6, abs(dS - target) <= 0.03, f"Ising L={L} chi=128: S_N - S_D = {dS:.4f} vs {target:.4f} (tol 0.03)")


def test_criterion_07_xxz_boundary_entropy():
    L = 200
    parts, ok = [], True
    for K in (0.5, 1.0, 1.5):
        dS = dmrg_run("xxz", L, K, 0.0)[1].mid() - dmrg_run("xxz", L, K, 1.0)[1].mid()
        target = cftkit.boundary_entropy_change("boson", K)
        ok &= abs(dS - target) <= 0.05
        parts.append(f"K={K}: {dS:.4f} vs {target:.4f}")
    record(7, ok, f"XXZ L={L}: " + ", ".join(parts) + " (tol 0.05)")


def test_criterion_08_xxz_interface():
    parts, ok = [], True
    fits = {}
    for K2 in K2_MONOTONE + K2_TOLERANT:
        fits[K2] = interface_ceff(K2)
    for K2 in K2_TOLERANT:
        target = cftkit.ceff_boson(cftkit.transmission_boson_interface(K1, K2)[1])
        ok &= abs(fits[K2] - target) <= 0.05
        parts.append(f"K2={K2}: {fits[K2]:.3f} vs {target:.3f}")
    ordered = [fits[k] for k in sorted(fits)]
    mono = bool(np.all(np.diff(ordered) > 0))
    ok &= mono
    low = ", ".join(f"K2={k}: {fits[k]:.3f}" for k in K2_MONOTONE)
    record(8, ok, "interface K1=0.6: " + ", ".join(parts) + f" (tol 0.05); {low}; monotone={mono}")


def test_criterion_09_oracle_equivalence():
    worst = {"freefermion": 0.0, "dmrg": 0.0, "symmetry": 0.0}
    cases = 0
    for L in (4, 8, 12):
        for name, spec in oracle_specs(L, "all"):
            ed = exact_diag_oracle(spec)
            prof = schmidt_entropy_profile(dmrg_ground_state(spec, ORACLE_DMRG))
            worst["dmrg"] = max(worst["dmrg"], float(np.max(np.abs(prof.S - ed.S))))
            if spec.model == "ising" and not spec.has_boundary_fields:
                ff = free_fermion_profile(spec)
                worst["freefermion"] = max(worst["freefermion"], float(np.max(np.abs(ff.S - ed.S))))
                corr = ground_correlations(diagonalize(jordan_wigner(spec)))
                worst["symmetry"] = max(worst["symmetry"], complement_symmetry_error(corr))
            if _reflection_symmetric(name):
                for p in (ed, prof):
                    worst["symmetry"] = max(worst["symmetry"], float(np.max(np.abs(p.S - p.S[::-1]))))
            cases += 1
    ok = worst["freefermion"] < 1e-8 and worst["dmrg"] < 1e-8 and worst["symmetry"] < 1e-9
    record(9, ok, f"{cases} specs, L<=12: free fermion {worst['freefermion']:.1e}, DMRG {worst['dmrg']:.1e} "
                  f"(tol 1e-8); S(r)=S(L-r) {worst['symmetry']:.1e} (tol 1e-9)")


def _reflection_symmetric(name: str) -> bool:
    return not any(tag in name for tag in ("duality", "interface"))


def test_criterion_10_characters_and_spectrum():
    chi0, chie = cftkit.ising_characters(20)
    p_ok = list(chi0.degeneracies[:7]) == [1, 0, 1, 1, 2, 2, 3] and list(chie.degeneracies[:7]) == [1, 1, 1, 1, 2, 2, 3]
    L, r = 200, 100
    Lbar = cftkit.entanglement_length(L, r)
    levels = cftkit.entanglement_spectrum_NN(L, r)
    gaps_ok = all(lv.gap == math.pi / Lbar * (float(cftkit.SECTOR_WEIGHTS[lv.sector]) + lv.level) for lv in levels)
    norm_err = abs(cftkit.spectrum_normalization(levels) - 1.0)
    bound = max(cftkit.spectrum_truncation_error(L, r), 1e-13)
    ok = p_ok and gaps_ok and norm_err <= bound
    record(10, ok, f"degeneracies exact={p_ok}, gaps exact={gaps_ok}, "
                   f"|norm - 1| = {norm_err:.1e} (bound {bound:.1e})")


def test_criterion_11_central_charges():
    ising = fitkit.fit_open_chain(free_fermion_profile(build_ising(500), cuts=range(125, 376))).c
    xxz = fitkit.fit_open_chain(dmrg_run("xxz", 200, 1.0, 0.0)[1]).c
    ok = abs(ising - 0.5) <= 0.005 and abs(xxz - 1.0) <= 0.02
    record(11, ok, f"Ising L=500 c={ising:.4f} (0.5 +- 0.005); XX L=200 c={xxz:.4f} (1 +- 0.02)")


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
