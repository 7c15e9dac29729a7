import numpy as np
import pytest

from critchain.exact import (
    MAX_SITES,
    exact_diag_oracle,
    ground_state,
    hamiltonian_matrix,
    parity_sector,
)
from critchain.models import DefectSpec, build_ising, build_xxz


def test_two_site_ising_energy():
    # Q = +1 block on (up up, down down) is [[-1, -1/2], [-1/2, 1]]
    E, psi, q = ground_state(build_ising(2))
    assert E == pytest.approx(-np.sqrt(5.0) / 2.0, abs=1e-14)
    assert q == 1


def test_hermitian_and_real_when_possible():
    H = hamiltonian_matrix(build_ising(6, h_b=0.3))
    assert not np.iscomplexobj(H.data)
    Hd = H.toarray()
    assert np.allclose(Hd, Hd.T)
    Hc = hamiltonian_matrix(build_ising(6, defect=DefectSpec.duality(0.7))).toarray()
    assert np.iscomplexobj(Hc)
    assert np.allclose(Hc, Hc.conj().T)


def test_parity_sectors_partition():
    a, b = parity_sector(6, 1), parity_sector(6, -1)
    assert len(a) == len(b) == 32
    assert set(a) | set(b) == set(range(64))


def test_size_limit():
    with pytest.raises(ValueError):
        exact_diag_oracle(build_ising(MAX_SITES + 2))


def test_xx_chain_energy_matches_free_fermions():
    # the XX chain maps to hopping fermions; E0 = -sum of occupied |2 cos k|
    L = 10
    E, _, _ = ground_state(build_xxz(L, 0.0))
    k = np.pi * np.arange(1, L + 1) / (L + 1)
    eps = -2.0 * np.cos(k)
    assert E == pytest.approx(eps[eps < 0].sum(), abs=1e-12)


@pytest.mark.parametrize("spec", [build_ising(10), build_xxz(10, 0.4, h_b=0.2)])
def test_pure_state_symmetry(spec):
    _, psi, _ = ground_state(spec)
    L = spec.L
    for r in range(1, L):
        s_left = np.linalg.svd(psi.reshape(2**r, -1), compute_uv=False)
        s_right = np.linalg.svd(psi.reshape(2**r, -1).T, compute_uv=False)
        assert np.allclose(s_left, s_right, atol=1e-12)


def test_spin_flip_equivalence_of_energy_defect():
    # b and -b are related by flipping sx on one half of the chain
    for b in (0.3, 0.8):
        p = exact_diag_oracle(build_ising(10, defect=DefectSpec.energy(b)))
        m = exact_diag_oracle(build_ising(10, defect=DefectSpec.energy(-b)))
        assert np.max(np.abs(p.S - m.S)) < 1e-10
        assert p.metadata["energy"] == pytest.approx(m.metadata["energy"], abs=1e-12)


def test_sector_choice_on_degeneracy():
    # the decoupled duality zero modes make both parities degenerate
    spec = build_ising(8, defect=DefectSpec.duality(0.5))
    Ep, _, qp = ground_state(spec, sector=1)
    Em, _, qm = ground_state(spec, sector=-1)
    assert (qp, qm) == (1, -1)
    assert Ep == pytest.approx(Em, abs=1e-10)
