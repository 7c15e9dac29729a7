"""
Entanglement spectrum of a free-ended critical Ising chain.

The low-lying entanglement energies form two Virasoro towers (h = 0 and
h = 1/2) with gaps (pi / Lbar)(h + n), degeneracies read off the characters.
Here the CFT levels are set beside the lattice ones from free fermions.
"""
import itertools

import numpy as np

from critchain import cftkit
from critchain.freefermion import diagonalize, ground_correlations, jordan_wigner
from critchain.models import build_ising

chi0, chie = cftkit.ising_characters(10)
print("p_0(n)   :", chi0.degeneracies)
print("p_eps(n) :", chie.degeneracies)

L, r = 400, 200
levels = cftkit.entanglement_spectrum_NN(L, r, N=12)
print("normalization:", cftkit.spectrum_normalization(levels))

# lattice side: single-particle entanglement energies of the block, then all
# many-body combinations of the lowest few
corr = ground_correlations(diagonalize(jordan_wigner(build_ising(L))))
nu = np.linalg.svd(corr.gamma[: 2 * r, : 2 * r], compute_uv=False)[::2]
nu = np.clip(nu, -1 + 1e-15, 1 - 1e-15)
eps = np.sort(np.arctanh(nu))  # rho ~ exp(-sum 2 eps_k n_k)
low = eps[:8]
many = sorted(sum(c) for k in range(9) for c in itertools.combinations(2 * low, k))
lattice_gaps = np.array(many[:8]) - many[0]
cft_gaps = np.array([2 * np.pi * lv.gap for lv in levels for _ in range(lv.degeneracy)][:8])

# non-universal velocity: compare ratios to the first gap
print("lattice gap ratios:", np.round(lattice_gaps[1:] / lattice_gaps[1], 3))
print("CFT gap ratios    :", np.round(cft_gaps[1:] / cft_gaps[1], 3))
