"""Brute-force exact diagonalization used as a verification oracle.

The computational basis has site 1 as the most significant qubit and
``|0> = |up>`` (``sz = +1``), so ``psi.reshape(2**r, -1)`` splits the chain
into the leftmost ``r`` sites and the rest.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg as la
import scipy.sparse as sp
import scipy.sparse.linalg as sla

from .models import BOND_OPERATORS, SpinChainSpec
from .profile import EntanglementProfile, von_neumann

MAX_SITES = 14

PAULI = {
    "i": np.eye(2),
    "x": np.array([[0.0, 1.0], [1.0, 0.0]]),
    "y": np.array([[0.0, -1.0j], [1.0j, 0.0]]),
    "z": np.array([[1.0, 0.0], [0.0, -1.0]]),
}


def _embed(ops: dict[int, np.ndarray], L: int) -> sp.csr_matrix:
    out = sp.identity(1, format="csr")
    for j in range(1, L + 1):
        out = sp.kron(out, sp.csr_matrix(ops.get(j, PAULI["i"])), format="csr")
    return out


def hamiltonian_matrix(spec: SpinChainSpec) -> sp.csr_matrix:
    """Sparse ``2**L x 2**L`` Hamiltonian (complex only if an ``sx sy`` bond is present)."""
    L = spec.L
    if L > MAX_SITES:
        raise ValueError(f"exact diagonalization limited to L <= {MAX_SITES}")
    H = sp.csr_matrix((2**L, 2**L), dtype=complex)
    for i, kind, c in spec.bond_terms():
        a, b = BOND_OPERATORS[kind]
        H = H + c * _embed({i: PAULI[a], i + 1: PAULI[b]}, L)
    for j, op, c in spec.site_terms():
        H = H + c * _embed({j: PAULI[op]}, L)
    if not np.any(H.imag.data):
        H = H.real.tocsr()
    return H


def parity_sector(L: int, q: int) -> np.ndarray:
    """Basis indices with ``prod_j sz_j = q``."""
    idx = np.arange(2**L)
    downs = np.array([bin(k).count("1") for k in idx])
    return idx[(1 - 2 * (downs % 2)) == q]


def _lowest(H) -> tuple[float, np.ndarray]:
    n = H.shape[0]
    if n <= 512:
        w, v = la.eigh(H.toarray())
        return float(w[0]), v[:, 0]
    w, v = sla.eigsh(H, k=1, which="SA", tol=1e-14, ncv=min(n, 40))
    return float(w[0]), v[:, 0]


def ground_state(spec: SpinChainSpec, sector: int = 1, degeneracy_tol: float = 1e-9):
    """Lowest eigenpair; the ``Q = sector`` state is taken when both parities tie.

    Returns ``(energy, psi, parity)`` where ``parity`` is ``+1``/``-1`` or ``0``
    when ``Q`` is not conserved.
    """
    H = hamiltonian_matrix(spec)
    L = spec.L
    if not spec.conserves_parity():
        E, psi = _lowest(H)
        return E, psi, 0
    found = {}
    for q in (1, -1):
        idx = parity_sector(L, q)
        E, v = _lowest(H[idx][:, idx])
        psi = np.zeros(2**L, dtype=v.dtype)
        psi[idx] = v
        found[q] = (E, psi)
    if abs(found[1][0] - found[-1][0]) < degeneracy_tol * max(1.0, abs(found[1][0])):
        q = sector
    else:
        q = 1 if found[1][0] < found[-1][0] else -1
    return found[q][0], found[q][1], q


def entanglement_entropies(psi: np.ndarray, L: int, cuts) -> list[float]:
    out = []
    for r in cuts:
        s = la.svdvals(psi.reshape(2**r, 2 ** (L - r)))
        out.append(von_neumann(s**2))
    return out


def exact_diag_oracle(spec: SpinChainSpec, cuts=None, sector: int = 1) -> EntanglementProfile:
    """Ground-state EE profile from the full ``2**L`` eigenproblem (``L <= 14``)."""
    if spec.L > MAX_SITES:
        raise ValueError(f"exact diagonalization limited to L <= {MAX_SITES}")
    cuts = list(range(1, spec.L)) if cuts is None else list(cuts)
    E, psi, q = ground_state(spec, sector=sector)
    S = entanglement_entropies(psi, spec.L, cuts)
    meta = {"model": spec.model, "solver": "exact", "energy": E, "parity": q,
            "defect": spec.defect.to_dict()}
    return EntanglementProfile(spec.L, tuple(cuts), tuple(S), meta)
