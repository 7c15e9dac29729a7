"""Exact free-fermion solution of Ising chains with energy and duality defects.

The Jordan-Wigner Majoranas are

    gamma_{2k-1} = sx_k prod_{j<k} sz_j,    gamma_{2k} = sy_k prod_{j<k} sz_j,

so that ``sz_k = -i gamma_{2k-1} gamma_{2k}``.  A quadratic Hamiltonian is stored
as a real antisymmetric matrix ``A`` with ``H = (i/4) sum_{jk} A_jk gamma_j gamma_k``.
Indices are 1-based in docstrings and 0-based in arrays.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as la

from .exact import exact_diag_oracle
from .models import ISING, SpinChainSpec
from .profile import EntanglementProfile, binary_entropy

__all__ = [
    "QuadraticMajoranaForm",
    "ModeDecomposition",
    "CorrelationMatrix",
    "ZeroModePolicy",
    "jordan_wigner",
    "diagonalize",
    "ground_correlations",
    "entropy_profile",
    "subsystem_entropy",
    "complement_symmetry_error",
    "free_fermion_profile",
    "interface_entropy",
    "duality_zero_mode",
    "exact_diag_oracle",
]


class ZeroModePolicy(enum.Enum):
    """Occupation of the zero-energy fermion built from a pair of Majorana zero modes.

    The zero-mode fermion is oriented so that ``OCCUPY`` puts the chain in the
    ``Q = prod sz = +1`` sector and ``EMPTY`` in ``Q = -1``.
    """

    OCCUPY = "occupy"
    EMPTY = "empty"


@dataclass(frozen=True)
class QuadraticMajoranaForm:
    A: np.ndarray
    L: int
    metadata: dict = field(default_factory=dict, compare=False)

    @property
    def dimension(self) -> int:
        return 2 * self.L

    @staticmethod
    def site_of(index: int) -> tuple[int, str]:
        """1-based Majorana index -> (site, ``"odd"``/``"even"`` flavour)."""
        return (index + 1) // 2, "odd" if index % 2 else "even"

    def coefficient(self, j: int, k: int) -> float:
        """Coefficient ``w`` of ``(i/2) w gamma_j gamma_k`` in ``H`` (1-based, j < k)."""
        return float(self.A[j - 1, k - 1])


@dataclass(frozen=True)
class ModeDecomposition:
    """Canonical form ``A = sum_k 2 eps_k (u_k v_k^T - v_k u_k^T)`` plus zero modes.

    ``energies`` has length ``L`` (zero modes carry ``0.0`` and come first);
    ``pairs[k] = (u_k, v_k)`` for the nonzero modes in the same ascending order.
    In terms of ``n_k`` the mode occupations, ``H = sum_k eps_k (2 n_k - 1)``.
    """

    energies: np.ndarray
    pairs: np.ndarray
    zero_mode_vectors: np.ndarray
    L: int
    zero_tol: float
    metadata: dict = field(default_factory=dict, compare=False)

    @property
    def zero_mode_count(self) -> int:
        return len(self.zero_mode_vectors)

    @property
    def ground_energy(self) -> float:
        return -float(np.sum(self.energies))

    def transform(self) -> np.ndarray:
        """Orthogonal matrix whose rows are zero-mode vectors then ``u_k, v_k``."""
        rows = [*self.zero_mode_vectors, *self.pairs.reshape(-1, 2 * self.L)]
        return np.array(rows).reshape(2 * self.L, 2 * self.L)


@dataclass(frozen=True)
class CorrelationMatrix:
    """``Gamma_jk = <(i/2)[gamma_j, gamma_k]>`` of a Gaussian state."""

    gamma: np.ndarray
    L: int
    parity: int
    metadata: dict = field(default_factory=dict, compare=False)

    def is_pure(self, tol: float = 1e-10) -> bool:
        G = self.gamma
        return bool(np.max(np.abs(G @ G.T - np.eye(len(G)))) < tol)


def jordan_wigner(spec: SpinChainSpec) -> QuadraticMajoranaForm:
    """Majorana form of an Ising spec (energy or duality defect, no x-fields)."""
    if spec.model != ISING:
        raise ValueError("free-fermion mapping is implemented for the Ising chain only")
    if spec.has_boundary_fields:
        raise ValueError("longitudinal boundary fields are not quadratic; use the DMRG solver")
    L = spec.L
    A = np.zeros((2 * L, 2 * L))

    def add(j, k, w):  # (i/2) w gamma_j gamma_k, 1-based
        A[j - 1, k - 1] += w
        A[k - 1, j - 1] -= w

    for k, c in enumerate(spec.z_fields, start=1):
        # c sz_k = -i c gamma_{2k-1} gamma_{2k}
        if c:
            add(2 * k - 1, 2 * k, -2.0 * c)
    for j, c in enumerate(spec.xx_couplings, start=1):
        # sx_j sx_{j+1} = -i gamma_{2j} gamma_{2j+1}
        if c:
            add(2 * j, 2 * j + 1, -2.0 * c)
    for j, c in enumerate(spec.xy_couplings, start=1):
        # sx_j sy_{j+1} = -i gamma_{2j} gamma_{2j+2}
        if c:
            add(2 * j, 2 * j + 2, -2.0 * c)
    meta = {"model": spec.model, "defect": spec.defect.to_dict()}
    return QuadraticMajoranaForm(A, L, meta)


def _canonical_zero_basis(A: np.ndarray, N: np.ndarray, tol: float) -> np.ndarray:
    """Rows spanning the null space: decoupled unit vectors first, then the rest."""
    if N.shape[1] == 0:
        return np.zeros((0, A.shape[0]))
    decoupled = [j for j in range(A.shape[0]) if np.max(np.abs(A[j])) <= tol]
    local = []
    for j in decoupled:
        if np.linalg.norm(N[j]) > 1.0 - 1e-8:
            e = np.zeros(A.shape[0])
            e[j] = 1.0
            local.append(e)
    if not local:
        rest = N
    else:
        E = np.array(local).T
        R = N - E @ (E.T @ N)
        U, s, _ = la.svd(R, full_matrices=False)
        rest = U[:, s > 0.5]
    rest = rest.copy()
    for col in range(rest.shape[1]):
        # fix the sign: first entry with appreciable weight positive
        v = rest[:, col]
        pivot = np.flatnonzero(np.abs(v) > 1e-8)[0]
        if v[pivot] < 0:
            rest[:, col] = -v
    return np.array([*local, *rest.T]).reshape(-1, A.shape[0])


def diagonalize(form: QuadraticMajoranaForm, zero_tol: float | None = None) -> ModeDecomposition:
    """Real Schur canonical form of ``A``; modes with ``eps < zero_tol`` are zero modes."""
    A = np.asarray(form.A, dtype=float)
    scale = float(np.max(np.abs(A))) if A.size else 0.0
    if np.max(np.abs(A + A.T), initial=0.0) > 1e-12 * max(1.0, scale):
        raise ValueError("coefficient matrix is not antisymmetric")
    if zero_tol is None:
        zero_tol = 1e-10 * max(scale, 1e-300)
    n = A.shape[0]
    T, Z = la.schur(A, output="real")
    pairs, energies, zero_cols = [], [], []
    i = 0
    while i < n:
        if i + 1 < n and abs(T[i + 1, i]) > 0.0:
            b = 0.5 * (T[i, i + 1] - T[i + 1, i])
            eps = abs(b) / 2.0
            u, v = Z[:, i], Z[:, i + 1]
            if eps < zero_tol:
                zero_cols += [i, i + 1]
            else:
                pairs.append((u, v) if b > 0 else (v, u))
                energies.append(eps)
            i += 2
        else:
            zero_cols.append(i)
            i += 1
    order = np.argsort(energies, kind="stable")
    pairs = np.array([pairs[k] for k in order]).reshape(-1, 2, n)
    energies = np.asarray(energies)[order]
    zero_vecs = _canonical_zero_basis(A, Z[:, zero_cols], zero_tol)
    if len(zero_vecs) % 2:
        raise ArithmeticError("odd number of Majorana zero modes")
    all_eps = np.concatenate([np.zeros(len(zero_vecs) // 2), energies])
    meta = dict(form.metadata)
    return ModeDecomposition(all_eps, pairs, zero_vecs, form.L, zero_tol, meta)


def ground_correlations(
    modes: ModeDecomposition, policy: ZeroModePolicy | None = ZeroModePolicy.OCCUPY
) -> CorrelationMatrix:
    """Majorana correlation matrix of the filled Fermi sea.

    Zero-mode vectors are paired in order; the first pair's occupation is chosen
    by ``policy`` (through the sign of ``Q``), further pairs keep their basis
    orientation.
    """
    n = 2 * modes.L
    Z = modes.zero_mode_vectors
    if len(Z) and policy is None:
        raise ValueError("a zero-mode policy is required when zero modes exist")
    u, v = modes.pairs[:, 0, :], modes.pairs[:, 1, :]
    # ground state of eps (i gamma_u gamma_v): <i gamma_u gamma_v> = -1
    G = -(u.T @ v - v.T @ u)
    signs = -np.ones(len(modes.pairs))
    zsign = -np.ones(len(Z) // 2)
    M = np.concatenate([Z, modes.pairs.reshape(-1, n)]) if len(Z) else modes.pairs.reshape(-1, n)
    det = np.linalg.det(M) if n else 1.0
    pf = np.sign(det) * np.prod(signs) * np.prod(zsign)
    parity = int(round((-1) ** modes.L * pf))
    if len(Z):
        want = 1 if policy is ZeroModePolicy.OCCUPY else -1
        if parity != want:
            zsign[0] = 1.0
            parity = want
        for p, s in enumerate(zsign):
            a, b = Z[2 * p], Z[2 * p + 1]
            G = G + s * (np.outer(a, b) - np.outer(b, a))
    meta = dict(modes.metadata)
    meta["policy"] = policy.value if (policy is not None and len(Z)) else "none"
    return CorrelationMatrix(G, modes.L, parity, meta)


def _block_entropy(block: np.ndarray) -> float:
    # singular values of a real antisymmetric block are the |eigenvalues| of i*block, doubled
    nu = la.svdvals(block)
    if len(nu) and np.max(nu) > 1.0 + 1e-8:
        raise ArithmeticError(f"restricted correlation eigenvalue {np.max(nu)} exceeds 1")
    nu = np.clip(nu, 0.0, 1.0)
    return 0.5 * float(np.sum(binary_entropy((1.0 + nu) / 2.0)))


def entropy_profile(corr: CorrelationMatrix, cuts=None) -> EntanglementProfile:
    """``S(r)`` of sites ``1..r`` from the restricted correlation matrix."""
    L = corr.L
    cuts = list(range(1, L)) if cuts is None else [int(r) for r in cuts]
    S = []
    for r in cuts:
        if not 1 <= r <= L - 1:
            raise ValueError(f"cut r={r} outside 1..{L - 1}")
        S.append(_block_entropy(corr.gamma[: 2 * r, : 2 * r]))
    meta = {**corr.metadata, "solver": "freefermion", "parity": corr.parity}
    return EntanglementProfile(L, tuple(cuts), tuple(S), meta)


def subsystem_entropy(corr: CorrelationMatrix, sites) -> float:
    """EE of an arbitrary set of sites (1-based) in fermionic terms.

    For a contiguous block this equals the spin EE whenever the state has a
    definite parity, since the Jordan-Wigner string to its left is then a
    product of ``Q`` and the block's own parity.
    """
    idx = np.array([2 * (j - 1) + f for j in sorted(set(sites)) for f in (0, 1)], dtype=int)
    if len(idx) and (idx.min() < 0 or idx.max() >= 2 * corr.L):
        raise ValueError("site index out of range")
    return _block_entropy(corr.gamma[np.ix_(idx, idx)])


def complement_symmetry_error(corr: CorrelationMatrix) -> float:
    """``max_r |S(1..r) - S(r+1..L)|``; zero for a pure state."""
    L = corr.L
    return max(
        (abs(subsystem_entropy(corr, range(1, r + 1)) - subsystem_entropy(corr, range(r + 1, L + 1)))
         for r in range(1, L)),
        default=0.0,
    )


def free_fermion_profile(
    spec: SpinChainSpec, cuts=None, policy: ZeroModePolicy = ZeroModePolicy.OCCUPY
) -> EntanglementProfile:
    """JW map, diagonalization, ground state and EE profile in one call."""
    modes = diagonalize(jordan_wigner(spec))
    prof = entropy_profile(ground_correlations(modes, policy), cuts)
    prof.metadata["energy"] = modes.ground_energy
    if spec.defect.strength is not None:
        prof.metadata["b"] = spec.defect.strength
    return prof


def interface_entropy(spec: SpinChainSpec, policy: ZeroModePolicy = ZeroModePolicy.OCCUPY) -> float:
    """Interface EE ``S(r = L/2)``."""
    return free_fermion_profile(spec, [spec.L // 2], policy).entropies[0]


def duality_zero_mode(L: int, b: float) -> np.ndarray:
    """Normalized delocalized partner of the decoupled Majorana ``gamma_{2 i0 + 1}``.

    ``b sum_{k <= i0} gamma_{2k-1} + sum_{k > i0} gamma_{2k}`` with ``i0 = L/2``.
    """
    i0 = L // 2
    v = np.zeros(2 * L)
    v[0 : 2 * i0 : 2] = b
    v[2 * i0 + 1 :: 2] = 1.0
    return v / np.linalg.norm(v)

