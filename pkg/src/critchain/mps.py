"""Finite-size two-site DMRG for open spin-1/2 chains.

Tensor conventions
------------------
* MPS site tensor ``A[a, s, b]``: left bond, physical index, right bond.
* MPO tensor ``W[w, v, s, s']``: left/right MPO bond, then ``<s| op |s'>``.
  State ``0`` of the MPO bond means "nothing placed yet", state ``D - 1`` means
  "term completed".
* Environments ``E[a, w, a']``: bra bond, MPO bond, ket bond.

The physical basis is ``|0> = |up>`` (``sz = +1``), matching :mod:`critchain.exact`.
"""

from __future__ import annotations

import logging
import math
import struct
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as la

from .models import BOND_OPERATORS, ISING, XXZ, SpinChainSpec
from .profile import EntanglementProfile, von_neumann

logger = logging.getLogger(__name__)

# sy = -i * _YR with a real matrix, so yy products stay real
_YR = np.array([[0.0, 1.0], [-1.0, 0.0]])
_OPS = {
    "i": np.eye(2),
    "x": np.array([[0.0, 1.0], [1.0, 0.0]]),
    "yr": _YR,
    "z": np.array([[1.0, 0.0], [0.0, -1.0]]),
}
# bond kind -> (left op, right op, phase multiplying the coefficient)
_CHANNELS = {
    "xx": ("x", "x", 1.0),
    "yy": ("yr", "yr", -1.0),
    "zz": ("z", "z", 1.0),
    "xy": ("x", "yr", -1.0j),
}
assert set(_CHANNELS) == set(BOND_OPERATORS)

TIE_BREAK_FIELD = 1e-9
PARITY_BIAS = 1e-3
LOOSE_LANCZOS_TOL = 1e-5


@dataclass(frozen=True)
class DmrgConfig:
    """DMRG controls.

    ``chi_schedule`` lists the bond-dimension cap per sweep; after it is
    exhausted ``chi`` is used.  By default the cap doubles from 16 up to ``chi``.
    """

    chi: int = 128
    cutoff: float = 1e-12
    max_sweeps: int = 30
    threshold: float = 1e-10
    chi_schedule: tuple[int, ...] | None = None
    lanczos_tol: float = 1e-10
    krylov_dim: int = 40

    def __post_init__(self):
        if self.chi < 2:
            raise ValueError("chi must be at least 2")
        if not 0 <= self.cutoff <= 1e-8:
            raise ValueError("cutoff must lie in [0, 1e-8]")
        if self.threshold <= 0:
            raise ValueError("threshold must be positive")
        if self.max_sweeps < 1:
            raise ValueError("max_sweeps must be positive")

    def chi_for_sweep(self, sweep: int) -> int:
        sched = self.chi_schedule
        if sched is None:
            sched = []
            c = 16
            while c < self.chi:
                sched.append(c)
                c *= 2
        return min(sched[sweep], self.chi) if sweep < len(sched) else self.chi

    def ramp_length(self) -> int:
        n = 0
        while self.chi_for_sweep(n) < self.chi:
            n += 1
        return n


@dataclass
class MpsState:
    tensors: list
    schmidt_values: list
    energy: float
    converged: bool
    sweeps: int
    sweep_energies: list = field(default_factory=list)
    max_truncation_error: float = 0.0
    chi_exhausted: bool = False
    metadata: dict = field(default_factory=dict)

    @property
    def L(self) -> int:
        return len(self.tensors)

    @property
    def bond_dimensions(self) -> list[int]:
        return [len(s) for s in self.schmidt_values]

    def is_canonical(self, tol: float = 1e-10) -> bool:
        for lam in self.schmidt_values:
            if np.any(lam < 0) or np.any(np.diff(lam) > tol):
                return False
            if abs(np.sum(lam**2) - 1.0) > tol:
                return False
        return True


def build_mpo(
    spec: SpinChainSpec,
    extra_x_fields: tuple[float, float] = (0.0, 0.0),
    parity_bias: float = 0.0,
) -> list[np.ndarray]:
    """MPO tensors ``W[w, v, s, s']`` for a nearest-neighbour spec.

    ``parity_bias`` adds ``-parity_bias * prod_j sz_j`` through one extra MPO
    channel.
    """
    L = spec.L
    kinds = [k for k in _CHANNELS if any(spec.couplings(k))]
    nq = 1 if parity_bias else 0
    D = 2 + len(kinds) + nq
    complex_ = "xy" in kinds
    dtype = complex if complex_ else float
    onsite = [np.zeros((2, 2)) for _ in range(L)]
    for j, op, c in spec.site_terms():
        onsite[j - 1] = onsite[j - 1] + c * _OPS[op]
    onsite[0] = onsite[0] + extra_x_fields[0] * _OPS["x"]
    onsite[-1] = onsite[-1] + extra_x_fields[1] * _OPS["x"]
    Ws = []
    for j in range(L):
        W = np.zeros((D, D, 2, 2), dtype=dtype)
        W[0, 0] = _OPS["i"]
        W[D - 1, D - 1] = _OPS["i"]
        W[0, D - 1] = onsite[j]
        for k, kind in enumerate(kinds, start=1):
            a, b, phase = _CHANNELS[kind]
            if j < L - 1:
                W[0, k] = phase * spec.couplings(kind)[j] * _OPS[a]
            W[k, D - 1] = _OPS[b]
        if nq:
            kq = D - 2
            if L == 1:
                W[0, D - 1] = W[0, D - 1] - parity_bias * _OPS["z"]
            elif j == 0:
                W[0, kq] = -parity_bias * _OPS["z"]
            elif j == L - 1:
                W[kq, D - 1] = _OPS["z"]
            else:
                W[kq, kq] = _OPS["z"]
        Ws.append(W)
    return Ws


def product_state(spec: SpinChainSpec) -> list[np.ndarray]:
    """All-up for Ising, Neel (up, down, ...) for XXZ."""
    out = []
    for j in range(spec.L):
        A = np.zeros((1, 2, 1))
        down = spec.model == XXZ and j % 2 == 1
        A[0, 1 if down else 0, 0] = 1.0
        out.append(A)
    return out


def _left_env(E, A, W):
    T = np.tensordot(E, A, axes=([2], [0]))  # a w s' b'
    T = np.tensordot(T, W, axes=([1, 2], [0, 3]))  # a b' v s
    T = np.tensordot(A.conj(), T, axes=([0, 1], [0, 3]))  # b b' v
    return T.transpose(0, 2, 1)


def _right_env(E, B, W):
    T = np.tensordot(B, E, axes=([2], [2]))  # a' s' b v
    T = np.tensordot(T, W, axes=([1, 3], [3, 1]))  # a' b w s
    T = np.tensordot(B.conj(), T, axes=([1, 2], [3, 1]))  # a a' w
    return T.transpose(0, 2, 1)


def _two_site_matvec(LE, W1, W2, RE, shape):
    def matvec(x):
        t = x.reshape(shape)
        t = np.tensordot(LE, t, axes=([2], [0]))  # a w s' t' b'
        t = np.tensordot(t, W1, axes=([1, 2], [0, 3]))  # a t' b' v s
        t = np.tensordot(t, W2, axes=([3, 1], [0, 3]))  # a b' s u t
        t = np.tensordot(t, RE, axes=([1, 3], [2, 1]))  # a s t b
        return t.reshape(-1)

    return matvec


def _dense_heff(LE, W1, W2, RE):
    H = np.einsum("awx,wvsp,vutq,buy->astbxpqy", LE, W1, W2, RE, optimize=True)
    n = int(np.prod(H.shape[:4]))
    return H.reshape(n, n)


def lanczos_ground(matvec, v0, tol=1e-10, krylov_dim=40, max_restarts=50):
    """Lowest eigenpair of a Hermitian operator by restarted Lanczos.

    Full reorthogonalization; stops when ``||H x - E x|| < tol``.
    """
    v = v0 / np.linalg.norm(v0)
    n = v.size
    m = min(krylov_dim, n)
    energy = None
    for _ in range(max_restarts):
        V = np.zeros((m, n), dtype=v.dtype)
        alpha = np.zeros(m)
        beta = np.zeros(m)
        V[0] = v
        w = matvec(v)
        alpha[0] = np.vdot(v, w).real
        w = w - alpha[0] * v
        k = 1
        done = False
        while k < m:
            b = np.linalg.norm(w)
            if b < 1e-14:
                done = True
                break
            beta[k - 1] = b
            vk = w / b
            for _pass in range(2):
                vk = vk - V[:k].T @ (V[:k].conj() @ vk)
            vk = vk / np.linalg.norm(vk)
            V[k] = vk
            w = matvec(vk) - b * V[k - 1]
            alpha[k] = np.vdot(vk, w).real
            w = w - alpha[k] * vk
            k += 1
            if k >= 3:
                evals, evecs = la.eigh_tridiagonal(alpha[:k], beta[: k - 1])
                res = abs(np.linalg.norm(w) * evecs[-1, 0])
                if res < tol:
                    done = True
                    break
        evals, evecs = la.eigh_tridiagonal(alpha[:k], beta[: k - 1]) if k > 1 else (alpha[:1], np.ones((1, 1)))
        y = evecs[:, 0]
        x = y @ V[:k]
        x = x / np.linalg.norm(x)
        energy = float(evals[0])
        if done:
            return energy, x
        v = x
    logger.warning("Lanczos did not reach residual %g", tol)
    return energy, v


def _truncate(theta_mat, chi, cutoff):
    try:
        U, S, Vh = la.svd(theta_mat, full_matrices=False)
    except la.LinAlgError:
        U, S, Vh = la.svd(theta_mat, full_matrices=False, lapack_driver="gesvd")
    w = S**2
    norm = w.sum()
    # discarded[k] = weight beyond the first k values
    tail = np.concatenate([np.cumsum(w[::-1])[::-1], [0.0]]) / norm
    keep = max(1, int(np.argmax(tail <= cutoff)))
    limited = keep > chi
    keep = min(keep, chi)
    err = float(tail[keep])
    S = S[:keep] / math.sqrt(np.sum(w[:keep]))
    return U[:, :keep], S, Vh[:keep], err, limited and err > cutoff


class _Engine:
    def __init__(self, spec, cfg, mpo):
        self.spec = spec
        self.cfg = cfg
        self.W = mpo
        self.L = spec.L
        dtype = mpo[0].dtype
        self.M = [A.astype(dtype) for A in product_state(spec)]
        D = mpo[0].shape[0]
        self.LE = [None] * (self.L + 1)
        self.RE = [None] * (self.L + 1)
        lb = np.zeros((1, D, 1), dtype=dtype)
        lb[0, 0, 0] = 1.0
        rb = np.zeros((1, D, 1), dtype=dtype)
        rb[0, D - 1, 0] = 1.0
        self.LE[0] = lb
        self.RE[self.L] = rb
        for j in range(self.L - 1, 0, -1):
            self.RE[j] = _right_env(self.RE[j + 1], self.M[j], self.W[j])
        self.max_err = 0.0
        self.chi_hit = False
        self.tol = LOOSE_LANCZOS_TOL

    def _solve(self, i):
        LE, RE = self.LE[i], self.RE[i + 2]
        W1, W2 = self.W[i], self.W[i + 1]
        theta = np.tensordot(self.M[i], self.M[i + 1], axes=([2], [0]))
        shape = theta.shape
        n = theta.size
        if n <= 256:
            E, V = la.eigh(_dense_heff(LE, W1, W2, RE))
            return float(E[0]), V[:, 0].reshape(shape)
        mv = _two_site_matvec(LE, W1, W2, RE, shape)
        E, x = lanczos_ground(mv, theta.reshape(-1), self.tol, self.cfg.krylov_dim)
        return E, x.reshape(shape)

    def update(self, i, chi, direction):
        E, theta = self._solve(i)
        a, s, t, b = theta.shape
        U, S, Vh, err, hit = _truncate(theta.reshape(a * s, t * b), chi, self.cfg.cutoff)
        self.max_err = max(self.max_err, err)
        self.chi_hit = self.chi_hit or hit
        k = len(S)
        if direction > 0:
            self.M[i] = U.reshape(a, s, k)
            self.M[i + 1] = (S[:, None] * Vh).reshape(k, t, b)
            self.LE[i + 1] = _left_env(self.LE[i], self.M[i], self.W[i])
        else:
            self.M[i] = (U * S[None, :]).reshape(a, s, k)
            self.M[i + 1] = Vh.reshape(k, t, b)
            self.RE[i + 1] = _right_env(self.RE[i + 2], self.M[i + 1], self.W[i + 1])
        return E

    def sweep(self, chi):
        self.max_err = 0.0
        self.chi_hit = False
        E = None
        for i in range(self.L - 1):
            E = self.update(i, chi, +1)
        for i in range(self.L - 2, -1, -1):
            E = self.update(i, chi, -1)
        return E

    def low_gap(self):
        """Splitting of the two lowest eigenvalues of the central effective Hamiltonian."""
        i = self.L // 2 - 1
        # bring the orthogonality centre to sites (i, i+1)
        for j in range(i):
            a, s, b = self.M[j].shape
            Q, R = la.qr(self.M[j].reshape(a * s, b), mode="economic")
            self.M[j] = Q.reshape(a, s, -1)
            self.M[j + 1] = np.tensordot(R, self.M[j + 1], axes=([1], [0]))
            self.LE[j + 1] = _left_env(self.LE[j], self.M[j], self.W[j])
        LE, RE = self.LE[i], self.RE[i + 2]
        theta = np.tensordot(self.M[i], self.M[i + 1], axes=([2], [0]))
        n = theta.size
        if n <= 1024:
            evals = la.eigh(_dense_heff(LE, self.W[i], self.W[i + 1], RE), eigvals_only=True)
            return float(evals[1] - evals[0])
        from scipy.sparse.linalg import LinearOperator, eigsh

        mv = _two_site_matvec(LE, self.W[i], self.W[i + 1], RE, theta.shape)
        op = LinearOperator((n, n), matvec=mv, dtype=theta.dtype)
        evals = eigsh(op, k=2, which="SA", v0=theta.reshape(-1), return_eigenvectors=False)
        evals = np.sort(evals)
        return float(evals[1] - evals[0])

    def canonical_state(self):
        return left_canonicalize(self.M)


def left_canonicalize(tensors):
    """Left-canonical copy of an MPS and its exact Schmidt values on every bond."""
    M = [np.asarray(m).copy() for m in tensors]
    for j in range(len(M) - 1, 0, -1):
        # right-orthonormalize so that the SVDs below see the full right block
        a, s, b = M[j].shape
        Q, R = la.qr(M[j].reshape(a, s * b).T, mode="economic")
        M[j] = Q.T.reshape(-1, s, b)
        M[j - 1] = np.tensordot(M[j - 1], R.T, axes=([2], [0]))
    lams = []
    for j in range(len(M) - 1):
        a, s, b = M[j].shape
        U, S, Vh = la.svd(M[j].reshape(a * s, b), full_matrices=False)
        keep = max(1, int(np.sum(S > 1e-15 * S[0])))
        U, S, Vh = U[:, :keep], S[:keep], Vh[:keep]
        S = S / np.linalg.norm(S)
        M[j] = U.reshape(a, s, keep)
        M[j + 1] = np.tensordot(S[:, None] * Vh, M[j + 1], axes=([1], [0]))
        lams.append(S)
    M[-1] = M[-1] / np.linalg.norm(M[-1])
    return M, lams


def _run(spec, cfg, extra_fields=(0.0, 0.0), parity_bias=0.0):
    eng = _Engine(spec, cfg, build_mpo(spec, extra_fields, parity_bias))
    energies = []
    converged = False
    ramp = cfg.ramp_length()
    for sweep in range(cfg.max_sweeps):
        chi = cfg.chi_for_sweep(sweep)
        # eigensolver residual follows the sweep-to-sweep energy change
        if len(energies) >= 2:
            eng.tol = max(cfg.lanczos_tol, min(LOOSE_LANCZOS_TOL, abs(energies[-1] - energies[-2])))
        E = eng.sweep(chi)
        energies.append(E)
        logger.debug("sweep %d chi %d E %.14f trunc %.2e", sweep, chi, E, eng.max_err)
        if sweep >= ramp + 1 and abs(energies[-1] - energies[-2]) < cfg.threshold:
            converged = True
            break
    return eng, energies, converged


def dmrg_ground_state(spec: SpinChainSpec, cfg: DmrgConfig | None = None) -> MpsState:
    """Variational ground state of ``spec``.

    For an Ising chain without boundary fields, a tie-breaking longitudinal field
    of ``1e-9`` is added at both ends only if the two lowest levels of the
    central effective Hamiltonian coincide.  Duality-defect chains instead have
    an exact zero-mode doublet split by ``Q``; a term ``-PARITY_BIAS * Q``,
    which commutes with ``H``, selects the ``Q = +1`` state (the reported
    energy has it removed).
    """
    cfg = cfg or DmrgConfig()
    if spec.L < 2:
        raise ValueError("DMRG needs at least two sites")
    bias = PARITY_BIAS if spec.defect.kind == "duality" else 0.0
    eng, energies, converged = _run(spec, cfg, parity_bias=bias)
    # the bias lowers the Q = +1 sector by exactly `bias`
    energies = [E + bias for E in energies]
    meta = {"tie_break": 0.0, "parity_bias": bias}
    # duality chains are already pinned by the parity bias
    if (spec.model == ISING and not spec.has_boundary_fields and spec.L >= 4
            and spec.defect.kind != "duality"):
        gap = eng.low_gap()
        meta["central_gap"] = gap
        if gap < 1e-10:
            logger.info("degenerate doublet (gap %.2e): adding tie-breaking field", gap)
            f = -TIE_BREAK_FIELD
            eng, energies, converged = _run(spec, cfg, (f, f))
            meta["tie_break"] = TIE_BREAK_FIELD
    tensors, lams = eng.canonical_state()
    meta.update({
        "model": spec.model,
        "solver": "dmrg",
        "chi": cfg.chi,
        "cutoff": cfg.cutoff,
        "defect": spec.defect.to_dict(),
        "boundary_x_fields": list(spec.boundary_x_fields),
    })
    return MpsState(
        tensors=tensors,
        schmidt_values=lams,
        energy=energies[-1],
        converged=converged,
        sweeps=len(energies),
        sweep_energies=energies,
        max_truncation_error=eng.max_err,
        chi_exhausted=eng.chi_hit,
        metadata=meta,
    )


def schmidt_entropy_profile(state: MpsState) -> EntanglementProfile:
    """Von Neumann entropy at every bond from the stored Schmidt spectra."""
    S = []
    for lam in state.schmidt_values:
        w = np.asarray(lam) ** 2
        if abs(w.sum() - 1.0) > 1e-8:
            raise ValueError(f"Schmidt spectrum not normalized (sum {w.sum()})")
        S.append(von_neumann(w))
    L = state.L
    meta = {k: v for k, v in state.metadata.items()}
    meta["energy"] = state.energy
    meta["converged"] = state.converged
    return EntanglementProfile(L, tuple(range(1, L)), tuple(S), meta)


def dmrg_profile(spec: SpinChainSpec, cfg: DmrgConfig | None = None) -> EntanglementProfile:
    return schmidt_entropy_profile(dmrg_ground_state(spec, cfg))


def mps_from_tensors(tensors: list[np.ndarray], energy: float = float("nan")) -> MpsState:
    """Wrap explicit MPS tensors (any gauge) as a canonical :class:`MpsState`."""
    M, lams = left_canonicalize(tensors)
    return MpsState(M, lams, energy, True, 0)


# --------------------------------------------------------------------------
# checkpoint files

_MAGIC = b"CCMPS001"


def save_checkpoint(state: MpsState, path) -> None:
    """Write tensors in a flat binary layout (all integers little-endian ``uint64``).

    Layout: ``b"CCMPS001"``, ``L``, dtype flag (0 real, 1 complex), energy as
    ``float64``; then per site ``ndim = 3``, the three dimensions, and the
    row-major ``float64`` values (complex entries stored as ``re, im`` pairs).
    """
    cplx = any(np.iscomplexobj(t) for t in state.tensors)
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<QQd", state.L, int(cplx), state.energy))
        for t in state.tensors:
            fh.write(struct.pack("<Q", t.ndim))
            fh.write(struct.pack(f"<{t.ndim}Q", *t.shape))
            arr = np.ascontiguousarray(t, dtype=complex if cplx else float)
            fh.write(arr.view(np.float64).astype("<f8").tobytes())


def load_checkpoint(path) -> MpsState:
    with open(path, "rb") as fh:
        if fh.read(8) != _MAGIC:
            raise ValueError("not a critchain MPS checkpoint")
        L, cplx, energy = struct.unpack("<QQd", fh.read(24))
        tensors = []
        for _ in range(L):
            (ndim,) = struct.unpack("<Q", fh.read(8))
            shape = struct.unpack(f"<{ndim}Q", fh.read(8 * ndim))
            count = int(np.prod(shape)) * (2 if cplx else 1)
            vals = np.frombuffer(fh.read(8 * count), dtype="<f8").astype(float)
            tensors.append(vals.view(complex).reshape(shape) if cplx else vals.reshape(shape))
    return mps_from_tensors(tensors, energy)
