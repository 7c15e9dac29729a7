"""Lattice Hamiltonian specifications for open Ising and XXZ chains.

Every spec stores the coefficients of the Pauli-operator terms exactly as they
appear in the Hamiltonian, including the overall ``-1/2`` factors, so energies
obtained from any solver can be compared directly::

    H_Ising = -1/2 sum_i sx_i sx_{i+1} - 1/2 sum_i sz_i - h_b (sx_1 + sx_L)
    H_XXZ   = -1/2 sum_i [sx sx + sy sy + Delta_i sz sz]_{i,i+1} - h_b (sx_1 + sx_L)

Sites and bonds are numbered from 1 as in the physics literature; bond ``i``
joins sites ``i`` and ``i + 1``.  Arrays are stored 0-based (``bond i`` lives at
index ``i - 1``).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

ISING = "ising"
XXZ = "xxz"

#: Boundary field used for Dirichlet runs when none is given.
DEFAULT_BOUNDARY_FIELD = 1.0

#: Operator labels that may appear on a bond: (left operator, right operator).
BOND_OPERATORS = {
    "xx": ("x", "x"),
    "yy": ("y", "y"),
    "zz": ("z", "z"),
    "xy": ("x", "y"),
}


@dataclass(frozen=True)
class DefectSpec:
    """A single defect (or interface) in an open chain.

    ``kind`` is one of ``"none"``, ``"energy"``, ``"duality"``, ``"interface"``.
    ``position`` is the 1-based defect bond ``i0`` (``None`` means ``L // 2``).
    """

    kind: str = "none"
    strength: float | None = None
    position: int | None = None
    delta_a: float | None = None
    delta_b: float | None = None

    def __post_init__(self):
        if self.kind not in ("none", "energy", "duality", "interface"):
            raise ValueError(f"unknown defect kind {self.kind!r}")
        if self.kind in ("energy", "duality") and self.strength is None:
            raise ValueError(f"{self.kind} defect needs a strength")
        if self.kind == "interface" and (self.delta_a is None or self.delta_b is None):
            raise ValueError("interface defect needs delta_a and delta_b")

    @classmethod
    def none(cls) -> "DefectSpec":
        return cls()

    @classmethod
    def energy(cls, b: float, position: int | None = None) -> "DefectSpec":
        return cls("energy", float(b), position)

    @classmethod
    def duality(cls, b: float, position: int | None = None) -> "DefectSpec":
        return cls("duality", float(b), position)

    @classmethod
    def interface(cls, delta_a: float, delta_b: float, position: int | None = None) -> "DefectSpec":
        return cls("interface", None, position, float(delta_a), float(delta_b))

    def resolved(self, L: int) -> "DefectSpec":
        """Copy with ``position`` filled in (``L // 2`` by default)."""
        if self.kind == "none":
            return DefectSpec()
        pos = L // 2 if self.position is None else int(self.position)
        return DefectSpec(self.kind, self.strength, pos, self.delta_a, self.delta_b)

    def to_dict(self) -> dict:
        return {k: v for k, v in self.__dict__.items() if v is not None}

    @classmethod
    def from_dict(cls, d: dict) -> "DefectSpec":
        return cls(**d)


@dataclass(frozen=True)
class SpinChainSpec:
    """Immutable description of an open spin-1/2 chain Hamiltonian.

    All coupling arrays hold the coefficient multiplying the corresponding
    operator product in ``H``; ``xy_couplings[i-1]`` multiplies
    ``sx_i sy_{i+1}``.  ``boundary_x_fields`` multiply ``sx_1`` and ``sx_L``.
    """

    model: str
    L: int
    xx_couplings: tuple[float, ...]
    yy_couplings: tuple[float, ...]
    zz_couplings: tuple[float, ...]
    xy_couplings: tuple[float, ...]
    z_fields: tuple[float, ...]
    boundary_x_fields: tuple[float, float] = (0.0, 0.0)
    defect: DefectSpec = field(default_factory=DefectSpec)

    def __post_init__(self):
        if self.model not in (ISING, XXZ):
            raise ValueError(f"unknown model {self.model!r}")
        if self.L < 1:
            raise ValueError("L must be positive")
        for name in ("xx_couplings", "yy_couplings", "zz_couplings", "xy_couplings"):
            arr = tuple(float(v) for v in getattr(self, name))
            if len(arr) != max(self.L - 1, 0):
                raise ValueError(f"{name} must have length L-1={self.L - 1}, got {len(arr)}")
            object.__setattr__(self, name, arr)
        z = tuple(float(v) for v in self.z_fields)
        if len(z) != self.L:
            raise ValueError(f"z_fields must have length L={self.L}, got {len(z)}")
        object.__setattr__(self, "z_fields", z)
        bx = tuple(float(v) for v in self.boundary_x_fields)
        if len(bx) != 2:
            raise ValueError("boundary_x_fields must be a pair")
        object.__setattr__(self, "boundary_x_fields", bx)
        pos = self.defect.position
        if pos is not None and not 1 <= pos < self.L:
            raise ValueError(f"defect position i0={pos} outside 1..{self.L - 1}")

    @property
    def has_boundary_fields(self) -> bool:
        return any(v != 0.0 for v in self.boundary_x_fields)

    @property
    def anisotropies(self) -> np.ndarray:
        """Per-bond ``Delta_i`` of an XXZ spec (``zz = -Delta/2``)."""
        return -2.0 * np.asarray(self.zz_couplings)

    def couplings(self, kind: str) -> tuple[float, ...]:
        return getattr(self, f"{kind}_couplings")

    def bond_terms(self) -> Iterator[tuple[int, str, float]]:
        """Yield ``(bond, kind, coefficient)`` for every nonzero bond term."""
        for kind in BOND_OPERATORS:
            for i, c in enumerate(self.couplings(kind), start=1):
                if c != 0.0:
                    yield i, kind, c

    def site_terms(self) -> Iterator[tuple[int, str, float]]:
        """Yield ``(site, operator, coefficient)`` for every nonzero one-site term."""
        for j, c in enumerate(self.z_fields, start=1):
            if c != 0.0:
                yield j, "z", c
        left, right = self.boundary_x_fields
        if left != 0.0:
            yield 1, "x", left
        if right != 0.0:
            yield self.L, "x", right

    def conserves_parity(self) -> bool:
        """True if ``Q = prod_j sz_j`` commutes with ``H`` (no x-fields)."""
        return not self.has_boundary_fields

    def to_dict(self) -> dict:
        bonds = []
        for i in range(1, self.L):
            bonds.append({"bond": i, **{k: self.couplings(k)[i - 1] for k in BOND_OPERATORS}})
        return {
            "model": self.model,
            "L": self.L,
            "bonds": bonds,
            "fields": {"z": list(self.z_fields), "x_boundary": list(self.boundary_x_fields)},
            "defect": self.defect.to_dict(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> "SpinChainSpec":
        L = int(d["L"])
        bonds = sorted(d["bonds"], key=lambda b: b["bond"])
        return cls(
            model=d["model"],
            L=L,
            xx_couplings=tuple(b["xx"] for b in bonds),
            yy_couplings=tuple(b["yy"] for b in bonds),
            zz_couplings=tuple(b["zz"] for b in bonds),
            xy_couplings=tuple(b["xy"] for b in bonds),
            z_fields=tuple(d["fields"]["z"]),
            boundary_x_fields=tuple(d["fields"]["x_boundary"]),
            defect=DefectSpec.from_dict(d.get("defect", {})),
        )

    @classmethod
    def from_json(cls, text: str) -> "SpinChainSpec":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class CftParams:
    """Free-boson data for a critical XXZ chain; ``R = 1/sqrt(pi K)``."""

    K: float
    R: float
    c: float = 1.0


def build_ising(L: int, h_b: float = 0.0, defect: DefectSpec | None = None) -> SpinChainSpec:
    """Critical transverse-field Ising chain, optionally with a defect.

    An energy defect rescales the ``sx sx`` bond at ``i0`` to ``-b/2``.  A duality
    defect replaces that bond by ``-b/2 sx_{i0} sy_{i0+1}`` and removes the
    transverse field on site ``i0 + 1``.
    """
    if L < 2:
        raise ValueError("Ising chain needs L >= 2")
    defect = (defect or DefectSpec()).resolved(L)
    if defect.kind == "interface":
        raise ValueError("anisotropy interfaces belong to the XXZ chain")
    if defect.kind == "energy" and defect.strength == 1.0:
        defect = DefectSpec()
    nb = L - 1
    xx = [-0.5] * nb
    xy = [0.0] * nb
    z = [-0.5] * L
    if defect.kind != "none" and not 1 <= defect.position < L:
        raise ValueError(f"defect position i0={defect.position} outside 1..{L - 1}")
    if defect.kind == "energy":
        xx[defect.position - 1] = -0.5 * defect.strength
    elif defect.kind == "duality":
        if h_b != 0.0:
            raise ValueError("duality defect with boundary fields is not free-fermion solvable")
        if L % 2 or defect.position != L // 2:
            raise ValueError("duality defect requires even L and i0 = L/2")
        i0 = defect.position
        xx[i0 - 1] = 0.0
        xy[i0 - 1] = -0.5 * defect.strength
        z[i0] = 0.0
    return SpinChainSpec(
        model=ISING,
        L=L,
        xx_couplings=tuple(xx),
        yy_couplings=(0.0,) * nb,
        zz_couplings=(0.0,) * nb,
        xy_couplings=tuple(xy),
        z_fields=tuple(z),
        boundary_x_fields=(-float(h_b), -float(h_b)),
        defect=defect,
    )


def build_xxz(L: int, delta_a: float, delta_b: float | None = None, h_b: float = 0.0) -> SpinChainSpec:
    """Open XXZ chain with anisotropy ``delta_a`` on bonds ``i < L/2``, ``delta_b`` after."""
    if delta_b is None:
        delta_b = delta_a
    if L < 2 or L % 2:
        raise ValueError("XXZ chain needs even L >= 2")
    for d in (delta_a, delta_b):
        if not -1.0 <= d <= 1.0:
            raise ValueError(f"anisotropy {d} outside the critical range [-1, 1]")
    i0 = L // 2
    nb = L - 1
    deltas = [delta_a if i < i0 else delta_b for i in range(1, L)]
    defect = DefectSpec() if delta_a == delta_b else DefectSpec.interface(delta_a, delta_b, i0)
    return SpinChainSpec(
        model=XXZ,
        L=L,
        xx_couplings=(-0.5,) * nb,
        yy_couplings=(-0.5,) * nb,
        zz_couplings=tuple(-0.5 * d for d in deltas),
        xy_couplings=(0.0,) * nb,
        z_fields=(0.0,) * L,
        boundary_x_fields=(-float(h_b), -float(h_b)),
        defect=defect,
    )


def luttinger_parameter(delta: float) -> float:
    """``K = (2/pi) arccos(Delta)``: 0 at the ferromagnetic end, 2 at ``Delta = -1``."""
    return 2.0 / math.pi * math.acos(delta)


def anisotropy_from_luttinger(K: float) -> float:
    """Inverse of :func:`luttinger_parameter`."""
    if not 0.0 <= K <= 2.0:
        raise ValueError(f"K={K} outside [0, 2]")
    return math.cos(math.pi * K / 2.0)


def cft_params_from_anisotropy(delta: float) -> CftParams:
    if not -1.0 < delta < 1.0:
        # K = 0 at Delta = 1 has no finite radius
        raise ValueError(f"anisotropy {delta} outside (-1, 1)")
    K = luttinger_parameter(delta)
    return CftParams(K=K, R=1.0 / math.sqrt(math.pi * K), c=1.0)
