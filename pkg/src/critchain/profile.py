"""Entanglement-entropy profiles and their CSV representation.

A profile file is plain CSV with one ``#``-prefixed JSON line carrying the
metadata::

    # {"L": 8, "model": "ising", ...}
    r,S
    1,0.4101...
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class EntanglementProfile:
    """Entropies ``S(r)`` (nats) of the leftmost ``r`` sites of an ``L``-site chain."""

    L: int
    cuts: tuple[int, ...]
    entropies: tuple[float, ...]
    metadata: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        cuts = tuple(int(r) for r in self.cuts)
        S = tuple(float(s) for s in self.entropies)
        if len(cuts) != len(S):
            raise ValueError("cuts and entropies differ in length")
        object.__setattr__(self, "cuts", cuts)
        object.__setattr__(self, "entropies", S)

    @property
    def r(self) -> np.ndarray:
        return np.asarray(self.cuts, dtype=int)

    @property
    def S(self) -> np.ndarray:
        return np.asarray(self.entropies, dtype=float)

    def at(self, r: int) -> float:
        return self.entropies[self.cuts.index(r)]

    def mid(self) -> float:
        """Entropy at the central cut ``r = L // 2``."""
        return self.at(self.L // 2)

    def select(self, cuts) -> "EntanglementProfile":
        keep = [i for i, r in enumerate(self.cuts) if r in set(cuts)]
        return EntanglementProfile(
            self.L,
            tuple(self.cuts[i] for i in keep),
            tuple(self.entropies[i] for i in keep),
            dict(self.metadata),
        )

    def check_bounds(self, tol: float = 1e-9) -> bool:
        """Pure-state bounds ``0 <= S(r) <= min(r, L - r) ln 2``."""
        ln2 = math.log(2.0)
        return all(
            -tol <= s <= min(r, self.L - r) * ln2 + tol for r, s in zip(self.cuts, self.entropies)
        )

    def to_csv(self) -> str:
        buf = io.StringIO()
        meta = {"L": self.L, **self.metadata}
        buf.write("# " + json.dumps(meta, sort_keys=True) + "\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["r", "S"])
        for r, s in zip(self.cuts, self.entropies):
            w.writerow([r, repr(s)])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "EntanglementProfile":
        lines = text.splitlines()
        if not lines or not lines[0].startswith("#"):
            raise ValueError("missing metadata header line")
        meta = json.loads(lines[0][1:])
        L = int(meta.pop("L"))
        rows = list(csv.reader(lines[1:]))
        if rows[0] != ["r", "S"]:
            raise ValueError(f"unexpected columns {rows[0]}")
        cuts = [int(r) for r, _ in rows[1:]]
        S = [float(s) for _, s in rows[1:]]
        return cls(L, tuple(cuts), tuple(S), meta)


def binary_entropy(p: np.ndarray) -> np.ndarray:
    """``-p ln p - (1-p) ln(1-p)`` with ``0 ln 0 = 0``."""
    p = np.asarray(p, dtype=float)
    q = 1.0 - p
    with np.errstate(divide="ignore", invalid="ignore"):
        out = -np.where(p > 0, p * np.log(p), 0.0) - np.where(q > 0, q * np.log(q), 0.0)
    return out


def von_neumann(probabilities: np.ndarray) -> float:
    """Shannon entropy of a Schmidt spectrum ``lambda_k^2``."""
    p = np.asarray(probabilities, dtype=float)
    p = p[p > 0]
    return float(-np.sum(p * np.log(p)))
