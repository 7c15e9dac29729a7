"""Log-scaling regressions that turn EE data into central charges and offsets.

Four scaling forms are supported; each is linear in a known abscissa ``x``:

==================  ======================================  ===========
form                abscissa ``x``                          slope
==================  ======================================  ===========
``inf_sys``         ``ln r``                                ``c / 3``
``periodic_ring``   ``ln[(L/pi) sin(pi r / L)]``            ``c / 3``
``open_chain``      ``ln[(2L/pi) sin(pi r / L)]``           ``c / 6``
``interface``       ``ln L``                                ``c_eff / 6``
==================  ======================================  ===========
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass

import numpy as np

from .profile import EntanglementProfile

INF_SYS = "inf_sys"
PERIODIC_RING = "periodic_ring"
OPEN_CHAIN = "open_chain"
INTERFACE = "interface"

SLOPE_FACTOR = {INF_SYS: 3.0, PERIODIC_RING: 3.0, OPEN_CHAIN: 6.0, INTERFACE: 6.0}

#: Points closer than this to a central defect are left out of open-chain fits.
DEFECT_EXCLUSION = 4


@dataclass(frozen=True)
class FitResult:
    slope: float
    offset: float
    residual_rms: float
    window: tuple[int, int]
    form: str
    npoints: int

    @property
    def c(self) -> float:
        """Central charge (or ``c_eff``) implied by the slope."""
        return SLOPE_FACTOR[self.form] * self.slope

    def to_dict(self) -> dict:
        d = asdict(self)
        d["c"] = self.c
        d["window"] = list(self.window)
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def scaling_abscissa(form: str, r, L=None) -> np.ndarray:
    r = np.asarray(r, dtype=float)
    if form == INF_SYS:
        return np.log(r)
    if form == PERIODIC_RING:
        return np.log(L / math.pi * np.sin(math.pi * r / L))
    if form == OPEN_CHAIN:
        return np.log(2.0 * L / math.pi * np.sin(math.pi * r / L))
    if form == INTERFACE:
        return np.log(r)
    raise ValueError(f"unknown scaling form {form!r}")


def _ols(x: np.ndarray, y: np.ndarray) -> tuple[float, float, float]:
    X = np.column_stack([x, np.ones_like(x)])
    coef, *_ = np.linalg.lstsq(X, y, rcond=None)
    res = y - X @ coef
    return float(coef[0]), float(coef[1]), float(np.sqrt(np.mean(res**2)))


def fit_scaling(form: str, r, S, L=None, window=None) -> FitResult:
    """Ordinary least squares of ``S`` against the abscissa of ``form``."""
    r = np.asarray(r)
    S = np.asarray(S, dtype=float)
    if len(r) < 2 or len(np.unique(r)) < 2:
        raise ValueError("need at least two distinct abscissa values")
    slope, offset, rms = _ols(scaling_abscissa(form, r, L), S)
    win = window if window is not None else (int(r.min()), int(r.max()))
    return FitResult(slope, offset, rms, win, form, len(r))


def window_cuts(profile: EntanglementProfile, window=(0.25, 0.75), exclusion=None) -> np.ndarray:
    """Cuts inside ``window`` (fractions of ``L``), minus those near a central defect."""
    lo, hi = window
    if not 0.0 < lo < hi < 1.0:
        raise ValueError(f"window {window} must lie inside (0, 1)")
    r = profile.r
    keep = (r >= lo * profile.L) & (r <= hi * profile.L)
    has_defect = profile.metadata.get("defect", {}).get("kind", "none") != "none"
    if exclusion is None:
        exclusion = DEFECT_EXCLUSION if has_defect else 0
    if exclusion:
        keep &= np.abs(r - profile.L / 2) >= exclusion
    return r[keep]


def fit_open_chain(profile: EntanglementProfile, window=(0.25, 0.75), exclusion=None) -> FitResult:
    """``S(r) = (c/6) ln[(2L/pi) sin(pi r/L)] + const`` over ``window``."""
    cuts = window_cuts(profile, window, exclusion)
    if len(cuts) < 4:
        raise ValueError(f"only {len(cuts)} points in window {window}")
    S = np.array([profile.at(int(r)) for r in cuts])
    return fit_scaling(OPEN_CHAIN, cuts, S, profile.L, (int(cuts.min()), int(cuts.max())))


def fit_interface_scaling(points) -> FitResult:
    """``S_I(L) = (c_eff/6) ln L + s1 + s2`` from ``(L, S_I)`` pairs."""
    pts = sorted((int(L), float(S)) for L, S in points)
    Ls = np.array([p[0] for p in pts])
    if len(np.unique(Ls)) < 4:
        raise ValueError("interface scaling needs at least 4 distinct system sizes")
    S = np.array([p[1] for p in pts])
    return fit_scaling(INTERFACE, Ls, S, window=(int(Ls.min()), int(Ls.max())))


def local_slopes(points) -> tuple[np.ndarray, np.ndarray]:
    """Two-point ``c_eff`` estimates between consecutive sizes, at their geometric mean size."""
    pts = sorted((int(L), float(S)) for L, S in points)
    L = np.array([p[0] for p in pts], dtype=float)
    S = np.array([p[1] for p in pts])
    c = 6.0 * np.diff(S) / np.diff(np.log(L))
    return np.sqrt(L[1:] * L[:-1]), c


def extrapolated_ceff(points) -> float:
    """Richardson-style estimate: local slopes extrapolated linearly in ``1/L`` to ``L -> inf``."""
    Lm, c = local_slopes(points)
    if len(c) < 2:
        raise ValueError("extrapolation needs at least 3 system sizes")
    slope, intercept, _ = _ols(1.0 / Lm, c)
    return intercept


def offset_shift(points, reference_points) -> float:
    """``delta s2``: interface-fit offset relative to a reference (defect-free) series."""
    return fit_interface_scaling(points).offset - fit_interface_scaling(reference_points).offset


def deparity(profile: EntanglementProfile) -> EntanglementProfile:
    """Keep only even cuts, which removes the staggered part of XXZ profiles."""
    even = [r for r in profile.cuts if r % 2 == 0]
    out = profile.select(even)
    out.metadata["deparity"] = "even"
    return out


def boundary_entropy_shift(neumann: EntanglementProfile, dirichlet: EntanglementProfile) -> float:
    """Mid-chain ``S_N - S_D`` for two profiles of the same length."""
    if neumann.L != dirichlet.L:
        raise ValueError("profiles must have the same length")
    return neumann.mid() - dirichlet.mid()
