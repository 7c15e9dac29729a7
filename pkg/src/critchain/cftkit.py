"""Closed-form boundary/defect CFT predictions for the Ising and free-boson theories.

Covers g-functions and boundary-entropy changes, transmission coefficients,
effective central charges (via the dilogarithm), the zero-mode entropy
correction and the Neumann-Neumann Ising entanglement spectrum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy import integrate

PI2 = math.pi**2
MAX_CHARACTER_ORDER = 10_000

ISING = "ising"
BOSON = "boson"
NEUMANN = "neumann"
DIRICHLET = "dirichlet"


@dataclass(frozen=True)
class BoundaryCondition:
    """Conformal boundary condition; free-boson ones carry ``K`` (or radius ``R``)."""

    model: str
    kind: str
    K: float | None = None

    def __post_init__(self):
        if self.model not in (ISING, BOSON):
            raise ValueError(f"unknown model {self.model!r}")
        if self.kind not in (NEUMANN, DIRICHLET):
            raise ValueError(f"unknown boundary kind {self.kind!r}")
        if (self.model == BOSON) != (self.K is not None):
            raise ValueError("a Luttinger parameter is required for, and only for, the boson")
        if self.K is not None and self.K <= 0:
            raise ValueError("K must be positive")

    @classmethod
    def boson(cls, kind: str, K: float | None = None, R: float | None = None) -> "BoundaryCondition":
        if (K is None) == (R is None):
            raise ValueError("give exactly one of K or R")
        if K is None:
            K = 1.0 / (math.pi * R * R)
        return cls(BOSON, kind, float(K))

    @property
    def R(self) -> float | None:
        return None if self.K is None else 1.0 / math.sqrt(math.pi * self.K)


def g_function(bc: BoundaryCondition) -> float:
    """Ground-state degeneracy ``g`` of the boundary state."""
    if bc.model == ISING:
        return 1.0 if bc.kind == NEUMANN else 1.0 / math.sqrt(2.0)
    x = bc.R * math.sqrt(math.pi)
    return math.sqrt(x) if bc.kind == NEUMANN else 1.0 / math.sqrt(2.0 * x)


def boundary_entropy_change(model: str, K: float | None = None) -> float:
    """``s_N - s_D``: ``ln(2)/2`` for Ising, ``ln(2/K)/2`` for the boson."""
    if model == ISING:
        return 0.5 * math.log(2.0)
    if model != BOSON:
        raise ValueError(f"unknown model {model!r}")
    if K is None or K <= 0:
        raise ValueError("boson boundary entropy needs K > 0")
    return 0.5 * math.log(2.0 / K)


def transmission_energy_defect(b: float) -> float:
    """``t = sin(2 arccot b) = 2b / (1 + b^2)``."""
    b = float(b)
    if math.isinf(b):
        return 0.0
    if abs(b) > 1.0:
        inv = 1.0 / b
        return 2.0 * inv / (1.0 + inv * inv)
    return 2.0 * b / (1.0 + b * b)


def transmission_boson_interface(K_a: float, K_b: float) -> tuple[float, float]:
    """Reflection and transmission ``(r, t)`` at an interface of Luttinger liquids."""
    if K_a <= 0 or K_b <= 0:
        raise ValueError("Luttinger parameters must be positive")
    r = (K_b - K_a) / (K_b + K_a)
    t = 2.0 * math.sqrt(K_a * K_b) / (K_a + K_b)
    return r, t


def _li2_series(x: float) -> float:
    # |x| <= 1/2: terms fall at least like 2^-k / k^2
    total, term, k = 0.0, x, 1
    while True:
        inc = term / (k * k)
        total += inc
        if abs(inc) < 1e-18 * max(1.0, abs(total)):
            return total
        k += 1
        term *= x


def dilog(x: float) -> float:
    """Real dilogarithm ``Li2(x) = sum_k x^k / k^2`` on ``[-1, 1]``."""
    x = float(x)
    if not -1.0 <= x <= 1.0:
        raise ValueError(f"dilog implemented on [-1, 1], got {x}")
    if x == 1.0:
        return PI2 / 6.0
    if x == -1.0:
        return -PI2 / 12.0
    if abs(x) <= 0.5:
        return _li2_series(x)
    if x > 0.5:
        # Euler reflection
        return PI2 / 6.0 - math.log(x) * math.log1p(-x) - _li2_series(1.0 - x)
    # Landen: x/(x-1) lies in (1/3, 1/2]
    return -_li2_series(x / (x - 1.0)) - 0.5 * math.log1p(-x) ** 2


def _dilog_bracket(t: float) -> float:
    """``(t+1) ln(t+1) ln t + (t-1) Li2(1-t) + (t+1) Li2(-t)`` with its t->0 limit."""
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"|t| must lie in [0, 1], got {t}")
    log_term = 0.0 if t == 0.0 else (t + 1.0) * math.log1p(t) * math.log(t)
    return log_term + (t - 1.0) * dilog(1.0 - t) + (t + 1.0) * dilog(-t)


def ceff_ising(t: float) -> float:
    """Effective central charge of a free Majorana fermion across a defect."""
    t = abs(float(t))
    return t / 2.0 - 0.5 - 3.0 / PI2 * _dilog_bracket(t)


def ceff_boson(t: float) -> float:
    """Effective central charge of a free boson across a conformal interface."""
    t = abs(float(t))
    return 0.5 + t + 3.0 / PI2 * _dilog_bracket(t)


def _zero_mode_integrand(h, x):
    # tanh(pi x h) (coth(pi h) - 1) written as x * [tanh(z)/z] * [2 pi h / expm1(2 pi h)]
    h = np.asarray(h, dtype=float)
    z = math.pi * x * h
    with np.errstate(invalid="ignore", divide="ignore"):
        tz = np.where(z > 1e-8, np.tanh(z) / np.where(z > 0, z, 1.0), 1.0 - z * z / 3.0)
        w = 2.0 * math.pi * h
        bose = np.where(w > 1e-8, w / np.expm1(np.where(w > 0, w, 1.0)), 1.0 - w / 2.0)
    return x * tz * bose


def _zero_mode_tail(u, x):
    # h = -ln(u)/pi on h >= 1, after dh = -du / (pi u)
    h = -math.log(u) / math.pi
    return math.tanh(math.pi * x * h) * 2.0 * u / (math.pi * (1.0 - u * u))


def zero_mode_correction(x: float) -> float:
    """``pi x int_0^inf tanh(pi x h) (coth(pi h) - 1) dh`` for ``x = r/L``."""
    x = float(x)
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"x = r/L must lie in [0, 1], got {x}")
    if x == 0.0:
        return 0.0
    head, _ = integrate.quad(lambda h: float(_zero_mode_integrand(h, x)), 0.0, 1.0,
                             epsabs=1e-14, epsrel=1e-13, limit=200)
    tail, _ = integrate.quad(_zero_mode_tail, 0.0, math.exp(-math.pi), args=(x,),
                             epsabs=1e-14, epsrel=1e-13, limit=200)
    return math.pi * x * (head + tail)


# --------------------------------------------------------------------------
# Ising characters and the entanglement spectrum

SECTOR_WEIGHTS = {"0": Fraction(0), "epsilon": Fraction(1, 2)}


@dataclass(frozen=True)
class CharacterSeries:
    """``chi_j(q) = q^(-1/48 + h_j) sum_n p_j(n) q^n`` truncated at order ``N``."""

    sector: str
    N: int
    degeneracies: tuple[int, ...]

    @property
    def h(self) -> Fraction:
        return SECTOR_WEIGHTS[self.sector]

    @property
    def leading_exponent(self) -> Fraction:
        return Fraction(-1, 48) + self.h

    def __call__(self, q: float) -> float:
        s = sum(p * q**n for n, p in enumerate(self.degeneracies))
        return q ** float(self.leading_exponent) * s


def euler_phi(N: int) -> list[int]:
    """Coefficients of ``prod_{n>0} (1 - q^n)`` through ``q^N`` (pentagonal numbers)."""
    c = [0] * (N + 1)
    k = 0
    while True:
        hit = False
        for m in ((k * (3 * k - 1)) // 2, (k * (3 * k + 1)) // 2) if k else (0,):
            if m <= N:
                c[m] = (-1) ** k
                hit = True
        if not hit:
            return c
        k += 1


def series_divide(num: list[int], den: list[int]) -> list[int]:
    """Exact power-series quotient ``num / den`` for ``den[0] = 1``."""
    if den[0] != 1:
        raise ValueError("denominator must start with 1")
    N = len(num) - 1
    nz = [(j, d) for j, d in enumerate(den) if j and d]
    out = [0] * (N + 1)
    for k in range(N + 1):
        acc = num[k]
        for j, d in nz:
            if j > k:
                break
            acc -= d * out[k - j]
        out[k] = acc
    return out


def series_multiply(a: list[int], b: list[int], N: int) -> list[int]:
    out = [0] * (N + 1)
    for i, x in enumerate(a[: N + 1]):
        if x:
            for j, y in enumerate(b[: N + 1 - i]):
                out[i + j] += x * y
    return out


def _theta_numerator(N: int, lin: int, lin2: int, shift2: int) -> list[int]:
    """``sum_n q^(12n^2 + lin n) - q^(12n^2 + lin2 n + shift2)`` through ``q^N``."""
    c = [0] * (N + 1)
    n_max = int(math.isqrt(N // 12 + 1)) + 2
    for n in range(-n_max, n_max + 1):
        e1 = 12 * n * n + lin * n
        e2 = 12 * n * n + lin2 * n + shift2
        if 0 <= e1 <= N:
            c[e1] += 1
        if 0 <= e2 <= N:
            c[e2] -= 1
    return c


def character_numerators(N: int) -> tuple[list[int], list[int]]:
    """Theta-like numerators of ``chi_0`` and ``chi_epsilon`` after stripping ``q^(h - 1/48)``."""
    # (24n+1)^2/48 = 12n^2+n+1/48, (24n+7)^2/48 = 12n^2+7n+1+1/48, etc.
    return _theta_numerator(N, 1, 7, 1), _theta_numerator(N, 5, 11, 2)


def ising_characters(N: int) -> tuple[CharacterSeries, CharacterSeries]:
    """Exact integer q-expansions of the identity and energy characters."""
    if not 0 <= N <= MAX_CHARACTER_ORDER:
        raise ValueError(f"truncation order must lie in 0..{MAX_CHARACTER_ORDER}")
    phi = euler_phi(N)
    num0, nume = character_numerators(N)
    p0 = series_divide(num0, phi)
    pe = series_divide(nume, phi)
    return CharacterSeries("0", N, tuple(p0)), CharacterSeries("epsilon", N, tuple(pe))


@dataclass(frozen=True)
class SpectrumLevel:
    sector: str
    level: int
    energy: float
    gap: float
    degeneracy: int


def entanglement_length(L: int, r: int, a: float = 1.0) -> float:
    """``ln[(2L / (pi a)) sin(pi r / L)]``."""
    if not 0 < r < L:
        raise ValueError(f"cut r={r} outside 1..{L - 1}")
    if a <= 0:
        raise ValueError("lattice spacing must be positive")
    return math.log(2.0 * L / (math.pi * a) * math.sin(math.pi * r / L))


def _log_dual_sum(Lbar: float, chars) -> float:
    qt = math.exp(-2.0 * Lbar)
    s = 0.0
    for ch in chars:
        h = float(ch.h)
        s += sum(p * qt ** (h + m) for m, p in enumerate(ch.degeneracies))
    return math.log(s)


def entanglement_spectrum_NN(L: int, r: int, a: float = 1.0, N: int = 20) -> list[SpectrumLevel]:
    """Entanglement energies of an Ising chain with free ends, cut at ``r``.

    Levels with zero degeneracy are omitted.  Gaps above the lowest level are
    ``(pi / Lbar)(h_j + n)``.
    """
    Lbar = entanglement_length(L, r, a)
    if Lbar <= 0:
        raise ValueError(f"entanglement length {Lbar} is not positive; cut too close to the edge")
    chars = ising_characters(N)
    shift = Lbar / (48.0 * math.pi) + _log_dual_sum(Lbar, chars) / (2.0 * math.pi)
    levels = []
    for ch in chars:
        h = float(ch.h)
        for n, p in enumerate(ch.degeneracies):
            if p == 0:
                continue
            energy = shift + math.pi / Lbar * (-1.0 / 48.0 + h + n)
            levels.append(SpectrumLevel(ch.sector, n, energy, math.pi / Lbar * (h + n), p))
    levels.sort(key=lambda lv: lv.gap)
    return levels


def spectrum_normalization(levels: list[SpectrumLevel]) -> float:
    """``sum deg exp(-2 pi eps)``; equals 1 for an untruncated spectrum."""
    return math.fsum(lv.degeneracy * math.exp(-2.0 * math.pi * lv.energy) for lv in levels)


def spectrum_truncation_error(L: int, r: int, a: float = 1.0, N: int = 20) -> float:
    """Size of the first omitted terms (order ``N + 1/2`` and ``N + 1``) in both q and q-tilde."""
    Lbar = entanglement_length(L, r, a)
    q = math.exp(-2.0 * PI2 / Lbar)
    qt = math.exp(-2.0 * Lbar)
    chi0, chie = ising_characters(N + 2)
    tail = 0.0
    for x in (q, qt):
        tail += chie.degeneracies[N + 1] * x ** (N + 1.5) + chie.degeneracies[N + 2] * x ** (N + 2.5)
        tail += chi0.degeneracies[N + 1] * x ** (N + 1) + chi0.degeneracies[N + 2] * x ** (N + 2)
    lower = chi0.degeneracies[0]
    return max(2.0 * tail / lower, math.exp(-2.0 * Lbar * (N + 0.5)))
