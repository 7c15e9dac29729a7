"""Batch front end: ``critchain <verb> [flags]``.

Every flag may also come from a JSON config file (``--config run.json``) whose
keys are the long flag names without dashes, e.g.::

    {"model": "ising", "defect": "energy", "b": "0,0.2,...,1", "L": "100..500"}

Flags given on the command line override the file.  Grids accept comma lists,
``a,b,...,z`` progressions (step taken from the first two entries) and
``START..STOP[:STEP]`` ranges whose step defaults to ``START``.

Exit status: 0 success, 1 invalid configuration, 2 solver failure or
non-convergence.  Worker threads come from ``CRITCHAIN_THREADS`` (default 1).
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import math
import os
import platform
import sys
import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np
import scipy

from . import __version__, cftkit, fitkit
from .exact import MAX_SITES, exact_diag_oracle
from .freefermion import (
    ZeroModePolicy,
    complement_symmetry_error,
    diagonalize,
    free_fermion_profile,
    ground_correlations,
    jordan_wigner,
)
from .models import (
    DefectSpec,
    anisotropy_from_luttinger,
    build_ising,
    build_xxz,
)
from .mps import DmrgConfig, dmrg_ground_state, schmidt_entropy_profile
from .profile import EntanglementProfile

logger = logging.getLogger("critchain")

VERBS = ("boundary-sweep", "defect-sweep", "interface-sweep", "spectrum", "predict", "oracle-check")
SOLVERS = ("freefermion", "dmrg", "exact")
THREADS_ENV = "CRITCHAIN_THREADS"

EXIT_OK, EXIT_CONFIG, EXIT_SOLVER = 0, 1, 2

DEFAULT_B = "0,0.2,...,1"
DEFAULT_ISING_L = "100..500"
DEFAULT_K2 = "0.1,0.2,...,0.6"
DEFAULT_INTERFACE_L = "64,96,128,192"

PREDICT_TARGETS = (
    "ceff-ising", "ceff-boson", "zero-mode", "delta-s", "g", "transmission", "delta-s2-duality",
)


class ConfigError(ValueError):
    """Invalid experiment configuration (exit status 1)."""


class SolverError(RuntimeError):
    """A solver failed or did not converge (exit status 2)."""


# --------------------------------------------------------------------------
# grids


def parse_grid(text, kind=float) -> tuple:
    """Expand a grid expression into a sorted tuple without duplicates."""
    if isinstance(text, (int, float)):
        return (kind(text),)
    if isinstance(text, (list, tuple)):
        return tuple(sorted({kind(v) for v in text}))
    text = str(text).strip()
    try:
        if ".." in text and "..." not in text:
            rng, _, step = text.partition(":")
            lo, hi = (float(v) for v in rng.split(".."))
            st = float(step) if step else lo
            if st <= 0 or hi < lo:
                raise ConfigError(f"bad range {text!r}")
            n = int(math.floor((hi - lo) / st + 1e-9))
            vals = [lo + k * st for k in range(n + 1)]
        else:
            parts = [p.strip() for p in text.split(",") if p.strip()]
            if "..." in parts:
                i = parts.index("...")
                if i < 2 or i != len(parts) - 2:
                    raise ConfigError(f"progression {text!r} needs two leading terms and an end")
                head = [float(p) for p in parts[:i]]
                st, end = head[-1] - head[-2], float(parts[-1])
                if st <= 0:
                    raise ConfigError(f"progression {text!r} must increase")
                n = int(math.floor((end - head[0]) / st + 1e-9))
                vals = [head[0] + k * st for k in range(n + 1)]
            else:
                vals = [float(p) for p in parts]
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"cannot parse grid {text!r}") from exc
    if not vals:
        raise ConfigError(f"empty grid {text!r}")
    if kind is int:
        if any(abs(v - round(v)) > 1e-9 for v in vals):
            raise ConfigError(f"grid {text!r} must be integral")
        return tuple(sorted({int(round(v)) for v in vals}))
    # round away progression drift such as 0.6000000000000001
    return tuple(sorted({round(v, 12) for v in vals}))


# --------------------------------------------------------------------------
# configuration


@dataclass(frozen=True)
class ExperimentConfig:
    verb: str
    model: str = "ising"
    defect: str = "none"
    solver: str | None = None
    b: tuple = ()
    L: tuple = ()
    K: tuple = ()
    K1: float = 0.6
    K2: tuple = ()
    hb: float = 1.0
    chi: int = 128
    cutoff: float = 1e-12
    max_sweeps: int = 30
    window: tuple = (0.25, 0.75)
    policy: str = "occupy"
    cuts: str = "mid"
    r: int | None = None
    levels: int = 20
    target: str | None = None
    t: float | None = None
    x: float | None = None
    bc: str | None = None
    suite: str = "all"
    tol: float = 1e-8
    out: str = "critchain-out"

    @property
    def dmrg(self) -> DmrgConfig:
        return DmrgConfig(chi=self.chi, cutoff=self.cutoff, max_sweeps=self.max_sweeps)

    @property
    def zero_mode_policy(self) -> ZeroModePolicy:
        return ZeroModePolicy(self.policy)

    def to_dict(self) -> dict:
        d = asdict(self)
        return {k: list(v) if isinstance(v, tuple) else v for k, v in d.items()}


_FLAG_TYPES = {
    "model": str, "defect": str, "solver": str, "b": "grid", "L": "igrid", "K": "grid",
    "K1": float, "K2": "grid", "hb": float, "chi": int, "cutoff": float, "max_sweeps": int,
    "window": "window", "policy": str, "cuts": str, "r": int, "levels": int, "target": str,
    "t": float, "x": float, "bc": str, "suite": str, "tol": float, "out": str,
}


def _coerce(key, value):
    kind = _FLAG_TYPES[key]
    try:
        if kind == "grid":
            return parse_grid(value)
        if kind == "igrid":
            return parse_grid(value, int)
        if kind == "window":
            parts = value.split(",") if isinstance(value, str) else value
            lo, hi = (float(v) for v in parts)
            return (lo, hi)
        return kind(value)
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad value for {key}: {value!r}") from exc


def _defaults_for(verb: str, model: str) -> dict:
    if verb == "defect-sweep":
        return {"b": parse_grid(DEFAULT_B), "L": parse_grid(DEFAULT_ISING_L, int), "solver": "freefermion"}
    if verb == "interface-sweep":
        return {"K2": parse_grid(DEFAULT_K2), "L": parse_grid(DEFAULT_INTERFACE_L, int), "solver": "dmrg"}
    if verb == "boundary-sweep":
        K = (0.5, 1.0, 1.5) if model == "xxz" else ()
        return {"K": K, "L": (200,), "solver": "dmrg"}
    if verb == "oracle-check":
        return {"L": (10,)}
    if verb == "spectrum":
        return {"L": (200,)}
    return {}


def make_config(verb: str, values: dict) -> ExperimentConfig:
    """Merge raw (string or JSON) values with verb defaults and validate."""
    if verb not in VERBS:
        raise ConfigError(f"unknown verb {verb!r}; choose from {', '.join(VERBS)}")
    unknown = set(values) - set(_FLAG_TYPES)
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    kw = {k: _coerce(k, v) for k, v in values.items() if v is not None}
    model = kw.get("model", "ising")
    for k, v in _defaults_for(verb, model).items():
        kw.setdefault(k, v)
    cfg = ExperimentConfig(verb=verb, **kw)
    validate(cfg)
    return cfg


def validate(cfg: ExperimentConfig) -> None:
    if cfg.model not in ("ising", "xxz"):
        raise ConfigError(f"unknown model {cfg.model!r}")
    if cfg.solver is not None and cfg.solver not in SOLVERS:
        raise ConfigError(f"unknown solver {cfg.solver!r}")
    if cfg.defect not in ("none", "energy", "duality", "interface"):
        raise ConfigError(f"unknown defect {cfg.defect!r}")
    if cfg.policy not in ("occupy", "empty"):
        raise ConfigError(f"unknown zero-mode policy {cfg.policy!r}")
    if cfg.cuts not in ("mid", "all"):
        raise ConfigError("cuts must be 'mid' or 'all'")
    if any(L < 2 for L in cfg.L):
        raise ConfigError("chain lengths must be at least 2")
    if cfg.solver == "exact" and any(L > MAX_SITES for L in cfg.L):
        raise ConfigError(f"exact solver is limited to L <= {MAX_SITES}")
    lo, hi = cfg.window
    if not 0.0 < lo < hi < 1.0:
        raise ConfigError(f"window {cfg.window} must lie inside (0, 1)")
    try:
        cfg.dmrg
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    if cfg.verb == "boundary-sweep":
        if cfg.solver == "freefermion":
            raise ConfigError("boundary fields are not free-fermion solvable; use dmrg or exact")
        if cfg.model == "xxz" and not cfg.K:
            raise ConfigError("xxz boundary-sweep needs --K")
        if cfg.hb == 0.0:
            raise ConfigError("the Dirichlet side needs a nonzero --hb")
    elif cfg.verb == "defect-sweep":
        if cfg.model != "ising" or cfg.defect not in ("energy", "duality"):
            raise ConfigError("defect-sweep needs --model ising --defect energy|duality")
        if cfg.defect == "duality" and any(L % 2 for L in cfg.L):
            raise ConfigError("duality defects need even L")
        if len(cfg.L) < 4:
            raise ConfigError("interface scaling needs at least 4 distinct L")
        if not cfg.b:
            raise ConfigError("defect-sweep needs --b")
    elif cfg.verb == "interface-sweep":
        if cfg.solver == "freefermion":
            raise ConfigError("XXZ interfaces are interacting; use dmrg or exact")
        if any(L % 2 for L in cfg.L):
            raise ConfigError("interface chains need even L")
        if len(cfg.L) < 4:
            raise ConfigError("interface scaling needs at least 4 distinct L")
        for K in (cfg.K1, *cfg.K2):
            if not 0.0 < K < 2.0:
                raise ConfigError(f"Luttinger parameter {K} outside (0, 2)")
    elif cfg.verb == "spectrum":
        if len(cfg.L) != 1:
            raise ConfigError("spectrum takes a single --L")
    elif cfg.verb == "predict":
        if cfg.target not in PREDICT_TARGETS:
            raise ConfigError(f"predict target must be one of {', '.join(PREDICT_TARGETS)}")
    elif cfg.verb == "oracle-check":
        if cfg.suite not in ("all", "ising", "xxz", "defects"):
            raise ConfigError("suite must be all, ising, xxz or defects")
        if any(L > 12 or L < 4 or L % 2 for L in cfg.L):
            raise ConfigError("oracle-check runs even L between 4 and 12")


# --------------------------------------------------------------------------
# output


def atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def sha256_of(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _fmt(x: float) -> str:
    return f"{x:g}"


def _json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, default=_json_default) + "\n"


def _json_default(o):
    if isinstance(o, np.generic):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"not JSON serializable: {type(o)}")


class Run:
    """Collects output files for the manifest."""

    def __init__(self, cfg: ExperimentConfig):
        self.cfg = cfg
        self.root = Path(cfg.out)
        self.files: list[Path] = []
        self.warnings: list[str] = []

    def write(self, rel: str, text: str) -> Path:
        p = self.root / rel
        atomic_write(p, text)
        self.files.append(p)
        return p

    def write_profile(self, name: str, prof: EntanglementProfile) -> Path:
        return self.write(f"profiles/{name}.csv", prof.to_csv())

    def manifest(self, tolerances: dict) -> Path:
        entries = [
            {"path": p.relative_to(self.root).as_posix(), "sha256": sha256_of(p), "bytes": p.stat().st_size}
            for p in sorted(set(self.files))
        ]
        doc = {
            "verb": self.cfg.verb,
            "inputs": self.cfg.to_dict(),
            "versions": {
                "critchain": __version__,
                "numpy": np.__version__,
                "scipy": scipy.__version__,
                "python": platform.python_version(),
            },
            "tolerances": tolerances,
            "warnings": self.warnings,
            "files": entries,
        }
        path = self.root / "manifest.json"
        atomic_write(path, _json(doc))
        return path


def thread_count() -> int:
    raw = os.environ.get(THREADS_ENV, "1")
    try:
        n = int(raw)
    except ValueError as exc:
        raise ConfigError(f"{THREADS_ENV}={raw!r} is not an integer") from exc
    if n < 1:
        raise ConfigError(f"{THREADS_ENV} must be positive")
    return n


def parallel_map(fn, items):
    items = list(items)
    n = thread_count()
    if n == 1 or len(items) < 2:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


# --------------------------------------------------------------------------
# solving


def solve(spec, cfg: ExperimentConfig, solver: str, cuts=None) -> EntanglementProfile:
    """Profile of ``spec`` with the requested solver; raises :class:`SolverError`."""
    try:
        if solver == "freefermion":
            return free_fermion_profile(spec, cuts, cfg.zero_mode_policy)
        if solver == "exact":
            return exact_diag_oracle(spec, cuts)
        state = dmrg_ground_state(spec, cfg.dmrg)
    except (ArithmeticError, np.linalg.LinAlgError) as exc:
        raise SolverError(f"{solver} failed on L={spec.L}: {exc}") from exc
    if not state.converged:
        raise SolverError(f"DMRG did not converge on L={spec.L} after {state.sweeps} sweeps")
    prof = schmidt_entropy_profile(state)
    prof.metadata["sweeps"] = state.sweeps
    prof.metadata["chi_exhausted"] = state.chi_exhausted
    prof.metadata["truncation_error"] = state.max_truncation_error
    return prof if cuts is None else prof.select(cuts)


def _solver_for(cfg: ExperimentConfig, spec) -> str:
    solver = cfg.solver or "dmrg"
    if solver == "freefermion" and (spec.model != "ising" or spec.has_boundary_fields):
        raise ConfigError("free-fermion solver needs an Ising chain without boundary fields")
    return solver


# --------------------------------------------------------------------------
# verbs


def run_boundary_sweep(cfg: ExperimentConfig, run: Run) -> dict:
    points = []
    if cfg.model == "ising":
        for L in cfg.L:
            points.append(("ising", None, L))
    else:
        for K in cfg.K:
            for L in cfg.L:
                points.append(("xxz", K, L))

    def specs(pt):
        model, K, L = pt
        if model == "ising":
            return build_ising(L), build_ising(L, h_b=cfg.hb)
        d = anisotropy_from_luttinger(K)
        return build_xxz(L, d), build_xxz(L, d, h_b=cfg.hb)

    jobs = [(pt, side, spec) for pt in points for side, spec in zip(("neumann", "dirichlet"), specs(pt))]
    for _, _, spec in jobs:
        _solver_for(cfg, spec)

    def work(job):
        pt, side, spec = job
        model, K, L = pt
        prof = solve(spec, cfg, _solver_for(cfg, spec))
        tag = f"{model}_L{L}" + (f"_K{_fmt(K)}" if K is not None else "")
        run.write_profile(f"{tag}_{side}", prof)
        return prof

    profs = parallel_map(work, jobs)
    for (pt, side, _), prof in zip(jobs, profs):
        model, K, L = pt
        tag = f"{model}_L{L}" + (f"_K{_fmt(K)}" if K is not None else "")
        src = fitkit.deparity(prof) if model == "xxz" else prof
        try:
            fit = fitkit.fit_open_chain(src, cfg.window)
        except ValueError as exc:
            run.warnings.append(f"{tag}_{side}: no central-charge fit ({exc})")
            continue
        run.write(f"fits/{tag}_{side}_open_chain.json", fit.to_json() + "\n")
    rows = []
    for k, pt in enumerate(points):
        model, K, L = pt
        neu, dir_ = profs[2 * k], profs[2 * k + 1]
        measured = fitkit.boundary_entropy_shift(neu, dir_)
        predicted = cftkit.boundary_entropy_change("ising" if model == "ising" else "boson", K)
        rows.append({"model": model, "K": K, "L": L, "hb": cfg.hb, "delta_s": measured,
                     "predicted": predicted, "error": measured - predicted})
        tag = f"{model}_L{L}" + (f"_K{_fmt(K)}" if K is not None else "")
        run.write(f"fits/{tag}_boundary.json", _json(rows[-1]))
    run.write("boundary_table.csv", _table(rows, ["model", "K", "L", "hb", "delta_s", "predicted", "error"]))
    return {"rows": rows}


def _table(rows, cols) -> str:
    lines = [",".join(cols)]
    for row in rows:
        lines.append(",".join("" if row.get(c) is None else repr(row[c]) if isinstance(row[c], float)
                              else str(row[c]) for c in cols))
    return "\n".join(lines) + "\n"


def _interface_summary(series: dict, reference, predict) -> list[dict]:
    """Fit each series of ``(L, S_I)`` points; offsets are shifted by the ``reference`` series."""
    rows = []
    for key in sorted(series):
        pts = series[key]
        fit = fitkit.fit_interface_scaling(pts)
        row = {"key": key, "fit": fit.to_dict(), "c_eff": fit.c, "predicted": predict(key)}
        if len(pts) >= 3:
            Lm, c = fitkit.local_slopes(pts)
            row["local_slopes"] = [[float(x), float(y)] for x, y in zip(Lm, c)]
            row["c_eff_extrapolated"] = fitkit.extrapolated_ceff(pts)
        if reference is not None:
            row["delta_s2"] = fitkit.offset_shift(pts, reference)
        rows.append(row)
    return rows


def run_defect_sweep(cfg: ExperimentConfig, run: Run) -> dict:
    kind = cfg.defect
    ctor = DefectSpec.energy if kind == "energy" else DefectSpec.duality
    solver = _solver_for(cfg, build_ising(cfg.L[0], defect=ctor(cfg.b[0])))
    # b = None marks the clean chain, which anchors delta_s2
    grid = [(b, L) for b in (None, *cfg.b) for L in cfg.L]

    def work(point):
        b, L = point
        spec = build_ising(L, defect=DefectSpec.none() if b is None else ctor(b))
        cuts = None if cfg.cuts == "all" or solver == "dmrg" else [L // 2]
        prof = solve(spec, cfg, solver, cuts)
        name = f"ising_clean_L{L}" if b is None else f"ising_{kind}_b{_fmt(b)}_L{L}"
        run.write_profile(name, prof)
        return prof.at(L // 2)

    values = parallel_map(work, grid)
    series: dict = {}
    for (b, L), S in zip(grid, values):
        series.setdefault(b, []).append((L, S))
    clean = series.pop(None)
    rows = _interface_summary(
        series, clean, lambda b: cftkit.ceff_ising(cftkit.transmission_energy_defect(b))
    )
    for row in rows:
        b = row.pop("key")
        row.update({"b": b, "t": cftkit.transmission_energy_defect(b), "defect": kind})
        if kind == "duality" and b == 1.0:
            row["delta_s2_predicted"] = cftkit.zero_mode_correction(0.5) / 2.0
        run.write(f"fits/ising_{kind}_b{_fmt(b)}.json", _json(row))
    cols = ["b", "t", "c_eff", "c_eff_extrapolated", "predicted", "delta_s2"]
    run.write(f"ceff_table_{kind}.csv", _table(rows, cols))
    return {"rows": rows}


def run_interface_sweep(cfg: ExperimentConfig, run: Run) -> dict:
    dA = anisotropy_from_luttinger(cfg.K1)
    grid = [(K2, L) for K2 in cfg.K2 for L in cfg.L]

    def work(point):
        K2, L = point
        spec = build_xxz(L, dA, anisotropy_from_luttinger(K2))
        prof = solve(spec, cfg, _solver_for(cfg, spec))
        prof.metadata.update({"K1": cfg.K1, "K2": K2})
        run.write_profile(f"xxz_K1{_fmt(cfg.K1)}_K2{_fmt(K2)}_L{L}", prof)
        return prof.at(L // 2)

    values = parallel_map(work, grid)
    series: dict = {}
    for (K2, L), S in zip(grid, values):
        series.setdefault(K2, []).append((L, S))
    rows = _interface_summary(
        series, series.get(cfg.K1), lambda K2: cftkit.ceff_boson(cftkit.transmission_boson_interface(cfg.K1, K2)[1])
    )
    for row in rows:
        K2 = row.pop("key")
        row.update({"K1": cfg.K1, "K2": K2, "t": cftkit.transmission_boson_interface(cfg.K1, K2)[1]})
        run.write(f"fits/xxz_K1{_fmt(cfg.K1)}_K2{_fmt(K2)}.json", _json(row))
    run.write("ceff_table_interface.csv", _table(rows, ["K1", "K2", "t", "c_eff", "c_eff_extrapolated",
                                                        "predicted", "delta_s2"]))
    return {"rows": rows}


def run_spectrum(cfg: ExperimentConfig, run: Run) -> dict:
    L = cfg.L[0]
    r = cfg.r if cfg.r is not None else L // 2
    try:
        levels = cftkit.entanglement_spectrum_NN(L, r, N=cfg.levels)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    lines = ["sector,level,energy,gap,degeneracy"]
    lines += [f"{lv.sector},{lv.level},{lv.energy!r},{lv.gap!r},{lv.degeneracy}" for lv in levels]
    run.write(f"spectrum_L{L}_r{r}.csv", "\n".join(lines) + "\n")
    doc = {
        "L": L, "r": r, "levels": cfg.levels,
        "entanglement_length": cftkit.entanglement_length(L, r),
        "normalization": cftkit.spectrum_normalization(levels),
        "truncation_error": cftkit.spectrum_truncation_error(L, r, N=cfg.levels),
    }
    run.write(f"spectrum_L{L}_r{r}.json", _json(doc))
    return doc


def predict(cfg: ExperimentConfig) -> float:
    """Single closed-form value for the ``predict`` verb."""
    tgt = cfg.target

    def need(name):
        v = getattr(cfg, name)
        if v is None:
            raise ConfigError(f"predict {tgt} needs --{name}")
        return v

    try:
        if tgt == "ceff-ising":
            return cftkit.ceff_ising(need("t"))
        if tgt == "ceff-boson":
            return cftkit.ceff_boson(need("t"))
        if tgt == "zero-mode":
            return cftkit.zero_mode_correction(need("x"))
        if tgt == "delta-s2-duality":
            return cftkit.zero_mode_correction(0.5) / 2.0
        if tgt == "delta-s":
            if cfg.model == "ising":
                return cftkit.boundary_entropy_change("ising")
            return cftkit.boundary_entropy_change("boson", _single(cfg.K, "K"))
        if tgt == "g":
            kind = need("bc")
            if cfg.model == "ising":
                return cftkit.g_function(cftkit.BoundaryCondition("ising", kind))
            return cftkit.g_function(cftkit.BoundaryCondition.boson(kind, K=_single(cfg.K, "K")))
        if tgt == "transmission":
            if cfg.b:
                return cftkit.transmission_energy_defect(_single(cfg.b, "b"))
            return cftkit.transmission_boson_interface(cfg.K1, _single(cfg.K2, "K2"))[1]
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    raise ConfigError(f"unknown predict target {tgt!r}")


def _single(values, name):
    if len(values) != 1:
        raise ConfigError(f"--{name} must be a single value here")
    return values[0]


def oracle_specs(L: int, suite: str) -> list[tuple[str, object]]:
    """Named specs of the oracle test matrix at length ``L``."""
    out = []
    if suite in ("all", "ising"):
        out += [
            ("ising_clean", build_ising(L)),
            ("ising_hb0.5", build_ising(L, h_b=0.5)),
            ("ising_hb1", build_ising(L, h_b=1.0)),
        ]
    if suite in ("all", "defects"):
        out += [
            ("ising_energy_b0.2", build_ising(L, defect=DefectSpec.energy(0.2))),
            ("ising_energy_b-0.6", build_ising(L, defect=DefectSpec.energy(-0.6))),
            ("ising_energy_b0", build_ising(L, defect=DefectSpec.energy(0.0))),
            ("ising_duality_b0.6", build_ising(L, defect=DefectSpec.duality(0.6))),
            ("ising_duality_b1", build_ising(L, defect=DefectSpec.duality(1.0))),
            ("xxz_interface_K0.6_K0.3", build_xxz(L, anisotropy_from_luttinger(0.6),
                                                  anisotropy_from_luttinger(0.3))),
        ]
    if suite in ("all", "xxz"):
        for K in (0.5, 1.0, 1.5):
            d = anisotropy_from_luttinger(K)
            out += [(f"xxz_K{_fmt(K)}", build_xxz(L, d)), (f"xxz_K{_fmt(K)}_hb0.5", build_xxz(L, d, h_b=0.5))]
    return out


#: DMRG settings for the oracle suite; a tighter cutoff than the production default
ORACLE_DMRG = {"chi": 64, "cutoff": 1e-14}


def run_oracle_check(cfg: ExperimentConfig, run: Run) -> dict:
    jobs = [(L, name, spec) for L in cfg.L for name, spec in oracle_specs(L, cfg.suite)]
    ocfg = ExperimentConfig(verb=cfg.verb, max_sweeps=cfg.max_sweeps, **ORACLE_DMRG)

    def work(job):
        L, name, spec = job
        ref = exact_diag_oracle(spec)
        res = {"L": L, "spec": name}
        solvers = ["dmrg"]
        if spec.model == "ising" and not spec.has_boundary_fields:
            solvers.insert(0, "freefermion")
        for s in solvers:
            prof = solve(spec, ocfg, s)
            res[f"{s}_entropy_dev"] = float(np.max(np.abs(prof.S - ref.S)))
            res[f"{s}_energy_dev"] = abs(prof.metadata["energy"] - ref.metadata["energy"])
        if "freefermion" in solvers:
            corr = ground_correlations(diagonalize(jordan_wigner(spec)), cfg.zero_mode_policy)
            res["complement_dev"] = complement_symmetry_error(corr)
        run.write(f"oracle/{name}_L{L}.json", _json(res))
        return res

    results = parallel_map(work, jobs)
    worst = max((v for r in results for k, v in r.items() if k.endswith("_dev")), default=0.0)
    doc = {"max_deviation": worst, "tolerance": cfg.tol, "passed": worst < cfg.tol, "cases": len(results)}
    run.write("oracle_summary.json", _json(doc))
    return doc


# --------------------------------------------------------------------------
# argument handling


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="critchain", description="Entanglement entropy of critical chains with boundaries and defects.")
    p.add_argument("--version", action="version", version=f"critchain {__version__}")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="verb", parser_class=_Parser)

    def common(sp):
        sp.add_argument("--config", help="JSON file whose keys mirror the long flags")
        sp.add_argument("--out", help="output directory (default critchain-out)")
        sp.add_argument("--model", choices=("ising", "xxz"))
        sp.add_argument("--solver", choices=SOLVERS)
        sp.add_argument("--L", help="chain length grid")
        sp.add_argument("--hb", help="boundary x-field magnitude")
        sp.add_argument("--chi", help="DMRG bond dimension")
        sp.add_argument("--cutoff", help="DMRG discarded-weight cutoff")
        sp.add_argument("--max-sweeps", dest="max_sweeps")
        sp.add_argument("--window", help="fit window, two fractions of L")
        sp.add_argument("--policy", choices=("occupy", "empty"), help="zero-mode occupation")

    sp = sub.add_parser("boundary-sweep", help="S_N - S_D at mid-chain")
    common(sp)
    sp.add_argument("--K", help="Luttinger parameters (xxz)")

    sp = sub.add_parser("defect-sweep", help="interface c_eff across Ising defect strengths")
    common(sp)
    sp.add_argument("--defect", choices=("energy", "duality"))
    sp.add_argument("--b", help="defect strength grid")
    sp.add_argument("--cuts", choices=("mid", "all"), help="cuts stored per profile")

    sp = sub.add_parser("interface-sweep", help="c_eff of XXZ interfaces")
    common(sp)
    sp.add_argument("--K1", help="left Luttinger parameter")
    sp.add_argument("--K2", help="right Luttinger parameter grid")

    sp = sub.add_parser("spectrum", help="character-based entanglement spectrum")
    common(sp)
    sp.add_argument("--r", help="cut position (default L/2)")
    sp.add_argument("--levels", help="character truncation order")

    sp = sub.add_parser("predict", help="print one closed-form value")
    sp.add_argument("target", choices=PREDICT_TARGETS)
    sp.add_argument("--config")
    sp.add_argument("--model", choices=("ising", "xxz"))
    for name in ("t", "x", "K", "b", "K1", "K2"):
        sp.add_argument(f"--{name}")
    sp.add_argument("--bc", choices=("neumann", "dirichlet"))

    sp = sub.add_parser("oracle-check", help="free fermion and DMRG against exact diagonalization")
    common(sp)
    sp.add_argument("--suite", choices=("all", "ising", "xxz", "defects"))
    sp.add_argument("--tol", help="maximum allowed deviation")
    return p


def _load_config_file(path: str) -> dict:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config file must hold a JSON object")
    # keys may be spelled like the flags ("max-sweeps") or like the fields
    return {str(k).replace("-", "_"): v for k, v in data.items()}


def config_from_args(argv) -> tuple[ExperimentConfig, bool]:
    ns = build_parser().parse_args(argv)
    if ns.verb is None:
        raise ConfigError("missing verb; see critchain --help")
    raw = vars(ns).copy()
    verbose = raw.pop("verbose")
    verb = raw.pop("verb")
    merged = _load_config_file(raw.pop("config")) if raw.get("config") else {}
    raw.pop("config", None)
    merged.pop("verb", None)
    merged.update({k: v for k, v in raw.items() if v is not None})
    return make_config(verb, merged), verbose


_TOLERANCES = {
    "boundary-sweep": {"ising_delta_s": 0.03, "xxz_delta_s": 0.05},
    "defect-sweep": {"c_eff": 0.01, "delta_s2_duality": 0.01},
    "interface-sweep": {"c_eff": 0.05},
    "spectrum": {"normalization": "truncation_error"},
}


def run(cfg: ExperimentConfig) -> int:
    """Execute one experiment; returns the process exit status."""
    if cfg.verb == "predict":
        print(f"{predict(cfg):.12g}")
        return EXIT_OK
    job = Run(cfg)
    handler = {
        "boundary-sweep": run_boundary_sweep,
        "defect-sweep": run_defect_sweep,
        "interface-sweep": run_interface_sweep,
        "spectrum": run_spectrum,
        "oracle-check": run_oracle_check,
    }[cfg.verb]
    summary = handler(cfg, job)
    tol = _TOLERANCES.get(cfg.verb, {"max_deviation": cfg.tol})
    job.manifest(tol)
    if cfg.verb == "oracle-check":
        print(f"max deviation {summary['max_deviation']:.3e} over {summary['cases']} cases "
              f"({'pass' if summary['passed'] else 'FAIL'} at {cfg.tol:g})")
        return EXIT_OK if summary["passed"] else EXIT_SOLVER
    print(f"wrote {len(job.files)} files to {job.root}")
    return EXIT_OK


def main(argv=None) -> int:
    try:
        cfg, verbose = config_from_args(sys.argv[1:] if argv is None else argv)
    except ConfigError as exc:
        print(f"critchain: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    logging.basicConfig(level=logging.INFO if verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return run(cfg)
    except ConfigError as exc:
        print(f"critchain: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SolverError as exc:
        print(f"critchain: solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
