"""Numerical estimates of the supremal zero-free arc length for 1-D spectra.

Coefficients are parametrised by the real and imaginary parts of ``c(lam)``
for the positive frequencies, normalised to unit Euclidean norm (the gap is
scale invariant).  The objective (largest strict zero-free arc; touching zeros
break arcs) is only piecewise smooth, so the maximiser is a multi-start
Nelder-Mead without gradients.

Restart ``i`` of a run with master seed ``s`` uses its own generator
``numpy.random.Generator(PCG64(SeedSequence([s, i])))``, so a restart's
outcome does not depend on how many restarts run alongside it.  The restart
draws ``PRESAMPLE`` uniform points on the sphere, starts from the best of them
and spends the rest of its budget on Nelder-Mead passes.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
from scipy.optimize import minimize

from .errors import InputError, PropertyViolation
from .spectrum import (ProgressionParams, Spectrum, ball_bound, closed_form_M, describe,
                       gen_net, gen_progression, gen_random, gen_squares)
from .trigpoly import TrigPoly1D, dense_gap, gap_of

SCHEMA_VERSION = 1
D_GATE_TOL = 1e-6
PRESAMPLE = 100          # uniform draws per restart before the local search
SIMPLEX_SCALE = 0.1
SIMPLEX_SHRINK = 0.7


def _positive(S: Spectrum) -> list[int]:
    if S.d != 1:
        raise InputError("search works on one-dimensional spectra")
    return S.positive_integers()


def params_to_poly(params: Sequence[float], S: Spectrum) -> TrigPoly1D | None:
    """Hermitian-mirrored polynomial from a unit-normalised parameter vector.

    Returns None for the all-zero vector.
    """
    pos = _positive(S)
    x = np.asarray(params, dtype=float)
    if x.shape != (2 * len(pos),):
        raise InputError(f"expected {2 * len(pos)} parameters for {describe(S)}, got {x.shape}")
    nrm = float(np.linalg.norm(x))
    if not nrm > 1e-300 or not math.isfinite(nrm):
        return None
    x = x / nrm
    return TrigPoly1D.from_positive(pos, x[0::2] + 1j * x[1::2])


def poly_to_params(f: TrigPoly1D) -> np.ndarray:
    c = f.positive_coefficients
    x = np.empty(2 * len(c))
    x[0::2], x[1::2] = c.real, c.imag
    return x / np.linalg.norm(x)


def gap_objective(params: Sequence[float], S: Spectrum) -> float:
    f = params_to_poly(params, S)
    if f is None:
        return 0.0
    return gap_of(f).max_gap


@dataclass(frozen=True)
class SearchConfig:
    spectrum: Spectrum
    restarts: int = 16
    seed: int = 0
    budget: int = 2000
    tol: float = 1e-10

    def __post_init__(self):
        if self.restarts < 1:
            raise InputError("restarts must be >= 1")
        if self.budget < 100:
            raise InputError("budget must be >= 100")


@dataclass(frozen=True)
class SearchResult:
    best_coeffs: tuple[float, ...]
    best_gap: float
    gap_interval: tuple[float, float]
    evals_used: int
    per_restart: tuple[tuple[int, float], ...]

    def to_json_obj(self) -> dict:
        return {"best_coeffs": list(self.best_coeffs), "best_gap": self.best_gap,
                "gap_interval": list(self.gap_interval), "evals_used": self.evals_used,
                "per_restart": [list(r) for r in self.per_restart]}


def restart_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([int(seed), int(index)])))


def _local_search(x0: np.ndarray, S: Spectrum, budget: int, tol: float,
                  rng: np.random.Generator):
    """Nelder-Mead restarted from its own best point until the budget is spent.

    Each pass starts from a randomly rotated simplex; the simplex size shrinks
    after a pass that does not improve.  Axis-aligned simplices stall on the
    ridges formed where interior zero pairs are about to appear.
    """
    best_x, best_val = x0, gap_objective(x0, S)
    used = 1
    n = len(best_x)
    scale = SIMPLEX_SCALE

    def neg(x):
        return -gap_objective(x, S)

    while used < budget:
        rot = np.linalg.qr(rng.standard_normal((n, n)))[0]
        simplex = np.vstack([best_x] + [best_x + scale * rot[k] for k in range(n)])
        res = minimize(neg, best_x, method="Nelder-Mead",
                       options={"maxfev": budget - used, "initial_simplex": simplex,
                                "xatol": 1e-10, "fatol": tol, "adaptive": True})
        used += int(res.nfev)
        if -res.fun > best_val + tol:
            best_x, best_val = res.x / np.linalg.norm(res.x), -float(res.fun)
        else:
            scale *= SIMPLEX_SHRINK
            if scale < 1e-4:
                break
    return best_x, best_val, used


def _start_point(rng: np.random.Generator, S: Spectrum, dim: int, budget: int):
    """Best of a small batch of uniform draws on the sphere, and its cost."""
    m = max(1, min(PRESAMPLE, budget // 10))
    X = rng.standard_normal((m, dim))
    X /= np.linalg.norm(X, axis=1)[:, None]
    vals = [gap_objective(x, S) for x in X]
    return X[int(np.argmax(vals))], m


def estimate_M(cfg: SearchConfig) -> SearchResult:
    S = cfg.spectrum
    pos = _positive(S)
    if not pos:
        raise InputError("empty spectrum")
    dim = 2 * len(pos)
    best = None
    per_restart = []
    evals = 0
    for i in range(cfg.restarts):
        rng = restart_rng(cfg.seed, i)
        x0, used0 = _start_point(rng, S, dim, cfg.budget)
        x, val, used = _local_search(x0, S, cfg.budget - used0, cfg.tol, rng)
        evals += used0 + used
        per_restart.append((i, val))
        if best is None or val > best[1]:
            best = (x, val)
    x, val = best
    f = params_to_poly(x, S)
    rep = gap_of(f)
    if abs(rep.max_gap - val) > 1e-6:
        raise PropertyViolation("best coefficients do not reproduce the best gap")
    if val > ball_bound(S) + D_GATE_TOL:
        raise PropertyViolation(f"search gap {val} exceeds D(S) = {ball_bound(S)}")
    return SearchResult(tuple(float(v) for v in x), float(val),
                        (rep.gap_start, rep.max_gap), evals, tuple(per_restart))


def _sphere_grid(m: int, n: int) -> np.ndarray:
    """Points of S^{m-1} with first coordinate >= 0 on an n-per-angle grid."""
    if m == 1:
        return np.ones((1, 1))
    first = np.linspace(0.0, math.pi / 2.0, n)
    middle = [np.linspace(0.0, math.pi, n)] * (m - 3)
    last = np.linspace(0.0, 2.0 * math.pi, n, endpoint=False) if m > 2 else None
    axes = [first] + middle + ([last] if last is not None else [])
    if m == 2:
        axes = [np.linspace(-math.pi / 2.0, math.pi / 2.0, n)]
    grids = np.meshgrid(*axes, indexing="ij")
    ang = np.stack([g.ravel() for g in grids], axis=1)
    pts = np.empty((ang.shape[0], m))
    sin_prod = np.ones(ang.shape[0])
    for k in range(m - 1):
        pts[:, k] = sin_prod * np.cos(ang[:, k])
        sin_prod = sin_prod * np.sin(ang[:, k])
    pts[:, m - 1] = sin_prod
    return pts


def brute_force_M(S: Spectrum, grid_per_dim: int = 17, samples: int = 10_000) -> float:
    """Coarse enumeration oracle: max dense-sampled gap over a spherical grid.

    Translation makes ``c(lam_1)`` real and nonnegative without loss, so the
    grid covers a hemisphere of ``S^{|S|-2}``.
    """
    pos = _positive(S)
    if not pos:
        raise InputError("empty spectrum")
    if len(pos) > 3:
        raise InputError("brute force is limited to |S| <= 6")
    if grid_per_dim > 17:
        raise InputError("grid_per_dim must be <= 17")
    pts = _sphere_grid(2 * len(pos) - 1, grid_per_dim)
    best = 0.0
    for row in pts:
        coeffs = np.concatenate([[row[0]], row[1::2] + 1j * row[2::2]]) if len(pos) > 1 else row[:1]
        if np.abs(coeffs).sum() < 1e-12:
            continue
        f = TrigPoly1D.from_positive(pos, coeffs)
        best = max(best, dense_gap(f, samples).max_gap)
    return best


FAMILIES = ("progression_large_b", "progression", "squares", "random", "net")


def family_spectrum(family: str, params: dict) -> Spectrum:
    if family in ("progression_large_b", "progression"):
        return gen_progression(ProgressionParams(params["N"], params["K"], params["b"]))
    if family == "squares":
        return gen_squares(params["N"], params["K"])
    if family == "random":
        return gen_random(params["Nmax"], params["tau"], params["seed"])
    if family == "net":
        return gen_net(params["a"])
    raise InputError(f"unknown family {family!r}; choose from {FAMILIES}")


def experiment(family: str, family_params: dict | Iterable[dict],
               cfg_template: SearchConfig | None = None,
               out: str | Path | None = None) -> list[dict]:
    """One evidence row per spectrum instance; appended to ``out`` as JSON lines."""
    from .records import dumps_canonical

    if isinstance(family_params, dict):
        family_params = [family_params]
    template = cfg_template
    rows = []
    for inst in family_params:
        S = family_spectrum(family, inst)
        row = {"schema_version": SCHEMA_VERSION, "family": family, "params": dict(inst),
               "spectrum": describe(S), "lambdas": S.positive_integers() if len(S) else [],
               "size": len(S), "D": ball_bound(S), "M_closed": None, "M_closed_float": None}
        if family.startswith("progression"):
            p = ProgressionParams(inst["N"], inst["K"], inst["b"])
            if p.closed_form_regime:
                m = closed_form_M(p)
                row["M_closed"] = f"{m.numerator}/{m.denominator}"
                row["M_closed_float"] = float(m)
        restarts = template.restarts if template else 16
        seed = template.seed if template else 0
        budget = template.budget if template else 2000
        if len(S):
            res = estimate_M(SearchConfig(S, restarts=restarts, seed=seed, budget=budget))
            row["M_estimate"] = res.best_gap
            row["evals"] = res.evals_used
        else:
            row["M_estimate"] = None
            row["evals"] = 0
        row.update({"restarts": restarts, "seed": seed, "budget": budget})
        rows.append(row)
        if out is not None:
            with open(out, "a", encoding="utf-8") as fh:
                fh.write(dumps_canonical(row) + "\n")
    return rows


CSV_COLUMNS = ("family", "spectrum", "size", "D", "M_closed_float", "M_estimate", "restarts", "seed")


def read_rows(path: str | Path) -> list[dict]:
    with open(path, encoding="utf-8") as fh:
        return [json.loads(line) for line in fh if line.strip()]


def rows_to_csv(rows: Sequence[dict]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in rows:
        w.writerow(["" if r.get(k) is None else
                    (format(r[k], ".17g") if isinstance(r[k], float) else r[k])
                    for k in CSV_COLUMNS])
    return buf.getvalue()


def read_csv(path: str | Path) -> list[dict]:
    """Inverse of ``export_csv`` for the exported columns."""
    with open(path, newline="", encoding="utf-8") as fh:
        out = []
        for r in csv.DictReader(fh):
            row = {}
            for k in CSV_COLUMNS:
                v = r[k]
                if v == "":
                    row[k] = None
                elif k in ("family", "spectrum"):
                    row[k] = v
                elif k in ("size", "restarts", "seed"):
                    row[k] = int(v)
                else:
                    row[k] = float(v)
            out.append(row)
        return out


def export_csv(rows: Sequence[dict], path: str | Path) -> None:
    Path(path).write_text(rows_to_csv(rows), encoding="utf-8")


def expand_grid(**axes) -> list[dict]:
    """Cartesian product of parameter lists, e.g. ``expand_grid(N=[1, 2], K=[3])``."""
    keys = list(axes)
    return [dict(zip(keys, vals)) for vals in itertools.product(*(axes[k] for k in keys))]
