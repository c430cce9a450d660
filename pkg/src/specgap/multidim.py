"""Trigonometric polynomials on T^d, the frequency-folding map, and sampled
searches for large zero-free balls and cubes.

Folding along a frequency ``nu`` of ``f`` adds the translate by
``mu = nu / (2 |nu|^2)``::

    fold(f)(x) = f(x) + f(x + mu),   c(lam) -> c(lam) (1 + exp(2 pi i <mu, lam>))

which kills ``±nu`` (the multiplier is ``1 + e^{±i pi} = 0``) and keeps
positivity on the shrunk ball ``B(y - mu/2, R - |mu|/2)`` whenever f is
positive on ``B(y, R)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import InputError, NumericalError
from .spectrum import Spectrum, ball_bound, cube_bound, make_spectrum
from .trigpoly import TWO_PI

HERMITIAN_TOL = 1e-12
FOLD_ZERO_TOL = 1e-12
DEFAULT_GRID = {1: 256, 2: 64, 3: 24}


@dataclass(frozen=True, eq=False)
class TrigPolyND:
    d: int
    frequencies: np.ndarray  # (n, d) ints, lexicographically sorted
    coefficients: np.ndarray  # (n,) complex

    def __post_init__(self):
        lam = np.asarray(self.frequencies, dtype=np.int64).reshape(-1, self.d)
        c = np.asarray(self.coefficients, dtype=np.complex128).ravel()
        if lam.shape[0] != c.shape[0]:
            raise InputError("one coefficient per frequency vector is required")
        keys = [tuple(v) for v in lam.tolist()]
        if len(set(keys)) != len(keys):
            raise InputError("duplicate frequency vectors")
        if any(not any(k) for k in keys):
            raise InputError("the zero frequency is not allowed")
        order = sorted(range(len(keys)), key=lambda i: keys[i])
        lam, c = lam[order], c[order]
        index = {tuple(v): i for i, v in enumerate(lam.tolist())}
        scale = max(1.0, float(np.abs(c).max(initial=0.0)))
        mirror = np.empty_like(c)
        for i, v in enumerate(lam.tolist()):
            j = index.get(tuple(-x for x in v))
            if j is None:
                raise InputError(f"support not symmetric: {tuple(v)} lacks its negative")
            mirror[i] = np.conj(c[j])
        if np.any(np.abs(c - mirror) > HERMITIAN_TOL * scale):
            raise InputError("coefficients are not Hermitian")
        c = 0.5 * (c + mirror)
        lam.setflags(write=False)
        c.setflags(write=False)
        object.__setattr__(self, "frequencies", lam)
        object.__setattr__(self, "coefficients", c)

    @classmethod
    def from_terms(cls, d: int, terms: dict) -> "TrigPolyND":
        """From ``{lambda_tuple: coefficient}`` listing the full symmetric support."""
        keys = list(terms)
        return cls(d, np.array(keys, dtype=np.int64).reshape(-1, d),
                   np.array([terms[k] for k in keys], dtype=np.complex128))

    @classmethod
    def from_positive(cls, d: int, terms: dict) -> "TrigPolyND":
        """From coefficients on one representative per ``±lambda`` pair."""
        full = {}
        for k, v in terms.items():
            k = tuple(int(x) for x in k)
            full[k] = complex(v)
            full[tuple(-x for x in k)] = complex(v).conjugate()
        return cls.from_terms(d, full)

    def coefficient(self, lam) -> complex:
        lam = tuple(int(x) for x in lam)
        for v, c in zip(self.frequencies.tolist(), self.coefficients):
            if tuple(v) == lam:
                return complex(c)
        return 0j

    def norm1(self) -> float:
        return float(np.abs(self.coefficients).sum())

    def is_zero(self, tol: float = 1e-14) -> bool:
        return self.coefficients.size == 0 or self.norm1() <= tol

    def spectrum(self, tol: float = 0.0) -> Spectrum:
        keep = self.frequencies[np.abs(self.coefficients) > tol]
        if keep.shape[0] == 0:
            return Spectrum(self.d, ())
        return make_spectrum([tuple(v) for v in keep.tolist()], symmetrize=False)

    def __call__(self, x):
        return evaluate_nd(self, x)

    def to_json_obj(self) -> dict:
        return {"d": self.d, "terms": [{"lambda": list(v), "re": float(c.real), "im": float(c.imag)}
                                       for v, c in zip(self.frequencies.tolist(), self.coefficients)]}

    @classmethod
    def from_json_obj(cls, obj: dict) -> "TrigPolyND":
        try:
            d = int(obj["d"])
            terms = {tuple(int(x) for x in t["lambda"]): complex(t["re"], t["im"]) for t in obj["terms"]}
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"malformed N-D polynomial JSON: {exc}") from exc
        return cls.from_terms(d, terms)


def evaluate_nd(f: TrigPolyND, x) -> np.ndarray | float:
    """f at a point (shape ``(d,)``) or at many points (shape ``(m, d)``)."""
    pts = np.asarray(x, dtype=float)
    single = pts.ndim == 1
    pts = np.atleast_2d(pts)
    if pts.shape[-1] != f.d:
        raise InputError(f"point dimension {pts.shape[-1]} != polynomial dimension {f.d}")
    if f.coefficients.size == 0:
        vals = np.zeros(pts.shape[0])
        return float(vals[0]) if single else vals
    phase = pts @ f.frequencies.T.astype(float)
    vals = np.exp(1j * TWO_PI * phase) @ f.coefficients
    if np.any(np.abs(vals.imag) > 1e-10 * max(f.norm1(), 1e-300)):
        raise NumericalError("imaginary residue above tolerance")
    return float(vals.real[0]) if single else vals.real


def fold_shift(nu) -> np.ndarray:
    nu = np.asarray(nu, dtype=float)
    return nu / (2.0 * float(nu @ nu))


def fold(f: TrigPolyND, nu) -> TrigPolyND:
    """``x -> f(x) + f(x + mu)``; frequencies ±nu are removed exactly."""
    nu = tuple(int(x) for x in np.atleast_1d(nu))
    if len(nu) != f.d:
        raise InputError("nu has the wrong dimension")
    keys = [tuple(v) for v in f.frequencies.tolist()]
    if nu not in keys:
        raise InputError(f"nu = {nu} is not in the spectrum of f")
    mu = fold_shift(nu)
    mult = 1.0 + np.exp(1j * TWO_PI * (f.frequencies @ mu))
    c = f.coefficients * mult
    neg = tuple(-x for x in nu)
    killed = np.array([k in (nu, neg) for k in keys])
    if np.any(np.abs(c[killed]) > FOLD_ZERO_TOL * max(1.0, f.norm1())):
        raise NumericalError("folding failed to annihilate ±nu")
    c[killed] = 0.0
    keep = ~killed
    return TrigPolyND(f.d, f.frequencies[keep], c[keep])


def torus_distance(x, y, order=2) -> np.ndarray:
    """Distance on R^d/Z^d using minimal coordinate representatives."""
    diff = np.abs(np.asarray(x, dtype=float) - np.asarray(y, dtype=float)) % 1.0
    diff = np.minimum(diff, 1.0 - diff)
    return np.linalg.norm(diff, ord=order, axis=-1)


def ball_cloud(d: int, n: int = 1000) -> np.ndarray:
    """Deterministic sample points of the closed unit ball, boundary included."""
    if d == 1:
        return np.linspace(-1.0, 1.0, max(3, n)).reshape(-1, 1)
    if d == 2:
        nb = max(16, int(round(math.sqrt(n) * 2.0)))
        ang = TWO_PI * np.arange(nb) / nb
        boundary = np.stack([np.cos(ang), np.sin(ang)], axis=1)
        ni = max(1, n - nb)
        k = np.arange(ni) + 0.5
        r = np.sqrt(k / ni)
        th = k * math.pi * (3.0 - math.sqrt(5.0))
        inner = np.stack([r * np.cos(th), r * np.sin(th)], axis=1)
        return np.vstack([[0.0, 0.0], boundary, inner])
    if d == 3:
        nb = max(32, n // 3)
        k = np.arange(nb) + 0.5
        z = 1.0 - 2.0 * k / nb
        th = k * math.pi * (3.0 - math.sqrt(5.0))
        rr = np.sqrt(1.0 - z * z)
        sphere = np.stack([rr * np.cos(th), rr * np.sin(th), z], axis=1)
        ni = max(1, n - nb)
        rng = np.random.Generator(np.random.PCG64(3))
        inner = rng.standard_normal((ni, 3))
        inner /= np.linalg.norm(inner, axis=1, keepdims=True)
        inner *= rng.random((ni, 1)) ** (1.0 / 3.0)
        return np.vstack([np.zeros(3), sphere, inner])
    raise InputError("only d <= 3 is supported")


def cube_cloud(d: int, per_axis: int = 0) -> np.ndarray:
    """Lattice in ``[-1, 1]^d`` including corners and faces."""
    per_axis = per_axis or {1: 1001, 2: 41, 3: 13}[d]
    axis = np.linspace(-1.0, 1.0, per_axis)
    grids = np.meshgrid(*([axis] * d), indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=1)


@dataclass(frozen=True)
class BallSearchResult:
    center: tuple[float, ...]
    radius: float  # ball radius, or half the cube side
    sign: int
    resolution: int
    shape: str = "ball"

    @property
    def size(self) -> float:
        """Ball diameter or cube side length."""
        return 2.0 * self.radius


def _region_ok(f, y, R, cloud, sign) -> bool:
    vals = evaluate_nd(f, y + R * cloud)
    return bool(np.all(sign * vals > 0.0))


def _max_radius(f, y, cloud, sign, r_hi, iters=40, r_lo=0.0) -> float:
    if not _region_ok(f, y, r_lo, cloud[:1], sign):
        return 0.0
    if _region_ok(f, y, r_hi, cloud, sign):
        return r_hi
    lo, hi = r_lo, r_hi
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if _region_ok(f, y, mid, cloud, sign):
            lo = mid
        else:
            hi = mid
    return lo


def largest_zero_free_region(f: TrigPolyND, shape: str = "ball", grid_n: int | None = None,
                             refine_iters: int = 20, cloud_points: int = 1000,
                             max_centers: int = 8) -> BallSearchResult:
    """Sampled lower-bound search for the largest ball (or cube) where f keeps its sign."""
    if f.is_zero():
        raise InputError("f is identically zero")
    d = f.d
    if d > 3:
        raise InputError("only d <= 3 is supported")
    grid_n = grid_n or DEFAULT_GRID[d]
    if shape == "ball":
        cloud = ball_cloud(d, cloud_points)
        r_hi = 0.5 * math.sqrt(d) + 0.5
    elif shape == "cube":
        cloud = cube_cloud(d)
        r_hi = 1.0
    else:
        raise InputError("shape must be 'ball' or 'cube'")

    axis = np.arange(grid_n) / grid_n
    lattice = np.stack([g.ravel() for g in np.meshgrid(*([axis] * d), indexing="ij")], axis=1)
    vals = evaluate_nd(f, lattice).reshape((grid_n,) * d)
    mag = np.abs(vals)
    is_max = np.ones_like(mag, dtype=bool)
    for ax in range(d):
        for sh in (1, -1):
            is_max &= mag >= np.roll(mag, sh, axis=ax)
    flat = np.flatnonzero(is_max.ravel() & (mag.ravel() > 0))
    flat = flat[np.argsort(-mag.ravel()[flat], kind="stable")][: max_centers]

    scored = []
    for idx in flat:
        y = lattice[idx]
        s = 1 if vals.ravel()[idx] > 0 else -1
        scored.append((_max_radius(f, y, cloud, s, r_hi), int(idx), y, s))
    scored.sort(key=lambda t: (-t[0], t[1]))

    best_r, _, best_y, best_s = scored[0]
    for r0, _, y, s in scored[: 3]:
        step = 1.0 / grid_n
        for _ in range(refine_iters):
            moved = False
            for k in range(d):
                for sgn in (1.0, -1.0):
                    cand = y.copy()
                    cand[k] += sgn * step
                    if not _region_ok(f, cand, r0, cloud, s):
                        continue
                    r = _max_radius(f, cand, cloud, s, r_hi, r_lo=r0)
                    if r > r0:
                        y, r0, moved = cand, r, True
            if not moved:
                step *= 0.5
        if r0 > best_r:
            best_r, best_y, best_s = r0, y, s

    # a denser cloud must agree; shrink otherwise
    if shape == "ball":
        dense = ball_cloud(d, 4 * cloud_points)
    else:
        dense = cube_cloud(d, {1: 4001, 2: 81, 3: 25}[d])
    if not _region_ok(f, best_y, best_r, dense, best_s):
        best_r = _max_radius(f, best_y, dense, best_s, best_r)
    return BallSearchResult(tuple(float(v) % 1.0 for v in best_y), float(best_r), best_s,
                            int(cloud.shape[0]), shape)


def largest_zero_free_ball(f: TrigPolyND, grid_n: int | None = None,
                           refine_iters: int = 20) -> BallSearchResult:
    return largest_zero_free_region(f, "ball", grid_n, refine_iters)


@dataclass(frozen=True)
class BoundCheck:
    passed: bool
    measured: float
    bound: float
    margin: float
    shape: str
    witness: BallSearchResult | None = None


def compare_to_bound(measured: float, bound: float, shape: str = "ball",
                     tol: float = 1e-6, witness=None) -> BoundCheck:
    return BoundCheck(measured <= bound + tol, measured, bound, bound - measured, shape, witness)


def check_thm1(f: TrigPolyND, grid_n: int | None = None, refine_iters: int = 20) -> BoundCheck:
    """Found zero-free ball diameter against D(spec f)."""
    res = largest_zero_free_region(f, "ball", grid_n, refine_iters)
    return compare_to_bound(res.size, ball_bound(f.spectrum()), "ball", witness=res)


def check_cube(f: TrigPolyND, grid_n: int | None = None, refine_iters: int = 20) -> BoundCheck:
    """Found zero-free cube side against L(spec f)."""
    res = largest_zero_free_region(f, "cube", grid_n, refine_iters)
    return compare_to_bound(res.size, cube_bound(f.spectrum()), "cube", witness=res)


@dataclass(frozen=True)
class FoldPositivity:
    passed: bool
    degenerate: bool
    min_before: float
    min_after: float
    shrunk_center: tuple[float, ...]
    shrunk_radius: float


def fold_positivity(f: TrigPolyND, nu, y: Sequence[float], R: float,
                    samples: int = 1000) -> FoldPositivity:
    """Positivity of f on B(y, R) carries over to fold(f, nu) on B(y - mu/2, R - |mu|/2)."""
    y = np.asarray(y, dtype=float)
    cloud = ball_cloud(f.d, samples)
    before = evaluate_nd(f, y + R * cloud)
    if not np.all(before > 0.0):
        raise InputError("precondition violated: f is not positive on the sampled ball")
    g = fold(f, nu)
    mu = fold_shift(nu)
    yc = y - 0.5 * mu
    rc = R - 0.5 * float(np.linalg.norm(mu))
    if g.is_zero() or rc <= 0.0:
        return FoldPositivity(True, True, float(before.min()), math.nan,
                              tuple(yc.tolist()), rc)
    after = evaluate_nd(g, yc + rc * cloud)
    return FoldPositivity(bool(np.all(after > 0.0)), False, float(before.min()),
                          float(after.min()), tuple(yc.tolist()), rc)


def random_nd_poly(rng: np.random.Generator, d: int, pairs: int, max_freq: int = 3) -> TrigPolyND:
    """Random Hermitian polynomial with ``pairs`` distinct ±lambda pairs."""
    from .spectrum import is_positive_representative

    available = ((2 * max_freq + 1) ** d - 1) // 2
    if not 1 <= pairs <= available:
        raise InputError(f"need 1 <= pairs <= {available} for d={d}, max_freq={max_freq}")
    reps = set()
    while len(reps) < pairs:
        v = tuple(int(x) for x in rng.integers(-max_freq, max_freq + 1, size=d))
        if not any(v):
            continue
        if not is_positive_representative(v):
            v = tuple(-x for x in v)
        reps.add(v)
    terms = {v: complex(*rng.standard_normal(2)) for v in sorted(reps)}
    return TrigPolyND.from_positive(d, terms)
