"""One-dimensional real trigonometric polynomials on T = R/Z.

``f(t) = sum_lam c(lam) exp(2 pi i lam t)`` with ``c(-lam) = conj(c(lam))``.
Zeros on the circle are found from the self-inversive algebraic form
``P(z) = z^M f``, ``M = max |lam|``, whose unit-circle roots are the zeros of f,
and then polished on the real function itself.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import InputError, NumericalError
from .spectrum import Spectrum, make_spectrum

log = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi
HERMITIAN_TOL = 1e-12
REAL_TOL = 1e-10
ZERO_POLY_TOL = 1e-14

CIRCLE_TOL = 1e-8
# Multiple roots split to roughly sqrt(eps) off the circle; those are only
# kept when the real function confirms a zero there.
NEAR_CIRCLE_TOL = 1e-3
REFINE_TOL = 1e-10
CLUSTER_TOL = 1e-6
DEDUP_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class TrigPoly1D:
    frequencies: np.ndarray  # ascending nonzero ints, symmetric
    coefficients: np.ndarray  # complex, aligned with frequencies

    def __post_init__(self):
        lam = np.asarray(self.frequencies, dtype=np.int64)
        c = np.asarray(self.coefficients, dtype=np.complex128)
        if lam.ndim != 1 or lam.shape != c.shape:
            raise InputError("frequencies and coefficients must be equal-length 1-D arrays")
        order = np.argsort(lam, kind="stable")
        lam, c = lam[order], c[order]
        if np.any(lam == 0):
            raise InputError("frequency 0 is not allowed")
        if np.any(np.diff(lam) == 0):
            raise InputError("duplicate frequencies")
        if not np.array_equal(lam, -lam[::-1]):
            raise InputError("frequency set is not symmetric")
        mirror = np.conj(c[::-1])
        scale = max(1.0, float(np.abs(c).max(initial=0.0)))
        if np.any(np.abs(c - mirror) > HERMITIAN_TOL * scale):
            raise InputError("coefficients are not Hermitian: c(-lam) != conj(c(lam))")
        # snap the tolerated asymmetry so f is exactly real
        c = 0.5 * (c + mirror)
        lam.setflags(write=False)
        c.setflags(write=False)
        object.__setattr__(self, "frequencies", lam)
        object.__setattr__(self, "coefficients", c)

    @classmethod
    def from_positive(cls, freqs: Sequence[int], coeffs: Sequence[complex]) -> "TrigPoly1D":
        """Mirror coefficients given for positive frequencies only."""
        freqs = np.asarray(freqs, dtype=np.int64)
        coeffs = np.asarray(coeffs, dtype=np.complex128)
        if np.any(freqs <= 0):
            raise InputError("from_positive expects positive frequencies")
        return cls(np.concatenate([-freqs[::-1], freqs]),
                   np.concatenate([np.conj(coeffs[::-1]), coeffs]))

    @classmethod
    def from_dict(cls, mapping: dict) -> "TrigPoly1D":
        keys = sorted(mapping)
        return cls(np.array(keys), np.array([mapping[k] for k in keys]))

    @property
    def positive_frequencies(self) -> np.ndarray:
        return self.frequencies[self.frequencies > 0]

    @property
    def positive_coefficients(self) -> np.ndarray:
        return self.coefficients[self.frequencies > 0]

    def norm1(self) -> float:
        return float(np.abs(self.coefficients).sum())

    def is_zero(self) -> bool:
        return len(self.coefficients) == 0 or self.norm1() <= ZERO_POLY_TOL

    def spectrum(self, tol: float = 0.0) -> Spectrum:
        """Frequencies whose coefficient magnitude exceeds ``tol``."""
        keep = self.frequencies[np.abs(self.coefficients) > tol]
        if keep.size == 0:
            return Spectrum(1, ())
        return make_spectrum(keep.tolist(), symmetrize=False)

    def __call__(self, t):
        return evaluate(self, t)

    def scaled(self, alpha: float) -> "TrigPoly1D":
        return TrigPoly1D(self.frequencies, alpha * self.coefficients)

    def translated(self, s: float) -> "TrigPoly1D":
        """The polynomial ``t -> f(t - s)``."""
        return TrigPoly1D(self.frequencies,
                          self.coefficients * np.exp(-1j * TWO_PI * self.frequencies * s))

    def to_json_obj(self) -> dict:
        return {"lambdas": self.frequencies.tolist(),
                "re": self.coefficients.real.tolist(),
                "im": self.coefficients.imag.tolist()}

    @classmethod
    def from_json_obj(cls, obj: dict) -> "TrigPoly1D":
        try:
            lam = np.asarray(obj["lambdas"], dtype=np.int64)
            c = np.asarray(obj["re"], dtype=float) + 1j * np.asarray(obj["im"], dtype=float)
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"malformed polynomial JSON: {exc}") from exc
        return cls(lam, c)


def _sum_terms(f: TrigPoly1D, t: np.ndarray, order: int = 0) -> np.ndarray:
    """Complex exponential sum of the ``order``-th t-derivative."""
    lam = f.frequencies
    weight = f.coefficients * (1j * TWO_PI * lam) ** order if order else f.coefficients
    return np.exp(1j * TWO_PI * np.multiply.outer(t, lam)) @ weight


def evaluate(f: TrigPoly1D, t):
    """Real value of f at torus coordinate(s) ``t``."""
    tt = np.asarray(t, dtype=float)
    if len(f.frequencies) == 0:
        return np.zeros_like(tt) if tt.ndim else 0.0
    vals = _sum_terms(f, tt)
    bound = REAL_TOL * max(f.norm1(), 1e-300)
    if np.any(np.abs(vals.imag) > bound):
        raise NumericalError("imaginary residue above tolerance; coefficients not Hermitian?")
    return vals.real if tt.ndim else float(vals.real)


def _real_derivs(f: TrigPoly1D, t: np.ndarray, orders=(0, 1, 2)):
    """f and its derivatives via the positive half: f = 2 Re sum_{lam>0}."""
    lam = f.positive_frequencies
    c = f.positive_coefficients
    e = np.exp(1j * TWO_PI * np.multiply.outer(t, lam))
    return [2.0 * (e @ (c * (1j * TWO_PI * lam) ** k)).real for k in orders]


@dataclass(frozen=True, eq=False)
class AlgebraicForm:
    """``f(t) = Re(z^-M P(z))`` at ``z = e^{2 pi i t}``; ``coeffs[j]`` multiplies ``z^j``."""

    shift: int
    coeffs: np.ndarray

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, z):
        return np.polyval(self.coeffs[::-1], z)

    def is_self_inversive(self, tol: float = HERMITIAN_TOL) -> bool:
        p = self.coeffs
        return bool(np.all(np.abs(p[::-1] - np.conj(p)) <= tol * max(1.0, np.abs(p).max())))


def to_algebraic(f: TrigPoly1D) -> AlgebraicForm:
    if len(f.frequencies) == 0:
        raise InputError("empty spectrum has no algebraic form")
    M = int(np.abs(f.frequencies).max())
    p = np.zeros(2 * M + 1, dtype=np.complex128)
    p[f.frequencies + M] = f.coefficients
    return AlgebraicForm(M, p)


def analytic_part(f: TrigPoly1D) -> tuple[int, np.ndarray]:
    """Split ``f = Re(e^{2 pi i N t} Q(e^{2 pi i t}))`` with N the smallest positive frequency.

    Returns ``(N, q)`` with ``q[j]`` the coefficient of ``z^j`` in Q.
    """
    lam = f.positive_frequencies
    if lam.size == 0:
        raise InputError("zero polynomial has no analytic part")
    N = int(lam[0])
    q = np.zeros(int(lam[-1]) - N + 1, dtype=np.complex128)
    q[lam - N] = 2.0 * f.positive_coefficients
    return N, q


@dataclass(frozen=True)
class ZeroSet:
    angles: tuple[float, ...]
    residuals: tuple[float, ...]
    touching: tuple[bool, ...] = ()
    rejected: tuple[float, ...] = field(default=(), compare=False)

    def __len__(self) -> int:
        return len(self.angles)

    def to_json_obj(self) -> dict:
        return {"angles": list(self.angles), "residuals": list(self.residuals),
                "touching": list(self.touching)}


@dataclass(frozen=True)
class GapReport:
    zeros: ZeroSet
    max_gap: float
    gap_start: float
    degenerate: bool = False

    @property
    def gap_interval(self) -> tuple[float, float]:
        return (self.gap_start, self.max_gap)

    def to_json_obj(self) -> dict:
        return {"angles": list(self.zeros.angles), "residuals": list(self.zeros.residuals),
                "touching": list(self.zeros.touching), "max_gap": self.max_gap,
                "gap_start": self.gap_start, "degenerate": self.degenerate}

    @classmethod
    def from_json_obj(cls, obj: dict) -> "GapReport":
        zs = ZeroSet(tuple(obj["angles"]), tuple(obj["residuals"]), tuple(obj.get("touching", ())))
        return cls(zs, obj["max_gap"], obj["gap_start"], obj.get("degenerate", False))


def _cyclic_dist(a, b):
    d = np.abs(np.asarray(a) - np.asarray(b)) % 1.0
    return np.minimum(d, 1.0 - d)


def _cluster(angles: np.ndarray, tol: float):
    """Group sorted cyclic angles whose neighbours are closer than ``tol``.

    Returns the angles (the wrapped-around tail group shifted by -1 and moved
    to the front), the permutation applied, and the group start offsets.
    """
    n = angles.size
    perm = np.arange(n)
    if n == 0:
        return angles, perm, np.zeros(0, dtype=int)
    starts = np.flatnonzero(np.diff(angles) >= tol) + 1
    if starts.size and angles[0] + 1.0 - angles[-1] < tol:
        k = starts[-1]
        perm = np.concatenate([perm[k:], perm[:k]])
        angles = np.concatenate([angles[k:] - 1.0, angles[:k]])
        starts = np.concatenate([[0], starts[:-1] + (n - k)])
    else:
        starts = np.concatenate([[0], starts])
    return angles, perm, starts


def _polish_simple(f, lo, hi, flo):
    """Vectorised safeguarded Newton on f inside sign-change brackets."""
    x = 0.5 * (lo + hi)
    for _ in range(80):
        fx, dfx = _real_derivs(f, x, orders=(0, 1))
        left = np.sign(fx) == np.sign(flo)
        lo = np.where(left, x, lo)
        hi = np.where(left, hi, x)
        flo = np.where(left, fx, flo)
        with np.errstate(divide="ignore", invalid="ignore"):
            xn = x - fx / dfx
        bad = ~np.isfinite(xn) | (xn < lo) | (xn > hi)
        xn = np.where(bad, 0.5 * (lo + hi), xn)
        done = (np.abs(xn - x) <= 4e-16) | (fx == 0) | (hi - lo < 1e-14)
        x = np.where(fx == 0, x, xn)
        if np.all(done):
            break
    return x


def _polish_critical(f, x, half_width):
    """Newton on f' around candidate double zeros; stays within the window."""
    lo, hi = x - half_width, x + half_width
    for _ in range(60):
        _, d1, d2 = _real_derivs(f, x)
        with np.errstate(divide="ignore", invalid="ignore"):
            step = d1 / d2
        xn = np.where(np.isfinite(step), x - step, x)
        xn = np.clip(xn, lo, hi)
        if np.all(np.abs(xn - x) <= 4e-16):
            x = xn
            break
        x = xn
    return x


def circle_zeros(f: TrigPoly1D, circle_tol: float = CIRCLE_TOL,
                 refine_tol: float = REFINE_TOL,
                 near_tol: float = NEAR_CIRCLE_TOL) -> ZeroSet:
    """All zeros of f on [0, 1).

    ``refine_tol`` is relative to the coefficient 1-norm.  Roots within
    ``circle_tol`` of the unit circle are accepted as candidates outright;
    roots out to ``near_tol`` are candidates only as part of an angular
    cluster (a split multiple root).  Every candidate is polished on the real
    function and kept only if ``|f(t)| <= refine_tol * sum|c|``.
    """
    if f.is_zero():
        raise InputError("f is identically zero")
    alg = to_algebraic(f)
    p = alg.coeffs
    scale = f.norm1()
    # negligible end terms only add roots near 0 and infinity (and overflow the
    # companion matrix when denormal); P is self-inversive, so trim both ends
    big = np.flatnonzero(np.abs(p) > 1e-14 * np.abs(p).max())
    k = int(big[0])
    p = p[k:len(p) - k]
    try:
        roots = np.roots(p[::-1])
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"polynomial rootfinder did not converge: {exc}") from exc
    if not np.all(np.isfinite(roots)):
        raise NumericalError("polynomial rootfinder returned non-finite roots")
    dev = np.abs(np.abs(roots) - 1.0)
    near = dev <= near_tol
    ang = np.mod(np.angle(roots[near]) / TWO_PI, 1.0)
    on_circle = dev[near] <= circle_tol
    order = np.argsort(ang)
    ang, on_circle, ndev = ang[order], on_circle[order], dev[near][order]

    grp_ang, perm, starts = _cluster(ang, CLUSTER_TOL)
    if not starts.size:
        return ZeroSet((), ())
    sizes = np.diff(np.concatenate([starts, [grp_ang.size]]))
    mean = np.add.reduceat(grp_ang, starts) / sizes
    span = np.maximum.reduceat(grp_ang, starts) - np.minimum.reduceat(grp_ang, starts)
    gdev = np.maximum.reduceat(ndev[perm], starts)
    ok = (sizes > 1) | on_circle[perm][starts]
    if not np.any(ok):
        return ZeroSet((), ())
    t0 = mean[ok]
    w = np.maximum(np.maximum(1e-7, 3.0 * gdev[ok] / TWO_PI), span[ok])

    fm = evaluate(f, t0 - w)
    fp = evaluate(f, t0 + w)
    simple = np.sign(fm) * np.sign(fp) < 0
    t = t0.copy()
    if np.any(simple):
        t[simple] = _polish_simple(f, t0[simple] - w[simple], t0[simple] + w[simple], fm[simple])
    if np.any(~simple):
        t[~simple] = _polish_critical(f, t0[~simple], np.maximum(w[~simple], 1e-6) * 4.0)
    res = np.abs(evaluate(f, t))
    keep = res <= refine_tol * scale
    rejected = tuple(float(x) for x in np.mod(t[~keep], 1.0))
    if rejected:
        log.debug("rejected %d near-circle candidates", len(rejected))
    t, res, touch = np.mod(t[keep], 1.0), res[keep], ~simple[keep]
    t = np.where(1.0 - t < 1e-13, 0.0, t)
    order = np.argsort(t)
    t, res, touch = t[order], res[order], touch[order]

    angles, resid, touching = [], [], []
    for i in range(len(t)):
        if angles and t[i] - angles[-1] < DEDUP_TOL:
            if res[i] < resid[-1]:
                angles[-1], resid[-1] = float(t[i]), float(res[i])
            touching[-1] = touching[-1] or bool(touch[i])
            continue
        angles.append(float(t[i]))
        resid.append(float(res[i]))
        touching.append(bool(touch[i]))
    if len(angles) > 1 and angles[0] + 1.0 - angles[-1] < DEDUP_TOL:
        angles.pop()
        resid.pop()
        touching[0] = touching[0] or touching.pop()
    return ZeroSet(tuple(angles), tuple(resid), tuple(touching), rejected)


def max_gap(z: ZeroSet, tie_tol: float = 1e-12) -> GapReport:
    """Largest cyclic gap between consecutive zeros; ties go to the smallest start."""
    t = np.asarray(z.angles, dtype=float)
    if t.size == 0:
        return GapReport(z, 1.0, 0.0, False)
    gaps = np.diff(np.concatenate([t, [t[0] + 1.0]]))
    best = gaps.max()
    i = int(np.flatnonzero(gaps >= best - tie_tol)[0])
    return GapReport(z, float(gaps[i]), float(t[i]), False)


def gap_of(f: TrigPoly1D, **kwargs) -> GapReport:
    return max_gap(circle_zeros(f, **kwargs))


def sample_values(f: TrigPoly1D, n: int) -> np.ndarray:
    """f at the n points ``j/n`` via one FFT (requires ``n > 2 max|lam|``)."""
    lam = f.frequencies
    if lam.size == 0:
        return np.zeros(n)
    if n <= 2 * int(np.abs(lam).max()):
        return evaluate(f, np.arange(n) / n)
    half = np.zeros(n // 2 + 1, dtype=np.complex128)
    pos = lam > 0
    half[lam[pos]] = f.coefficients[pos]
    return np.fft.irfft(half, n) * n


def dense_gap(f: TrigPoly1D, n: int = 100_000) -> GapReport:
    """Oracle gap from ``n`` uniform samples.

    Sign changes are located by linear interpolation.  A sampled local
    extremum of |f| whose parabolic fit crosses zero counts as a zero as well,
    so near-touching zero pairs between samples are not skipped.
    """
    if f.is_zero():
        raise InputError("f is identically zero")
    v = sample_values(f, n)
    nxt = np.roll(v, -1)
    idx = np.flatnonzero((np.sign(v) != np.sign(nxt)) | (v == 0))
    a, b = v[idx], nxt[idx]
    with np.errstate(divide="ignore", invalid="ignore"):
        frac = np.where(a != b, a / (a - b), 0.0)
    zeros = [(idx + frac) / n]
    prv = np.roll(v, 1)
    mags = np.abs(v)
    sg = np.sign(v)
    dips = np.flatnonzero((mags < np.abs(prv)) & (mags <= np.abs(nxt)) &
                          (np.sign(prv) == sg) & (np.sign(nxt) == sg))
    ym, y0, yp = prv[dips], v[dips], nxt[dips]
    curv = ym - 2 * y0 + yp
    ok = curv != 0
    dips, ym, y0, yp, curv = dips[ok], ym[ok], y0[ok], yp[ok], curv[ok]
    off = 0.5 * (ym - yp) / curv
    vertex = y0 - 0.25 * (ym - yp) * off
    cross = (np.sign(vertex) != np.sign(y0)) | (vertex == 0)
    zeros.append((dips[cross] + off[cross]) / n)
    zeros = np.concatenate(zeros)
    zs = np.sort(np.mod(np.array(zeros), 1.0))
    return max_gap(ZeroSet(tuple(zs.tolist()), tuple(0.0 for _ in zs)))


def _as_poly_coeffs(P) -> np.ndarray:
    if isinstance(P, AlgebraicForm):
        return P.coeffs
    return np.asarray(P, dtype=np.complex128)


def _root_arc_distance(p: np.ndarray, t0: float, t1: float) -> float:
    """Smallest distance from a root of P to the arc ``e^{2 pi i t}``, t in [t0, t1]."""
    nz = np.flatnonzero(p)
    if nz.size == 0 or nz[-1] == nz[0]:
        return math.inf
    roots = np.roots(p[nz[0]: nz[-1] + 1][::-1])
    if roots.size == 0:
        return math.inf
    if t1 - t0 >= 1.0:
        return float(np.min(np.abs(np.abs(roots) - 1.0)))
    ang = np.mod(np.angle(roots) / TWO_PI - t0, 1.0)
    on_arc = ang <= (t1 - t0)
    ends = np.exp(1j * TWO_PI * np.array([t0, t1]))
    d_end = np.min(np.abs(roots[:, None] - ends[None, :]), axis=1)
    d = np.where(on_arc, np.abs(np.abs(roots) - 1.0), d_end)
    return float(d.min())


def arc_index(P, t0: float, t1: float, steps: int = 1024,
              tol: float = 1e-8, max_evals: int = 2 ** 22,
              zero_tol: float = 1e-9) -> float:
    """Total argument change of ``P(e^{2 pi i t})`` for t from t0 to t1, in radians.

    Composite midpoint rule on ``Im(2 pi i z P'(z)/P(z))`` with the node count
    doubled until two successive sums differ by less than ``tol``.
    ``P`` is an AlgebraicForm or ascending coefficients.
    """
    p = _as_poly_coeffs(P)
    if p.size == 0 or not np.any(p):
        raise InputError("zero polynomial")
    hi_first = p[::-1]
    dp = np.polyder(hi_first) if p.size > 1 else np.zeros(1)
    length = t1 - t0
    if length == 0:
        return 0.0
    pscale = float(np.abs(p).sum())
    if _root_arc_distance(p, t0, t1) <= zero_tol:
        raise NumericalError("P has a root on the arc; index undefined")

    def midpoint(n):
        h = length / n
        t = t0 + h * (np.arange(n) + 0.5)
        z = np.exp(1j * TWO_PI * t)
        pv = np.polyval(hi_first, z)
        if np.min(np.abs(pv)) <= zero_tol * pscale:
            raise NumericalError("P vanishes (numerically) on the arc; index undefined")
        return float(np.sum((TWO_PI * 1j * z * np.polyval(dp, z) / pv).imag) * h)

    n = max(2, int(steps))
    prev = midpoint(n)
    used = n
    while True:
        n *= 2
        used += n
        if n > max_evals:
            raise NumericalError(f"arc_index did not converge within {max_evals} nodes")
        cur = midpoint(n)
        if abs(cur - prev) < tol:
            return cur
        prev = cur


def winding_total(P, min_circle_dist: float = 1e-6) -> float:
    """Argument change around the full circle: 2 pi times the roots inside."""
    p = _as_poly_coeffs(P)
    nz = np.flatnonzero(p)
    if nz.size and nz[-1] > 0:
        roots = np.roots(p[: nz[-1] + 1][::-1])
        if roots.size and np.min(np.abs(np.abs(roots) - 1.0)) < min_circle_dist:
            raise NumericalError("a root lies too close to the unit circle")
    return arc_index(p, 0.0, 1.0)
