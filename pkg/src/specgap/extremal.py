"""Touching-zero polynomials for arithmetic-progression spectra.

For ``S = ±{N, N+b, ..., N+Kb}`` with ``b < 2N`` put ``eta = 1/(bK+2N)``,
``tau = exp(2 pi i eta)`` and

    Q(z) = c * prod_{j=1..K} (z^b - tau^{jb}),    Q(1) = -i,
    f(t) = Re(e^{2 pi i N t} Q(e^{2 pi i t})).

Then ``f >= 0`` on ``[0, a]``, ``a = (K+1) eta``, vanishing exactly on the
grid ``{k eta : 0 <= k <= K+1}``.  ``f(t) + f(t + eps)`` is strictly positive
inside that interval and keeps the same spectrum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import InputError, PropertyViolation
from .spectrum import ProgressionParams, closed_form_M
from .trigpoly import TWO_PI, TrigPoly1D, circle_zeros, evaluate


@dataclass(frozen=True, eq=False)
class ExtremalConstruction:
    params: ProgressionParams
    eta: Fraction
    tau: complex
    a: Fraction
    c: complex
    q: np.ndarray  # ascending coefficients of Q
    poly: TrigPoly1D
    root_powers: tuple[complex, ...]  # tau^{jb}, j = 1..K

    def Q(self, z):
        """Q in product form, accurate where the expanded coefficients cancel."""
        z = np.asarray(z, dtype=np.complex128)
        out = np.full(z.shape, self.c, dtype=np.complex128)
        zb = z ** self.params.b
        for w in self.root_powers:
            out = out * (zb - w)
        return out

    def F(self, t):
        """The complex function whose real part is the construction."""
        z = np.exp(1j * TWO_PI * np.asarray(t, dtype=float))
        return z ** self.params.N * self.Q(z)

    @property
    def zero_grid(self) -> list[Fraction]:
        return [k * self.eta for k in range(self.params.K + 2)]

    def with_normalizer(self, factor: complex) -> "ExtremalConstruction":
        """Same construction with ``c`` multiplied by ``factor`` (negative controls)."""
        return _assemble(self.params, self.eta, self.tau, self.c * factor, self.q / self.c,
                         self.root_powers)


def _monic_product(b: int, roots_pow: list[complex]) -> np.ndarray:
    q = np.array([1.0 + 0j])
    for w in roots_pow:
        factor = np.zeros(b + 1, dtype=np.complex128)
        factor[0] = -w
        factor[b] = 1.0
        q = np.convolve(q, factor)
    return q


def _assemble(p, eta, tau, c, monic, root_powers) -> ExtremalConstruction:
    q = c * monic
    # f = Re(sum_m q_m e^{2 pi i (N+m) t}); only m = b*j terms are present
    freqs = np.array([p.N + p.b * j for j in range(p.K + 1)])
    coeffs = 0.5 * q[:: p.b][: p.K + 1]
    poly = TrigPoly1D.from_positive(freqs, coeffs)
    return ExtremalConstruction(p, eta, tau, (p.K + 1) * eta, c, q, poly, tuple(root_powers))


def build_extremal(p: ProgressionParams) -> ExtremalConstruction:
    a = closed_form_M(p)  # raises outside b < 2N
    eta = Fraction(1, p.b * p.K + 2 * p.N)
    tau = complex(np.exp(2j * math.pi * float(eta)))
    roots_pow = [complex(np.exp(2j * math.pi * float(j * p.b * eta))) for j in range(1, p.K + 1)]
    monic = _monic_product(p.b, roots_pow)
    q1 = np.prod([1.0 - w for w in roots_pow]) if roots_pow else 1.0 + 0j
    if abs(q1) < 1e-300:
        raise PropertyViolation("Q(1) vanished; tau^(jb) = 1 should be impossible for b < 2N")
    c = -1j / q1
    e = _assemble(p, eta, tau, c, monic, roots_pow)
    assert e.a == a
    return e


@dataclass
class TouchingReport:
    passed: bool
    zeros_ok: bool
    nonneg_ok: bool
    slope_ok: bool
    expected_zeros: list[float]
    found_zeros: list[float]
    min_value: float
    slope_rel_error: float
    mismatches: list[str] = field(default_factory=list)


def verify_touching(e: ExtremalConstruction, tol: float = 1e-9,
                    samples: int = 10_000) -> TouchingReport:
    """Check the zero grid, nonnegativity on [0, a] and the slope of arg F.

    ``tol`` is absolute for zero locations and relative to the coefficient
    1-norm for the nonnegativity check.
    """
    p = e.params
    a = float(e.a)
    expected = [float(x) for x in e.zero_grid]
    mismatches = []

    zs = np.array(circle_zeros(e.poly).angles)
    # bring zeros within tol below 1 (i.e. near 0) to the start of the window
    zs = np.where(zs > 1.0 - tol, zs - 1.0, zs)
    found = sorted(float(z) for z in zs if -tol <= z <= a + tol)
    zeros_ok = len(found) == len(expected) and all(
        abs(x - y) <= tol for x, y in zip(found, expected))
    if not zeros_ok:
        mismatches.append(f"zero grid mismatch: expected {expected}, found {found}")

    t = np.linspace(0.0, a, samples)
    vals = evaluate(e.poly, t)
    min_value = float(vals.min())
    nonneg_ok = min_value >= -tol * e.poly.norm1()
    if not nonneg_ok:
        mismatches.append(f"f dips to {min_value:.3e} on [0, a]")

    target = math.pi * (p.b * p.K + 2 * p.N)
    eta = float(e.eta)
    worst = 0.0
    for k in range(p.K + 1):
        ts = np.linspace(k * eta, (k + 1) * eta, 66)[1:-1]
        slope = np.diff(np.angle(e.F(ts))) / np.diff(ts)
        worst = max(worst, float(np.max(np.abs(slope - target))) / target)
    slope_ok = worst <= 0.01
    if not slope_ok:
        mismatches.append(f"arg F slope off by {100 * worst:.2f}% of pi(bK+2N)")

    return TouchingReport(zeros_ok and nonneg_ok and slope_ok, zeros_ok, nonneg_ok, slope_ok,
                          expected, found, min_value, worst, mismatches)


def strictify(e: ExtremalConstruction, eps: float | None = None,
              samples: int = 10_000) -> TrigPoly1D:
    """``g(t) = f(t) + f(t + eps)``, strictly positive on ``[eps, a - eps]``."""
    eta = float(e.eta)
    if eps is None:
        eps = eta / 100.0
    if not 0.0 < eps < eta / 2.0:
        raise InputError(f"eps must lie in (0, eta/2) = (0, {eta / 2:.6g})")
    f = e.poly
    g = TrigPoly1D(f.frequencies, f.coefficients * (1.0 + np.exp(1j * TWO_PI * f.frequencies * eps)))
    t = np.linspace(eps, float(e.a) - eps, samples)
    # product form: the expanded coefficients cancel badly near the touching zeros
    margin = float((e.F(t).real + e.F(t + eps).real).min())
    if not margin > 0.0:
        raise PropertyViolation(f"strictified polynomial not positive on [eps, a-eps] (min {margin:.3e})")
    return g


@dataclass(frozen=True, eq=False)
class CorollaryResult:
    alpha: float
    delta: float
    params: ProgressionParams
    poly: TrigPoly1D
    shift: float
    window: tuple[float, float]  # interval on which poly > 0 was checked


def corollary_alpha(I_length: float, N: int, I_start: float = 0.0,
                    samples: int = 10_000) -> CorollaryResult:
    """Polynomial with spectrum in ``±[N, alpha N]`` positive on a given interval.

    ``alpha = 1 + 4/delta`` with ``delta = 1 - |I|``; the interval-spectrum
    construction with ``K = floor((alpha-1) N)`` is strictified and translated
    so its positivity window is centred on ``[I_start, I_start + I_length]``.
    """
    if not 0.0 < I_length < 1.0:
        raise InputError("I_length must lie in (0, 1)")
    if N < 1:
        raise InputError("N must be positive")
    delta = 1.0 - I_length
    alpha = 1.0 + 4.0 / delta
    K = math.floor((alpha - 1.0) * N)
    params = ProgressionParams(N, K, 1)
    e = build_extremal(params)
    eps = float(e.eta) / 100.0
    g = strictify(e, eps)
    a = float(e.a)
    shift = I_start - 0.5 * (a - I_length)
    poly = g.translated(shift)
    lo = I_start
    vals = evaluate(poly, np.linspace(lo, lo + I_length, samples))
    if not vals.min() > 0.0:
        raise PropertyViolation("corollary polynomial is not positive on the requested interval")
    if params.N + params.K > alpha * N + 1e-9:
        raise PropertyViolation("spectrum escapes [N, alpha N]")
    return CorollaryResult(alpha, delta, params, poly, shift, (lo, lo + I_length))


