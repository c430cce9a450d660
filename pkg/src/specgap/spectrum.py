"""Symmetric frequency sets, their zero-gap bounds, and the spectrum families
used in experiments.

A spectrum is a finite set ``S`` of nonzero integer vectors in ``Z^d`` with
``-S = S``.  Two bounds are attached to every spectrum::

    D(S) = sum_{lam in S} 1 / (4 |lam|_2)                 (balls)
    L(S) = sum_{lam in S} |lam|_inf / (4 |lam|_2 ** 2)     (axis-aligned cubes)

Every real trigonometric polynomial with spectrum in ``S`` vanishes somewhere
in every closed ball of diameter ``D(S)`` and in every closed cube of side
``L(S)``.  For the one-dimensional progression ``±{N, N+b, ..., N+Kb}`` with
``b < 2N`` the exact supremal zero-free arc length is ``(K+1)/(bK+2N)``.
"""

from __future__ import annotations

import itertools
import json
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import InputError, UnsupportedRegimeError

FrequencyVector = tuple  # tuple[int, ...], never all zeros


def _as_vector(v) -> tuple[int, ...]:
    if isinstance(v, (int,)) and not isinstance(v, bool):
        return (int(v),)
    try:
        out = tuple(int(x) for x in v)
    except TypeError as exc:
        raise InputError(f"not a frequency vector: {v!r}") from exc
    for x, y in zip(out, v):
        if x != y:
            raise InputError(f"non-integer frequency component in {v!r}")
    return out


def is_positive_representative(v: Sequence[int]) -> bool:
    """True if the first nonzero component is positive."""
    for x in v:
        if x:
            return x > 0
    return False


@dataclass(frozen=True)
class Spectrum:
    """Canonically sorted, negation-closed set of nonzero frequency vectors."""

    d: int
    frequencies: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if self.d < 1:
            raise InputError("dimension must be positive")
        seen = set(self.frequencies)
        if len(seen) != len(self.frequencies):
            raise InputError("duplicate frequencies")
        for v in self.frequencies:
            if len(v) != self.d:
                raise InputError(f"frequency {v} does not have dimension {self.d}")
            if not any(v):
                raise InputError("the zero vector is not allowed in a spectrum")
            if tuple(-x for x in v) not in seen:
                raise InputError(f"spectrum is not symmetric: {v} present, its negative is not")
        if tuple(sorted(self.frequencies)) != self.frequencies:
            object.__setattr__(self, "frequencies", tuple(sorted(self.frequencies)))

    def __len__(self) -> int:
        return len(self.frequencies)

    def __iter__(self):
        return iter(self.frequencies)

    def __contains__(self, v) -> bool:
        return _as_vector(v) in set(self.frequencies)

    @property
    def positive(self) -> tuple[tuple[int, ...], ...]:
        """Canonical half: vectors whose first nonzero component is positive."""
        return tuple(v for v in self.frequencies if is_positive_representative(v))

    def integers(self) -> list[int]:
        """Sorted scalar frequencies of a one-dimensional spectrum."""
        if self.d != 1:
            raise InputError("integers() needs a one-dimensional spectrum")
        return [v[0] for v in self.frequencies]

    def positive_integers(self) -> list[int]:
        return [v for v in self.integers() if v > 0]

    def to_json_obj(self) -> dict:
        return {"d": self.d, "lambdas": [list(v) for v in self.positive]}

    @classmethod
    def from_json_obj(cls, obj: dict) -> "Spectrum":
        try:
            d = int(obj["d"])
            lambdas = obj["lambdas"]
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"malformed spectrum JSON: {exc}") from exc
        vecs = [_as_vector(v) for v in lambdas]
        if not vecs:
            return cls(d, ())
        return make_spectrum(vecs, symmetrize=True)

    def dumps(self) -> str:
        return json.dumps(self.to_json_obj(), separators=(",", ":"))


def make_spectrum(vectors: Iterable, symmetrize: bool = True) -> Spectrum:
    """Build a spectrum from integer vectors (or plain ints for ``d = 1``).

    With ``symmetrize`` the negatives are added; otherwise the input must
    already be symmetric.  The zero vector is always an error.
    """
    vecs = [_as_vector(v) for v in vectors]
    if not vecs:
        raise InputError("empty vector list; use empty_spectrum(d) for the empty spectrum")
    d = len(vecs[0])
    if any(len(v) != d for v in vecs):
        raise InputError("frequency vectors of mixed dimension")
    if any(not any(v) for v in vecs):
        raise InputError("the zero vector is not allowed in a spectrum")
    found = set(vecs)
    if symmetrize:
        found |= {tuple(-x for x in v) for v in vecs}
    return Spectrum(d, tuple(sorted(found)))


def empty_spectrum(d: int = 1) -> Spectrum:
    return Spectrum(d, ())


def _norm2(v) -> float:
    return math.sqrt(sum(x * x for x in v))


def ball_bound(S: Spectrum) -> float:
    """D(S): every polynomial with spectrum in S vanishes in each ball of this diameter."""
    return math.fsum(1.0 / (4.0 * _norm2(v)) for v in S)


def cube_bound(S: Spectrum) -> float:
    """L(S): every polynomial with spectrum S vanishes in each cube of this side."""
    return math.fsum(max(abs(x) for x in v) / (4.0 * sum(x * x for x in v)) for v in S)


@dataclass(frozen=True)
class ProgressionParams:
    """Arithmetic progression ``±{N, N+b, ..., N+Kb}``."""

    N: int
    K: int
    b: int

    def __post_init__(self):
        for name in ("N", "K", "b"):
            val = getattr(self, name)
            if isinstance(val, bool) or int(val) != val:
                raise InputError(f"{name} must be an integer")
        if self.N < 1 or self.b < 1 or self.K < 0:
            raise InputError("need N >= 1, b >= 1, K >= 0")

    @property
    def closed_form_regime(self) -> bool:
        return self.b < 2 * self.N

    @classmethod
    def parse(cls, text: str) -> "ProgressionParams":
        try:
            N, K, b = (int(x) for x in text.split(","))
        except ValueError as exc:
            raise InputError(f"expected N,K,b but got {text!r}") from exc
        return cls(N, K, b)


def closed_form_M(p: ProgressionParams) -> Fraction:
    """Exact supremal zero-free arc length ``(K+1)/(bK+2N)``; requires ``b < 2N``."""
    if not p.closed_form_regime:
        raise UnsupportedRegimeError(
            f"no closed form for b >= 2N (N={p.N}, b={p.b})"
        )
    return Fraction(p.K + 1, p.b * p.K + 2 * p.N)


def gen_progression(p: ProgressionParams) -> Spectrum:
    return make_spectrum([p.N + j * p.b for j in range(p.K + 1)])


def gen_squares(N: int, K: int) -> Spectrum:
    if N < 1 or K < 0:
        raise InputError("need N >= 1, K >= 0")
    return make_spectrum([n * n for n in range(N, N + K + 1)])


def gen_random(Nmax: int, tau: float, seed: int) -> Spectrum:
    """Include each of ``1..Nmax`` independently with probability ``tau``.

    Draws come from Python's ``random.Random`` (Mersenne Twister), whose
    ``random()`` stream is stable across Python versions for a given integer
    seed; the n-th draw decides membership of n.
    """
    if not 0.0 < tau <= 1.0:
        raise InputError("tau must lie in (0, 1]")
    if Nmax < 1:
        raise InputError("Nmax must be positive")
    rng = random.Random(seed)
    chosen = [n for n in range(1, Nmax + 1) if rng.random() < tau]
    if not chosen:
        return empty_spectrum(1)
    return make_spectrum(chosen)


def gen_net(a: Sequence[int]) -> Spectrum:
    """Net ``±{a0 + sum_{i in T} a_i : T ⊆ {1..n}}``; coinciding sums collapse."""
    a = [int(x) for x in a]
    if not a:
        raise InputError("a net needs at least a0")
    if any(x < 1 for x in a):
        raise InputError("net parameters must be positive integers")
    sums = {a[0] + sum(sub) for r in range(len(a)) for sub in itertools.combinations(a[1:], r)}
    return make_spectrum(sorted(sums))


def describe(S: Spectrum) -> str:
    if S.d == 1:
        return "±{" + ",".join(str(n) for n in S.positive_integers()) + "}"
    return "±{" + ",".join("(" + ",".join(map(str, v)) + ")" for v in S.positive) + "}"


def as_progression(S: Spectrum) -> ProgressionParams | None:
    """Recover (N, K, b) if a 1-D spectrum is an arithmetic progression."""
    if S.d != 1 or not len(S):
        return None
    pos = S.positive_integers()
    if len(pos) == 1:
        return ProgressionParams(pos[0], 0, 1)
    steps = {y - x for x, y in zip(pos, pos[1:])}
    if len(steps) != 1:
        return None
    return ProgressionParams(pos[0], len(pos) - 1, steps.pop())
