"""Acceptance criteria, one test each, at the stated tolerances.

Every test records a ``criterion N: PASS|FAIL`` line; the lines are printed
in the pytest terminal summary and when this file is run as a script.
"""

import functools
import math
import time

import numpy as np
import pytest

from specgap import cli
from specgap.extremal import build_extremal, strictify, verify_touching
from specgap.multidim import fold, fold_positivity, fold_shift, largest_zero_free_ball, random_nd_poly
from specgap.search import SearchConfig, brute_force_M, estimate_M
from specgap.spectrum import (ProgressionParams, ball_bound, closed_form_M, gen_net,
                              gen_progression, gen_random, gen_squares)
from specgap.trigpoly import TrigPoly1D, arc_index, dense_gap, gap_of, winding_total
from fractions import Fraction

PARAMS = [(1, 0, 1), (1, 1, 1), (2, 1, 1), (2, 3, 1), (3, 2, 1), (2, 2, 3), (3, 4, 2)]
RESULTS: list[str] = []


def criterion(number: int, title: str):
    def wrap(fn):
        @functools.wraps(fn)
        def run(*args, **kwargs):
            t0 = time.perf_counter()
            try:
                ok, detail = fn(*args, **kwargs)
            except Exception as exc:
                RESULTS.append(f"criterion {number}: FAIL  {title}  (raised {exc!r})")
                raise
            secs = time.perf_counter() - t0
            RESULTS.append(f"criterion {number}: {'PASS' if ok else 'FAIL'}  {title}  "
                           f"[{detail}; {secs:.1f}s]")
            assert ok, detail
        return run
    return wrap


def random_poly(rng, freqs):
    freqs = list(freqs)
    c = rng.standard_normal(len(freqs)) + 1j * rng.standard_normal(len(freqs))
    return TrigPoly1D.from_positive(freqs, c)


@criterion(1, "closed form and touching-zero grid")
def test_criterion_1_closed_form():
    bad = []
    for p in PARAMS:
        pp = ProgressionParams(*p)
        m = closed_form_M(pp)
        if not (isinstance(m, Fraction) and m == Fraction(p[1] + 1, p[2] * p[1] + 2 * p[0])):
            bad.append(f"{p}: M = {m}")
        rep = verify_touching(build_extremal(pp), tol=1e-9)
        if not (rep.zeros_ok and len(rep.found_zeros) == p[1] + 2):
            bad.append(f"{p}: {rep.mismatches}")
    return not bad, "; ".join(bad) or f"{len(PARAMS)} spectra exact, grids within 1e-9"


@criterion(2, "two-sided gap check")
def test_criterion_2_two_sided():
    rng = np.random.default_rng(2)
    worst_lower, worst_upper, fails = math.inf, -math.inf, []
    for p in PARAMS:
        pp = ProgressionParams(*p)
        e = build_extremal(pp)
        eps = float(e.eta) / 100
        M = float(closed_form_M(pp))
        g = gap_of(strictify(e, eps)).max_gap
        worst_lower = min(worst_lower, g - (float(e.a) - 2 * eps))
        if g < float(e.a) - 2 * eps - 1e-6:
            fails.append(f"{p} strict gap {g}")
        lam = gen_progression(pp).positive_integers()
        for _ in range(500):
            gap = gap_of(random_poly(rng, lam)).max_gap
            worst_upper = max(worst_upper, gap - M)
            if gap > M + 1e-6:
                fails.append(f"{p} random gap {gap} > M")
    return not fails, (f"min(gap - (a - 2eps)) = {worst_lower:.3g}, "
                       f"max(random gap - M) = {worst_upper:.3g}") + ("; " + "; ".join(fails[:3]) if fails else "")


def _family_instances():
    prog = [gen_progression(ProgressionParams(*p)) for p in PARAMS + [(1, 2, 3), (2, 3, 5), (3, 3, 1)]]
    squares = [gen_squares(N, K) for N in range(1, 6) for K in range(0, 5)]
    nets = [gen_net(a) for a in ([1], [2], [1, 2], [3, 1], [1, 1, 2], [2, 3, 5], [1, 2, 4, 8],
                                 [1, 3, 4, 7], [5, 1, 2, 3])]
    rand = [S for S in (gen_random(50, 0.2, s) for s in range(40)) if len(S)][:10]
    return {"progressions": prog, "squares": squares, "nets": nets, "random": rand}


@criterion(3, "ball bound in one dimension, 500 polynomials per family")
def test_criterion_3_theorem1():
    rng = np.random.default_rng(3)
    violations, worst = 0, -math.inf
    for name, insts in _family_instances().items():
        for k in range(500):
            S = insts[k % len(insts)]
            f = random_poly(rng, S.positive_integers())
            excess = gap_of(f).max_gap - ball_bound(S)
            worst = max(worst, excess)
            violations += excess > 1e-9
    return violations == 0, f"{violations} violations, max(gap - D) = {worst:.3g}"


@criterion(4, "asymptotics with b = K, N = K^2")
def test_criterion_4_asymptotics():
    parts, ok = [], True
    for K in (10, 20, 40):
        p = ProgressionParams(K * K, K, K)
        KM = K * float(closed_form_M(p))
        KD = K * ball_bound(gen_progression(p))
        m_ok = abs(KM - 1 / 3) <= 2 / K
        d_ok = abs(KD - math.log(2)) <= 1 / math.sqrt(K)
        ok = ok and m_ok and d_ok
        parts.append(f"K={K}: K*M={KM:.4f} ({'ok' if m_ok else 'off'}), "
                     f"K*D={KD:.4f} vs log 2 ({'ok' if d_ok else 'off'})")
    return ok, "; ".join(parts)


@criterion(5, "index calibration and winding totals")
def test_criterion_5_index():
    rng = np.random.default_rng(5)
    worst_arc, worst_wind = 0.0, 0.0
    pairs = 0
    while pairs < 20:
        a = rng.uniform(0.05, 0.95)
        s = rng.uniform(0.0, 1.0)
        if min(abs(s - a), s, 1 - s) < 0.01:
            continue
        xi = (1 + 1e-4) * np.exp(2j * np.pi * s)
        val = arc_index([-xi, 1.0], 0.0, a)
        expected = math.pi * a - (math.pi if s < a else 0.0)
        worst_arc = max(worst_arc, abs(val - expected))
        pairs += 1
    for _ in range(50):
        n = rng.integers(1, 7)
        radii = np.where(rng.random(n) < 0.5, rng.uniform(0.0, 0.95, n), rng.uniform(1.05, 3.0, n))
        roots = radii * np.exp(2j * np.pi * rng.random(n))
        p = np.polynomial.polynomial.polyfromroots(roots)
        val = winding_total(p)
        worst_wind = max(worst_wind, abs(val - 2 * math.pi * np.sum(radii < 1)))
    ok = worst_arc <= 1e-2 and worst_wind <= 1e-6
    return ok, f"max arc error {worst_arc:.2e} (20 pairs), max winding error {worst_wind:.2e} (50 configs)"


@criterion(6, "folding suite")
def test_criterion_6_folding():
    rng = np.random.default_rng(6)
    coeff_bad = chain_bad = pos_bad = vacuous = 0
    for i in range(200):
        d = 1 + i % 2
        pairs = int(rng.integers(1, 4 if d == 1 else 6))
        f = random_nd_poly(rng, d, pairs)
        # the shift shrinks like 1/|nu|, so the longest frequency leaves the most room
        nu = tuple(f.frequencies[np.argmax(np.linalg.norm(f.frequencies, axis=1))].tolist())
        g = fold(f, nu)
        neg = tuple(-x for x in nu)
        coeff_bad += max(abs(g.coefficient(nu)), abs(g.coefficient(neg))) >= 1e-12
        chain = ball_bound(g.spectrum(1e-12)) - (ball_bound(f.spectrum()) - 1 / (2 * math.hypot(*nu)))
        chain_bad += chain > 1e-12
        ball = largest_zero_free_ball(f, grid_n=24 if d == 2 else 128, refine_iters=3)
        h = f if ball.sign > 0 else type(f)(f.d, f.frequencies, -f.coefficients)
        res = fold_positivity(h, nu, ball.center, 0.95 * ball.radius, samples=1000)
        vacuous += res.degenerate
        pos_bad += not res.passed
    ok = coeff_bad == 0 and chain_bad == 0 and pos_bad == 0
    return ok, (f"coefficient failures {coeff_bad}, bound-chain failures {chain_bad}, "
                f"positivity failures {pos_bad} ({vacuous} vacuous of 200)")


@pytest.mark.slow
@criterion(7, "search convergence, 32 restarts, budget 2000")
def test_criterion_7_search():
    parts, ok = [], True
    for p in PARAMS:
        pp = ProgressionParams(*p)
        S = gen_progression(pp)
        M = float(closed_form_M(pp))
        est = estimate_M(SearchConfig(S, restarts=32, seed=0, budget=2000)).best_gap
        close = M - 5e-3 <= est <= M + 1e-6
        line = f"{p}: M-est={M - est:.1e}"
        if len(S) <= 6:
            bf = brute_force_M(S)
            close = close and est >= bf - 1e-6
            line += f", est-brute={est - bf:.1e}"
        ok = ok and close
        parts.append(line + ("" if close else " MISS"))
    return ok, "; ".join(parts)


@criterion(8, "rootfinder gap equals dense-sampling gap")
def test_criterion_8_oracle():
    rng = np.random.default_rng(8)
    worst = 0.0
    for _ in range(100):
        k = int(rng.integers(1, 5))
        lam = sorted(rng.choice(np.arange(1, 21), size=k, replace=False))
        f = random_poly(rng, lam)
        worst = max(worst, abs(gap_of(f).max_gap - dense_gap(f, 100_000).max_gap))
    return worst <= 2e-5, f"max |difference| = {worst:.2e} over 100 instances"


def _run_all_commands(root):
    spec = root / "s.json"
    spec.write_text('{"d":1,"lambdas":[[2],[3],[5]]}')
    poly = root / "p.json"
    poly.write_text('{"d":2,"terms":[{"lambda":[1,0],"re":1.0,"im":0.5},{"lambda":[-1,0],"re":1.0,"im":-0.5},'
                    '{"lambda":[1,1],"re":-0.3,"im":0.0},{"lambda":[-1,-1],"re":-0.3,"im":0.0}]}')
    cmds = [
        ["spectrum", "--random", "30,0.3,11", "--out", str(root / "spec.json")],
        ["extremal", "--params", "3,4,2", "--eps", "0.0005", "--emit-samples", "500", "--plot",
         "--out-dir", str(root)],
        ["search", "--spectrum", str(spec), "--restarts", "3", "--seed", "9", "--budget", "300",
         "--out", str(root / "search.jsonl")],
        ["experiment", "--family", "random", "--Nmax", "12", "--tau", "0.3", "--spectrum-seed", "1,2",
         "--restarts", "2", "--seed", "4", "--budget", "200", "--out", str(root / "exp.jsonl"),
         "--csv", str(root / "exp.csv"), "--plot", str(root / "exp.png")],
        ["ndcheck", "--poly", str(poly), "--grid", "32", "--out", str(root / "nd.json")],
        ["fold", "--poly", str(poly), "--nu", "1,0", "--out", str(root / "fold.json")],
    ]
    for c in cmds:
        assert cli.main(["--no-log"] + c) == 0, c
    return {p.name: p.read_bytes() for p in sorted(root.iterdir()) if p.name not in ("s.json", "p.json")}


@criterion(9, "seeded commands give byte-identical artifacts")
def test_criterion_9_determinism(tmp_path, capsys):
    a = _run_all_commands(_mk(tmp_path / "a"))
    b = _run_all_commands(_mk(tmp_path / "b"))
    capsys.readouterr()
    same = a.keys() == b.keys() and all(a[k] == b[k] for k in a)
    diff = [k for k in a if a.get(k) != b.get(k)]
    return same, f"{len(a)} artifacts compared" + (f", differing: {diff}" if diff else "")


def _mk(path):
    path.mkdir(parents=True)
    return path


if __name__ == "__main__":
    import sys

    code = pytest.main([__file__, "-v", "-p", "no:cacheprovider"])
    sys.exit(code)
