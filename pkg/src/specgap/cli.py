"""``specgap`` command line.

Every subcommand is a pure function of its flags (randomness comes only from
``--seed``, default 0) returning printable outputs plus the artifact files to
write.  Each run appends a record to ``$SPECGAP_LOG_DIR/runs.jsonl``;
``specgap replay`` recomputes logged runs and compares output digests.

Exit codes: 0 ok, 2 input error, 3 numerical failure, 4 property violation.
"""

from __future__ import annotations

import argparse
import io
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import records
from .errors import InputError, PropertyViolation, SpecgapError
from .extremal import build_extremal, strictify, verify_touching
from .multidim import TrigPolyND, check_cube, check_thm1, fold
from .records import dumps_canonical
from .search import SearchConfig, estimate_M, experiment, family_spectrum, rows_to_csv
from .spectrum import (ProgressionParams, Spectrum, as_progression, ball_bound, closed_form_M,
                       cube_bound, describe, gen_net, gen_progression, gen_random, gen_squares)
from .trigpoly import TrigPoly1D, dense_gap, evaluate, gap_of

DEFAULT_SEED = 0


@dataclass
class Outcome:
    outputs: dict
    artifacts: dict = field(default_factory=dict)  # path -> (text, append)
    lines: list = field(default_factory=list)


def _ints(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise InputError(f"expected comma-separated integers, got {text!r}") from exc


def _read_json(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc


def _spectrum_from_args(args) -> Spectrum:
    chosen = [k for k in ("progression", "squares", "random", "net", "file")
              if getattr(args, k, None) is not None]
    if len(chosen) != 1:
        raise InputError("give exactly one of --progression, --squares, --random, --net, --file")
    kind = chosen[0]
    if kind == "progression":
        return gen_progression(ProgressionParams.parse(args.progression))
    if kind == "squares":
        vals = _ints(args.squares)
        if len(vals) != 2:
            raise InputError("--squares expects N,K")
        return gen_squares(*vals)
    if kind == "random":
        parts = args.random.split(",")
        if len(parts) != 3:
            raise InputError("--random expects Nmax,tau,seed")
        try:
            return gen_random(int(parts[0]), float(parts[1]), int(parts[2]))
        except ValueError as exc:
            raise InputError(str(exc)) from exc
    if kind == "net":
        return gen_net(_ints(args.net))
    return Spectrum.from_json_obj(_read_json(args.file))


def _bounds(S: Spectrum) -> dict:
    out = {"spectrum": S.to_json_obj(), "D": ball_bound(S), "L": cube_bound(S), "M": None}
    prog = as_progression(S)
    if prog is not None and prog.closed_form_regime:
        m = closed_form_M(prog)
        out["M"] = f"{m.numerator}/{m.denominator}"
        out["M_float"] = float(m)
    return out


def cmd_bound(args) -> Outcome:
    S = _spectrum_from_args(args)
    out = _bounds(S)
    lines = [f"S = {describe(S)}", f"D(S) = {out['D']:.12g}", f"L(S) = {out['L']:.12g}",
             f"M(S) = {out['M']}  ({out['M_float']:.12g})" if out["M"] else "M(S): not available"]
    return Outcome(out, {}, lines)


def cmd_spectrum(args) -> Outcome:
    S = _spectrum_from_args(args)
    out = _bounds(S)
    res = Outcome(out, {}, [dumps_canonical(S.to_json_obj())] + cmd_bound(args).lines[1:])
    if args.out:
        res.artifacts[args.out] = (dumps_canonical(S.to_json_obj()) + "\n", False)
    return res


def _samples_csv(f: TrigPoly1D, n: int) -> str:
    t = np.arange(n) / n
    v = evaluate(f, t)
    buf = io.StringIO()
    buf.write("t,f\n")
    for ti, vi in zip(t, v):
        buf.write(f"{ti:.17g},{vi:.17g}\n")
    return buf.getvalue()


def cmd_extremal(args) -> Outcome:
    p = ProgressionParams.parse(args.params)
    e = build_extremal(p)
    rep = verify_touching(e)
    if not rep.passed:
        raise PropertyViolation("; ".join(rep.mismatches))
    poly = e.poly if args.eps is None else strictify(e, args.eps)
    stem = Path(args.out_dir) / f"extremal_{p.N}_{p.K}_{p.b}"
    poly_path = str(stem) + (".json" if args.eps is None else "_strict.json")
    out = {"params": [p.N, p.K, p.b], "eta": f"{e.eta.numerator}/{e.eta.denominator}",
           "a": f"{e.a.numerator}/{e.a.denominator}", "zeros": rep.found_zeros,
           "eps": args.eps, "gap": gap_of(poly).max_gap, "poly": poly.to_json_obj()}
    arts = {poly_path: (dumps_canonical(poly.to_json_obj()) + "\n", False)}
    lines = [f"eta = {out['eta']}, a = M(S) = {out['a']}",
             "touching zeros: " + ", ".join(f"{z:.12g}" for z in rep.found_zeros),
             f"largest strict zero-free arc: {out['gap']:.12g}", f"wrote {poly_path}"]
    if args.emit_samples:
        csv_path = str(stem) + ("_samples.csv" if args.eps is None else "_strict_samples.csv")
        arts[csv_path] = (_samples_csv(poly, args.emit_samples), False)
        lines.append(f"wrote {csv_path}")
        if args.plot:
            from .plotting import plot_extremal
            png = str(stem) + ".png"
            arts[png] = (plot_extremal(e, poly, args.emit_samples), False)
            lines.append(f"wrote {png}")
    return Outcome(out, arts, lines)


def cmd_gap(args) -> Outcome:
    f = TrigPoly1D.from_json_obj(_read_json(args.poly))
    rep = gap_of(f)
    out = rep.to_json_obj()
    lines = [f"zeros: {len(rep.zeros)}", f"max_gap = {rep.max_gap:.12g} starting at {rep.gap_start:.12g}"]
    if args.dense_check:
        dg = dense_gap(f, args.dense_samples)
        out["dense_gap"] = dg.max_gap
        out["dense_agrees"] = abs(dg.max_gap - rep.max_gap) <= 2e-5
        lines.append(f"dense-sampling gap = {dg.max_gap:.12g} "
                     f"({'agrees' if out['dense_agrees'] else 'DISAGREES'} within 2e-5)")
    arts = {}
    if args.out:
        arts[args.out] = (dumps_canonical(out) + "\n", False)
    return Outcome(out, arts, lines)


def cmd_search(args) -> Outcome:
    S = Spectrum.from_json_obj(_read_json(args.spectrum))
    cfg = SearchConfig(S, restarts=args.restarts, seed=args.seed, budget=args.budget)
    res = estimate_M(cfg)
    row = {"schema_version": records.SCHEMA_VERSION, "spectrum": describe(S),
           "lambdas": S.positive_integers(), "D": ball_bound(S), "restarts": args.restarts,
           "seed": args.seed, "budget": args.budget, **res.to_json_obj()}
    prog = as_progression(S)
    if prog is not None and prog.closed_form_regime:
        row["M_closed_float"] = float(closed_form_M(prog))
    arts = {}
    if args.out:
        arts[args.out] = (dumps_canonical(row) + "\n", True)
    lines = [f"S = {describe(S)}", f"best gap = {res.best_gap:.12g} (D(S) = {row['D']:.12g})",
             f"evaluations: {res.evals_used}"]
    return Outcome(row, arts, lines)


def _family_instances(args) -> list[dict]:
    from .search import expand_grid

    fam = args.family
    if fam in ("progression_large_b", "progression"):
        return expand_grid(N=_ints(args.N), K=_ints(args.K), b=_ints(args.b))
    if fam == "squares":
        return expand_grid(N=_ints(args.N), K=_ints(args.K))
    if fam == "random":
        return expand_grid(Nmax=_ints(args.Nmax), tau=[float(x) for x in args.tau.split(",")],
                           seed=_ints(args.spectrum_seed))
    if fam == "net":
        return [{"a": _ints(a)} for a in args.a.split(";")]
    raise InputError(f"unknown family {fam!r}")


def cmd_experiment(args) -> Outcome:
    insts = _family_instances(args)
    for inst in insts:
        family_spectrum(args.family, inst)  # validate before spending search time
    tmpl = SearchConfig(gen_progression(ProgressionParams(1, 0, 1)), restarts=args.restarts,
                        seed=args.seed, budget=args.budget)
    rows = experiment(args.family, insts, tmpl)
    text = "".join(dumps_canonical(r) + "\n" for r in rows)
    arts = {args.out: (text, True)}
    lines = [f"{r['spectrum']}: D = {r['D']:.6g}, M est = {r['M_estimate']}" for r in rows]
    if args.csv:
        arts[args.csv] = (rows_to_csv(rows), False)
        if args.plot:
            from .plotting import plot_experiment
            arts[args.plot] = (plot_experiment(rows), False)
    return Outcome({"rows": rows}, arts, lines)


def _load_nd(path: str) -> TrigPolyND:
    obj = _read_json(path)
    if "terms" in obj:
        return TrigPolyND.from_json_obj(obj)
    f = TrigPoly1D.from_json_obj(obj)
    return TrigPolyND(1, f.frequencies.reshape(-1, 1), f.coefficients)


def cmd_ndcheck(args) -> Outcome:
    f = _load_nd(args.poly)
    chk = (check_thm1 if args.shape == "ball" else check_cube)(f, args.grid, args.refine)
    w = chk.witness
    out = {"shape": args.shape, "passed": chk.passed, "measured": chk.measured,
           "bound": chk.bound, "margin": chk.margin, "center": list(w.center),
           "radius": w.radius, "sign": w.sign, "resolution": w.resolution}
    name = "diameter" if args.shape == "ball" else "side"
    label = "D(S)" if args.shape == "ball" else "L(S)"
    lines = [f"largest sampled zero-free {args.shape} {name}: {chk.measured:.9g}",
             f"{label} = {chk.bound:.9g}  margin {chk.margin:.3g}  {'PASS' if chk.passed else 'FAIL'}"]
    if not chk.passed:
        raise PropertyViolation("\n".join(lines))
    arts = {}
    if args.out:
        arts[args.out] = (dumps_canonical(out) + "\n", False)
    return Outcome(out, arts, lines)


def cmd_fold(args) -> Outcome:
    f = _load_nd(args.poly)
    nu = _ints(args.nu)
    g = fold(f, nu)
    S0, S1 = f.spectrum(), g.spectrum(1e-12)
    out = {"nu": nu, "poly": g.to_json_obj(), "D_before": ball_bound(S0), "D_after": ball_bound(S1),
           "degenerate": g.is_zero()}
    arts = {}
    if args.out:
        arts[args.out] = (dumps_canonical(g.to_json_obj()) + "\n", False)
    lines = [f"D before = {out['D_before']:.9g}, after = {out['D_after']:.9g}",
             "folded polynomial is identically zero" if out["degenerate"] else
             f"remaining frequencies: {len(g.frequencies)}"]
    return Outcome(out, arts, lines)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="specgap", description=__doc__.split("\n\n")[0])
    ap.add_argument("--log-dir", help="run-log directory (default $SPECGAP_LOG_DIR or .specgap)")
    ap.add_argument("--no-log", action="store_true", help="do not append to the run log")
    sub = ap.add_subparsers(dest="command", required=True)

    def spectrum_flags(p):
        p.add_argument("--progression", metavar="N,K,b")
        p.add_argument("--squares", metavar="N,K")
        p.add_argument("--random", metavar="Nmax,tau,seed")
        p.add_argument("--net", metavar="a0,a1,...")
        p.add_argument("--file", metavar="spectrum.json")

    p = sub.add_parser("bound", help="print D(S), L(S) and the closed-form M(S) if known")
    spectrum_flags(p)
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("spectrum", help="print a spectrum as JSON together with its bounds")
    spectrum_flags(p)
    p.add_argument("--out", help="write the spectrum JSON here")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("extremal", help="build the touching-zero polynomial for a progression")
    p.add_argument("--params", required=True, metavar="N,K,b")
    p.add_argument("--eps", type=float, help="strictify with f(t) + f(t + eps)")
    p.add_argument("--emit-samples", type=int, default=0, metavar="n")
    p.add_argument("--plot", action="store_true", help="also render a PNG next to the CSV")
    p.add_argument("--out-dir", default=".")
    p.set_defaults(func=cmd_extremal)

    p = sub.add_parser("gap", help="zeros and largest zero-free arc of a 1-D polynomial")
    p.add_argument("--poly", required=True)
    p.add_argument("--dense-check", action="store_true")
    p.add_argument("--dense-samples", type=int, default=100_000)
    p.add_argument("--out")
    p.set_defaults(func=cmd_gap)

    p = sub.add_parser("search", help="estimate M(S) by multi-start search")
    p.add_argument("--spectrum", required=True)
    p.add_argument("--restarts", type=int, default=16)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--budget", type=int, default=2000)
    p.add_argument("--out", help="append the result row to this JSONL file")
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("experiment", help="evidence table for a spectrum family")
    p.add_argument("--family", required=True,
                   choices=["progression_large_b", "progression", "squares", "random", "net"])
    p.add_argument("--N", default="1")
    p.add_argument("--K", default="1")
    p.add_argument("--b", default="1")
    p.add_argument("--Nmax", default="20")
    p.add_argument("--tau", default="0.2")
    p.add_argument("--spectrum-seed", default="0")
    p.add_argument("--a", default="1,2", help="net parameters; separate several nets with ';'")
    p.add_argument("--restarts", type=int, default=16)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--budget", type=int, default=2000)
    p.add_argument("--out", required=True)
    p.add_argument("--csv")
    p.add_argument("--plot", help="PNG path comparing the estimate with D(S); needs --csv")
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("ndcheck", help="sampled check of the ball or cube bound in T^d")
    p.add_argument("--poly", required=True)
    p.add_argument("--shape", choices=["ball", "cube"], default="ball")
    p.add_argument("--grid", type=int, default=None)
    p.add_argument("--refine", type=int, default=20)
    p.add_argument("--out")
    p.set_defaults(func=cmd_ndcheck)

    p = sub.add_parser("fold", help="fold a polynomial along one of its frequencies")
    p.add_argument("--poly", required=True)
    p.add_argument("--nu", required=True, metavar="n1,n2,...")
    p.add_argument("--out")
    p.set_defaults(func=cmd_fold)

    p = sub.add_parser("replay", help="recompute logged runs and compare output digests")
    p.add_argument("--log", help="run log (default: the current log directory)")
    p.set_defaults(func=None)
    return ap


def _inputs_digest(argv: list[str], args) -> str:
    h = [" ".join(argv)]
    for name in ("poly", "spectrum", "file"):
        path = getattr(args, name, None)
        if isinstance(path, str) and Path(path).is_file():
            h.append(Path(path).read_text(encoding="utf-8"))
    return records.digest("\n".join(h))


def compute(argv: list[str]) -> tuple[argparse.Namespace, Outcome]:
    args = build_parser().parse_args(argv)
    return args, args.func(args)


def _strip_global(argv: list[str]) -> list[str]:
    out, skip = [], False
    for i, a in enumerate(argv):
        if skip:
            skip = False
            continue
        if a == "--log-dir":
            skip = True
            continue
        if a.startswith("--log-dir=") or a == "--no-log":
            continue
        out.append(a)
    return out


def _hoist_global(argv: list[str]) -> list[str]:
    """Move --log-dir/--no-log in front of the subcommand so either position works."""
    front = []
    i = 0
    while i < len(argv):
        a = argv[i]
        if a == "--log-dir" and i + 1 < len(argv):
            front += argv[i:i + 2]
            i += 2
            continue
        if a.startswith("--log-dir=") or a == "--no-log":
            front.append(a)
        i += 1
    return front + _strip_global(argv)


def _replay(args) -> int:
    path = Path(args.log) if args.log else (Path(args.log_dir) if args.log_dir else records.log_dir()) / records.LOG_NAME
    bad = 0
    with open(path, encoding="utf-8") as fh:
        recs = [json.loads(line) for line in fh if line.strip()]
    for rec in recs:
        if rec["command"] == "replay":
            continue
        _, res = compute(rec["argv"])
        ok = records.digest(dumps_canonical(res.outputs)) == rec["outputs_digest"]
        bad += not ok
        print(f"{'ok  ' if ok else 'DIFF'} {' '.join(rec['argv'])}")
    print(f"{len(recs) - bad} reproduced, {bad} differ")
    return 0 if bad == 0 else 4


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(_hoist_global(argv))
    except SystemExit as exc:
        return int(exc.code or 0) and 2
    if args.command == "replay":
        try:
            return _replay(args)
        except (OSError, SpecgapError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return getattr(exc, "exit_code", 2)
    cmd_argv = _strip_global(argv)
    try:
        res = args.func(args)
    except SpecgapError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    for path, (text, append) in res.artifacts.items():
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        mode = "a" if append else "w"
        if isinstance(text, bytes):
            Path(path).write_bytes(text)
        else:
            with open(path, mode, encoding="utf-8", newline="") as fh:
                fh.write(text)
    for line in res.lines:
        print(line)
    if not args.no_log:
        rec = records.RunRecord(args.command, cmd_argv, _inputs_digest(cmd_argv, args),
                                getattr(args, "seed", None), res.outputs, records.now_utc())
        records.append_record(rec, args.log_dir)
    return 0


if __name__ == "__main__":
    sys.exit(main())
