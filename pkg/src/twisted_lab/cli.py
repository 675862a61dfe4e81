"""``twisted-lab`` command line.

Exit codes: 0 when every asserted invariant of the run holds, 2 when one
fails (the failing row is printed to stderr), 1 on usage or budget errors.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import blocks as B
from . import cantor as C
from . import centralizer as K
from . import riesz as R
from . import sampling as S
from . import twisted as T
from .checks import MANIFEST, run_suite
from .group import BudgetExceeded, GroupFunction, from_json, fourier_forward, fourier_inverse, make_group, norm
from .oracles import ORACLE_MAX, naive_forward
from .reports import dumps, emit_plot_data, growth_csv, walk_csv, walk_report, witness_csv

EXIT_OK, EXIT_USAGE, EXIT_FAIL = 0, 1, 2
TRANSFORM_TOL = 1e-10


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# ---------------------------------------------------------------------------
# argument parsing helpers


def parse_int_list(text: str) -> list[int]:
    """``1..20``, ``2,4,64`` or a mix such as ``1..4,8``."""
    out = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        try:
            if ".." in part:
                lo, hi = part.split("..", 1)
                lo, hi = int(lo), int(hi)
                if hi < lo:
                    raise UsageError(f"empty range {part!r}")
                out.extend(range(lo, hi + 1))
            else:
                out.append(int(part))
        except ValueError as exc:
            raise UsageError(f"bad integer list {text!r}") from exc
    if not out:
        raise UsageError("empty integer list")
    return out


def parse_orders(text: str) -> list[int]:
    """``2^10`` (ten copies of Z_2), ``4x9x5`` or ``729``."""
    out = []
    for part in text.lower().split("x"):
        try:
            if "^" in part:
                m, r = part.split("^", 1)
                out.extend([int(m)] * int(r))
            else:
                out.append(int(part))
        except ValueError as exc:
            raise UsageError(f"bad group spec {text!r}") from exc
    return out


def parse_signs(text: str) -> list[int]:
    table = {"+": 1, "+1": 1, "1": 1, "-": -1, "-1": -1}
    try:
        return [table[s.strip()] for s in text.split(",")]
    except KeyError as exc:
        raise UsageError(f"signs must be + or -, got {text!r}") from exc


def parse_exponent(text: str) -> float:
    if text.lower() in ("inf", "infinity"):
        return math.inf
    try:
        return float(text)
    except ValueError as exc:
        raise UsageError(f"bad exponent {text!r}") from exc


def _profile(text: str) -> K.LipschitzProfile:
    try:
        return K.parse_profile(text)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _write(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _load_function(path: str) -> GroupFunction:
    f = from_json(Path(path).read_text())
    if not isinstance(f, GroupFunction):
        f = fourier_inverse(f)
    return f


def _fail(message: str) -> int:
    print(f"FAIL: {message}", file=sys.stderr)
    return EXIT_FAIL


# ---------------------------------------------------------------------------
# commands


def cmd_transform_check(args) -> int:
    rng = np.random.default_rng(args.seed)
    groups = []
    for spec in args.groups.split(";"):
        g = make_group(parse_orders(spec))
        if g.size > ORACLE_MAX:
            raise UsageError(f"group {spec} exceeds the oracle limit of {ORACLE_MAX} points")
        worst, round_trip = 0.0, 0.0
        for _ in range(args.trials):
            f = GroupFunction(g, S.complex_gaussian(rng, g.size))
            fast, ref = fourier_forward(f).values, naive_forward(f).values
            worst = max(worst, float(np.max(np.abs(fast - ref)) / np.max(np.abs(ref))))
            back = fourier_inverse(fourier_forward(f)).values
            round_trip = max(round_trip, float(np.max(np.abs(back - f.values)) / np.max(np.abs(f.values))))
        ok = worst <= TRANSFORM_TOL and round_trip <= TRANSFORM_TOL
        groups.append({"orders": list(g.orders), "max_rel_error": worst, "round_trip_error": round_trip, "pass": ok})
    report = {"seed": args.seed, "trials": args.trials, "tolerance": TRANSFORM_TOL, "groups": groups,
              "pass": all(x["pass"] for x in groups)}
    _write(dumps(report), args.out)
    for x in groups:
        if not x["pass"]:
            return _fail(f"group {x['orders']}: error {max(x['max_rel_error'], x['round_trip_error']):.3e}")
    return EXIT_OK


def cmd_witness(args) -> int:
    report = R.witness(_profile(args.phi), args.alpha, parse_int_list(args.n), args.case, workers=args.workers)
    _write(witness_csv(report, timing=not args.no_timing), args.out)
    if args.plot_dir:
        emit_plot_data(report, args.plot_dir)
    for r in report.rows:
        if not r.pass_b1 or r.pass_b2 is False:
            return _fail(f"row N={r.n}: mho_l1={r.mho_l1!r} bound_b1={r.bound_b1!r} bound_b2={r.bound_b2!r}")
    return EXIT_OK


def cmd_walk(args) -> int:
    ns = parse_int_list(args.n)
    if min(ns) < 1:
        raise UsageError("N must be >= 1")
    report = walk_report(ns)
    _write(walk_csv(report), args.out)
    if args.plot_dir:
        emit_plot_data(report, args.plot_dir)
    return EXIT_OK


def cmd_copies(args) -> int:
    a, eps = parse_int_list(args.a), parse_signs(args.eps)
    spec = C.embedding(args.n, a, eps)
    rng = np.random.default_rng(args.seed)
    samples = [S.random_function(spec.source, rng) for _ in range(args.samples)]
    report = C.copies_report(spec, _profile(args.phi), samples)
    report["seed"] = args.seed
    _write(dumps(report), args.out)
    if not report["pass"]:
        i = int(np.argmax(report["defects"]))
        return _fail(f"sample {i}: defect {report['defects'][i]!r} > bound {report['bound']!r}")
    return EXIT_OK


def cmd_blocks(args) -> int:
    profile = _profile(args.phi)
    if args.schedule == "default":
        report = B.default_growth_report(profile, args.trials, args.seed, args.blocks)
    else:
        weights = [float(c) for c in args.weights.split(",")] if args.weights else None
        dims = parse_int_list(args.dims) if args.dims else None
        if not weights or not dims:
            raise UsageError("--schedule custom needs --weights and --dims")
        report = B.growth_report(B.BlockSpec(tuple(weights), tuple(dims), profile), args.trials, args.seed)
    _write(growth_csv(report), args.out)
    for note in report.notes:
        print(f"note: {note}", file=sys.stderr)
    if args.plot_dir and report.feasible:
        emit_plot_data(report, args.plot_dir)
    if not report.nondecreasing:
        vals = report.feasible
        for r1, r2 in zip(vals, vals[1:]):
            if r2.delta_lower_k < r1.delta_lower_k:
                return _fail(f"block k={r2.k}: delta_lower {r2.delta_lower_k!r} < {r1.delta_lower_k!r} at k={r1.k}")
    if not report.q_pass:
        return _fail(f"sampled Q {report.q_total!r} > bound {report.q_bound!r}")
    return EXIT_OK


def cmd_delta(args) -> int:
    cfg = K.CentralizerConfig(_profile(args.phi), p=math.inf, q=1)
    witnesses = [R.riesz_product(R.make_spec(args.case, n, args.alpha)) for n in parse_int_list(args.n)]
    report = T.delta_report(cfg, witnesses)
    report.update({"profile": cfg.profile.name, "case": args.case, "alpha": args.alpha, "n": parse_int_list(args.n)})
    _write(dumps(report), args.out)
    return EXIT_OK


def _config(args) -> K.CentralizerConfig:
    return K.CentralizerConfig(_profile(args.phi), p=parse_exponent(args.p), q=parse_exponent(args.q))


def _load_pair(path: str, cfg: K.CentralizerConfig) -> T.TwistedPair:
    obj = json.loads(Path(path).read_text())
    try:
        g, f = from_json(obj["g"]), from_json(obj["f"])
    except KeyError as exc:
        raise UsageError(f"pair JSON needs keys 'g' and 'f'; missing {exc.args[0]!r}") from exc
    if not isinstance(g, GroupFunction):
        g = fourier_inverse(g)
    if not isinstance(f, GroupFunction):
        f = fourier_inverse(f)
    return T.TwistedPair(g, f, cfg)


def cmd_twisted(args) -> int:
    cfg = _config(args)
    if args.action == "quasinorm":
        pair = _load_pair(args.pair, cfg)
        report = {"quasinorm": T.twisted_quasinorm(pair)}
    elif args.action == "act":
        pair = _load_pair(args.pair, cfg)
        a = _load_function(args.a)
        out = T.act(a, pair)
        lhs = T.twisted_quasinorm(out)
        bound = (1 + cfg.profile.centralizer_bound) * norm(a, 1) * T.twisted_quasinorm(pair)
        report = {"pair": out.to_json(), "quasinorm": lhs, "bound": bound, "pass": bool(lhs <= bound + 1e-9)}
    else:
        if not args.witness:
            raise UsageError("twisted delta needs at least one --witness")
        report = T.delta_report(cfg, [_load_function(p) for p in args.witness])
    _write(dumps(report), args.out)
    if report.get("pass") is False:
        return _fail(f"act quasinorm {report['quasinorm']!r} > bound {report['bound']!r}")
    return EXIT_OK


def cmd_defect(args) -> int:
    g = make_group(parse_orders(args.group))
    profile = _profile(args.phi)
    p = parse_exponent(args.p)
    if args.map == "kp":
        m, sampler = K.kp_normed(profile, p), S.spectrum_pair(g)
        worst = K.defect_quasilinear(m, sampler, args.trials, args.seed)
        report = K.defect_report(m, args.trials, worst)
    elif args.map == "mho-l1":
        cfg = K.CentralizerConfig(profile, p=p, q=parse_exponent(args.q))
        worst = K.max_defect_l1(cfg, S.l1_pair(g), args.trials, args.seed)
        report = {"map": f"mho-l1[{profile.name},p={cfg.p:g},q={cfg.q:g}]", "trials": args.trials,
                  "max_defect": worst, "bound": profile.centralizer_bound,
                  "pass": bool(worst <= profile.centralizer_bound + 1e-9)}
    else:
        m = K.pointwise_normed(profile, p)
        worst = K.defect_quasilinear(m, S.function_pair(g), args.trials, args.seed)
        report = K.defect_report(m, args.trials, worst)
    _write(dumps(report), args.out)
    if not report["pass"]:
        return _fail(f"{report['map']}: max defect {worst!r} > bound {report['bound']!r}")
    return EXIT_OK


def cmd_suite(args) -> int:
    only = args.only.split(",") if args.only else None
    if only:
        unknown = [n for n in only if n not in MANIFEST]
        if unknown:
            raise UsageError(f"unknown checks: {', '.join(unknown)}")
    report = run_suite(args.seed, only)
    _write(dumps(report), args.out)
    failed = [c["name"] for c in report["checks"] if not c["passed"]]
    if failed:
        return _fail(f"checks failed: {', '.join(failed)}")
    return EXIT_OK


def cmd_list(args) -> int:
    sys.stdout.write("".join(f"{name}\n" for name in MANIFEST))
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="twisted-lab", description="Kalton-Peck centralizer experiments on finite abelian groups.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def out_opts(p, plots=False):
        p.add_argument("--out", help="output file (default: stdout)")
        if plots:
            p.add_argument("--plot-dir", help="directory for two-column plot tables")

    p = sub.add_parser("transform-check", help="fast transforms against the naive DFT")
    p.add_argument("--groups", default="2^10;729;4x9x5", help="';'-separated group specs such as 2^10, 729, 4x9x5")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    out_opts(p)
    p.set_defaults(func=cmd_transform_check)

    p = sub.add_parser("witness", help="Riesz-product witness table")
    p.add_argument("--case", choices=R.CASES, default=R.DDAGGER)
    p.add_argument("--phi", default="id")
    p.add_argument("--alpha", type=float, default=2.0)
    p.add_argument("--n", default="1..20")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--no-timing", action="store_true", help="zero the seconds column for reproducible output")
    out_opts(p, plots=True)
    p.set_defaults(func=cmd_witness)

    def walk_opts(p):
        p.add_argument("--n", default="2,4,64,1024")
        out_opts(p, plots=True)
        p.set_defaults(func=cmd_walk)

    walk_opts(sub.add_parser("walk", help="exact random-walk means"))

    cantor = sub.add_parser("cantor", help="Cantor-group experiments")
    csub = cantor.add_subparsers(dest="cantor_command", required=True, parser_class=_Parser)
    walk_opts(csub.add_parser("walk", help="exact random-walk means"))
    p = csub.add_parser("copies", help="defect of mho against the subcube embedding")
    p.add_argument("--n", type=int, default=8)
    p.add_argument("--a", default="1,3")
    p.add_argument("--eps", default="+,-")
    p.add_argument("--phi", default="id")
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--seed", type=int, default=7)
    out_opts(p)
    p.set_defaults(func=cmd_copies)

    p = sub.add_parser("blocks", help="block map growth diagnostics")
    p.add_argument("--schedule", choices=("default", "custom"), default="default")
    p.add_argument("--phi", default="id")
    p.add_argument("--blocks", type=int, default=B.DEFAULT_BLOCKS)
    p.add_argument("--weights", help="custom schedule weights, comma separated")
    p.add_argument("--dims", help="custom schedule cube dimensions")
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    out_opts(p, plots=True)
    p.set_defaults(func=cmd_blocks)

    p = sub.add_parser("delta", help="lower bound on the distance to linear maps")
    p.add_argument("--case", choices=R.CASES, default=R.DDAGGER)
    p.add_argument("--phi", default="id")
    p.add_argument("--alpha", type=float, default=2.0)
    p.add_argument("--n", default="1..16")
    out_opts(p)
    p.set_defaults(func=cmd_delta)

    p = sub.add_parser("twisted", help="twisted-sum quasinorm, module action and delta on JSON inputs")
    p.add_argument("action", choices=("quasinorm", "act", "delta"))
    p.add_argument("--pair", help="JSON file with keys g and f")
    p.add_argument("--a", help="JSON function acting by convolution")
    p.add_argument("--witness", action="append", help="JSON witness function (repeatable)")
    p.add_argument("--phi", default="id")
    p.add_argument("--p", default="2")
    p.add_argument("--q", default="2")
    out_opts(p)
    p.set_defaults(func=cmd_twisted)

    p = sub.add_parser("defect", help="sampled quasilinear or centralizer defect")
    p.add_argument("--map", choices=("kp", "mho-l1", "pointwise"), default="kp")
    p.add_argument("--group", default="2^8")
    p.add_argument("--phi", default="id")
    p.add_argument("--p", default="2")
    p.add_argument("--q", default="2")
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    out_opts(p)
    p.set_defaults(func=cmd_defect)

    p = sub.add_parser("suite", help="run every named invariant check")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--only", help="comma-separated check names")
    out_opts(p)
    p.set_defaults(func=cmd_suite)

    p = sub.add_parser("list-checks", help="print the invariant manifest")
    p.set_defaults(func=cmd_list)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "twisted":
        if args.action in ("quasinorm", "act") and not args.pair:
            parser.error(f"twisted {args.action} needs --pair")
        if args.action == "act" and not args.a:
            parser.error("twisted act needs --a")
    try:
        return args.func(args)
    except (UsageError, BudgetExceeded, FileNotFoundError) as exc:
        print(f"twisted-lab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        # invalid parameters surfaced by the library (bad subsets, N out of range, ...)
        print(f"twisted-lab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
