"""Command-line driver.

    charsums eval --q 7 --chi 3 --n 1 2 3
    charsums sum --q 7 --chi 3 --N 0 --h 5
    charsums moments --q 101 --chi 50 --H 10 --r 2
    charsums lattice --ell 11 --mj 3 --mk 7 --P 1 --B 5
    charsums theorem --config sweep.json --out rows.csv
    charsums chain --config sweep.json --format json --out rows.json
    charsums fit --input rows.csv --stat burgess

Exit status: 0 on success, 1 when a hard check fails, 2 on configuration errors.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import sys

from . import experiments as ex
from .characters import enumerate_characters
from .errors import CharSumError, ConfigError, IoFailure
from .lattice import build_lattice, classify_case, count_points_in_box
from .meanvalue import lemma1_report, lemma2_report, lemma3_report, polya_vinogradov_max
from .report import emit_report, read_report_csv, render_report
from .sums import PrefixTable, dyadic_decompose, interval_sum, max_partial, reconstruct_via_plan


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--config", help="JSON experiment config")
    p.add_argument("--out", default="-", help="output path, '-' for stdout")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--seed", type=int, help="override the config seed")
    p.add_argument("--budget", type=int, help="operation budget for counting kernels")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="charsums", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", parents=[common], help="exact character values")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--chi", type=int, required=True, help="character index mod q")
    p.add_argument("--n", type=int, nargs="+", required=True)

    p = sub.add_parser("sum", parents=[common], help="interval and maximal sums")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--chi", type=int, required=True)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--h", type=int, required=True)

    p = sub.add_parser("moments", parents=[common], help="moment statistics against bound shapes")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--chi", type=int, required=True)
    p.add_argument("--H", type=int, required=True)
    p.add_argument("--r", type=int, default=1)
    p.add_argument("--points", type=int, nargs="*", help="spaced starting points")

    p = sub.add_parser("lattice", parents=[common], help="reduced congruence lattice")
    p.add_argument("--ell", type=int, required=True)
    p.add_argument("--mj", type=int, required=True)
    p.add_argument("--mk", type=int, required=True)
    p.add_argument("--P", type=int, default=1)
    p.add_argument("--B", type=int, default=0)
    p.add_argument("--c0", type=int, default=32)

    for name, helptext in (("theorem", "3r-th moment sweep"), ("chain", "counting-chain sweep")):
        sub.add_parser(name, parents=[common], help=helptext)

    p = sub.add_parser("fit", parents=[common], help="log-log exponent fit of a theorem report")
    p.add_argument("--input", help="CSV produced by 'theorem'; without it the config sweep is run")
    p.add_argument("--stat", choices=("lhs", "burgess"), default="lhs")
    return parser


def _write(text: str, out: str) -> None:
    if out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _load_config(args) -> ex.ExperimentConfig:
    if not args.config:
        raise ConfigError("this command needs --config")
    cfg = ex.ExperimentConfig.from_json(args.config)
    if args.seed is not None:
        cfg.seed = args.seed
    if args.budget is not None:
        cfg.budget = args.budget
    return cfg


def _character(q: int, index: int):
    G = enumerate_characters(q)
    if not 0 <= index < len(G):
        raise ConfigError(f"character index {index} outside [0, {len(G)})")
    return G[index]


def _cmd_eval(args):
    chi = _character(args.q, args.chi)
    recs = [{"n": n, "value": repr(chi(n)), "complex": [chi(n).to_complex().real, chi(n).to_complex().imag]} for n in args.n]
    _write(json.dumps({"q": args.q, "chi": args.chi, "order": chi.order, "conductor": chi.conductor, "values": recs}, indent=1) + "\n", args.out)
    return 0


def _cmd_sum(args):
    table = PrefixTable(_character(args.q, args.chi))
    s = interval_sum(table, args.N, args.h)
    out = {"q": args.q, "chi": args.chi, "N": args.N, "h": args.h, "S": [s.real, s.imag]}
    if args.h >= 1:
        hstar, m = max_partial(table, args.N, args.h)
        t = max(0, (args.h - 1).bit_length())
        plan = dyadic_decompose(args.h, t)
        rec = reconstruct_via_plan(table, args.N, plan)
        out.update(max_h=hstar, max_abs=m, dyadic_pieces=[list(x) for x in plan.pieces], dyadic_sum=[rec.real, rec.imag])
    _write(json.dumps(out, indent=1) + "\n", args.out)
    return 0


def _cmd_moments(args):
    table = PrefixTable(_character(args.q, args.chi))
    reps = [lemma1_report(table, args.H, args.r), lemma2_report(table, args.H, args.r)]
    if args.points:
        reps.append(lemma3_report(table, args.points, args.H))
    out = {"reports": [dataclasses.asdict(r) for r in reps]}
    if table.chi.is_primitive:
        pv = polya_vinogradov_max(table)
        out["polya_vinogradov"] = {"max": pv, "sqrt_q_log_q": math.sqrt(args.q) * math.log(args.q)}
    _write(json.dumps(out, indent=1) + "\n", args.out)
    return 0


def _cmd_lattice(args):
    lat = build_lattice(args.ell, args.mj, args.mk)
    tag = classify_case(lat, args.P, args.c0)
    out = {
        "ell": args.ell, "Mj": args.mj, "Mk": args.mk,
        "basis": [list(v) for v in lat.basis], "det": lat.det,
        "sup_norms": list(lat.basis.sup_norms), "sup_product": lat.basis.sup_product,
        "case": tag.case.value, "delta": tag.delta, "threshold": tag.threshold,
        "points_in_box": count_points_in_box(lat, args.B),
    }
    _write(json.dumps(out, indent=1) + "\n", args.out)
    return 0


def _emit(rows, args):
    if args.out == "-":
        sys.stdout.write(render_report(rows, args.format))
    else:
        emit_report(rows, args.format, args.out)


def _cmd_theorem(args):
    rows = ex.run_theorem_check(_load_config(args))
    _emit(rows, args)
    return 0


def _cmd_chain(args):
    rows = ex.run_chain_check(_load_config(args))
    _emit(rows, args)
    return 1 if any("HARD_FAIL" in row.flags for row in rows) else 0


def _cmd_fit(args):
    if args.input:
        try:
            rows = read_report_csv(args.input)
        except (OSError, KeyError, ValueError) as exc:
            raise ConfigError(f"cannot read report {args.input}: {exc}") from exc
        cfg = None
    else:
        cfg = _load_config(args)
        rows = ex.run_theorem_check(cfg)
    rows = [row for row in rows if math.isfinite(row.lhs) and row.lhs > 0]
    fit = ex.fit_exponent(rows, args.stat)
    rs = sorted({row.r for row in rows})
    out = {"stat": args.stat, "slope": fit.slope, "intercept": fit.intercept, "rows": len(rows), "r": rs}
    if args.stat == "burgess" and len(rs) == 1:
        out["theoretical_exponent"] = ex.burgess_q_exponent(rs[0])
    elif len(rs) == 1:
        # H = q^h recovered from the rows themselves
        fit_h = ex.fit_loglog([row.q for row in rows], [row.H for row in rows])
        out["H_exponent"] = fit_h.slope
        out["theoretical_exponent"] = ex.theorem_q_exponent(rs[0], fit_h.slope)
    _write(json.dumps(out, indent=1) + "\n", args.out)
    return 0


COMMANDS = {
    "eval": _cmd_eval, "sum": _cmd_sum, "moments": _cmd_moments, "lattice": _cmd_lattice,
    "theorem": _cmd_theorem, "chain": _cmd_chain, "fit": _cmd_fit,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except IoFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except CharSumError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
