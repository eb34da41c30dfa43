"""``pb`` command-line interface.

Subcommands: ``report``, ``certify``, ``ray`` and ``oracle-check``.
Exit codes: 0 when every verdict passes, 1 on a verdict failure, 2 on a
usage or validation error.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from pathlib import Path
from typing import Sequence, TextIO

import numpy as np

from . import __version__
from .bounds import BoundReport, bound_report
from .core import DEFAULT_TOL, ParameterVector, make_parameters
from .errors import PoissonBinomialError, TooLarge
from .oracle import MAX_BRUTE_N, brute_check
from .ratio import RatioProfile, StructureReport, certify_structure, ratio_profile
from .ray import envelope
from .sweep import ConfigError, SweepConfig, SweepSummary, parse_checks, run_sweep

SCHEMA = "pbratio.report"
SCHEMA_VERSION = 1

EXIT_OK = 0
EXIT_VERDICT = 1
EXIT_USAGE = 2


class UsageError(Exception):
    pass


def _fmt(x: float | None) -> str:
    if x is None:
        return "-"
    return f"{x:.17g}"


def _json_float(x: float | None) -> float | None:
    if x is None or not math.isfinite(x):
        return None
    return float(x)


def parse_param_list(text: str) -> list[float]:
    try:
        return [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError as exc:
        raise UsageError(f"cannot parse parameter list {text!r}: {exc}") from None


def read_param_file(path: str | Path) -> list[float]:
    """One probability per line; ``#`` starts a comment."""
    values = []
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    for lineno, line in enumerate(lines, start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        try:
            values.append(float(body))
        except ValueError:
            raise UsageError(f"{path}:{lineno}: not a number: {body!r}") from None
    return values


def _load_parameters(args: argparse.Namespace) -> tuple[ParameterVector, str]:
    if args.params is not None:
        values, source = parse_param_list(args.params), "argument"
    elif getattr(args, "file", None) is not None:
        values, source = read_param_file(args.file), str(args.file)
    else:
        raise UsageError("give parameters with -p or -f")
    return make_parameters(values), source


def _parse_range(text: str, kind=int) -> tuple:
    parts = text.split(":")
    try:
        return tuple(kind(x) for x in parts)
    except ValueError:
        raise UsageError(f"malformed range {text!r}") from None


# --------------------------------------------------------------------------- report


def build_report_document(
    pv: ParameterVector,
    source: str = "argument",
    include_pmf: bool = False,
    tol: float = DEFAULT_TOL,
) -> tuple[dict, RatioProfile, BoundReport, StructureReport]:
    profile = ratio_profile(pv, tol=tol)
    bounds = bound_report(pv, tol=tol, profile=profile)
    structure = certify_structure(pv, tol=tol, profile=profile)
    passed = bounds.passed and structure.passed
    doc: dict = {
        "schema": SCHEMA,
        "schema_version": SCHEMA_VERSION,
        "input": {"source": source, "p": pv.as_list(), "tol": tol},
        "moments": {
            "n": pv.n,
            "lambda": pv.lam,
            "delta": pv.delta,
            "p_star": pv.p_star,
            "variance": pv.variance,
            "support_size": pv.support_size,
        },
        "ratio": {
            "rho": profile.rho,
            "log_rho": profile.log_rho,
            "argmax": list(profile.argmax_set),
            "window": list(profile.window),
            "log_r": [_json_float(v) for v in profile.log_r],
        },
        "bounds": {
            "theorem1_bound": bounds.theorem1_bound,
            "theorem2_lower": bounds.theorem2_lower,
            "theorem2_upper": bounds.theorem2_upper,
            "tv_exact": bounds.tv_exact,
            "barbour_hall": bounds.barbour_hall,
            "remark1_primary": bounds.remark1_primary,
            "remark1_pstar": bounds.remark1_pstar,
            "remark1_delta_chain": (
                list(bounds.remark1_delta_chain) if bounds.remark1_delta_chain else None
            ),
            "verdicts": {k: v.as_dict() for k, v in bounds.verdicts.items()},
        },
        "structure": {"verdicts": {k: v.as_dict() for k, v in structure.verdicts.items()}},
        "conjecture": {
            "bound": bounds.conjecture_bound,
            "gap": bounds.conjecture_gap,
            "counterexample": bounds.conjecture_gap < 0,
        },
        "verdict": "pass" if passed else "fail",
    }
    if include_pmf:
        doc["pmf"] = [float(v) for v in profile.pmf.masses]
    return doc, profile, bounds, structure


def _write_report_text(doc: dict, out: TextIO) -> None:
    m = doc["moments"]
    r = doc["ratio"]
    b = doc["bounds"]
    w = out.write
    w(f"p            = {','.join(repr(v) for v in doc['input']['p'])}\n")
    w(f"n            = {m['n']}  (support size {m['support_size']})\n")
    for key in ("lambda", "delta", "p_star", "variance"):
        w(f"{key:<12} = {_fmt(m[key])}\n")
    w(f"rho          = {_fmt(r['rho'])}\n")
    w(f"log rho      = {_fmt(r['log_rho'])}\n")
    w(f"argmax       = {r['argmax']}  window {r['window']}\n")
    w(f"tv exact     = {_fmt(b['tv_exact'])}\n")
    if "pmf" in doc:
        w("pmf:\n")
        for x, v in enumerate(doc["pmf"]):
            w(f"  {x:>4}  {_fmt(v)}\n")
    w("\nbounds:\n")
    for key in ("theorem1_bound", "theorem2_lower", "theorem2_upper", "barbour_hall",
                "remark1_primary", "remark1_pstar"):
        w(f"  {key:<18} {_fmt(b[key])}\n")
    chain = b["remark1_delta_chain"]
    w(f"  {'remark1_delta_chain':<18} {'-' if chain is None else ', '.join(_fmt(c) for c in chain)}\n")
    w("\nverdicts:\n")
    w(f"  {'check':<28} {'result':<6} margin\n")
    for section in ("bounds", "structure"):
        for name, v in doc[section]["verdicts"].items():
            res = "pass" if v["passed"] else "FAIL"
            w(f"  {name:<28} {res:<6} {_fmt(v['margin'])}\n")
    c = doc["conjecture"]
    note = "COUNTEREXAMPLE to the open conjecture" if c["counterexample"] else "measured only"
    w(f"\nconjecture gap 1/(1-delta) - rho = {_fmt(c['gap'])}  ({note})\n")
    w(f"verdict: {doc['verdict'].upper()}\n")


def cmd_report(args: argparse.Namespace, out: TextIO) -> int:
    pv, source = _load_parameters(args)
    doc, *_ = build_report_document(pv, source, include_pmf=args.pmf, tol=args.tol)
    if args.json:
        json.dump(doc, out, indent=2)
        out.write("\n")
    else:
        _write_report_text(doc, out)
    if doc["verdict"] != "pass":
        print("pb report: verdict failure (see FAIL lines)", file=sys.stderr)
        return EXIT_VERDICT
    return EXIT_OK


# --------------------------------------------------------------------------- certify


def summary_document(summary: SweepSummary) -> dict:
    cfg = summary.config
    doc = {
        "schema": "pbratio.certify",
        "schema_version": SCHEMA_VERSION,
        "config": {
            "seed": cfg.seed,
            "trials": cfg.trials,
            "n_range": list(cfg.n_range),
            "p_max": cfg.p_max,
            "lambda_cap": cfg.lambda_cap,
            "checks": list(cfg.checks),
        },
        "checks": {
            name: {
                "passed": t.passed,
                "failed": t.failed,
                "skipped": t.skipped,
                "min_margin": t.min_margin,
                "first_failure": t.first_failure,
            }
            for name, t in summary.tallies.items()
        },
        "first_failure": None,
        "conjecture": None,
        "verdict": "pass" if summary.passed else "fail",
    }
    if summary.first_failure is not None:
        ff = summary.first_failure
        doc["first_failure"] = {
            "trial": ff.index,
            "check": summary.first_failure_check,
            "p": list(ff.p),
            "replay": "pb report -p " + ",".join(repr(v) for v in ff.p),
        }
    if summary.conjecture_min_gap is not None:
        arg = summary.conjecture_argmin
        doc["conjecture"] = {
            "min_gap": summary.conjecture_min_gap,
            "trial": arg.index,
            "p": list(arg.p),
            "counterexamples": summary.conjecture_counterexamples,
        }
    return doc


def _write_summary_text(doc: dict, out: TextIO) -> None:
    c = doc["config"]
    cap = "none" if c["lambda_cap"] is None else repr(c["lambda_cap"])
    out.write(
        f"certify seed={c['seed']} trials={c['trials']} n={c['n_range'][0]}:{c['n_range'][1]} "
        f"pmax={c['p_max']!r} lambda_cap={cap}\n"
    )
    out.write(f"{'check':<28} {'pass':>8} {'fail':>6} {'skip':>8}  min_margin\n")
    for name, t in doc["checks"].items():
        out.write(
            f"{name:<28} {t['passed']:>8} {t['failed']:>6} {t['skipped']:>8}  {_fmt(t['min_margin'])}\n"
        )
    if doc["first_failure"]:
        ff = doc["first_failure"]
        out.write(f"first failure: trial {ff['trial']} check {ff['check']}\n")
        out.write(f"  replay: {ff['replay']}\n")
    conj = doc["conjecture"]
    if conj is not None:
        out.write(
            f"conjecture (measured, not asserted): min gap {_fmt(conj['min_gap'])} "
            f"at trial {conj['trial']}; counterexamples {conj['counterexamples']}\n"
        )
        out.write("  argmin p: " + ",".join(repr(v) for v in conj["p"]) + "\n")
    out.write(f"verdict: {doc['verdict'].upper()}\n")


def cmd_certify(args: argparse.Namespace, out: TextIO) -> int:
    n_range = _parse_range(args.n)
    if len(n_range) != 2:
        raise UsageError(f"--n expects min:max, got {args.n!r}")
    config = SweepConfig(
        seed=args.seed,
        trials=args.trials,
        n_range=n_range,
        p_max=args.pmax,
        lambda_cap=args.lambda_cap,
        checks=parse_checks(args.checks),
        tol=args.tol,
    )
    summary = run_sweep(config, workers=args.workers)
    doc = summary_document(summary)
    if args.json:
        json.dump(doc, out, indent=2)
        out.write("\n")
    else:
        _write_summary_text(doc, out)
    return EXIT_OK if summary.passed else EXIT_VERDICT


# --------------------------------------------------------------------------- ray


def cmd_ray(args: argparse.Namespace, out: TextIO) -> int:
    pv, _ = _load_parameters(args)
    grid_spec = _parse_range(args.grid, float)
    if len(grid_spec) != 3:
        raise UsageError(f"--grid expects min:max:count, got {args.grid!r}")
    lo, hi, count = grid_spec
    if count != int(count) or count < 1:
        raise UsageError(f"grid count must be a positive integer, got {count}")
    grid = np.linspace(lo, hi, int(count)) if count > 1 else np.array([hi])
    if int(count) > 1 and not lo < hi:
        raise UsageError(f"grid needs min < max, got {lo}:{hi}")
    profile = envelope(pv, grid)

    header = ["t", "f", "argmax_x"]
    for x in profile.xs:
        header += [f"L_{x}", f"dL_{x}"]
    rows = []
    for i, t in enumerate(profile.t_grid):
        row = [_fmt(t), _fmt(profile.f[i]), ";".join(str(x) for x in profile.envelope_argmax[i])]
        for j in range(len(profile.xs)):
            row += [_fmt(profile.L[i, j]), _fmt(profile.L_prime[i, j])]
        rows.append(row)

    if args.csv:
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
    else:
        widths = [max(len(h), *(len(r[k]) for r in rows)) for k, h in enumerate(header)]
        out.write("  ".join(h.rjust(wd) for h, wd in zip(header, widths)) + "\n")
        for r in rows:
            out.write("  ".join(c.rjust(wd) for c, wd in zip(r, widths)) + "\n")
    return EXIT_OK


# --------------------------------------------------------------------------- oracle-check


def cmd_oracle_check(args: argparse.Namespace, out: TextIO) -> int:
    pv, _ = _load_parameters(args)
    if pv.n > MAX_BRUTE_N:
        raise TooLarge(f"oracle-check needs n <= {MAX_BRUTE_N}, got {pv.n}")
    res = brute_check(pv.as_list())
    ok = res["pmf_max_abs_error"] <= args.tol
    out.write(f"pmf vs enumeration: max abs error {_fmt(res['pmf_max_abs_error'])} "
              f"{'pass' if ok else 'FAIL'}\n")
    for rep in res["representations"]:
        ok &= rep.passed
        names = ", ".join(f"{c.name}={_fmt(c.rel_error)}" for c in rep.checks)
        skipped = f" (skipped {', '.join(rep.skipped)})" if rep.skipped else ""
        out.write(f"x={rep.x:<3} {'pass' if rep.passed else 'FAIL'}  rel errors: {names}{skipped}\n")
    wx = res["weight_exchange_max_rel_error"]
    wx_ok = wx <= 1e-12
    ok &= wx_ok
    out.write(f"weight exchange: max rel error {_fmt(wx)} {'pass' if wx_ok else 'FAIL'}\n")
    out.write(f"verdict: {'PASS' if ok else 'FAIL'}\n")
    return EXIT_OK if ok else EXIT_VERDICT


# --------------------------------------------------------------------------- entry


def _add_params(p: argparse.ArgumentParser, allow_file: bool = True) -> None:
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("-p", "--params", help="comma-separated probabilities in [0, 1)")
    if allow_file:
        g.add_argument("-f", "--file", help="file with one probability per line, # comments")


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse exits 2 already; keep message format
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="pb", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    rep = sub.add_parser("report", help="density ratio, bounds and verdicts for one vector")
    _add_params(rep)
    rep.add_argument("--json", action="store_true", help="schema-versioned JSON document")
    rep.add_argument("--pmf", action="store_true", help="include the probability masses")
    rep.add_argument("--tol", type=float, default=DEFAULT_TOL)
    rep.set_defaults(func=cmd_report)

    cert = sub.add_parser("certify", help="randomized sweep over all checks")
    cert.add_argument("--seed", type=int, required=True)
    cert.add_argument("--trials", type=int, required=True)
    cert.add_argument("--n", required=True, metavar="MIN:MAX")
    cert.add_argument("--pmax", type=float, required=True)
    cert.add_argument("--lambda-cap", type=float, default=None)
    cert.add_argument("--checks", default="all", help="'all' or comma list of check names")
    cert.add_argument("--workers", type=int, default=1)
    cert.add_argument("--json", action="store_true")
    cert.add_argument("--tol", type=float, default=DEFAULT_TOL)
    cert.set_defaults(func=cmd_certify)

    ray = sub.add_parser("ray", help="L_x(t), derivatives and envelope along t*p")
    _add_params(ray)
    ray.add_argument("--grid", default="0.0001:1:101", metavar="MIN:MAX:COUNT")
    ray.add_argument("--csv", action="store_true")
    ray.set_defaults(func=cmd_ray)

    orc = sub.add_parser("oracle-check", help="brute-force cross-checks (n <= 20)")
    _add_params(orc)
    orc.add_argument("--tol", type=float, default=DEFAULT_TOL)
    orc.set_defaults(func=cmd_oracle_check)
    return parser


def main(argv: Sequence[str] | None = None, out: TextIO | None = None) -> int:
    out = sys.stdout if out is None else out
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, out)
    except (UsageError, ConfigError, PoissonBinomialError) as exc:
        print(f"pb {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
