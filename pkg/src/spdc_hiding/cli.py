"""Command-line front end.

Subcommands: ``expand``, ``gba-table``, ``simulate``, ``analyze``, ``verify``.
Exit status is 0 on success, 1 when a verification fails and 2 on usage
errors. Machine reports go to ``--output`` when given, otherwise to stdout.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import dataclass

from . import analysis, gba, plotting, protocol, states
from . import opalgebra as alg
from .states import SourceParams

DEFAULT_P = 0.01
DEFAULT_TRIALS = 100
DEFAULT_SEED = 0


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    subcommand: str
    n: int | None = None
    secret: int | None = None
    p: float = DEFAULT_P
    trials: int = DEFAULT_TRIALS
    seed: int = DEFAULT_SEED
    format: str = "json"
    output: str | None = None

    def __post_init__(self):
        if self.n is not None and self.n < 1:
            raise UsageError("n must be ≥ 1")
        if not 0 < self.p <= 0.1:
            raise UsageError("p must lie in (0, 0.1]")
        if self.trials < 1:
            raise UsageError("trials must be ≥ 1")
        if self.seed < 0 or self.seed >= 2**64:
            raise UsageError("seed must be an unsigned 64-bit integer")


def _emit(text: str, output: str | None):
    if output:
        os.makedirs(os.path.dirname(os.path.abspath(output)), exist_ok=True)
        with open(output, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _csv(rows, header) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


# -- expand -------------------------------------------------------------------------------


def cmd_expand(args) -> int:
    out = []
    params = SourceParams(args.p)
    dump = []
    if args.eq == 1:
        exp = states.spdc_single_pass(params, 1, 2)
        for k, poly in exp.sectors.items():
            out.append(f"[{k} pair(s)] weight p^({k}/2) = {exp.weights[k]:.6g}: {poly}")
            out.append(f"    exact norm² = {alg.exact_norm_squared(poly)}")
        dump.append(alg.apply_to_vacuum(exp.sectors[2]))
    elif args.eq == 2:
        exp = states.spdc_double_pass(params)
        probs = exp.event_probabilities()
        for k, poly in exp.sectors.items():
            out.append(f"[{k} pair(s)] weight {exp.weights[k]:.6g}: {poly}")
            out.append(f"    exact norm² = {alg.exact_norm_squared(poly)}, event probability {probs[k]:.6g}")
        dump.append(states.theta())
    elif args.eq == 3:
        poly = states.theta_poly()
        out.append(f"Θ = {poly}")
        out.append(f"exact <Θ|Θ> = {alg.exact_norm_squared(poly)}")
        dump.append(states.theta())
    else:
        rhs = states.decomposition_rhs_poly()
        out.append(f"RHS = {rhs}")
        out.append(f"Θ   = {states.theta_poly()}")
        try:
            c = states.verify_decomposition()
        except ValueError as exc:
            out.append(f"FAIL pair decomposition: {exc}")
            print("\n".join(out))
            return 1
        out.append(f"proportionality constant c = {c}")
        out.append(f"{'PASS' if c == alg.HALF else 'FAIL'} Θ = c·RHS")
        dump.append(states.theta())
        if c != alg.HALF:
            print("\n".join(out))
            return 1
    print("\n".join(out))
    if args.dump_state:
        for state in dump:
            sys.stdout.write(state.to_text())
    return 0


# -- gba-table ----------------------------------------------------------------------------


def cmd_gba_table(args) -> int:
    config = gba.calibrate()
    rows = gba.gba_table(config)
    if args.format == "json":
        payload = {
            "circuit": str(config),
            "rows": [
                {
                    "state": str(r.label),
                    "expected_class": int(r.expected),
                    "class_probabilities": {str(int(k)): v for k, v in r.class_probs.items() if k},
                    "patterns": [{"clicks": str(p), "probability": q} for p, q in r.patterns],
                }
                for r in rows
            ],
        }
        print(json.dumps(payload, indent=2, ensure_ascii=False))
    else:
        print(f"circuit: {config}")
        print(f"{'state':<6}{'class':<7}{'prob':<8}click patterns")
        for r in rows:
            pats = ", ".join(f"{p} {q:.3f}" for p, q in r.patterns)
            print(f"{str(r.label):<6}{int(r.expected):<7}{r.class_probs.get(r.expected, 0.0):<8.3f}{pats}")
    return 0 if all(r.deterministic for r in rows) else 1


# -- simulate -----------------------------------------------------------------------------


def simulate_report(cfg: RunConfig, per_trial: bool = False) -> dict:
    summary = protocol.run_sessions(cfg.n, cfg.secret, cfg.p, cfg.trials, cfg.seed, keep_trials=per_trial)
    report = {
        "config": {"n": cfg.n, "secret": cfg.secret, "p": cfg.p, "trials": cfg.trials, "seed": cfg.seed},
        "stats": {
            "success_rate": summary.success_rate,
            "class_hist": list(summary.class_histogram),
            "s1_fraction": summary.s1_fraction_estimate,
            "pulses_mean": summary.pulses_mean,
            "pairs_drawn": summary.pairs_drawn,
            "pairs_rejected": summary.pairs_rejected,
        },
    }
    if per_trial:
        report["per_trial"] = [
            {
                "trial": t,
                "decoded_bit": s.decoded_bit,
                "pairs_drawn": s.pairs_drawn,
                "pairs_rejected": s.pairs_rejected,
                "class_hist": list(s.class_histogram),
                "s1_hits": s.s1_hits,
                "pulses_total": s.pulses_total,
            }
            for t, s in enumerate(summary.per_trial)
        ]
    return report


SIMULATE_COLUMNS = (
    "scope", "trial", "n", "secret", "p", "seed", "success_rate", "class1", "class2", "class3",
    "s1_fraction", "pulses_mean", "pairs_drawn", "pairs_rejected",
)


def simulate_csv(report: dict) -> str:
    c, s = report["config"], report["stats"]
    rows = [[
        "summary", "", c["n"], c["secret"], c["p"], c["seed"], s["success_rate"], *s["class_hist"],
        s["s1_fraction"], s["pulses_mean"], s["pairs_drawn"], s["pairs_rejected"],
    ]]
    for t in report.get("per_trial", []):
        rows.append([
            "trial", t["trial"], c["n"], c["secret"], c["p"], c["seed"], float(t["decoded_bit"] == c["secret"]),
            *t["class_hist"], t["s1_hits"] / t["pairs_drawn"], t["pulses_total"] / t["pairs_drawn"],
            t["pairs_drawn"], t["pairs_rejected"],
        ])
    return _csv(rows, SIMULATE_COLUMNS)


def cmd_simulate(args) -> int:
    cfg = RunConfig("simulate", args.n, args.secret, args.p, args.trials, args.seed, args.format, args.output)
    report = simulate_report(cfg, per_trial=args.per_trial)
    text = json.dumps(report, indent=2) + "\n" if cfg.format == "json" else simulate_csv(report)
    _emit(text, cfg.output)
    s = report["stats"]
    if cfg.output:
        print(
            f"n={cfg.n} secret={cfg.secret} trials={cfg.trials}: success {s['success_rate']:.3f}, "
            f"S1 fraction {s['s1_fraction']:.4f}, {s['pulses_mean']:.1f} pulses/pair -> {cfg.output}"
        )
    if args.figures:
        total = sum(s["class_hist"])
        expected = [float(v) for v in states.class_probabilities().values()]
        path = plotting.plot_class_histogram(
            [h / total for h in s["class_hist"]], expected, os.path.join(args.figures, "class_histogram.png"),
            title=f"heralded pairs at p = {cfg.p:g}",
        )
        print(f"figure: {path}", file=sys.stderr)
    return 0


# -- analyze ------------------------------------------------------------------------------


def analyze_report(n: int, prior: float) -> dict:
    rep = analysis.analyze(n, prior)
    return {
        "config": {"n": n, "prior": prior},
        "trace_distance": rep.trace_distance,
        "min_error_probability": rep.min_error,
        "strategies": [
            {"name": s.strategy, "mutual_information": s.mutual_information, "bound": s.bound}
            for s in rep.strategies
        ],
        "bound_curve": [{"m": m, "delta": d, "bound": b} for m, d, b in rep.bound_curve],
    }


def analyze_csv(report: dict) -> str:
    rows = [
        ["trace_distance", "", report["trace_distance"]],
        ["min_error_probability", "", report["min_error_probability"]],
    ]
    for s in report["strategies"]:
        rows.append([f"I[{s['name']}]", "", s["mutual_information"]])
        rows.append([f"ceiling[{s['name']}]", "", s["bound"]])
    for row in report["bound_curve"]:
        rows.append(["delta", row["m"], row["delta"]])
    for row in report["bound_curve"]:
        rows.append(["bound", row["m"], row["bound"]])
    return _csv(rows, ("quantity", "m", "value"))


def cmd_analyze(args) -> int:
    if args.n > analysis.MAX_EXACT_N:
        raise UsageError(f"n ≤ {analysis.MAX_EXACT_N} for exact analysis")
    if args.n < 1:
        raise UsageError("n must be ≥ 1")
    if not 0 <= args.prior <= 1:
        raise UsageError("prior must lie in [0, 1]")
    report = analyze_report(args.n, args.prior)
    text = json.dumps(report, indent=2) + "\n" if args.report == "json" else analyze_csv(report)
    _emit(text, args.output)
    if args.output:
        local = report["strategies"][0]
        print(
            f"n={args.n}: trace distance {report['trace_distance']:.6f}, "
            f"local-count I = {local['mutual_information']:.6f} bits -> {args.output}"
        )
    if args.figures:
        curve = [(r["m"], r["delta"], r["bound"]) for r in report["bound_curve"]]
        measured = {f"local-count I, n={args.n}": report["strategies"][0]["mutual_information"]}
        path = plotting.plot_bound_curve(curve, os.path.join(args.figures, "bound_curve.png"), measured)
        print(f"figure: {path}", file=sys.stderr)
    return 0


# -- verify -------------------------------------------------------------------------------


def cmd_verify(args) -> int:
    from .verification import run_identity_suite

    results = run_identity_suite()
    for r in results:
        print(f"{'PASS' if r.passed else 'FAIL'}  {r.name}: {r.detail}")
    failed = [r for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} checks passed")
    return 1 if failed else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="spdc-hiding", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("expand", help="print the exact source expansions")
    p.add_argument(
        "--eq", type=int, choices=(1, 2, 3, 4), required=True,
        help="1 single pass, 2 double pass, 3 four-photon term, 4 ten-term decomposition",
    )
    p.add_argument("--p", type=float, default=DEFAULT_P, help="pair probability for sector weights")
    p.add_argument("--dump-state", action="store_true", help="append the canonical text form of the state")
    p.set_defaults(func=cmd_expand)

    p = sub.add_parser("gba-table", help="class table of the calibrated analyzer")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=cmd_gba_table)

    p = sub.add_parser("simulate", help="Monte Carlo hiding sessions")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--secret", type=int, choices=(0, 1), required=True)
    p.add_argument("--p", type=float, default=DEFAULT_P)
    p.add_argument("--trials", type=int, default=DEFAULT_TRIALS)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--output")
    p.add_argument("--per-trial", action="store_true")
    p.add_argument("--figures", metavar="DIR", help="write PNG figures into DIR")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("analyze", help="exact ensemble analysis for small n")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--prior", type=float, default=0.5, help="probability that the hidden bit is 0")
    p.add_argument("--report", choices=("json", "csv"), default="json")
    p.add_argument("--output")
    p.add_argument("--figures", metavar="DIR")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("verify", help="run the exact identity suite")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"{parser.prog} {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
