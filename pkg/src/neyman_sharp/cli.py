"""Command-line entry point.

Exit codes: 0 success, 1 certification or validation failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

from . import __version__
from .analysis import AnalysisRequest, DataError, Report, analyze, format_report
from .datasets import BUILTIN
from .estimators import ObservedSummary
from .oracle import (
    GuardExceeded,
    certify_exact_moments,
    certify_inclusion_exclusion,
    certify_sharpness,
    sharp_bound_exact,
)
from .simulation import (
    Campaign,
    CaseSummary,
    gamma_scan,
    gamma_summary,
    latent_campaign,
    fresh_latent_campaign,
    run_campaign,
    sparse_campaign,
)
from .estimators import Design

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _int_list(text: str, length: int | None = None) -> tuple[int, ...]:
    try:
        vals = tuple(int(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if length is not None and len(vals) != length:
        raise argparse.ArgumentTypeError(f"expected {length} integers, got {len(vals)}")
    return vals


def _four(text: str) -> tuple[int, ...]:
    return _int_list(text, 4)


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")


def _rows_to_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    if rows:
        w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
    return buf.getvalue()


# -- analyze ---------------------------------------------------------------------


def _analysis_request(args) -> AnalysisRequest:
    ci_level = args.ci_level
    common = dict(coding=args.coding, effects=args.effects)
    if args.dataset:
        if args.dataset not in BUILTIN:
            raise UsageError(f"unknown dataset {args.dataset!r}; choose from {', '.join(sorted(BUILTIN))}")
        return AnalysisRequest(dataset=args.dataset, ci_level=ci_level or 0.95, **common)
    if args.csv:
        return AnalysisRequest(csv_path=args.csv, ci_level=ci_level or 0.95, **common)
    if args.summary:
        try:
            d = json.loads(Path(args.summary).read_text(encoding="utf-8"))
        except OSError as exc:
            raise UsageError(str(exc)) from None
        except json.JSONDecodeError as exc:
            raise DataError(f"{args.summary}: {exc}") from None
        try:
            obs = ObservedSummary(tuple(d["n"]), tuple(d["n_obs"]))
        except (KeyError, TypeError) as exc:
            raise DataError(f"{args.summary}: summary needs 'n' and 'n_obs' lists ({exc})") from None
        return AnalysisRequest(summary=obs, ci_level=ci_level or float(d.get("ci_level", 0.95)), **common)
    if args.n and args.n_obs:
        return AnalysisRequest(summary=ObservedSummary(args.n, args.n_obs), ci_level=ci_level or 0.95, **common)
    raise UsageError("give one of --dataset, --csv, --summary or both --n and --n-obs")


def cmd_analyze(args) -> int:
    report = analyze(_analysis_request(args))
    if args.format == "json":
        text = report.to_json()
    elif args.format == "csv":
        rows = []
        for e in report.effects:
            rows.append(
                {
                    "effect": e.effect,
                    "point": repr(e.point),
                    "var_classic": repr(e.var_classic),
                    "var_improved": repr(e.var_improved),
                    "ci_classic_lower": repr(e.ci_classic[0]),
                    "ci_classic_upper": repr(e.ci_classic[1]),
                    "ci_improved_lower": repr(e.ci_improved[0]),
                    "ci_improved_upper": repr(e.ci_improved[1]),
                    "gamma": repr(e.gamma),
                    "ci_level": e.ci_level,
                }
            )
        text = _rows_to_csv(rows)
    else:
        text = format_report(report)
    _emit(text, args.out)
    return EXIT_OK


# -- simulate --------------------------------------------------------------------


def _load_campaign(path: str) -> tuple[Campaign, dict]:
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise UsageError(str(exc)) from None
    except json.JSONDecodeError as exc:
        raise DataError(f"{path}: {exc}") from None
    try:
        return Campaign.from_dict(raw), raw
    except KeyError as exc:
        raise DataError(f"{path}: missing field {exc}") from None


def cmd_simulate(args) -> int:
    campaign, _ = _load_campaign(args.config)
    overrides = {}
    if args.replicates is not None:
        overrides["replicates"] = args.replicates
    if args.seed is not None:
        overrides["master_seed"] = args.seed
    if args.ci_level is not None:
        overrides["ci_level"] = args.ci_level
    if overrides:
        campaign = Campaign.from_dict(campaign.to_dict() | overrides)
    results = run_campaign(campaign, workers=args.workers)
    if args.format == "csv":
        rows = []
        for r in results:
            d = r.to_dict()
            d["counts"] = " ".join(str(c) for c in d["counts"])
            rows.append(d)
        text = _rows_to_csv(rows)
    else:
        from .analysis import _canonical_hash

        cfg = campaign.to_dict()
        text = json.dumps(
            {
                "provenance": {
                    "version": __version__,
                    "seed": campaign.master_seed,
                    "config_hash": _canonical_hash(cfg),
                },
                "config": cfg,
                "cases": [r.to_dict() for r in results],
            },
            indent=2,
        )
    _emit(text, args.out)
    return EXIT_OK


def load_campaign_report(text: str) -> list[CaseSummary]:
    return [CaseSummary.from_dict(d) for d in json.loads(text)["cases"]]


# -- gamma-scan ------------------------------------------------------------------


def cmd_gamma_scan(args) -> int:
    import numpy as np

    design = Design((args.n_per_arm,) * 4)
    tau, g = gamma_scan(design, args.draws, np.random.default_rng(args.seed), args.effect)
    summary = gamma_summary(g) | {"seed": args.seed, "effect": args.effect, "n_per_arm": args.n_per_arm}
    if args.format == "json":
        text = json.dumps({"summary": summary, "tau_hat": tau.tolist(), "gamma": g.tolist()}, indent=2)
    else:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(("tau_hat", "gamma"))
        for t, v in zip(tau.tolist(), g.tolist()):
            w.writerow((repr(t), repr(v)))
        for key in ("draws", "frac_below_1pct", "frac_above_10pct", "max", "seed"):
            buf.write(f"# {key}={summary[key]}\n")
        text = buf.getvalue()
    _emit(text, args.out)
    return EXIT_OK


# -- oracle ----------------------------------------------------------------------


def cmd_oracle(args) -> int:
    bound = sharp_bound_exact
    if args.corrupt_bound:
        from fractions import Fraction

        def bound(a, N):  # test hook: nudges the bound above the true minimum
            return sharp_bound_exact(a, N) + Fraction(1, 10**6)

    certs = [
        certify_sharpness(args.sharpness_n, bound=bound, guard=args.joint_guard),
        certify_exact_moments(args.tables, seed=args.seed),
        certify_inclusion_exclusion(args.chain_max_n, args.random_tables, seed=args.seed),
    ]
    ok = all(c.passed for c in certs)
    if args.format == "json":
        text = json.dumps({"passed": ok, "certificates": [c.to_dict() for c in certs]}, indent=2)
    else:
        lines = []
        for c in certs:
            lines.append(f"{'PASS' if c.passed else 'FAIL'} {c.name}: {c.checked} checks {json.dumps(c.details)}")
            for ce in c.counterexamples:
                lines.append(f"    counterexample {json.dumps(ce)}")
        text = "\n".join(lines)
    _emit(text, args.out)
    return EXIT_OK if ok else EXIT_FAIL


# -- examples --------------------------------------------------------------------

_CAMPAIGNS = {
    "latent-tables": ("18 published latent-normal science tables, 200 units per arm", latent_campaign),
    "latent-fresh": ("redraw the 18 latent-normal cases from the generator", fresh_latent_campaign),
    "sparse-50": ("50 sparse-multinomial cases (lambda1 = 30)", sparse_campaign),
}


def cmd_examples(args) -> int:
    if args.name is None:
        lines = ["datasets (use with: analyze --dataset ID):"]
        for d in BUILTIN.values():
            lines.append(f"  {d.id:<16} n={d.arm_sizes} n_obs={d.successes}  {d.description}")
        lines.append("simulation configs (use with: examples NAME --out cfg.json; simulate cfg.json):")
        for name, (desc, _) in _CAMPAIGNS.items():
            lines.append(f"  {name:<16} {desc}")
        _emit("\n".join(lines), args.out)
        return EXIT_OK
    if args.name in BUILTIN:
        _emit(json.dumps(BUILTIN[args.name].to_dict(), indent=2), args.out)
        return EXIT_OK
    if args.name in _CAMPAIGNS:
        kwargs = {}
        if args.replicates is not None:
            kwargs["replicates"] = args.replicates
        if args.seed is not None:
            kwargs["master_seed"] = args.seed
        _emit(json.dumps(_CAMPAIGNS[args.name][1](**kwargs).to_dict(), indent=2), args.out)
        return EXIT_OK
    raise UsageError(f"unknown example {args.name!r}; choose from {', '.join([*BUILTIN, *_CAMPAIGNS])}")


# -- parser ----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="neyman-sharp", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", help="effect estimates, both variance estimates and CIs")
    src = a.add_mutually_exclusive_group()
    src.add_argument("--dataset", help="built-in dataset id")
    src.add_argument("--csv", help="unit-level CSV with header unit_id,arm,outcome")
    src.add_argument("--summary", help='JSON file {"n": [...], "n_obs": [...], "ci_level": 0.95}')
    a.add_argument("--n", type=_four, help="inline arm sizes, e.g. 189,188,189,189")
    a.add_argument("--n-obs", type=_four, help="inline success counts")
    a.add_argument("--coding", type=_four, default=(1, 2, 3, 4), help="physical arms mapped to z1..z4")
    a.add_argument("--effects", type=_int_list, default=(1, 2, 3))
    a.add_argument("--ci-level", type=float, default=None)
    a.add_argument("--format", choices=("json", "csv"), default=None, help="default: text table")
    a.add_argument("--out")
    a.set_defaults(func=cmd_analyze)

    s = sub.add_parser("simulate", help="Monte Carlo campaign from a JSON config")
    s.add_argument("config")
    s.add_argument("--seed", type=int, default=None)
    s.add_argument("--replicates", type=int, default=None)
    s.add_argument("--ci-level", type=float, default=None)
    s.add_argument("--workers", type=int, default=None, help="default: $NEYMAN_SHARP_THREADS or 1")
    s.add_argument("--format", choices=("json", "csv"), default="json")
    s.add_argument("--out")
    s.set_defaults(func=cmd_simulate)

    g = sub.add_parser("gamma-scan", help="relative variance reduction over uniform draws")
    g.add_argument("--draws", type=int, default=5000)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--n-per-arm", type=int, default=100)
    g.add_argument("--effect", type=int, default=1, choices=(1, 2, 3))
    g.add_argument("--format", choices=("json", "csv"), default="csv")
    g.add_argument("--out")
    g.set_defaults(func=cmd_gamma_scan)

    o = sub.add_parser("oracle", help="exhaustive certificates for the bound and the moments")
    o.add_argument("--sharpness-n", type=int, default=8)
    o.add_argument("--joint-guard", type=int, default=12)
    o.add_argument("--tables", type=int, default=100)
    o.add_argument("--chain-max-n", type=int, default=3)
    o.add_argument("--random-tables", type=int, default=1000)
    o.add_argument("--seed", type=int, default=0)
    o.add_argument("--corrupt-bound", action="store_true", help=argparse.SUPPRESS)
    o.add_argument("--format", choices=("json", "csv"), default=None)
    o.add_argument("--out")
    o.set_defaults(func=cmd_oracle)

    e = sub.add_parser("examples", help="list or export built-in datasets and configs")
    e.add_argument("name", nargs="?")
    e.add_argument("--seed", type=int, default=None)
    e.add_argument("--replicates", type=int, default=None)
    e.add_argument("--out")
    e.set_defaults(func=cmd_examples)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        return args.func(args)
    except (UsageError, GuardExceeded) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
