"""Command-line interface: measure, scan, identities, fh-validate.

Exit codes: 0 success, 1 configuration error, 2 numeric failure in at
least one scan row.
"""

from __future__ import annotations

import argparse
import sys

from . import harness
from .errors import ConfigError, NesscorrError


def _read_config(path: str) -> harness.ExperimentConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return harness.parse_config(fh.read())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc}") from exc


def _cmd_measure(args) -> int:
    cfg = _read_config(args.config)
    result = harness.measure_point(cfg)
    text = harness.to_json(result)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return 0


def _cmd_scan(args) -> int:
    cfg = _read_config(args.config)
    rows = harness.run_scan(cfg)
    csv_text = harness.rows_to_csv([r for r in rows if r.error is None])
    out_path = args.out or cfg.output_csv
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(csv_text)
    else:
        sys.stdout.write(csv_text)
    summary = harness.scan_summary(rows)
    print(harness.to_json(summary), file=sys.stderr)
    return 2 if summary["failed_rows"] else 0


def _cmd_identities(args) -> int:
    report = harness.run_identities()
    if args.json:
        print(harness.to_json(report))
    else:
        worst = harness.identities_max_residuals(report)
        for name in sorted(worst):
            print(f"{name:20s} max residual {worst[name]:.3e}")
    return 0


def _cmd_fh_validate(args) -> int:
    report = harness.run_fh_validation()
    lines = ["case,family,m,exact_re,asym_re,diff_re,lnm_fit,lnm_expected"]
    for entry in report:
        for m, e, a, d in zip(entry["m_values"], entry["exact_re"],
                              entry["asym_re"], entry["diff_re"]):
            lines.append(
                f"{entry['case']},{entry['family']},{m},{e:.12g},{a:.12g},"
                f"{d:.12g},{entry['lnm_coeff_fit']:.12g},"
                f"{entry['lnm_coeff_expected']:.12g}")
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nesscorr",
        description="Correlation measures of biased free fermions with an impurity")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("measure", help="evaluate one configuration, emit JSON")
    p.add_argument("config")
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_measure)

    p = sub.add_parser("scan", help="run a parameter scan, emit CSV")
    p.add_argument("config")
    p.add_argument("--out", default=None, help="override output.csv from config")
    p.set_defaults(func=_cmd_scan)

    p = sub.add_parser("identities", help="run the identity suite")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_identities)

    p = sub.add_parser("fh-validate",
                       help="Fisher-Hartwig exact-vs-asymptotic suite, CSV")
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_fh_validate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except NesscorrError as exc:
        print(f"numeric failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
