"""Run the verify suite, write the JSON report and print a one-line summary per entry."""

import argparse
import json

from oshimalab.verify import DEFAULT_GROUPS, verify_suite


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--group", action="append", default=None)
    ap.add_argument("--seed", type=int, default=42)
    ap.add_argument("--out", default="verify_report.json")
    args = ap.parse_args(argv)
    report = verify_suite(tuple(args.group or DEFAULT_GROUPS), seed=args.seed)
    with open(args.out, "w") as fh:
        json.dump(report, fh, indent=2)
    for e in report["entries"]:
        mark = "ok  " if e["pass"] else "FAIL"
        print(f"{mark} {e['check_id']:<20} {e['group']:<5} residual {e['max_residual']!s:<24} tol {e['tolerance']:<8g} {e['wall_time']:.2f}s")
    print(f"{'PASS' if report['pass'] else 'FAIL'}  total {report['wall_time']:.1f}s  -> {args.out}")
    return 0 if report["pass"] else 1


if __name__ == "__main__":
    raise SystemExit(main())
