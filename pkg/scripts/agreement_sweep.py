#!/usr/bin/env python3
"""Sweep frequency ratios and check that every method agrees on the window.

For each ratio the requested methods are run at the requested order,
flattened onto the shared comparison window and compared slot by slot
against the first method.  Exits 1 if any ratio disagrees.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

from quadosc import compare_methods
from quadosc.cli import METHODS, build_solution, parse_rational


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument(
        "--ratios",
        default="1/2,1,2,3,5/3",
        help="comma-separated rational frequency ratios to sweep",
    )
    parser.add_argument(
        "--methods",
        default=",".join(METHODS),
        help="comma-separated method names (first one is the reference)",
    )
    parser.add_argument("--order", type=int, default=2, help="coupling order")
    parser.add_argument(
        "--json", action="store_true", help="emit a JSON report instead of a table"
    )
    args = parser.parse_args(argv)

    ratios = [parse_rational(r) for r in args.ratios.split(",") if r.strip()]
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    for name in methods:
        if name not in METHODS:
            parser.error(f"unknown method {name!r}; choose from {', '.join(METHODS)}")

    rows = []
    all_agree = True
    for b in ratios:
        started = time.perf_counter()
        solutions = [build_solution(name, b, args.order) for name in methods]
        report = compare_methods(solutions, names=methods)
        elapsed = time.perf_counter() - started
        all_agree = all_agree and report.agree
        rows.append(
            {
                "b": str(b),
                "agree": report.agree,
                "seconds": round(elapsed, 3),
                "diffs": {name: list(d) for name, d in sorted(report.diffs.items())},
            }
        )

    if args.json:
        print(
            json.dumps(
                {"order": args.order, "methods": methods, "rows": rows}, indent=2
            )
        )
    else:
        print(f"reference: {methods[0]}   order: {args.order}")
        print(f"{'b':>8}  {'agree':>6}  {'seconds':>8}")
        for row in rows:
            print(f"{row['b']:>8}  {str(row['agree']):>6}  {row['seconds']:>8.3f}")
            for name, diffs in row["diffs"].items():
                print(f"    {name} differs:")
                for line in diffs:
                    print(f"      {line}")
        print("ALL AGREE" if all_agree else "DISAGREEMENT FOUND")
    return 0 if all_agree else 1


if __name__ == "__main__":
    sys.exit(main())
