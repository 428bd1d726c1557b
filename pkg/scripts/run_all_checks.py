#!/usr/bin/env python3
"""Run the full verification battery against the bundled example configs.

Each check is one `dnls` CLI invocation; the script prints a summary table
and exits nonzero if any check fails.
"""

import argparse
import pathlib
import sys

from dnls import cli

CONFIG_DIR = pathlib.Path(__file__).resolve().parent / "configs"

CHECKS = [
    ("verify-bounds", "simulate.json"),
    ("absorbing", "absorbing.json"),
    ("tail", "absorbing.json"),
    ("contraction", "absorbing.json"),
    ("continuity", "absorbing.json"),
    ("breather", "breather.json"),
    ("dimension", "dimension.json"),
]


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out-dir", default="reports",
                        help="directory for per-check JSON reports")
    parser.add_argument("--skip-dimension", action="store_true",
                        help="skip the (slow) dimension estimate")
    args = parser.parse_args()

    out_dir = pathlib.Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    worst = 0
    results = []
    for command, config in CHECKS:
        if args.skip_dimension and command == "dimension":
            continue
        report = out_dir / f"{command}.json"
        code = cli.main([command, "--config", str(CONFIG_DIR / config),
                         "--json", str(report)])
        results.append((command, code))
        worst = max(worst, code)

    print()
    print(f"{'check':<14} exit")
    for command, code in results:
        print(f"{command:<14} {code}")
    return 1 if worst else 0


if __name__ == "__main__":
    sys.exit(main())
