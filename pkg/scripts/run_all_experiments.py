"""Run every experiment with its manifest defaults and write the reports.

    python3 scripts/run_all_experiments.py [--out-dir reports] [--format json]
"""

import argparse
import sys
from pathlib import Path

from coarse_double.experiments import emit_report, list_experiments, run_experiment
from coarse_double.io import write_atomic


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out-dir", default="reports")
    ap.add_argument("--format", choices=["json", "csv", "text"], default="json")
    args = ap.parse_args()
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    failed = []
    for name, _ in list_experiments():
        report = run_experiment(name)
        write_atomic(out / f"{name}.{args.format}", emit_report(report, args.format))
        bad = [c.name for c in report.checks if not c.passed]
        print(f"{'PASS' if not bad else 'FAIL'}  {name:28s} {report.runtime_ms:7d} ms")
        for c in bad:
            print(f"      failed: {c}")
        failed += bad
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
