"""Run every randomized verification suite and write one JSON report per suite.

    python3 scripts/run_suites.py --instances 1000 --seed 2024 --out-dir results/
"""
import argparse
import time
from pathlib import Path

from fulldof import formats
from fulldof.suites import SUITES, run_suite


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--instances", type=int, default=1000)
    ap.add_argument("--seed", type=int, default=2024)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--out-dir", default="results")
    args = ap.parse_args()

    out = Path(args.out_dir)
    total_bad = 0
    for name in SUITES:
        t = time.perf_counter()
        res = run_suite(name, args.instances, args.seed, args.workers)
        report = {**formats.report_header(f"suite {name}"), **res.to_json()}
        formats.write_report(report, out / f"{name}.json")
        total_bad += res.violations
        print(f"{name:>16}  applicable {res.applicable:5d}/{res.instances}  "
              f"violations {res.violations}  {time.perf_counter() - t:6.1f}s")
    print("all hold" if not total_bad else f"{total_bad} violations")
    return 1 if total_bad else 0


if __name__ == "__main__":
    raise SystemExit(main())
