"""Run the acceptance checks and print one PASS/FAIL line per criterion."""

import argparse
import pathlib
import runpy
import sys


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("criteria", nargs="*", type=int, help="subset of 1..10 (default all)")
    args = ap.parse_args(argv)
    path = pathlib.Path(__file__).resolve().parents[1] / "tests" / "test_acceptance.py"
    mod = runpy.run_path(str(path), run_name="acceptance")
    chosen = args.criteria or sorted(mod["CHECKS"])
    failed = 0
    for n in chosen:
        ok, detail = mod["CHECKS"][n]()
        mod["_report"](n, ok, detail)
        failed += not ok
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
