"""Command line interface.

Subcommands:
    validate <file>       parse a scenario and echo its manifest
    run <file>            execute a scenario, write CSVs and manifest
    verify <suite|file>   run a named verification suite (or a scenario
                          file's own suite) and report pass/fail lines
    sweep <dir>           run every scenario file in a directory

Exit codes: 0 ok, 1 verification failure, 2 usage/parse error,
3 numerical failure.
"""

import argparse
import json
import os
import sys

from .errors import DebondWaveError, ScenarioError, UnknownSuite
from .scenarios import parse_scenario
from .runner import run_scenario
from .verify import SUITES, run_suite

EXIT_OK = 0
EXIT_VERIFY = 1
EXIT_USAGE = 2
EXIT_NUMERICAL = 3


def _build_parser():
    ap = argparse.ArgumentParser(
        prog="debondwave",
        description="Wave equation on moving domains: runs and verification.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="parse a scenario file strictly")
    p.add_argument("file")

    p = sub.add_parser("run", help="execute a scenario file")
    p.add_argument("file")
    p.add_argument("--out", default=None, help="output directory root")
    p.add_argument("--tol-scale", type=float, default=1.0)

    p = sub.add_parser("verify", help="run a verification suite")
    p.add_argument("target", help=f"one of {sorted(SUITES)}, 'all', or a scenario file")
    p.add_argument("--out", default=None)
    p.add_argument("--tol-scale", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("sweep", help="run every scenario file in a directory")
    p.add_argument("directory")
    p.add_argument("--out", default=None)
    p.add_argument("--tol-scale", type=float, default=1.0)
    p.add_argument("--workers", type=int, default=0, help="0 = sequential")
    return ap


def _cmd_validate(args):
    sc = parse_scenario(args.file)
    json.dump(sc.manifest(), sys.stdout, indent=1, sort_keys=True)
    sys.stdout.write("\n")
    return EXIT_OK


def _cmd_run(args):
    sc = parse_scenario(args.file)
    artifacts = run_scenario(sc, out_dir=args.out, tol_scale=args.tol_scale)
    for f in artifacts.files:
        print(f)
    return EXIT_OK


def _cmd_verify(args):
    target = args.target
    if target not in SUITES and target != "all" and os.path.exists(target):
        sc = parse_scenario(target)
        run_scenario(sc, out_dir=args.out, tol_scale=args.tol_scale)
        print(f"PASS scenario.{sc.name}  (ran to completion)")
        return EXIT_OK
    results = run_suite(target, tol_scale=args.tol_scale, seed=args.seed)
    failed = 0
    for res in results:
        print(res.line())
        failed += 0 if res.passed else 1
    print(f"{len(results) - failed}/{len(results)} checks passed")
    return EXIT_OK if failed == 0 else EXIT_VERIFY


def _run_one(path_out_tol):
    path, out, tol = path_out_tol
    sc = parse_scenario(path)
    run_scenario(sc, out_dir=out, tol_scale=tol)
    return sc.name


def _cmd_sweep(args):
    files = sorted(
        os.path.join(args.directory, f)
        for f in os.listdir(args.directory)
        if f.endswith(".scn")
    )
    if not files:
        print(f"no .scn files in {args.directory}", file=sys.stderr)
        return EXIT_USAGE
    jobs = [(f, args.out, args.tol_scale) for f in files]
    if args.workers and args.workers > 1:
        import concurrent.futures as cf

        with cf.ProcessPoolExecutor(max_workers=args.workers) as ex:
            for name in ex.map(_run_one, jobs):
                print(f"done {name}")
    else:
        for job in jobs:
            print(f"done {_run_one(job)}")
    return EXIT_OK


def main(argv=None):
    ap = _build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        if args.command == "validate":
            return _cmd_validate(args)
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "verify":
            return _cmd_verify(args)
        if args.command == "sweep":
            return _cmd_sweep(args)
        return EXIT_USAGE
    except (ScenarioError, UnknownSuite, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DebondWaveError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
