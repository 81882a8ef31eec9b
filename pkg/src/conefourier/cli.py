"""Command line entry point: run verification suites and write the report.

    conefourier --p 3 --disc unram --suite radon --out report/

writes report/records.jsonl (canonical, seed-deterministic), summary.txt,
and rendered figures, and exits nonzero when any identity check fails.
"""

from __future__ import annotations

import argparse
import sys

from .session import Session, SessionConfig
from .suites import run_suite, SUITE_RUNNERS
from .report import VerificationReport


def build_parser():
    ap = argparse.ArgumentParser(
        prog="conefourier",
        description="Exact verification of p-adic cone Fourier analysis "
                    "identities (Radon transform, Weil indices, level sets, "
                    "Pi(r) = Phi).")
    ap.add_argument("--p", type=int, default=3, help="odd prime (default 3)")
    ap.add_argument("--n", type=int, default=3,
                    help="Witt parameter n >= 3; dim V1 = 2n (default 3)")
    ap.add_argument("--disc", choices=["split", "unram", "ram-p", "ram-up"],
                    default="split", help="discriminant class of K")
    ap.add_argument("--backend", choices=["exact", "float"], default="exact")
    ap.add_argument("--tol", type=float, default=1e-9,
                    help="float-backend equality tolerance")
    ap.add_argument("--depth", type=int, default=12,
                    help="character depth M (N = 4 p^M)")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--suite", default="all",
                    choices=sorted(SUITE_RUNNERS) + ["all"])
    ap.add_argument("--out", default=None,
                    help="report directory (records.jsonl, summary.txt, "
                         "figures)")
    ap.add_argument("--no-figures", action="store_true",
                    help="skip figure rendering")
    ap.add_argument("--quick", action="store_true",
                    help="reduced check counts (smoke run)")
    ap.add_argument("--table", action="append", default=[],
                    help="serialized cone test function to include in the "
                         "radon/phi checks (repeatable)")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    config = SessionConfig(p=args.p, n=args.n, disc=args.disc,
                           backend=args.backend, tol=args.tol,
                           depth=args.depth, seed=args.seed)
    sess = Session(config)
    report = VerificationReport(config={
        "p": args.p, "n": args.n, "disc": args.disc, "backend": args.backend,
        "tol": args.tol, "depth": args.depth, "seed": args.seed,
        "suite": args.suite,
    })
    records, seconds = run_suite(args.suite, sess, quick=args.quick)
    report.records.extend(records)
    report.suite_seconds.update(seconds)
    for path in args.table:
        report.records.extend(_user_table_checks(sess, path))
    for line in report.summary_lines():
        print(line)
    if args.out:
        report.write(args.out, figures=not args.no_figures)
        print(f"report written to {args.out}/")
    return 1 if report.n_failed else 0


def _user_table_checks(sess, path):
    """Run the basic transform identities on a user-provided table."""
    from .serialization import load_table
    from .cone import ConeTestFunction, cone_catalog, cone_integral
    from .radon import phi_value, radon_total_mass
    from .suites import _Bench
    b = _Bench(sess, "user-table")
    f = ConeTestFunction(sess, load_table(sess.ctx, path))
    ic = cone_integral(sess, f)
    for i, pt in enumerate(cone_catalog(sess, count=2)):
        b.check(f"user-total-mass[{path}:{i}]",
                "int_F R(t)(f)(w) dt = I_C(f)",
                radon_total_mass(sess, f, pt), ic, inputs=path)
        tot = phi_value(sess, f, pt, "phi")
        p1 = phi_value(sess, f, pt, "phi1")
        p2 = phi_value(sess, f, pt, "phi2")
        b.check(f"user-phi-decomposition[{path}:{i}]",
                "Phi = Phi1 + Phi2", tot, p1 + p2, inputs=path)
    return b.records


if __name__ == "__main__":
    sys.exit(main())
