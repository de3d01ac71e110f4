"""Command-line front end.

Exit codes partition outcomes for shell pipelines: 0 = certified,
2 = undecided, 1 = error.  Progress and timing go to the log stream on
stderr; JSON outputs stay deterministic (timing lives under "meta").
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time
from fractions import Fraction
from multiprocessing import Pool

from . import certify as rules
from .certmodel import Certificate
from .errors import AlbcertError, VerificationError
from .genus2 import Genus2Curve, certify_self_product
from .ingest import (
    bundled_curves,
    bundled_genus2,
    find_curve,
    load_curves,
    load_genus2,
    query_records,
)
from .report import ScanReport, render_figures, write_csv
from .tensor import RunOptions, run_and_certify

log = logging.getLogger("albcert")

EXIT_CERTIFIED = 0
EXIT_ERROR = 1
EXIT_UNDECIDED = 2


def _emit(cert_or_und, out_path=None):
    if isinstance(cert_or_und, Certificate):
        text = cert_or_und.to_json()
        if out_path:
            with open(out_path, "w") as fh:
                fh.write(text + "\n")
            log.info("certificate written to %s", out_path)
        else:
            print(text)
        return EXIT_CERTIFIED
    doc = {"undecided": cert_or_und.reason, "details": cert_or_und.details}
    text = json.dumps(doc, sort_keys=True, indent=1)
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return EXIT_UNDECIDED


def _load_db(path):
    if path in (None, "bundled"):
        return bundled_curves()
    return load_curves(path)


def cmd_pair(args) -> int:
    records = _load_db(args.db)
    rec1 = find_curve(args.curve1, records)
    rec2 = find_curve(args.curve2, records)
    r1 = args.rank1 if args.rank1 is not None else rec1.rank
    r2 = args.rank2 if args.rank2 is not None else rec2.rank
    if r1 < 0 or r2 < 0:
        raise AlbcertError(
            "rank unknown; use dataset labels or pass --rank1/--rank2 explicitly"
        )
    prov = {
        "rank_source": f"{rec1.rank_provenance}/{rec2.rank_provenance}"
        if args.rank1 is None and args.rank2 is None
        else "user",
    }
    opts = RunOptions(
        bound=args.bound,
        denom_bound=args.denom_bound,
        variants=args.variants,
    )
    t0 = time.time()
    result = run_and_certify(
        rec1.curve(), rec2.curve(), (r1, r2), opts, prov,
        (rec1.label, rec2.label), precision=args.precision,
    )
    log.info("pair decided in %.2fs", time.time() - t0)
    return _emit(result, args.out)


def _pair_task(task):
    """Worker for scan mode: one pair, fully independent state."""
    (ai1, ai2, label1, label2, r1, r2, prov, bound, denom_bound, variants,
     precision, cert_dir) = task
    from .curves import EllipticCurve

    t0 = time.time()
    outcome = {"pair": [label1, label2]}
    try:
        result, state = run_and_certify(
            EllipticCurve.from_a_invariants([Fraction(a) for a in ai1]),
            EllipticCurve.from_a_invariants([Fraction(a) for a in ai2]),
            (r1, r2),
            RunOptions(bound=bound, denom_bound=denom_bound, variants=variants),
            prov,
            (label1, label2),
            precision=precision,
            return_state=True,
        )
    except AlbcertError as exc:
        outcome.update(outcome="error", error=f"{type(exc).__name__}: {exc}")
        return outcome, time.time() - t0
    outcome["points_seen"] = state.points_seen
    if isinstance(result, Certificate):
        fname = None
        if cert_dir:
            fname = os.path.join(cert_dir, f"{label1}__{label2}.json".replace("/", "_"))
            result.save(fname)
        outcome.update(
            outcome="certified",
            rule=result.rule,
            found=r1 * r2,
            needed=r1 * r2,
            certificate_file=os.path.basename(fname) if fname else "",
            digest=result.digest(),
        )
    else:
        outcome.update(
            outcome="undecided",
            found=result.details.get("found", 0),
            needed=result.details.get("needed", r1 * r2),
        )
    return outcome, time.time() - t0


def cmd_scan(args) -> int:
    r1, r2 = (int(x) for x in args.ranks.split(","))
    m1, m2 = (int(x) for x in args.counts.split(","))
    records = _load_db(args.db)
    list1 = query_records(records, rank=r1, torsion_structure=(2, 2), limit=m1)
    list2 = query_records(records, rank=r2, torsion_structure=(2, 2), limit=m2)
    if len(list1) < m1 or len(list2) < m2:
        log.warning(
            "dataset has only %d/%d matching curves", len(list1), len(list2)
        )
    pairs = []
    if r1 == r2:
        # one of (E1,E2)/(E2,E1) only, and no diagonal pairs
        for i in range(len(list1)):
            for j in range(i + 1, len(list1)):
                pairs.append((list1[i], list1[j]))
    else:
        for a in list1:
            for b in list2:
                pairs.append((a, b))
    os.makedirs(args.out_dir, exist_ok=True)
    cert_dir = os.path.join(args.out_dir, "certs")
    os.makedirs(cert_dir, exist_ok=True)
    ckpt_path = os.path.join(args.out_dir, "checkpoint.json")
    done: dict[str, dict] = {}
    if args.resume and os.path.exists(ckpt_path):
        with open(ckpt_path) as fh:
            done = json.load(fh)
        log.info("resuming: %d pairs already decided", len(done))

    tasks = []
    keys = []
    for a, b in pairs:
        key = f"{a.label}|{b.label}"
        keys.append(key)
        if key in done:
            continue
        prov = {"rank_source": f"{a.rank_provenance}/{b.rank_provenance}"}
        tasks.append(
            (
                [str(x) for x in a.a_invariants],
                [str(x) for x in b.a_invariants],
                a.label, b.label, a.rank, b.rank, prov,
                args.bound, args.denom_bound, args.variants, args.precision,
                cert_dir,
            )
        )

    t0 = time.time()
    per_pair_times = {}

    def _record(outcome, dt):
        key = "|".join(outcome["pair"])
        done[key] = outcome
        per_pair_times[key] = dt
        tmp = ckpt_path + ".tmp"
        with open(tmp, "w") as fh:
            json.dump(done, fh, sort_keys=True)
        os.replace(tmp, ckpt_path)
        log.info(
            "[%d/%d] %s -> %s (%.2fs)",
            len(done), len(pairs), key, outcome["outcome"], dt,
        )

    if args.jobs > 1 and tasks:
        with Pool(processes=args.jobs) as pool:
            for outcome, dt in pool.imap(_pair_task, tasks):
                _record(outcome, dt)
    else:
        for task in tasks:
            outcome, dt = _pair_task(task)
            _record(outcome, dt)

    outcomes = [done[k] for k in keys]  # merged in input order
    errors = [o for o in outcomes if o["outcome"] == "error"]
    outcomes = [o for o in outcomes if o["outcome"] != "error"]
    report = ScanReport(
        ranks=(r1, r2),
        bound=args.bound,
        labels1=[c.label for c in list1],
        labels2=[c.label for c in list2],
        outcomes=outcomes,
        meta={
            "wall_seconds": round(time.time() - t0, 3),
            "per_pair_seconds": {k: round(v, 3) for k, v in per_pair_times.items()},
            "errors": errors,
        },
    )
    report.check_invariants()
    report.save(os.path.join(args.out_dir, "report.json"))
    write_csv(report, os.path.join(args.out_dir, "report.csv"))
    figs = render_figures(report, args.out_dir)
    log.info(
        "scan done: %d/%d certified; report + %d figures in %s",
        report.certified, report.tested, len(figs), args.out_dir,
    )
    print(
        json.dumps(
            {
                "tested": report.tested,
                "certified": report.certified,
                "undecided": report.undecided,
                "out_dir": args.out_dir,
            }
        )
    )
    if errors:
        return EXIT_ERROR
    return EXIT_CERTIFIED if report.certified == report.tested else EXIT_UNDECIDED


def cmd_genus2(args) -> int:
    if "," in args.curve:
        coeffs = tuple(Fraction(c) for c in args.curve.split(","))
        C = Genus2Curve(poly=coeffs)
        rank = args.rank
        label = None
        prov = {"rank_source": "user"}
        if rank is None:
            raise AlbcertError("literal models need --rank")
    else:
        recs = bundled_genus2() if args.db in (None, "bundled") else load_genus2(args.db)
        rec = next((r for r in recs if r.label == args.curve), None)
        if rec is None:
            raise AlbcertError(f"no genus-2 record labeled {args.curve!r}")
        C = rec.curve()
        rank = args.rank if args.rank is not None else rec.jacobian_rank
        label = rec.label
        prov = {"rank_source": rec.rank_provenance}
    result = certify_self_product(
        C, rank, bound=args.bound, provenance=prov, label=label,
        primes_count=args.primes,
    )
    return _emit(result, args.out)


def cmd_est(args) -> int:
    result = rules.certify_est_pair(
        Fraction(args.s), Fraction(args.t1), Fraction(args.t2),
        (args.rank1, args.rank2), {"rank_source": "user"},
    )
    return _emit(result, args.out)


def cmd_combine(args) -> int:
    certs = [Certificate.load(p) for p in args.cert]
    curves = args.curves.split(",")
    flags = {label: "declared" for label in curves}
    result = rules.combine_product(certs, curves, flags)
    return _emit(result, args.out)


def cmd_verify(args) -> int:
    bad = 0
    for path in args.certificate:
        try:
            cert = Certificate.load(path)
            report = rules.verify_certificate(cert)
        except (AlbcertError, VerificationError, OSError, json.JSONDecodeError) as exc:
            print(f"FAIL {path}: {exc}")
            bad += 1
            continue
        tag = "machine-checked" if report["fully_machine_checked"] else (
            "depends on: " + ", ".join(report["external_dependencies"])
        )
        print(f"OK   {path}: rule={report['rule']} checks={len(report['checks'])} ({tag})")
    return EXIT_ERROR if bad else EXIT_CERTIFIED


def cmd_fixtures(args) -> int:
    os.makedirs(args.out_dir, exist_ok=True)
    for cert in rules.fixture_pairs():
        name = cert.witnesses["name"].replace(" ", "_") + ".json"
        cert.save(os.path.join(args.out_dir, name))
    log.info("fixture certificates written to %s", args.out_dir)
    return EXIT_CERTIFIED


class _Parser(argparse.ArgumentParser):
    # usage errors must exit 1; code 2 is reserved for "undecided"
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument(
        "-v", "--verbose", action="store_true", help="log progress to stderr"
    )
    p = _Parser(
        prog="albcert",
        parents=[common],
        description="Finiteness certificates for componentwise Albanese kernels "
        "of products of curves over Q.",
    )
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    pair = sub.add_parser("pair", parents=[common], help="certify one pair of elliptic curves")
    pair.add_argument("--curve1", required=True, help="label or 'a1,a2,a3,a4,a6'")
    pair.add_argument("--curve2", required=True)
    pair.add_argument("--bound", type=int, default=10**4)
    pair.add_argument("--precision", type=int, default=128)
    pair.add_argument("--denom-bound", type=int, default=64)
    pair.add_argument("--variants", type=int, default=6)
    pair.add_argument("--rank1", type=int, default=None)
    pair.add_argument("--rank2", type=int, default=None)
    pair.add_argument("--db", default="bundled", help="curve dataset (path or 'bundled')")
    pair.add_argument("--out", default=None, help="write certificate JSON here")
    pair.set_defaults(func=cmd_pair)

    scan = sub.add_parser("scan", parents=[common], help="scan many pairs, Table-style")
    scan.add_argument("--ranks", required=True, help="r1,r2")
    scan.add_argument("--counts", required=True, help="m1,m2")
    scan.add_argument("--bound", type=int, default=10**4)
    scan.add_argument("--precision", type=int, default=128)
    scan.add_argument("--denom-bound", type=int, default=64)
    scan.add_argument("--variants", type=int, default=6)
    scan.add_argument("--jobs", type=int, default=1)
    scan.add_argument("--resume", action="store_true")
    scan.add_argument("--db", default="bundled")
    scan.add_argument("--out-dir", required=True)
    scan.set_defaults(func=cmd_scan)

    g2 = sub.add_parser("genus2", parents=[common], help="self-product certificate for a genus-2 curve")
    g2.add_argument("--curve", required=True, help="label or 'f0,f1,...,f6'")
    g2.add_argument("--rank", type=int, default=None, help="Jacobian rank (data)")
    g2.add_argument("--bound", type=int, default=1000)
    g2.add_argument("--primes", type=int, default=5)
    g2.add_argument("--db", default="bundled")
    g2.add_argument("--out", default=None)
    g2.set_defaults(func=cmd_genus2)

    est = sub.add_parser("est", parents=[common], help="certify a same-s family pair")
    est.add_argument("--s", required=True)
    est.add_argument("--t1", required=True)
    est.add_argument("--t2", required=True)
    est.add_argument("--rank1", type=int, default=1)
    est.add_argument("--rank2", type=int, default=1)
    est.add_argument("--out", default=None)
    est.set_defaults(func=cmd_est)

    comb = sub.add_parser("combine", parents=[common], help="combine pairwise certificates into a product")
    comb.add_argument("--cert", action="append", required=True, help="pairwise certificate file")
    comb.add_argument("--curves", required=True, help="comma-separated factor labels")
    comb.add_argument("--out", default=None)
    comb.set_defaults(func=cmd_combine)

    ver = sub.add_parser("verify", parents=[common], help="re-execute certificate transcripts")
    ver.add_argument("certificate", nargs="+")
    ver.set_defaults(func=cmd_verify)

    fx = sub.add_parser("fixtures", parents=[common], help="write the literature fixture certificates")
    fx.add_argument("--out-dir", required=True)
    fx.set_defaults(func=cmd_fixtures)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(asctime)s %(name)s %(levelname)s %(message)s",
        stream=sys.stderr,
    )
    try:
        return args.func(args)
    except AlbcertError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    raise SystemExit(main())
