"""gl2lab command-line front end.

Exit codes: 0 clean run, 1 violation or failed verification, 2 usage or budget error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from pathlib import Path

from . import __version__
from .cache import FAMILIES, CacheError, EnumerationCache, default_dir
from .classify import classify
from .groups import BudgetExceeded, closure
from .mat2 import Mat2, is_prime
from .scan import ABELIAN, CYCLOTOMIC, ScanParams, run_scan
from .verify import (
    FULL_LATTICE_MAX_P,
    guided_enumeration_agrees,
    verify_dickson,
    verify_lemma33,
    verify_lemma34,
    verify_prop31_group_side,
    verify_prop32,
)

FORMATS = ("json", "csv", "text")


class UsageError(Exception):
    pass


def _odd_prime(text: str) -> int:
    try:
        p = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if p < 3 or not is_prime(p):
        raise argparse.ArgumentTypeError(f"{p} is not an odd prime")
    return p


def _positive(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {v}")
    return v


def _add_output(sp: argparse.ArgumentParser):
    sp.add_argument("--format", choices=FORMATS, default="json")
    sp.add_argument("--output", "-o", type=Path, help="write the report here instead of stdout")


def _cache_from(args) -> EnumerationCache | None:
    d = args.cache_dir or default_dir()
    return EnumerationCache(d) if d else None


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="gl2lab", description="Subgroups of GL_2(Z/nZ): classify, verify, scan.")
    ap.add_argument("--version", action="version", version=f"gl2lab {__version__}")
    ap.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = ap.add_subparsers(dest="verb", required=True)

    c = sub.add_parser("classify", help="label the subgroup generated by matrices mod p")
    c.add_argument("--p", type=_odd_prime, required=True)
    c.add_argument("--gens", nargs="+", required=True, metavar="a,b,c,d")
    _add_output(c)

    v = sub.add_parser("verify", help="exhaustively check a lemma at a prime")
    v.add_argument("target", choices=("lemma33", "lemma34", "prop31", "prop32", "dickson"))
    v.add_argument("--p", type=int, help="odd prime (modulus n for prop31)")
    v.add_argument("--part", help="lemma34: a|b|c|d; prop32: any of a,b,c (default: all within budget)")
    v.add_argument("--pair", choices=("ns", "nns", "both"), default="both", help="lemma33 normalizer pair")
    v.add_argument("--max-p", type=_positive, help="override the prime budget")
    _add_output(v)

    s = sub.add_parser("scan", help="case-analysis scan over candidate image classes")
    s.add_argument("mode", choices=(CYCLOTOMIC, ABELIAN))
    s.add_argument("--p", type=_odd_prime, required=True)
    s.add_argument("--degree", type=_positive, default=1)
    ram = s.add_mutually_exclusive_group()
    ram.add_argument("--unramified", dest="ramified", action="store_false")
    ram.add_argument("--ramified", dest="ramified", action="store_true")
    s.set_defaults(ramified=False)
    s.add_argument("--workers", type=_positive, default=1)
    s.add_argument("--max-p", type=_positive, help="override the enumeration budget")
    s.add_argument("--cache-dir", type=Path, help=f"enumeration cache (default: ${'GL2LAB_CACHE_DIR'})")
    _add_output(s)

    k = sub.add_parser("cache", help="manage the enumeration cache")
    k.add_argument("action", choices=("warm", "clear", "stat"))
    k.add_argument("--cache-dir", type=Path)
    k.add_argument("--p", type=_odd_prime, nargs="+", default=[])
    k.add_argument("--family", choices=sorted(FAMILIES), nargs="+")
    _add_output(k)
    return ap


# -- commands -------------------------------------------------------------------


def cmd_classify(args) -> tuple[dict, list[dict], int]:
    try:
        gens = [Mat2.parse(g, args.p) for g in args.gens]
    except ValueError as exc:
        raise UsageError(str(exc))
    res = classify(closure(args.p, gens))
    doc = res.to_json()
    row = {
        "key": doc["key"],
        "tags": "|".join(lab["tag"] for lab in doc["labels"]),
        "projective_order": doc["projective_order"],
        "is_abelian": doc["is_abelian"],
        "is_diagonalizable": doc["is_diagonalizable"],
        "det_image_order": doc["det_image_order"],
    }
    return doc, [row], 0


def _verify_reports(args):
    t = args.target
    if args.p is None:
        raise UsageError(f"verify {t} needs --p")
    if t == "prop31":
        if args.p < 2:
            raise UsageError("--p must be >= 2")
        return [verify_prop31_group_side(args.p)]
    try:
        p = _odd_prime(str(args.p))
    except argparse.ArgumentTypeError as exc:
        raise UsageError(str(exc))
    budget = {"max_p": args.max_p} if args.max_p else {}
    if t == "lemma33":
        pairs = ("ns", "nns") if args.pair == "both" else (args.pair,)
        return [verify_lemma33(p, pair) for pair in pairs]
    if t == "lemma34":
        parts = args.part or "abcd"
        if set(parts) - set("abcd"):
            raise UsageError(f"--part must be drawn from a, b, c, d; got {parts!r}")
        return [verify_lemma34(p, part, **budget) for part in parts]
    if t == "prop32":
        parts = args.part or ("abc" if p <= FULL_LATTICE_MAX_P else "bc")
        if set(parts) - set("abc"):
            raise UsageError(f"--part must be drawn from a, b, c; got {parts!r}")
        reports = [verify_prop32(p, parts, **budget)]
        if "a" in parts:
            reports.append(guided_enumeration_agrees(p))
        return reports
    return [verify_dickson(p)]


def cmd_verify(args):
    reports = _verify_reports(args)
    doc = {"passed": all(r.passed for r in reports), "reports": [r.to_json() for r in reports]}
    rows = [
        {
            "name": r.name,
            "params": json.dumps(r.params, sort_keys=True),
            "passed": r.passed,
            "checked": r.checked,
            "failure_count": r.failure_count,
        }
        for r in reports
    ]
    return doc, rows, 0 if doc["passed"] else 1


def cmd_scan(args):
    params = ScanParams(
        p=args.p, d=args.degree, ramified=args.ramified, mode=args.mode, max_p=args.max_p, workers=args.workers
    )
    try:
        cache = _cache_from(args)
    except CacheError as exc:
        raise UsageError(str(exc))
    report = run_scan(params, cache)
    rows = [
        {
            "key": c["key"],
            "digest": c["digest"],
            "order": c["order"],
            "generators": " ".join(c["generators"]),
            "det_image_order": c["det_image_order"],
            "excluded_by": "|".join(c["excluded_by"]),
            "constraints_met": "|".join(c["constraints_met"]),
            "admissible": c["admissible"],
            "labels": "|".join(lab["tag"] for lab in c["labels"]),
            "conclusion_ok": c["conclusion_ok"],
        }
        for c in report.classes
    ]
    return report.to_json(), rows, report.exit_code


def cmd_cache(args):
    d = args.cache_dir or default_dir()
    if d is None:
        raise UsageError("no cache directory: pass --cache-dir or set GL2LAB_CACHE_DIR")
    cache = EnumerationCache(d)
    if args.action == "warm":
        if not args.p:
            raise UsageError("cache warm needs --p")
        doc = cache.warm(args.p, args.family)
        rows = doc["entries"]
    elif args.action == "clear":
        doc = cache.clear()
        rows = [{"removed": doc["removed"]}]
    else:
        doc = cache.stat()
        rows = doc["files"]
    return doc, rows, 0


COMMANDS = {"classify": cmd_classify, "verify": cmd_verify, "scan": cmd_scan, "cache": cmd_cache}


# -- rendering ------------------------------------------------------------------


def _text(verb: str, doc: dict) -> str:
    lines = []
    if verb == "classify":
        tags = ", ".join(lab["tag"] + (f" via {lab['witness']}" if "witness" in lab else "") for lab in doc["labels"])
        lines.append(f"subgroup: {doc['key']}")
        lines.append(f"labels: {tags or '(none)'}")
        lines.append(f"projective order {doc['projective_order']}, det image order {doc['det_image_order']}")
        lines.append(f"abelian: {doc['is_abelian']}, diagonalizable: {doc['is_diagonalizable']}")
    elif verb == "verify":
        for r in doc["reports"]:
            status = "PASS" if r["passed"] else "FAIL"
            params = " ".join(f"{k}={v}" for k, v in r["params"].items())
            lines.append(f"{status} {r['name']} {params}: {r['checked']} checks, {r['failure_count']} failures")
            for f in r["failures"]:
                lines.append(f"  counterexample: {json.dumps(f, sort_keys=True)}")
    elif verb == "scan":
        pr, tot = doc["params"], doc["totals"]
        lines.append(
            f"{pr['mode']} scan p={pr['p']} d={pr['d']} {'ramified' if pr['ramified'] else 'unramified'}"
            f" ({'asserted' if doc['asserted'] else 'descriptive'}, threshold p > {doc['threshold']})"
        )
        lines.append(f"classes {tot['classes']}, admissible {tot['admissible']}, violations {tot['violations']}")
        for c in doc["classes"]:
            if c["admissible"]:
                lines.append(f"  [{c['digest']}] order {c['order']}: {', '.join(c['constraints_met'])}")
        for v in doc["violations"]:
            lines.append(f"  VIOLATION {v['digest']} {v['key']}")
        lines.append(f"elapsed {doc['elapsed_ms']} ms")
    else:
        lines.append(json.dumps(doc, indent=2, sort_keys=True))
    return "\n".join(lines) + "\n"


def _csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    if rows:
        w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
    return buf.getvalue()


def render(verb: str, fmt: str, doc: dict, rows: list[dict]) -> str:
    if fmt == "json":
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if fmt == "csv":
        return _csv(rows)
    return _text(verb, doc)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        doc, rows, code = COMMANDS[args.verb](args)
    except (UsageError, BudgetExceeded, CacheError, ValueError) as exc:
        print(f"gl2lab {args.verb}: error: {exc}", file=sys.stderr)
        return 2
    out = render(args.verb, args.format, doc, rows)
    if args.output:
        try:
            args.output.write_text(out)
        except OSError as exc:
            print(f"gl2lab: cannot write {args.output}: {exc}", file=sys.stderr)
            return 2
    else:
        sys.stdout.write(out)
    return code


if __name__ == "__main__":
    sys.exit(main())
