#!/usr/bin/env python3
"""
contact-pi1: fundamental groups of contact toric manifolds from moment data

Usage:
    contact-pi1 compute data/examples/lens_p3.json [--method thmB|lerman|thmC|all] [--format json|text]
    contact-pi1 validate data/examples/non_good_cone.json
    contact-pi1 crossval --count 200 --seed 7 [--dim 1..3] [--facets 2..8] [--workers 4]
    contact-pi1 corpus [--emit data/corpus]

Exit codes: 0 success, 1 invalid input, 2 theorem-property violation or disagreement.
"""

import argparse
import json
import sys
from typing import Any, Dict, List, Optional

from dotenv import load_dotenv

from contact_pi1.corpus import check_entry, corpus, emit
from contact_pi1.crossval import CrossValidator, parse_range
from contact_pi1.schemas import InputDocument, OutputReport, parse_documents
from contact_pi1.src.cone import enumerate_rays, is_good, lineality_dim
from contact_pi1.src.errors import ContactToricError, ParseError
from contact_pi1.src.pi1 import T3Bundle
from contact_pi1.src.polytope import RationalPolytope, is_delzant, is_integral
from contact_pi1.utils.logger import get_logger

load_dotenv()

logger = get_logger("cli")

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_VIOLATION = 2


def run(document: InputDocument, method: str = "all") -> OutputReport:
    """
    Compute the report for one document.

    Args:
        document: Parsed input document
        method: thmB, lerman, thmC or all

    Returns:
        OutputReport
    """
    report = document.compute(methods=method)
    return OutputReport.from_report(document, report)


def validation_report(document: InputDocument) -> Dict[str, Any]:
    """Validation diagnostics without computing fundamental groups."""
    source = document.to_source()
    result: Dict[str, Any] = {"input": document.echo(), "valid": True}

    if isinstance(source, T3Bundle):
        result["kind"] = "t3_bundle"
        return result

    if isinstance(source, RationalPolytope):
        check = is_delzant(source)
        result.update({
            "vertices": [vertex.render() for vertex in source.vertices],
            "simple": source.is_simple,
            "delzant": check.delzant,
            "integral": is_integral(source),
            "delzant_failures": [
                {"vertex": f.vertex.render(), "facets": list(f.facets), "determinant": f.determinant}
                for f in check.failures
            ],
            "warnings": list(source.warnings),
        })
        return result

    validation = is_good(source)
    result.update({
        "lineality_dim": lineality_dim(source),
        "strictly_convex": validation.strictly_convex,
        "good": validation.good,
        "failures": [
            {
                "facets": list(f.facets),
                "dimension": f.dimension,
                "ray": list(f.generator) if f.generator is not None else None,
                "smith_invariants": list(f.smith_invariants),
                "reason": f.reason,
            }
            for f in validation.failures
        ],
        "warnings": list(source.warnings),
    })
    if validation.strictly_convex:
        result["rays"] = [
            {"generator": list(ray.generator), "facets": sorted(ray.facet_indices)} for ray in enumerate_rays(source)
        ]
    return result


def _read(path: str) -> bytes:
    if path == "-":
        return sys.stdin.buffer.read()
    try:
        with open(path, "rb") as f:
            return f.read()
    except OSError as e:
        raise ParseError(f"cannot read {path}: {e.strerror}")


def _dump(payload: Any) -> str:
    return json.dumps(payload, indent=2)


def cmd_compute(args) -> int:
    documents = parse_documents(_read(args.file))
    reports = [run(document, args.method) for document in documents]

    if args.format == "text":
        print("\n\n".join(report.to_text() for report in reports))
    elif len(reports) == 1:
        print(reports[0].to_json())
    else:
        print(_dump([report.model_dump(exclude_none=True) for report in reports]))

    if any(report.cross_check != "Agree" for report in reports):
        return EXIT_VIOLATION
    return EXIT_OK


def cmd_validate(args) -> int:
    documents = parse_documents(_read(args.file))
    results = [validation_report(document) for document in documents]
    print(_dump(results[0] if len(results) == 1 else results))
    return EXIT_OK


def cmd_crossval(args) -> int:
    validator = CrossValidator(
        seed=args.seed,
        workers=args.workers,
        dim_range=parse_range(args.dim),
        facet_range=parse_range(args.facets),
    )
    summary = validator.run(args.count)
    print(_dump(summary))
    return EXIT_OK if summary['success'] else EXIT_VIOLATION


def cmd_corpus(args) -> int:
    if args.emit:
        paths = emit(args.emit)
        print(_dump([str(path) for path in paths]))
        return EXIT_OK

    results = [check_entry(entry) for entry in corpus()]
    for result in results:
        status = "ok  " if result["passed"] else "FAIL"
        print(f"{status} {result['name']:<28} {result['class_label']:<26} {result['pi1']}")
    failed = sum(1 for result in results if not result["passed"])
    print(f"{len(results) - failed}/{len(results)} corpus entries pass")
    return EXIT_OK if not failed else EXIT_VIOLATION


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='contact-pi1',
        description='Fundamental groups of contact toric manifolds',
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog=__doc__,
    )
    subparsers = parser.add_subparsers(dest='command', required=True)

    compute = subparsers.add_parser('compute', help='Classify and compute pi1 for a document (or array of documents)')
    compute.add_argument('file', help="JSON input file, or '-' for stdin")
    compute.add_argument('--method', choices=['thmB', 'lerman', 'thmC', 'all'], default='all',
                         help='Restrict to one method (default: all)')
    compute.add_argument('--format', choices=['json', 'text'], default='json',
                         help='Report format (default: json)')
    compute.set_defaults(handler=cmd_compute)

    validate = subparsers.add_parser('validate', help='Report validation diagnostics only')
    validate.add_argument('file', help="JSON input file, or '-' for stdin")
    validate.set_defaults(handler=cmd_validate)

    crossval = subparsers.add_parser('crossval', help='Run corpus goldens and seeded random cross-checks')
    crossval.add_argument('--count', type=int, default=200, help='Number of random trials (default: 200)')
    crossval.add_argument('--seed', type=int, default=None, help='Seed (default: CONTACT_PI1_SEED or 7)')
    crossval.add_argument('--dim', default='1..3', help='Range of n, e.g. 1..3 (default: 1..3)')
    crossval.add_argument('--facets', default='2..8', help='Range of facet counts, e.g. 2..8 (default: 2..8)')
    crossval.add_argument('--workers', type=int, default=None,
                          help='Worker processes (default: CONTACT_PI1_WORKERS or 1)')
    crossval.set_defaults(handler=cmd_crossval)

    corpus_parser = subparsers.add_parser('corpus', help='Check (or write out) the built-in examples')
    corpus_parser.add_argument('--emit', help='Directory to write the corpus documents to')
    corpus_parser.set_defaults(handler=cmd_corpus)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point"""
    parser = build_parser()
    args = parser.parse_args(argv)

    if getattr(args, 'count', 0) < 0:
        parser.error("--count must be nonnegative")

    try:
        return args.handler(args)
    except ContactToricError as e:
        logger.warning(f"{type(e).__name__}: {e}")
        print(_dump(e.to_dict()), file=sys.stderr)
        return e.exit_code


if __name__ == "__main__":
    sys.exit(main())
