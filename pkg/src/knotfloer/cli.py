"""Command-line front end.

Exit codes: 0 ok, 2 parse error, 3 semantic error, 4 numerical instability,
5 data-package invariant violation.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import __version__
from .braid import (
    BraidError,
    BraidSyntaxError,
    closure_info,
    connected_sum,
    format_braid,
    free_reduce,
    markov_conjugate,
    markov_stabilize,
    parse_braid,
)
from .floer import (
    SCHEMA,
    D1Error,
    DataInvariantError,
    LiftError,
    PluginError,
    check_identities,
    compose,
    euler,
    knot_document,
    laurent,
    load_knot_data,
    thmA_spectral,
    thmB_spectral,
)
from .invariants import determinant, signature
from .io import (
    BUILTIN_PACKAGES,
    SCHEMA_VERSION,
    DocumentError,
    dumps,
    page_to_json,
    read_document,
    strata_document,
)
from .repvar import SolverConfig, compare_strata, enumerate_strata, predict_composite

EXIT_OK, EXIT_PARSE, EXIT_SEMANTIC, EXIT_UNSTABLE, EXIT_DATA = 0, 2, 3, 4, 5


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _braid(text: str):
    try:
        return parse_braid(text)
    except BraidSyntaxError as exc:
        raise CliError(EXIT_PARSE, f"parse error: {exc}") from None
    except BraidError as exc:
        raise CliError(EXIT_SEMANTIC, str(exc)) from None


def _semantic(fn, *args):
    try:
        return fn(*args)
    except BraidError as exc:
        raise CliError(EXIT_SEMANTIC, str(exc)) from None


# ---------------------------------------------------------------- braid


def cmd_braid(args, out) -> int:
    if args.action == "parse":
        b = _braid(args.word)
        if args.json:
            out.write(dumps({"strands": b.strands, "letters": list(b.letters),
                             "word": format_braid(b)}) + "\n")
        else:
            out.write(format_braid(b) + "\n")
    elif args.action == "sum":
        b = _semantic(connected_sum, _braid(args.word), _braid(args.other))
        out.write(format_braid(b) + "\n")
    elif args.action == "conjugate":
        b = _semantic(markov_conjugate, _braid(args.word), _braid(args.other))
        out.write(format_braid(free_reduce(b) if args.reduce else b) + "\n")
    elif args.action == "stabilize":
        out.write(format_braid(markov_stabilize(_braid(args.word))) + "\n")
    elif args.action == "closure":
        info = closure_info(_braid(args.word))
        if args.json:
            out.write(dumps({"permutation": list(info.permutation),
                             "components": info.components,
                             "exponent_sum": info.exponent_sum}) + "\n")
        else:
            out.write(f"permutation: {' '.join(map(str, info.permutation))}\n"
                      f"components: {info.components}\n"
                      f"exponent_sum: {info.exponent_sum}\n")
    return EXIT_OK


def cmd_invariants(args, out) -> int:
    b = _braid(args.word)
    sig = _semantic(signature, b)
    det = _semantic(determinant, b)
    out.write(dumps({"schema_version": SCHEMA_VERSION, "braid": format_braid(b),
                     "signature": sig, "determinant": det}) + "\n")
    return EXIT_OK


# ---------------------------------------------------------------- reps


def cmd_reps(args, out) -> int:
    b = _braid(args.word)
    cfg = SolverConfig(restarts=args.restarts, seed=args.seed, tol=args.tol)
    result = _semantic(enumerate_strata, b, cfg)
    doc = strata_document(format_braid(b), result, max_samples=args.max_samples)
    code = EXIT_OK
    if args.predict_composite:
        pred = predict_composite(b, cfg)
        if pred is None:
            doc["composite"] = {"split": None, "diff": ["braid does not split as a connected sum"]}
            code = EXIT_SEMANTIC
        else:
            (b1, b2), predicted = pred
            doc["composite"] = {
                "split": [format_braid(b1), format_braid(b2)],
                "predicted": [{"kind": s.kind, "tangent_dim": s.tangent_dim} for s in predicted],
                "diff": compare_strata(predicted, result.strata),
            }
    if not result.stable:
        sys.stderr.write(f"unstable stratum counts across seed batches: {result.batch_counts}\n")
        code = EXIT_UNSTABLE
    out.write(dumps(doc) + "\n")
    return code


# ---------------------------------------------------------------- floer


def _package(spec: str):
    try:
        doc = read_document(spec)
    except DocumentError as exc:
        raise CliError(EXIT_PARSE, str(exc)) from None
    try:
        return load_knot_data(doc)
    except DataInvariantError as exc:
        code = EXIT_PARSE if exc.invariant == SCHEMA else EXIT_DATA
        raise CliError(code, str(exc)) from None
    except BraidSyntaxError as exc:
        raise CliError(EXIT_PARSE, f"braid in {spec}: {exc}") from None
    except BraidError as exc:
        raise CliError(EXIT_SEMANTIC, f"braid in {spec}: {exc}") from None


def _matrix_file(path: str):
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise CliError(EXIT_PARSE, f"{path}: {exc}") from None
    return doc["matrix"] if isinstance(doc, dict) else doc


def _spectral_report(subject, result, r) -> dict:
    polys = {f"E{p.r}": str(laurent(p)) for p in result.pages}
    report = check_identities(subject, result, r)
    return {
        "pages": [page_to_json(p) for p in result.pages],
        "e_infinity": page_to_json(result.e_infinity),
        "converged_at": result.converged_at,
        "poincare_laurent": polys,
        "euler": {f"E{p.r}": euler(laurent(p)) for p in result.pages},
        "identities": [{"name": c.name, "passed": c.passed, "detail": c.detail}
                       for c in report.checks],
        "all_passed": report.passed,
    }


def cmd_floer(args, out) -> int:
    r = Fraction(args.r)
    k1 = _package(args.doc)
    try:
        if args.doc2 is None:
            result = thmA_spectral(k1, r)
            doc = {
                "schema_version": SCHEMA_VERSION,
                "mode": "single",
                "knot": k1.name,
                "chern_N": k1.chern_N,
                "alpha": str(k1.alpha),
                "illustrative": k1.illustrative,
                "window_start": str(r),
            }
        else:
            k2 = _package(args.doc2)
            c = compose(k1, k2)
            d2 = _matrix_file(args.d2) if args.d2 else None
            result = thmB_spectral(c, d2)
            doc = {
                "schema_version": SCHEMA_VERSION,
                "mode": "composite",
                "knot": c.name,
                "chern_N": c.chern_N,
                "alpha": str(c.alpha),
                "illustrative": k1.illustrative or k2.illustrative,
                "generators": [{"id": g.id, "origin": g.origin, "maslov": g.maslov}
                               for g in c.strata_generators],
                "collapse_at": result.converged_at,
            }
        doc.update(_spectral_report(k1 if args.doc2 is None else c, result, r))
    except D1Error as exc:
        raise CliError(EXIT_DATA, str(exc)) from None
    except (LiftError, PluginError) as exc:
        raise CliError(EXIT_SEMANTIC, str(exc)) from None
    out.write(dumps(doc) + "\n")
    return EXIT_OK


def cmd_data(args, out) -> int:
    k = _package(args.name)
    out.write(dumps(knot_document(k, {"source": args.name})) + "\n")
    return EXIT_OK


# ---------------------------------------------------------------- main


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="knotfloer", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    pb = sub.add_parser("braid", help="parse and combine braid words")
    bsub = pb.add_subparsers(dest="action", required=True)
    p = bsub.add_parser("parse")
    p.add_argument("word")
    p.add_argument("--json", action="store_true")
    p = bsub.add_parser("sum", help="braid whose closure is the connected sum")
    p.add_argument("word")
    p.add_argument("other")
    p = bsub.add_parser("conjugate", help="x^-1 b x")
    p.add_argument("word")
    p.add_argument("other", metavar="x")
    p.add_argument("--reduce", action="store_true", help="cancel adjacent inverse pairs")
    p = bsub.add_parser("stabilize")
    p.add_argument("word")
    p = bsub.add_parser("closure")
    p.add_argument("word")
    p.add_argument("--json", action="store_true")
    pb.set_defaults(func=cmd_braid)

    p = sub.add_parser("invariants", help="signature and determinant")
    p.add_argument("word")
    p.set_defaults(func=cmd_invariants)

    p = sub.add_parser("reps", help="enumerate traceless representation strata")
    p.add_argument("word")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--restarts", type=int, default=2000)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--max-samples", type=int, default=5,
                   help="samples written per stratum (counts are always complete)")
    p.add_argument("--predict-composite", action="store_true",
                   help="split as a connected sum and compare with the glued prediction")
    p.set_defaults(func=cmd_reps)

    p = sub.add_parser("floer", help="spectral sequences of one knot or a connected sum")
    p.add_argument("doc", help=f"package file or shipped name ({', '.join(sorted(BUILTIN_PACKAGES))})")
    p.add_argument("doc2", nargs="?")
    p.add_argument("--r", default="0", help="window start (rational)")
    p.add_argument("--d2", help="JSON file with the second differential of a composite")
    p.set_defaults(func=cmd_floer)

    p = sub.add_parser("data", help="print a shipped knot package")
    p.add_argument("name")
    p.set_defaults(func=cmd_data)
    return ap


def main(argv: list[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        return args.func(args, out)
    except CliError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
