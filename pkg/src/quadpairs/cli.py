"""Command-line interface.

Every subcommand writes a JSON report to stdout and a one-line summary to
stderr.  Exit codes: 0 verified or as expected, 1 verification failure,
refusal or mismatch, 2 an UNKNOWN verdict, 3 malformed input.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .algebra_involution import InvolutionAlgebra, InvolutionError
from .cli_examples.examples import EXAMPLE_IDS, ExampleMismatch, load_data, parse_example_id, run_example
from .descent_cech import DescentError, load_cover
from .exact_linalg import LinalgError, Matrix, smith_normal_form
from .exact_rings import RingError, ring_from_json
from .obstructions import UNKNOWN, ObstructionError, strong_obstruction, weak_obstruction
from .quadratic_pairs import (
    PairError,
    QuadraticTriple,
    Semitrace,
    classify_semitraces_affine,
    semitrace_from_ell,
    verify_triple,
)
from .tensor_involutions import f1_star, f_otimes_symplectic, one_in_symd, tensor_product

__all__ = ["main", "InputError", "EXIT_OK", "EXIT_FAILED", "EXIT_UNKNOWN", "EXIT_MALFORMED"]

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_UNKNOWN = 2
EXIT_MALFORMED = 3

_INPUT_ERRORS = (OSError, json.JSONDecodeError, RingError, LinalgError, InvolutionError, DescentError, PairError,
                 KeyError, TypeError, ValueError)


class InputError(ValueError):
    """An input file could not be read or parsed."""


def _read_json(source: str) -> dict:
    """Parse inline JSON, a file path, or the name of a bundled data file."""
    text = source.strip()
    if text.startswith("{") or text.startswith("["):
        return json.loads(text)
    path = Path(source)
    if path.exists():
        return json.loads(path.read_text())
    try:
        return load_data(path.name)
    except FileNotFoundError:
        raise InputError(f"{source}: no such file") from None


def _load(what: str, source: str, build):
    try:
        return build(_read_json(source))
    except InputError:
        raise
    except _INPUT_ERRORS as exc:
        raise InputError(f"{what} {source}: {type(exc).__name__}: {exc}") from exc


def _algebra_and_ell(obj) -> tuple[InvolutionAlgebra, Matrix | None]:
    """Accept ``{"ring","n","u"}`` or ``{"algebra": {...}, "ell": ...}``."""
    A = InvolutionAlgebra.from_json(obj.get("algebra", obj))
    ell = obj.get("ell")
    return A, (Matrix.from_json(A.ring, ell) if ell is not None else None)


def _matrix(obj) -> Matrix:
    return Matrix.from_json(ring_from_json(obj["ring"]), obj["matrix"])


def _emit(report: dict, summary: str, code: int) -> int:
    json.dump(report, sys.stdout, indent=2, sort_keys=True)
    sys.stdout.write("\n")
    print(summary, file=sys.stderr)
    return code


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def cmd_classify(args) -> int:
    A, _ = _load("algebra", args.algebra, _algebra_and_ell)
    if not A.type.orthogonal:
        report = {"status": "REFUSED", "reason": "involution is not orthogonal", "type": A.type.to_json()}
        return _emit(report, "classify: refused, involution is not orthogonal", EXIT_FAILED)
    C = classify_semitraces_affine(A, args.degree)
    report = {"algebra": A.to_json(), "type": A.type.to_json(), **C.to_json()}
    if C.empty:
        ok = C.certificate.verify(C.system)
        report["certificate_verified"] = ok
        return _emit(report, f"classify: EMPTY, certificate verified={ok}", EXIT_OK if ok else EXIT_FAILED)
    return _emit(report, f"classify: FOUND, count={report.get('count')}", EXIT_OK)


def cmd_verify_pair(args) -> int:
    A, ell = _load("pair", args.pair, _algebra_and_ell)
    if ell is None:
        raise InputError(f"pair {args.pair}: missing 'ell'")
    try:
        T = QuadraticTriple(A, Semitrace(A, ell, args.degree))
    except PairError as exc:
        return _emit({"passed": False, "failure": str(exc)}, f"verify-pair: FAIL, {exc}", EXIT_FAILED)
    record = verify_triple(T)
    T.record = record
    summary = "verify-pair: PASS" if record.passed else f"verify-pair: FAIL, {record.failure}"
    return _emit(T.to_json(), summary, EXIT_OK if record.passed else EXIT_FAILED)


def cmd_tensor(args) -> int:
    A1, ell1 = _load("first factor", args.first, _algebra_and_ell)
    A2, _ = _load("second factor", args.second, _algebra_and_ell)
    try:
        TA = tensor_product(A1, A2)
    except InvolutionError as exc:
        return _emit({"refused": str(exc)}, f"tensor: refused, {exc}", EXIT_FAILED)
    A = TA.algebra
    report: dict = {"product": A.to_json(), "type": A.type.to_json()}
    inside, witness = one_in_symd(A, args.degree)
    report["one_in_symd"] = inside
    # a lift when 1 is in Symd, otherwise a certificate that it is not
    report["lift" if inside else "certificate"] = witness.to_json()
    try:
        if ell1 is not None and A1.type.orthogonal and A2.type.orthogonal:
            construction = "semitrace of the first factor times the identity"
            T = f1_star(semitrace_from_ell(A1, ell1, args.degree), A2, args.degree)
        elif A1.type.weakly_symplectic and A2.type.weakly_symplectic:
            construction = "semitrace of two symplectic factors"
            T = f_otimes_symplectic(A1, A2, args.degree)
        else:
            raise PairError("no construction applies: give a lift on an orthogonal first factor or two symplectic factors")
    except PairError as exc:
        report["refused"] = str(exc)
        return _emit(report, f"tensor: refused, {exc}; 1 in Symd: {inside}", EXIT_FAILED)
    report["construction"] = construction
    report["pair"] = T.to_json()
    return _emit(report, f"tensor: pair built ({construction})", EXIT_OK)


def cmd_obstruction(args) -> int:
    G = _load("cover", args.cover, load_cover)
    run = strong_obstruction if args.kind == "strong" else weak_obstruction
    try:
        report = run(G, D=args.degree)
    except (DescentError, ObstructionError, PairError, InvolutionError) as exc:
        return _emit({"kind": args.kind, "refused": str(exc)}, f"obstruction: refused, {exc}", EXIT_FAILED)
    out = report.to_json()
    verified = report.verify()
    out["verified"] = verified
    summary = f"obstruction ({args.kind}): {report.label}, reason: {report.reason}, verified={verified}"
    if not verified:
        return _emit(out, summary, EXIT_FAILED)
    return _emit(out, summary, EXIT_UNKNOWN if report.verdict == UNKNOWN else EXIT_OK)


def cmd_reproduce(args) -> int:
    example = args.example
    try:
        name, n = parse_example_id(example)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    if args.n is not None:
        if name != "curve_7_1":
            raise InputError("--n only applies to curve_7_1")
        example = f"{name}({args.n})"
    script = run_example(example, args.degree, check=False)
    if script.matches:
        return _emit(script.to_json(), f"reproduce {example}: matches the expected table", EXIT_OK)
    out = script.to_json()
    out["diff"] = script.diff()
    return _emit(out, f"reproduce {example}: MISMATCH {json.dumps(script.diff(), sort_keys=True)}", EXIT_FAILED)


def cmd_snf(args) -> int:
    M = _load("matrix", args.matrix, _matrix)
    try:
        res = smith_normal_form(M)
    except LinalgError as exc:
        raise InputError(str(exc)) from exc
    diag = Matrix.zero(M.ring, M.nrows, M.ncols)
    for i, d in enumerate(res.diagonal):
        diag = diag + Matrix.unit(M.ring, M.nrows, i, i, M.ncols, d)
    ok = res.S == diag and res.U.is_invertible() and res.V.is_invertible()
    report = {
        "diagonal": [str(d) for d in res.diagonal],
        "U": res.U.to_json(),
        "V": res.V.to_json(),
        "verified": ok,
    }
    return _emit(report, f"snf: diagonal {report['diagonal']}, verified={ok}", EXIT_OK if ok else EXIT_FAILED)


# ---------------------------------------------------------------------------
# Dispatch
# ---------------------------------------------------------------------------


def _degree(text: str) -> int:
    d = int(text)
    if d < 0:
        raise argparse.ArgumentTypeError("degree must be non-negative")
    return d


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="quadpairs", description="Exact computations with quadratic pairs.")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("classify", help="all semitraces on a matrix algebra, or a certificate that none exist")
    c.add_argument("--algebra", required=True, help="algebra JSON: path, bundled name or inline")
    c.add_argument("--degree", type=_degree, default=0)
    c.set_defaults(func=cmd_classify)

    v = sub.add_parser("verify-pair", help="check the trace axiom for an algebra with a lift ell")
    v.add_argument("--pair", required=True, help='JSON {"algebra": {...}, "ell": [[...]]}')
    v.add_argument("--degree", type=_degree, default=0)
    v.set_defaults(func=cmd_verify_pair)

    t = sub.add_parser("tensor", help="quadratic pair on a tensor product of two algebras")
    t.add_argument("--first", required=True)
    t.add_argument("--second", required=True)
    t.add_argument("--degree", type=_degree, default=0)
    t.set_defaults(func=cmd_tensor)

    o = sub.add_parser("obstruction", help="strong or weak obstruction of a glued algebra")
    o.add_argument("--cover", required=True)
    o.add_argument("--kind", choices=("strong", "weak"), default="weak")
    o.add_argument("--degree", type=_degree, default=0)
    o.set_defaults(func=cmd_obstruction)

    r = sub.add_parser("reproduce", help="run a bundled example against its expected table")
    r.add_argument("example", help=f"one of {', '.join(EXAMPLE_IDS)}; curve_7_1 accepts (n)")
    r.add_argument("--n", type=int, default=None, help="tensor power for curve_7_1")
    r.add_argument("--degree", type=_degree, default=None)
    r.set_defaults(func=cmd_reproduce)

    s = sub.add_parser("snf", help="Smith normal form over Z or Z/n")
    s.add_argument("--matrix", required=True, help='JSON {"ring": "Z", "matrix": [[...]]}')
    s.set_defaults(func=cmd_snf)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_MALFORMED if exc.code else EXIT_OK
    try:
        return args.func(args)
    except InputError as exc:
        return _emit({"error": "malformed input", "diagnostic": str(exc)}, f"error: {exc}", EXIT_MALFORMED)
    except ExampleMismatch as exc:
        return _emit({"error": "mismatch", "diagnostic": str(exc)}, f"error: {exc}", EXIT_FAILED)


if __name__ == "__main__":
    sys.exit(main())
