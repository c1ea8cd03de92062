"""Command-line front end.

Every command reads a JSON document, writes a JSON report to stdout and a
one-line summary to stderr.  Exit codes: 0 success, 1 domain error (the
input is valid but the requested property fails or a reduction does not
apply), 2 usage or input error.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

from . import bifurcation
from .classifier import classify
from .errors import DegreeOverflowError, Poisson3Error
from .jets import DEFAULT_D, DEFAULT_E, rational_str
from .normal_form import a_normal_form, n_reduce, reduce_13, v_reduce
from .poisson import (PfaffianEquation, PoissonFamily, curl, curl_at_origin, from_pfaffian,
                      jacobi_residual, lie_1jet, to_pfaffian)


class UsageError(Exception):
    """Bad arguments or unreadable input (exit code 2)."""


class DomainFailure(Exception):
    """A check ran and failed; carries the report to print (exit code 1)."""

    def __init__(self, report: dict, message: str):
        super().__init__(message)
        self.report = report


def _load_json(path: str):
    try:
        text = Path(path).read_text() if path != "-" else sys.stdin.read()
    except OSError as exc:
        raise UsageError(f"{path}: {exc.strerror or exc}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: malformed JSON at line {exc.lineno}, column {exc.colno}: "
                         f"{exc.msg}") from None


def parse_input(path: str) -> PoissonFamily:
    doc = _load_json(path)
    try:
        return PoissonFamily.from_document(doc)
    except (ValueError, DegreeOverflowError) as exc:
        raise UsageError(f"{path}: {exc}") from None


def _settings(P: PoissonFamily, **extra) -> dict:
    D, E = P.trunc
    return {"trunc": {"d": D, "e": E}, "defaults": {"d": DEFAULT_D, "e": DEFAULT_E}, **extra}


# -- commands ---------------------------------------------------------------------------

def cmd_check(args) -> dict:
    P = parse_input(args.input)
    res = jacobi_residual(P)
    report = {"command": "check", "jacobi_residual": res.to_records(),
              "is_poisson": res.is_zero(), "settings": _settings(P)}
    if not res.is_zero():
        raise DomainFailure(report, "Jacobi identity fails")
    return report


def cmd_curl(args) -> dict:
    P = parse_input(args.input)
    X = curl(P)
    return {"command": "curl",
            "curl": {k: c.to_records() for k, c in zip("xyz", X.components)},
            "curl_at_origin": [rational_str(v) for v in curl_at_origin(P.at_eps0())],
            "settings": _settings(P)}


def cmd_normal_form(args) -> dict:
    P = parse_input(args.input)
    D = args.degree or P.trunc[0]
    if D < 2 or D > 20:
        raise UsageError("--degree: expected an integer in 2..20")
    if D != P.trunc[0]:
        P = PoissonFamily(*(b.with_trunc(D, P.trunc[1]) for b in (P.bxy, P.byz, P.bzx)))
    cls = classify(P)
    report = {"command": "normal-form", "class": cls.tag, "settings": _settings(P)}
    if cls.tag == "V":
        planar, ch = v_reduce(P)
        report["planar"] = {"alpha": planar.alpha.to_records(), "beta": planar.beta.to_records(),
                            "eigen": planar.eigen.to_record(), "change": ch.to_record()}
        report["subtype"] = cls.detail.to_record()
        return report
    if cls.tag == "OutsideTaxonomy":
        raise Poisson3Error(cls.reason or "1-jet is zero: outside the classification")
    nf = reduce_13(P)
    report["normal_form"] = nf.to_record()
    if cls.tag in ("Aplus", "Aminus"):
        report["a_normal_form"] = a_normal_form(P, None, nf).to_record()
    elif cls.tag in ("Nplus", "Nminus"):
        report["n_normal_form"] = n_reduce(P, None, nf).to_record()
    return report


def cmd_classify(args) -> dict:
    P = parse_input(args.input)
    cls = classify(P)
    report = cls.to_record()
    report["command"] = "classify"
    report["one_jet"] = lie_1jet(P).to_record()
    report["settings"] = _settings(P)
    return report


def _parse_grid(text: str):
    try:
        a, b, n = text.split(":")
        return bifurcation.eps_grid(float(a), float(b), int(n))
    except ValueError:
        raise UsageError(f"--eps: expected A:B:N, got {text!r}") from None


def cmd_bifurcate(args) -> dict:
    P = parse_input(args.input)
    if args.tol <= 0 or args.box <= 0 or args.seeds < 2:
        raise UsageError("--tol and --box must be positive and --seeds at least 2")
    grid = _parse_grid(args.eps)
    pred = bifurcation.predict(P)
    settings = _settings(P, grid=grid, box=args.box, tol=args.tol, seeds_per_axis=args.seeds,
                         resolution_floor=bifurcation.RESOLUTION_FLOOR,
                         sign_margin=bifurcation.SIGN_MARGIN)
    if args.predict_only:
        return {"command": "bifurcate", "prediction": pred.to_record(), "settings": settings}
    rep = bifurcation.verify(P, grid, args.box, args.tol, args.seeds, pred)
    report = rep.to_record()
    report["command"] = "bifurcate"
    report["settings"] = {**settings, **report["settings"]}
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["eps", "x", "y", "z", "class", "dimension", "residual"])
            for obs in rep.observations:
                for p in obs.points:
                    w.writerow([p.eps, *p.point, p.label, p.dimension, p.residual])
    if rep.verdict == "mismatch":
        raise DomainFailure(report, "observed singular sets contradict the prediction")
    return report


def cmd_pfaffian(args) -> dict:
    if args.reverse:
        doc = _load_json(args.input)
        if isinstance(doc, dict) and doc.get("command") == "pfaffian":
            # accept the report written by "pfaffian --to" as input
            doc = {k: v for k, v in doc.items()
                   if k not in ("command", "direction", "integrability_residual")}
        try:
            eq = PfaffianEquation.from_document(doc)
        except (ValueError, DegreeOverflowError) as exc:
            raise UsageError(f"{args.input}: {exc}") from None
        P = from_pfaffian(eq)
        return {"command": "pfaffian", "direction": "from", **P.to_document()}
    P = parse_input(args.input)
    eq = to_pfaffian(P)
    return {"command": "pfaffian", "direction": "to", **eq.to_document(),
            "integrability_residual": eq.integrability_residual().to_records()}


# -- entry point -------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="poisson3",
                                     description="Singularities of Poisson structures on R^3.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="Jacobi identity residual")
    p.add_argument("input")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("curl", help="curl (modular vector field)")
    p.add_argument("input")
    p.set_defaults(func=cmd_curl)

    p = sub.add_parser("normal-form", help="normal form of the family")
    p.add_argument("input")
    p.add_argument("--degree", type=int, default=None, help="truncation degree D")
    p.set_defaults(func=cmd_normal_form)

    p = sub.add_parser("classify", help="singularity class at the origin")
    p.add_argument("input")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("bifurcate", help="predicted and observed bifurcation")
    p.add_argument("input")
    a, b, n = bifurcation.DEFAULT_GRID
    p.add_argument("--eps", default=f"{a}:{b}:{n}", help="grid A:B:N")
    p.add_argument("--box", type=float, default=bifurcation.DEFAULT_BOX, help="box half-width")
    p.add_argument("--tol", type=float, default=bifurcation.DEFAULT_TOL, help="residual tolerance")
    p.add_argument("--seeds", type=int, default=bifurcation.DEFAULT_SEEDS,
                   help="Newton seeds per axis")
    p.add_argument("--predict-only", action="store_true")
    p.add_argument("--csv", default=None, help="write the point cloud to this CSV file")
    p.set_defaults(func=cmd_bifurcate)

    p = sub.add_parser("pfaffian", help="Poisson structure <-> Pfaffian equation")
    p.add_argument("input")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--to", dest="reverse", action="store_false", help="Poisson -> Pfaffian")
    g.add_argument("--from", dest="reverse", action="store_true", help="Pfaffian -> Poisson")
    p.set_defaults(func=cmd_pfaffian, reverse=False)
    return parser


def _emit(report: dict) -> None:
    sys.stdout.write(json.dumps(report, sort_keys=True, indent=2) + "\n")


def _join_negative_values(argv: list[str]) -> list[str]:
    """Turn "--eps -0.1:0.1:21" into "--eps=-0.1:0.1:21"; argparse would read the
    value as an option."""
    out, i = [], 0
    while i < len(argv):
        a = argv[i]
        if a in ("--eps", "--box", "--tol") and i + 1 < len(argv) and argv[i + 1].startswith("-"):
            out.append(f"{a}={argv[i + 1]}")
            i += 2
            continue
        out.append(a)
        i += 1
    return out


def main(argv=None) -> int:
    parser = build_parser()
    argv = _join_negative_values(list(sys.argv[1:] if argv is None else argv))
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    try:
        report = args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except DomainFailure as exc:
        _emit(exc.report)
        print(f"{args.command}: {exc}", file=sys.stderr)
        return 1
    except Poisson3Error as exc:
        _emit({"command": args.command, "error": str(exc), "error_type": type(exc).__name__})
        print(f"{args.command}: {exc}", file=sys.stderr)
        return 1
    _emit(report)
    print(f"{args.command}: ok", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
