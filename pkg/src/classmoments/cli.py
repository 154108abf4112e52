"""Command-line entry point: ``classmoments <subcommand> ...``.

Exit codes: 0 success, 2 validation failure, 3 cross-check failure.
Fixture files use 0-indexed points; the built-in degree-12 fixture shifts the
1-indexed MAGMA/GAP permutations down by one.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from .chartheory import (
    CrossCheckError,
    NotAutomorphism,
    NotInteger,
    NotNormalTower,
    as_beta,
    cuspidal_report,
    dual_group,
    extremal_set,
    induce,
    quadratic_vanishing_structural,
    rho_char,
    rho_max,
)
from .fixtures import builtin_names, fixture_spec, load_fixture, spec_hash
from .moments import dirichlet_exponent, fit_log_exponent, partial_sums
from .permgroup import GroupError
from .quadfield import (
    FormClassGroup,
    NonIntegral,
    char_coefficients,
    cusp_coefficients,
    eta_product_coeffs,
    export_csv,
    ideal_class_counts,
    quadratic_frame,
    write_table,
)
from .sampler import CrossCheckMismatch, assign, synthetic_char_coeffs, synthetic_class_coeffs, synthetic_cusp_coeffs

EXIT_OK, EXIT_VALIDATION, EXIT_CROSSCHECK = 0, 2, 3


def _num(v):
    """JSON-friendly number: exact rationals as strings, floats as floats."""
    if v is None:
        return None
    if isinstance(v, Fraction):
        return str(v) if v.denominator != 1 else v.numerator
    return float(v)


def _manifest(args, spec=None) -> dict:
    return {
        "version": __version__,
        "command": args.command,
        "fixture": getattr(args, "fixture", None),
        "fixture_sha256": spec_hash(spec) if spec is not None else None,
        "disc": getattr(args, "disc", None),
        "xmax": getattr(args, "xmax", None),
        "seed": getattr(args, "seed", None),
        "argv": sys.argv[1:],
    }


def _emit(args, payload: dict, rows: list[dict] | None = None) -> None:
    """Write JSON (payload) or CSV (rows) to --out or stdout, plus a manifest."""
    manifest = payload.setdefault("manifest", _manifest(args))
    if args.format == "csv" and rows is not None:
        buf = io.StringIO()
        if rows:
            wr = csv.DictWriter(buf, fieldnames=list(rows[0]))
            wr.writeheader()
            wr.writerows(rows)
        text = buf.getvalue()
    else:
        text = json.dumps(payload, indent=2, default=str) + "\n"
    if args.out:
        out = Path(args.out)
        out.write_text(text)
        out.with_name(out.name + ".manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")
    else:
        sys.stdout.write(text)
        if args.format == "csv":
            sys.stderr.write(json.dumps(manifest) + "\n")


def _frame_from_args(args):
    if args.disc is not None:
        return quadratic_frame(FormClassGroup(args.disc)), None
    if not args.fixture:
        raise ValueError("give --fixture or --disc")
    frame = load_fixture(args.fixture)
    return frame, frame.spec


def _betas(args) -> list:
    return [as_beta(b) for b in (args.beta or ["1"])]


def cmd_exponent(args) -> int:
    frame, spec = _frame_from_args(args)
    betas = _betas(args)
    ext = {c.exps for c in extremal_set(frame)}
    chars = []
    for chi in dual_group(frame):
        chars.append(
            {
                "exps": chi.exps,
                "order": chi.order,
                "extremal": chi.exps in ext,
                "induced": [v.to_text() for v in induce(frame, chi).values],
                "rho": {str(b): _num(rho_char(frame, chi, b)) for b in betas},
            }
        )
    payload = {
        "frame": frame.name,
        "group_order": frame.G.order,
        "index": frame.index,
        "N": frame.N.factors,
        "class_sizes": frame.class_sizes,
        "rho_max": {str(b): _num(rho_max(frame, b)) for b in betas},
        "characters": chars,
        "manifest": _manifest(args, spec),
    }
    if frame.is_normal_tower:
        rep = cuspidal_report(frame, betas)
        payload["rho_cusp"] = {
            str(s.sigma): {str(b): _num(v) for b, v in s.rho_cusp.items()} for s in rep.sigmas
        }
    rows = [{"exps": c["exps"], "order": c["order"], "extremal": c["extremal"], **c["rho"]} for c in chars]
    _emit(args, payload, rows)
    return EXIT_OK


def cmd_cusp_classify(args) -> int:
    frame, spec = _frame_from_args(args)
    betas = _betas(args)
    rep = cuspidal_report(frame, betas)
    cusp = {c.exps for c in rep.cuspidal}
    chars = [
        {
            "exps": chi.exps,
            "order": chi.order,
            "induced": [v.to_text() for v in induce(frame, chi).values],
            "rho": {str(b): _num(rho_char(frame, chi, b)) for b in betas},
            "cuspidal": chi.exps in cusp,
            "orbit": rep.orbit_id.get(chi.exps),
        }
        for chi in dual_group(frame)
    ]
    sigmas = []
    disagree = False
    for s in rep.sigmas:
        entry = {
            "sigma": s.sigma,
            "vanishes": s.vanishes,
            "rho_cusp": {str(b): _num(v) for b, v in s.rho_cusp.items()},
            "star_star": {str(b): v for b, v in s.star_star.items()},
        }
        if args.disc is not None:
            entry["structural"] = quadratic_vanishing_structural(frame.N, s.sigma)
            disagree |= entry["structural"] != s.vanishes
        sigmas.append(entry)
    payload = {
        "frame": frame.name,
        "k": rep.k,
        "representatives": [c.exps for c in rep.representatives],
        "characters": chars,
        "sigmas": sigmas,
        "manifest": _manifest(args, spec),
    }
    rows = [{"sigma": e["sigma"], "vanishes": e["vanishes"], **e["rho_cusp"]} for e in sigmas]
    _emit(args, payload, rows)
    return EXIT_CROSSCHECK if disagree else EXIT_OK


def cmd_quad(args) -> int:
    if args.disc is None or args.xmax is None:
        raise ValueError("quad needs --disc and --xmax")
    cg = FormClassGroup(args.disc)
    table = ideal_class_counts(cg, args.xmax)
    payload = {
        "D": cg.D,
        "D0": cg.disc.D0,
        "f": cg.disc.f,
        "w": cg.disc.w,
        "h": cg.h,
        "structure": cg.structure.factors,
        "forms": [tuple(g) for g in cg.forms],
        "X": args.xmax,
    }
    if args.out:
        out = Path(args.out)
        if args.format == "csv":
            export_csv(table, out)
        else:
            write_table(table, out)
        payload["manifest"] = _manifest(args)
        out.with_name(out.name + ".manifest.json").write_text(json.dumps(payload, indent=2, default=str) + "\n")
    else:
        sys.stdout.write(json.dumps(payload, indent=2, default=str) + "\n")
    return EXIT_OK


def _parse_source(text: str) -> tuple[str, int | tuple]:
    kind, _, arg = text.partition(":")
    if kind not in ("class", "char", "cusp"):
        raise ValueError(f"source must be class:<i>, char:<i> or cusp:<i>, got {text!r}")
    return kind, int(arg or 0)


def _estimates(coeffs_factory, power, domain, f, X) -> dict:
    series = partial_sums(coeffs_factory(), power, domain=domain, f=f, X=X)
    out = {"series": series}
    out["log-fit"] = fit_log_exponent(series).to_dict()
    out["dirichlet-fit"] = dirichlet_exponent(coeffs_factory(), power, domain=domain, f=f, X=X).to_dict()
    return out


def cmd_moments(args) -> int:
    if args.disc is None or args.xmax is None:
        raise ValueError("moments needs --disc and --xmax (use 'synthetic' for group fixtures)")
    cg = FormClassGroup(args.disc)
    table = ideal_class_counts(cg, args.xmax)
    kind, i = _parse_source(args.source)
    if kind == "class":
        coeffs = table.counts[i]
    elif kind == "char":
        arr = char_coefficients(table, dual_group(cg.structure)[i])
        coeffs = arr.to_int() if arr.is_rational() else arr.to_float()
    else:
        coeffs = cusp_coefficients(table, i).to_float()
    power = Fraction(args.power)
    domain = args.filter
    res = _estimates(lambda: coeffs, power, domain, cg.disc.f, args.xmax)
    series = res.pop("series")
    series.source = f"quad:{cg.D}:{args.source}"
    _emit(args, {"series": series.rows(), "estimates": res}, series.rows())
    return EXIT_OK


def cmd_eta_verify(args) -> int:
    X = min(args.xmax or 5000, 5000)
    cg = FormClassGroup(-23)
    table = ideal_class_counts(cg, X)
    a = char_coefficients(table, dual_group(cg.structure)[1]).to_int()
    eta = eta_product_coeffs([(1, 1), (23, 1)], X)
    bad = np.flatnonzero(a[1:] != eta[1:]) + 1
    payload = {"X": X, "matches": int(X - len(bad)), "first_mismatch": int(bad[0]) if len(bad) else None}
    rows = [{"n": n, "a_chi": int(a[n]), "eta": int(eta[n])} for n in range(1, X + 1)]
    _emit(args, payload, rows)
    return EXIT_OK if len(bad) == 0 else EXIT_CROSSCHECK


def cmd_synthetic(args) -> int:
    if not args.fixture or args.xmax is None:
        raise ValueError("synthetic needs --fixture and --xmax")
    frame = load_fixture(args.fixture)
    seed = 0 if args.seed is None else args.seed
    asg = assign(frame, args.xmax, seed)
    kind, i = _parse_source(args.source)
    vecs = frame.N.vectors()
    if kind == "char":
        chi = dual_group(frame)[i]
        factory = lambda: synthetic_char_coeffs(asg, chi)
    elif kind == "class":
        factory = lambda: synthetic_class_coeffs(asg, vecs[i])
    else:
        cuspidal_report(frame)
        factory = lambda: synthetic_cusp_coeffs(asg, vecs[i])
    res = _estimates(factory, Fraction(args.power), args.filter, 1, args.xmax)
    series = res.pop("series")
    series.source = f"{frame.name}:{args.source}:seed={seed}"
    _emit(args, {"series": series.rows(), "estimates": res, "manifest": _manifest(args, frame.spec)}, series.rows())
    return EXIT_OK


def cmd_fixtures(args) -> int:
    if args.action == "list":
        for name in builtin_names():
            print(name)
        return EXIT_OK
    if not args.fixture:
        raise ValueError("fixtures dump needs --fixture")
    text = json.dumps(fixture_spec(args.fixture), indent=2) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


COMMANDS = {
    "exponent": cmd_exponent,
    "cusp-classify": cmd_cusp_classify,
    "quad": cmd_quad,
    "moments": cmd_moments,
    "eta-verify": cmd_eta_verify,
    "synthetic": cmd_synthetic,
    "fixtures": cmd_fixtures,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="classmoments", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--fixture", help="built-in name, quad:<D>, or a JSON fixture path")
        p.add_argument("--disc", type=int, help="negative discriminant D")
        p.add_argument("--xmax", type=int, help="coefficient bound X")
        p.add_argument("--beta", action="append", help="exact rational beta, e.g. 3/2 (repeatable)")
        p.add_argument("--power", default="2", help="exponent 2*beta or integer k applied to |a(n)|")
        p.add_argument("--filter", default="all", choices=["all", "squarefree", "coprime-f"])
        p.add_argument("--seed", type=int)
        p.add_argument("--source", default="class:0", help="class:<i>, char:<i> or cusp:<i>")
        p.add_argument("--out")
        p.add_argument("--format", default="json", choices=["csv", "json"])

    for name in COMMANDS:
        p = sub.add_parser(name)
        if name == "fixtures":
            p.add_argument("action", choices=["list", "dump"])
        common(p)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (CrossCheckError, CrossCheckMismatch, NotInteger, NonIntegral) as exc:
        print(f"cross-check failure: {exc}", file=sys.stderr)
        return EXIT_CROSSCHECK
    except (ValueError, GroupError, NotNormalTower, NotAutomorphism, FileNotFoundError, MemoryError) as exc:
        print(f"validation failure: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
