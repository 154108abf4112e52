"""Moment exponents of ideal-class counts for an imaginary quadratic discriminant.

For each class sigma and each power k, fit the exponent of sum_{n<=x} a(sigma, n)^k
by both estimators; also the cuspidal second moment and S(x)/(x log x) at X.

    python scripts/quadratic_moments.py --disc -23 --xmax 1000000 --power 1 --power 2
"""

import argparse
import csv
import math
import sys
from fractions import Fraction

from classmoments.chartheory import rho_cusp, rho_max
from classmoments.moments import ZeroSeries, dirichlet_exponent, fit_log_exponent, partial_sums
from classmoments.quadfield import FormClassGroup, cusp_coefficients, ideal_class_counts, quadratic_frame


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--disc", type=int, default=-23)
    ap.add_argument("--xmax", type=int, default=10**6)
    ap.add_argument("--power", action="append", help="power applied to |a(n)| (repeatable, rational)")
    ap.add_argument("--out", help="CSV file for the result rows (default stdout)")
    args = ap.parse_args()
    powers = [Fraction(p) for p in (args.power or ["1", "2"])]
    cg = FormClassGroup(args.disc)
    table = ideal_class_counts(cg, args.xmax)
    frame = quadratic_frame(cg)
    X, f = args.xmax, cg.disc.f
    domain = "coprime-f" if f > 1 else "all"
    print(f"D = {cg.D}, h = {cg.h}, structure {cg.structure.factors}, f = {f}, X = {X}", file=sys.stderr)
    rows = []
    for i, g in enumerate(cg.forms):
        sources = [(f"class{tuple(g)}", table.counts[i], p, float(rho_max(frame, p / 2))) for p in powers]
        if i != cg.identity:
            sources.append((f"cusp{tuple(g)}", cusp_coefficients(table, i).to_float(), Fraction(2), rho_cusp(frame, cg.coords[i], 1)))
        for label, a, p, predicted in sources:
            try:
                series = partial_sums(a, power=p, domain=domain, f=f)
                lf = fit_log_exponent(series)
                dr = dirichlet_exponent(a, power=p, domain=domain, f=f)
            except ZeroSeries:
                rows.append({"source": label, "power": str(p), "rho_pred": predicted, "log_fit": "zero", "dirichlet": "zero"})
                continue
            rows.append(
                {
                    "source": label,
                    "power": str(p),
                    "rho_pred": predicted,
                    "log_fit": round(lf.rho_hat, 4),
                    "log_fit_se": round(lf.stderr, 4),
                    "dirichlet": round(dr.rho_hat, 4),
                    "S_over_xlogx": series.S[-1] / (X * math.log(X)),
                }
            )
    fields = ["source", "power", "rho_pred", "log_fit", "log_fit_se", "dirichlet", "S_over_xlogx"]
    fh = open(args.out, "w", newline="") if args.out else sys.stdout
    wr = csv.DictWriter(fh, fieldnames=fields)
    wr.writeheader()
    wr.writerows(rows)
    if args.out:
        fh.close()


if __name__ == "__main__":
    main()
