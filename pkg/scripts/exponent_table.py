"""Print rho(chi, beta), the extremal set and the cuspidal exponents for group fixtures.

    python scripts/exponent_table.py --fixture c7c3 --beta 1/2 --beta 1 --beta 3/2
"""

import argparse

from classmoments.chartheory import as_beta, cuspidal_report, dual_group, extremal_set, induce, rho_char, rho_max
from classmoments.fixtures import BUILTIN, load_fixture


def fmt(v):
    return "-" if v is None else (str(v) if not isinstance(v, float) else f"{v:.6g}")


def report(name, betas):
    frame = load_fixture(name)
    ext = {c.exps for c in extremal_set(frame)}
    print(f"== {frame.name}: |G| = {frame.G.order}, [G:H] = {frame.index}, N = {frame.N.factors}")
    print("rho_max:", "  ".join(f"beta={b}: {fmt(rho_max(frame, b))}" for b in betas))
    for chi in dual_group(frame):
        vals = " ".join(v.to_text() for v in induce(frame, chi).values)
        rhos = " ".join(fmt(rho_char(frame, chi, b)) for b in betas)
        print(f"  chi{chi.exps} order {chi.order}{' *' if chi.exps in ext else '  '} rho: {rhos} | ind: {vals}")
    if frame.is_normal_tower:
        rep = cuspidal_report(frame, betas)
        print(f"  cuspidal orbits k = {rep.k}")
        for s in rep.sigmas:
            rc = " ".join(fmt(s.rho_cusp[b]) for b in betas)
            print(f"  sigma {s.sigma}: vanishes={s.vanishes} rho_cusp: {rc}")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--fixture", action="append", help="fixture name (repeatable); default all built-ins")
    ap.add_argument("--beta", action="append", default=None, help="rational beta such as 3/2 (repeatable)")
    args = ap.parse_args()
    betas = [as_beta(b) for b in (args.beta or ["1/2", "1", "3/2", "2"])]
    for name in args.fixture or BUILTIN:
        report(name, betas)


if __name__ == "__main__":
    main()
