"""Class group structures and vanishing cuspidal classes for fundamental discriminants.

    python scripts/cusp_vanishing_survey.py --bound 1000
"""

import argparse
from collections import Counter

from classmoments.chartheory import cusp_vanishes, cuspidal_characters, quadratic_vanishing_structural
from classmoments.quadfield import FormClassGroup, fundamental_discriminants, quadratic_frame


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--bound", type=int, default=1000, help="largest |D|")
    ap.add_argument("--verbose", action="store_true", help="one line per discriminant")
    args = ap.parse_args()
    tally = Counter()
    for D in fundamental_discriminants(args.bound):
        cg = FormClassGroup(D)
        frame = quadratic_frame(cg)
        has_cusp = bool(cuspidal_characters(frame))
        vanishing = [v for v in cg.structure.vectors() if cusp_vanishes(frame, v)]
        agree = all(
            cusp_vanishes(frame, v) == quadratic_vanishing_structural(cg.structure, v) for v in cg.structure.vectors()
        )
        kind = "no cusp part" if not has_cusp else ("order-4 vanishing" if vanishing else "nonvanishing")
        tally[kind] += 1
        if not agree and has_cusp:
            tally["disagreements"] += 1
        if args.verbose or (vanishing and has_cusp):
            print(f"D = {D:5d}  h = {cg.h:3d}  structure {cg.structure.factors}  {kind}  vanishing classes: {len(vanishing)}")
    print(dict(tally))


if __name__ == "__main__":
    main()
