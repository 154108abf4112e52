"""Built-in group fixtures and JSON (de)serialisation.

Fixture files use 0-indexed points.  Generators printed in 1-indexed cycle
notation (as in GAP/MAGMA output) are shifted down by one when loaded.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

from .chartheory import GaloisFrame, frame_from_spec, semidirect_frame
from .permgroup import AbelianStructure, Permutation

__all__ = ["BUILTIN", "builtin_names", "load_fixture", "fixture_spec", "spec_hash", "S4_GENERATORS_1INDEXED"]

# Galois group of x^12 - x^11 + x^10 - x^9 - x^7 + x^6 - 4x^5 - 3x^4 + 3x^3 + 7x^2 + 4x + 1,
# as permutations of its 12 roots (1-indexed, MAGMA labelling at p = 1913).
S4_GENERATORS_1INDEXED = [
    [(2, 12), (4, 7), (8, 10)],
    [(2, 3, 4), (5, 10, 7), (8, 11, 12)],
    [(3, 5, 11), (4, 12, 10)],
    [(2, 7, 8), (4, 12, 10)],
    [(1, 5), (2, 4), (3, 9), (6, 11), (7, 10), (8, 12)],
    [(1, 7), (2, 9), (3, 4), (5, 10), (6, 8), (11, 12)],
    [(1, 6, 9), (2, 8, 7), (3, 11, 5), (4, 10, 12)],
]


def _cycles_to_images(cycles, degree, offset):
    return list(Permutation.from_cycles(cycles, degree, offset=offset).images)


def _s3_spec():
    return {
        "degree": 3,
        "generators": [_cycles_to_images([(0, 1)], 3, 0), _cycles_to_images([(0, 1, 2)], 3, 0)],
        "H": {"type": "point_membership", "point": 2, "points": [2]},
        "Ksub": {"type": "stabilizer", "point": 2},
    }


def _s4_spec():
    return {
        "degree": 12,
        "generators": [_cycles_to_images(c, 12, 1) for c in S4_GENERATORS_1INDEXED],
        # sigma in H iff sigma(x_1) in {x_1, x_6, x_9}
        "H": {"type": "point_membership", "point": 0, "points": [0, 5, 8]},
        "Ksub": {"type": "stabilizer", "point": 0},
    }


def _c7c3_spec():
    seven = _cycles_to_images([(0, 1, 2, 3, 4, 5, 6)], 7, 0)
    return {
        "degree": 7,
        "generators": [seven, _cycles_to_images([(1, 2, 4), (3, 6, 5)], 7, 0)],
        "H": {"type": "generated", "generators": [seven]},
        "Ksub": {"type": "trivial"},
    }


def _cubic_c3():
    return semidirect_frame(AbelianStructure((3,)), lambda v: v, 3, name="cubic-c3")


def _cubic_v4():
    # generator of C3 acts on (Z/2)^2 by the matrix (0 1; 1 1): e1 -> e2, e2 -> e1 + e2
    A = AbelianStructure((2, 2))
    return semidirect_frame(A, lambda v: (v[1], (v[0] + v[1]) % 2), 3, name="cubic-v4")


_SPECS = {"s3-nongalois": _s3_spec, "s4-deg12": _s4_spec, "c7c3": _c7c3_spec}
_BUILDERS = {"cubic-c3": _cubic_c3, "cubic-v4": _cubic_v4}
BUILTIN = tuple(list(_SPECS) + list(_BUILDERS))


def builtin_names() -> list[str]:
    return list(BUILTIN) + ["quad:<D>"]


def fixture_spec(name: str) -> dict:
    """JSON-ready spec for a built-in fixture."""
    if name in _SPECS:
        return _SPECS[name]()
    return load_fixture(name).spec


def load_fixture(name_or_path: str) -> GaloisFrame:
    """Load a built-in fixture, ``quad:<D>``, or a JSON file."""
    if name_or_path in _SPECS:
        return frame_from_spec(_SPECS[name_or_path](), name=name_or_path)
    if name_or_path in _BUILDERS:
        return _BUILDERS[name_or_path]()
    if name_or_path.startswith("quad:"):
        from .quadfield import FormClassGroup, quadratic_frame

        return quadratic_frame(FormClassGroup(int(name_or_path[5:])))
    path = Path(name_or_path)
    if not path.exists():
        raise FileNotFoundError(f"no built-in fixture or file named {name_or_path!r}")
    return frame_from_spec(json.loads(path.read_text()), name=path.stem)


def spec_hash(spec: dict) -> str:
    return hashlib.sha256(json.dumps(spec, sort_keys=True).encode()).hexdigest()
