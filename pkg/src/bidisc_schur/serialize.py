"""JSON schemas for everything that crosses the CLI boundary.

Complex scalars always serialize as [re, im] pairs, matrices as nested
row-major lists of pairs.  Every structure carries a "kind" discriminator
on output; on input the kind may be omitted and is inferred from the keys.
"""

from __future__ import annotations

import json

import numpy as np

from .colligation import Colligation
from .errors import SchemaError
from .factor import FactorizationResult
from .functions import Poly2, PointGrid, PowerSeries2, RationalFunction2, reflect
from .kernels import SampledKernel, ThetaRealization


def complex_to_json(z) -> list:
    z = complex(z)
    return [z.real, z.imag]


def complex_from_json(obj) -> complex:
    if not (isinstance(obj, (list, tuple)) and len(obj) == 2):
        raise SchemaError(f"expected [re, im], got {obj!r}")
    return complex(float(obj[0]), float(obj[1]))


def matrix_to_json(m) -> list:
    m = np.atleast_2d(np.asarray(m, dtype=np.complex128))
    return [[complex_to_json(v) for v in row] for row in m]


def matrix_from_json(obj, shape=None) -> np.ndarray:
    if not isinstance(obj, list):
        raise SchemaError("matrix must be a list of rows")
    if len(obj) == 0:
        out = np.zeros((0, 0), dtype=np.complex128)
    else:
        out = np.array([[complex_from_json(v) for v in row] for row in obj],
                       dtype=np.complex128)
    if shape is not None and out.size == 0:
        out = out.reshape(shape)
    return out


def poly_to_json(p: Poly2) -> dict:
    return {"kind": "poly2", "deg": list(p.degree), "coeffs": matrix_to_json(p.coeffs)}


def poly_from_json(obj) -> Poly2:
    return Poly2(matrix_from_json(obj["coeffs"]))


def series_to_json(s: PowerSeries2) -> dict:
    return {"kind": "series2", "deg": list(s.orders), "coeffs": matrix_to_json(s.coeffs)}


def series_from_json(obj) -> PowerSeries2:
    return PowerSeries2(matrix_from_json(obj["coeffs"]))


def rational_to_json(f: RationalFunction2) -> dict:
    return {
        "kind": "rational2",
        "monomial": list(f.monomial),
        "unimodular": complex_to_json(f.unimodular),
        "denominator": poly_to_json(f.denominator),
        "numerator": poly_to_json(f.numerator),
    }


def rational_from_json(obj) -> RationalFunction2:
    den = poly_from_json(obj["denominator"])
    u = complex_from_json(obj.get("unimodular", [1.0, 0.0]))
    f = RationalFunction2(tuple(obj["monomial"]), den, u)
    if "numerator" in obj:
        given = poly_from_json(obj["numerator"])
        if given != f.numerator:
            raise SchemaError("numerator is not the (scaled) reflection of the denominator")
    return f


def grid_to_json(g: PointGrid) -> dict:
    return {
        "kind": "grid",
        "ambient": g.ambient,
        "points": [[complex_to_json(z) for z in pt] for pt in g.points],
    }


def grid_from_json(obj) -> PointGrid:
    pts = [[complex_from_json(z) for z in pt] for pt in obj["points"]]
    return PointGrid(obj["ambient"], np.array(pts, dtype=np.complex128))


def colligation_to_json(v: Colligation) -> dict:
    return {
        "kind": "colligation",
        "a": complex_to_json(v.a),
        "B": matrix_to_json(v.B),
        "C": matrix_to_json(v.C),
        "D": matrix_to_json(v.D),
        "partition": list(v.partition),
    }


def colligation_from_json(obj) -> Colligation:
    part = [int(h) for h in obj["partition"]]
    h = sum(part)
    return Colligation(
        complex_from_json(obj["a"]),
        matrix_from_json(obj["B"], shape=(1, h)),
        matrix_from_json(obj["C"], shape=(h, 1)),
        matrix_from_json(obj["D"], shape=(h, h)),
        part,
    )


def kernel_to_json(k: SampledKernel) -> dict:
    if k.dim == 1:
        values = [[complex_to_json(v) for v in row] for row in k.values]
    else:
        values = [[matrix_to_json(k.values[i, j]) for j in range(len(k.grid))]
                  for i in range(len(k.grid))]
    return {"kind": "kernel", "grid": grid_to_json(k.grid), "dim": k.dim, "values": values}


def kernel_from_json(obj) -> SampledKernel:
    grid = grid_from_json(obj["grid"])
    dim = int(obj.get("dim", 1))
    n = len(grid)
    if dim == 1:
        vals = np.array([[complex_from_json(v) for v in row] for row in obj["values"]],
                        dtype=np.complex128)
    else:
        vals = np.array([[matrix_from_json(obj["values"][i][j]) for j in range(n)]
                         for i in range(n)], dtype=np.complex128)
    return SampledKernel(grid, vals, dim)


def blaschke_from_json(obj) -> tuple:
    constant = complex_from_json(obj.get("constant", [1.0, 0.0]))
    zeros = [complex_from_json(z) for z in obj.get("zeros", [])]
    return constant, zeros


def blaschke_to_json(constant, zeros) -> dict:
    return {"kind": "blaschke", "constant": complex_to_json(constant),
            "zeros": [complex_to_json(z) for z in zeros]}


def theta_to_json(t: ThetaRealization) -> dict:
    return {
        "kind": "theta",
        "dims": [t.e_star, t.e, t.h],
        "A": matrix_to_json(t.A),
        "B": matrix_to_json(t.B),
        "C": matrix_to_json(t.C),
        "D": matrix_to_json(t.D),
    }


def theta_from_json(obj) -> ThetaRealization:
    e_star, e, h = (int(x) for x in obj["dims"])
    return ThetaRealization(
        matrix_from_json(obj["A"], shape=(e, e_star)),
        matrix_from_json(obj["B"], shape=(e, h)),
        matrix_from_json(obj["C"], shape=(h, e_star)),
        matrix_from_json(obj["D"], shape=(h, h)),
        e_star,
    )


def factorization_to_json(r: FactorizationResult) -> dict:
    return {
        "kind": "factorization",
        "V1": colligation_to_json(r.v1),
        "V2": colligation_to_json(r.v2),
        "x": complex_to_json(r.x),
        "y": complex_to_json(r.y),
        "certificate": r.certificate,
    }


_KIND_PARSERS = {
    "poly2": poly_from_json,
    "series2": series_from_json,
    "rational2": rational_from_json,
    "grid": grid_from_json,
    "colligation": colligation_from_json,
    "kernel": kernel_from_json,
    "blaschke": blaschke_from_json,
    "theta": theta_from_json,
}


def _infer_kind(obj: dict) -> str:
    if "partition" in obj:
        return "colligation"
    if "denominator" in obj:
        return "rational2"
    if "zeros" in obj or "constant" in obj:
        return "blaschke"
    if "values" in obj and "grid" in obj:
        return "kernel"
    if "ambient" in obj:
        return "grid"
    if "dims" in obj:
        return "theta"
    if "coeffs" in obj:
        return "series2"
    raise SchemaError(f"cannot infer object kind from keys {sorted(obj)}")


def parse_object(obj: dict):
    """Parse a JSON object into the library value it encodes."""
    if not isinstance(obj, dict):
        raise SchemaError("top-level JSON value must be an object")
    kind = obj.get("kind") or _infer_kind(obj)
    if kind not in _KIND_PARSERS:
        raise SchemaError(f"unknown kind {kind!r}")
    try:
        return _KIND_PARSERS[kind](obj)
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"malformed {kind} object: {exc}") from exc


def dumps(obj) -> str:
    """Deterministic JSON text: sorted keys, shortest round-trip floats."""
    return json.dumps(obj, sort_keys=True, indent=2)
