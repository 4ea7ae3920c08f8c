"""JSON encoding of points, sequences, problems and interpolants.

A complex number is ``[re, im]``. A point of the disk may be written as a
single complex number; a point of the ball is a list of ``n`` of them.
"""

from __future__ import annotations

import json
import math

import numpy as np

from .geometry import DomainSpec
from .integration import AtomicMeasure, SpaceParams
from .interpolation import SCHEMES, Interpolant, InterpolationProblem
from .sequences import PointSequence, WeightedValueSequence


class InputError(ValueError):
    """Malformed or inconsistent input data."""


def encode_complex(z) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


def decode_complex(item) -> complex:
    if isinstance(item, (int, float)) and not isinstance(item, bool):
        return complex(item)
    if (isinstance(item, (list, tuple)) and len(item) == 2
            and all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in item)):
        return complex(item[0], item[1])
    raise InputError(f"expected a complex number [re, im], got {item!r}")


def encode_point(p) -> list:
    p = np.atleast_1d(p)
    if len(p) == 1:
        return encode_complex(p[0])
    return [encode_complex(c) for c in p]


def decode_point(item) -> np.ndarray:
    if isinstance(item, (list, tuple)) and item and isinstance(item[0], (list, tuple)):
        return np.array([decode_complex(c) for c in item], dtype=complex)
    return np.array([decode_complex(item)], dtype=complex)


def decode_points(items) -> np.ndarray:
    if not isinstance(items, list):
        raise InputError("points must be a list")
    if not items:
        return np.zeros((0, 1), dtype=complex)
    pts = [decode_point(x) for x in items]
    dims = {len(p) for p in pts}
    if len(dims) != 1:
        raise InputError(f"points of mixed dimension {sorted(dims)}")
    return np.stack(pts)


def encode_points(points) -> list:
    return [encode_point(p) for p in np.atleast_2d(points)]


def _clean(x):
    """Replace non-finite floats so the output is strict JSON."""
    if isinstance(x, dict):
        return {str(k): _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if isinstance(x, (np.floating, float)):
        x = float(x)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    if isinstance(x, (complex, np.complexfloating)):
        return encode_complex(x)
    if isinstance(x, np.ndarray):
        return _clean(x.tolist())
    return x


def dumps(obj) -> str:
    """Deterministic JSON text (sorted keys, fixed separators, trailing newline)."""
    return json.dumps(_clean(obj), sort_keys=True, indent=2, allow_nan=False) + "\n"


def load_json(path) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: malformed JSON ({exc})") from exc
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from exc


def _require(data: dict, key: str):
    if not isinstance(data, dict):
        raise InputError("expected a JSON object")
    if key not in data:
        raise InputError(f"missing field {key!r}")
    return data[key]


def space_from_dict(data: dict) -> SpaceParams:
    try:
        return SpaceParams(float(_require(data, "p")), float(_require(data, "beta")),
                           int(data.get("n", 1)))
    except (TypeError, ValueError) as exc:
        if isinstance(exc, InputError):
            raise
        raise InputError(f"invalid space: {exc}") from exc


def sequence_from_dict(data: dict) -> PointSequence:
    return PointSequence(decode_points(_require(data, "points")))


def sequence_to_dict(seq: PointSequence) -> dict:
    return {"points": encode_points(seq.points) if len(seq) else []}


def problem_from_dict(data: dict) -> tuple[InterpolationProblem, dict]:
    """Problem plus solver options (``tol``, ``max_iter`` when present)."""
    sp = space_from_dict(_require(data, "space"))
    pts = decode_points(_require(data, "points"))
    if len(pts) and pts.shape[1] != sp.n:
        raise InputError(f"points have dimension {pts.shape[1]} but space has n = {sp.n}")
    if not len(pts):
        pts = np.zeros((0, sp.n), dtype=complex)
    vals = np.array([decode_complex(v) for v in _require(data, "targets")], dtype=complex)
    scheme = data.get("scheme", "p1" if sp.p == 1 else "general_p")
    if scheme not in SCHEMES:
        raise InputError(f"scheme must be one of {SCHEMES}")
    prob = InterpolationProblem(PointSequence(pts), WeightedValueSequence(vals, sp.value_weight),
                                sp, scheme, float(data.get("m", 1.0)))
    opts = {k: data[k] for k in ("tol", "max_iter", "a_param", "b", "v0") if k in data}
    return prob, opts


def problem_to_dict(prob: InterpolationProblem, **opts) -> dict:
    out = {
        "space": prob.space.to_dict(),
        "scheme": prob.scheme,
        "m": prob.m,
        "points": encode_points(prob.seq.points) if len(prob.seq) else [],
        "targets": [encode_complex(v) for v in prob.targets.values],
    }
    out.update(opts)
    return out


def interpolant_to_dict(f: Interpolant) -> dict:
    if f.offset is not None:
        raise ValueError("interpolants with a closed-form offset are not serializable")
    return {
        "terms": [
            {"coefficient": encode_complex(c), "base_point": encode_point(a), "exponent": float(s)}
            for c, a, s in f.terms
        ],
        "n": f.n,
    }


def interpolant_from_dict(data: dict) -> Interpolant:
    terms = _require(data, "terms")
    n = int(data.get("n", 1))
    if not terms:
        return Interpolant.zero(n)
    coef = [decode_complex(_require(t, "coefficient")) for t in terms]
    pts = np.stack([decode_point(_require(t, "base_point")) for t in terms])
    exps = [float(_require(t, "exponent")) for t in terms]
    return Interpolant(coef, pts, exps)


def measure_from_dict(items) -> AtomicMeasure:
    """``[{"point": ..., "mass": m}, ...]``."""
    if not isinstance(items, list) or not items:
        raise InputError("a measure is a non-empty list of {point, mass} objects")
    pts = np.stack([decode_point(_require(a, "point")) for a in items])
    masses = [float(_require(a, "mass")) for a in items]
    return AtomicMeasure(pts, masses)


def domain_from_dict(data: dict) -> DomainSpec:
    try:
        return DomainSpec.from_dict(data)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"invalid domain: {exc}") from exc


def bundled_path(name: str):
    """Path of a bundled example problem (``two_point_disk``, ``five_point_p1``, ``four_point_p2``)."""
    from importlib import resources

    return resources.files("bergman_interp") / "data" / f"{name}.json"


def load_bundled(name: str) -> dict:
    return json.loads(bundled_path(name).read_text(encoding="utf-8"))
