"""JSON interchange for algebra specs and deterministic report output.

Spec documents look like::

    {"dim": 2, "labels": ["theta", "w1"],
     "death": [[1, 0], [0, 0]], "functional": [[1, 0], [0, 0]],
     "structure": [[1, 1, 0, 1.0, 0.0]],          # i, j, k, re, im
     "involution": [[0, 0, 1, 0], [1, 1, 1, 0]],  # i, j, re, im
     "tol": 1e-9}

Complex numbers are ``[re, im]`` pairs and omitted sparse entries are zero.
An optional ``"meta"`` object carries builder metadata.
"""

import json
import math

import numpy as np

from .algebra import ItoAlgebraSpec, default_tol
from .errors import ShapeError


def _pair(z):
    z = complex(z)
    return [z.real, z.imag]


def _dense_pairs(vec):
    return [_pair(z) for z in np.asarray(vec).reshape(-1)]


def _sparse(array):
    array = np.asarray(array)
    out = []
    for idx in zip(*np.nonzero(array)):
        out.append([int(i) for i in idx] + _pair(array[idx]))
    return out


def _from_pairs(items, name):
    try:
        return np.array([complex(re, im) for re, im in items], dtype=complex)
    except (TypeError, ValueError) as exc:
        raise ShapeError(f"{name}: expected a list of [re, im] pairs ({exc})")


def _from_sparse(entries, shape, name):
    out = np.zeros(shape, dtype=complex)
    rank = len(shape)
    for entry in entries:
        if len(entry) != rank + 2:
            raise ShapeError(f"{name}: entries need {rank} indices plus [re, im], got {entry!r}")
        idx = tuple(int(i) for i in entry[:rank])
        if any(i < 0 or i >= s for i, s in zip(idx, shape)):
            raise ShapeError(f"{name}: index {idx} out of range for shape {shape}")
        out[idx] += complex(entry[rank], entry[rank + 1])
    return out


def spec_to_dict(spec: ItoAlgebraSpec) -> dict:
    doc = {
        "dim": spec.dim,
        "labels": list(spec.labels),
        "death": _dense_pairs(spec.death),
        "functional": _dense_pairs(spec.functional),
        "structure": _sparse(spec.structure),
        "involution": _sparse(spec.involution),
        "tol": spec.tol,
    }
    meta = {}
    if spec.families:
        meta["families"] = sorted(spec.families)
    vac = spec.meta.get("vacuum")
    if vac is not None:
        meta["vacuum"] = {
            "m": int(vac["m"]),
            "x_map": _sparse(vac["x_map"]),
            "y_map": _sparse(vac["y_map"]),
            "ops": _sparse(vac["ops"]),
        }
    if meta:
        doc["meta"] = meta
    return doc


def spec_from_dict(doc: dict, tol=None) -> ItoAlgebraSpec:
    if not isinstance(doc, dict):
        raise ShapeError("spec document must be a JSON object")
    missing = {"dim", "death", "functional", "structure", "involution"} - set(doc)
    if missing:
        raise ShapeError(f"spec document is missing {sorted(missing)}")
    n = doc["dim"]
    if not isinstance(n, int) or n < 1:
        raise ShapeError(f"dim must be a positive integer, got {n!r}")
    labels = doc.get("labels") or [f"a{i}" for i in range(n)]
    meta = {}
    raw_meta = doc.get("meta") or {}
    if "families" in raw_meta:
        meta["families"] = frozenset(raw_meta["families"])
    if "vacuum" in raw_meta:
        v = raw_meta["vacuum"]
        m = int(v["m"])
        meta["vacuum"] = {
            "m": m,
            "x_map": _from_sparse(v["x_map"], (m, n), "meta.vacuum.x_map"),
            "y_map": _from_sparse(v["y_map"], (m, n), "meta.vacuum.y_map"),
            "ops": _from_sparse(v["ops"], (n, m, m), "meta.vacuum.ops"),
        }
    if tol is None:
        tol = doc.get("tol", default_tol())
    return ItoAlgebraSpec(
        dim=n,
        labels=tuple(labels),
        structure=_from_sparse(doc["structure"], (n, n, n), "structure"),
        involution=_from_sparse(doc["involution"], (n, n), "involution"),
        death=_from_pairs(doc["death"], "death"),
        functional=_from_pairs(doc["functional"], "functional"),
        tol=tol,
        meta=meta,
    )


def save_spec(spec: ItoAlgebraSpec, path) -> None:
    with open(path, "w") as fh:
        fh.write(dumps(spec_to_dict(spec)))
        fh.write("\n")


def load_spec(path, tol=None) -> ItoAlgebraSpec:
    with open(path) as fh:
        return spec_from_dict(json.load(fh), tol=tol)


# --------------------------------------------------------------------------
# report serialization


def to_jsonable(obj):
    """Convert numpy arrays and complex numbers to plain JSON values.

    Complex scalars become ``[re, im]``; complex arrays become nested lists of
    pairs. Real arrays stay real.
    """
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, (set, frozenset)):
        return sorted(to_jsonable(v) for v in obj)
    if isinstance(obj, np.ndarray):
        if np.iscomplexobj(obj):
            return to_jsonable(obj.tolist())
        return obj.tolist()
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    return obj


def _fmt_float(x: float) -> str:
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    if x == 0:
        return "0.0"
    text = format(x, ".17g")
    return text if any(ch in text for ch in ".en") else text + ".0"


def dumps(obj, indent=None) -> str:
    """Deterministic JSON: sorted keys, floats at 17 significant digits."""
    obj = to_jsonable(obj)
    pad = "" if indent is None else " " * indent
    sep = ", " if indent is None else ","

    def enc(o, depth):
        nl = "" if indent is None else "\n" + pad * (depth + 1)
        end = "" if indent is None else "\n" + pad * depth
        if isinstance(o, dict):
            if not o:
                return "{}"
            items = [f"{nl}{json.dumps(k)}: {enc(o[k], depth + 1)}" for k in sorted(o)]
            return "{" + sep.join(items) + end + "}"
        if isinstance(o, list):
            if not o:
                return "[]"
            if indent is not None and all(not isinstance(v, (dict, list)) for v in o):
                return "[" + ", ".join(enc(v, depth) for v in o) + "]"
            return "[" + sep.join(nl + enc(v, depth + 1) for v in o) + end + "]"
        if isinstance(o, bool) or o is None:
            return json.dumps(o)
        if isinstance(o, int):
            return str(o)
        if isinstance(o, float):
            return _fmt_float(o)
        return json.dumps(o)

    return enc(obj, 0)
