"""JSON and OFF serialization."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .complex import SimplicialComplex, build_complex
from .errors import ValidationError
from .euler import ConstructibleFunction
from .morse import Atom, JumpMeasure, MorseDataSlice
from .normal_cycle import NormalCycle, NormalCyclePiece
from .spherical import SphericalCell


def simplex_key(simplex) -> str:
    return "-".join(str(int(i)) for i in sorted(simplex))


def parse_simplex_key(key: str) -> tuple:
    try:
        return tuple(sorted(int(p) for p in str(key).split("-")))
    except ValueError as exc:
        raise ValidationError(f"bad simplex key {key!r}") from exc


# --- complexes -----------------------------------------------------------


def complex_to_dict(X: SimplicialComplex) -> dict:
    return {
        "vertices": X.points.tolist(),
        "simplices": [list(s) for s in X.maximal_simplices],
    }


def complex_from_dict(d: dict) -> SimplicialComplex:
    if not isinstance(d, dict) or "vertices" not in d or "simplices" not in d:
        raise ValidationError('complex JSON needs "vertices" and "simplices"')
    verts = d["vertices"]
    if len(verts) == 0:
        return SimplicialComplex(np.zeros((0, 1)), [])
    return build_complex(verts, d["simplices"])


def read_off(path) -> SimplicialComplex:
    """Triangle mesh from an OFF file (``#`` comments and blank lines ignored)."""
    tokens = []
    with open(path) as fh:
        for line in fh:
            line = line.split("#", 1)[0].strip()
            if line:
                tokens.append(line)
    if not tokens or tokens[0].split()[0] != "OFF":
        raise ValidationError("OFF header missing")
    head = tokens[0].split()[1:]
    body = tokens[1:]
    if not head:
        head, body = body[0].split(), body[1:]
    try:
        nv, nf = int(head[0]), int(head[1])
    except (IndexError, ValueError) as exc:
        raise ValidationError("bad OFF counts line") from exc
    if len(body) < nv + nf:
        raise ValidationError("OFF file is truncated")
    verts = [[float(x) for x in body[i].split()[:3]] for i in range(nv)]
    faces = []
    for line in body[nv:nv + nf]:
        parts = [int(x) for x in line.split()]
        if parts[0] != 3 or len(parts) < 4:
            raise ValidationError("only triangular OFF faces are supported")
        faces.append(parts[1:4])
    return build_complex(verts, faces)


def write_off(X: SimplicialComplex, path) -> None:
    tris = [s for s in X.maximal_simplices if len(s) == 3]
    if len(tris) != len(X.maximal_simplices) or X.ambient_dim != 3:
        raise ValidationError("OFF output needs a pure 2-dimensional complex in R^3")
    with open(path, "w") as fh:
        fh.write(f"OFF\n{len(X.points)} {len(tris)} 0\n")
        for p in X.points:
            fh.write(" ".join(repr(float(x)) for x in p) + "\n")
        for t in tris:
            fh.write("3 " + " ".join(str(i) for i in t) + "\n")


# --- constructible functions -------------------------------------------------


def cf_to_dict(f: ConstructibleFunction) -> dict:
    return {
        "complex": complex_to_dict(f.complex),
        "weights": {
            simplex_key(s): int(w)
            for s, w in zip(f.complex.simplices, f.weights)
            if w != 0
        },
    }


def cf_from_dict(d: dict, base: Path | None = None) -> ConstructibleFunction:
    ref = d.get("complex")
    if isinstance(ref, str):
        X = load_complex(Path(base or ".") / ref)
    else:
        X = complex_from_dict(ref)
    w = np.zeros(len(X), dtype=np.int64)
    for key, val in d.get("weights", {}).items():
        s = parse_simplex_key(key)
        if s not in X.index:
            raise ValidationError(f"weight given for unknown simplex {key}")
        if int(val) != val:
            raise ValidationError("weights must be integers")
        w[X.index[s]] = int(val)
    return ConstructibleFunction(X, w)


# --- slices and jump measures -----------------------------------------------


def slice_to_dict(S: MorseDataSlice) -> dict:
    return {
        "xi": [float(x) for x in S.covector],
        "atoms": [{"vertex": a.vertex, "index": a.index, "level": a.level} for a in S.atoms],
    }


def slice_from_dict(d: dict) -> MorseDataSlice:
    atoms = tuple(Atom(int(a["vertex"]), int(a["index"]), float(a["level"])) for a in d["atoms"])
    return MorseDataSlice(np.array(d["xi"], dtype=float), atoms)


def jump_to_dict(J: JumpMeasure) -> dict:
    return {"atoms": [[t, m] for t, m in J.atoms]}


def jump_from_dict(d: dict) -> JumpMeasure:
    return JumpMeasure(tuple((float(t), int(m)) for t, m in d["atoms"]))


# --- normal cycles ------------------------------------------------------------


def _cell_to_dict(c: SphericalCell) -> dict:
    return {
        "type": c.kind,
        "data": c.vertices.tolist(),
        "basis": c.basis.tolist(),
        "sample": c.sample.tolist(),
        "constraints": c.constraints.tolist(),
        "measure": c.measure,
    }


def _cell_from_dict(d: dict, n: int) -> SphericalCell:
    def arr(x, cols):
        return np.array(x, dtype=float).reshape(-1, cols)

    basis = np.array(d["basis"], dtype=float).reshape(n, -1)
    return SphericalCell(
        d["type"],
        basis,
        arr(d["data"], n),
        np.array(d["sample"], dtype=float),
        arr(d["constraints"], n),
        float(d["measure"]),
    )


def normal_cycle_to_dict(N: NormalCycle) -> dict:
    return {
        "complex": complex_to_dict(N.complex),
        "pieces": [
            {"simplex": list(p.simplex), "cell": _cell_to_dict(p.cell), "mult": p.multiplicity}
            for p in N.pieces
        ],
    }


def normal_cycle_from_dict(d: dict) -> NormalCycle:
    X = complex_from_dict(d["complex"])
    n = X.ambient_dim
    pieces = []
    for p in d["pieces"]:
        s = tuple(sorted(int(i) for i in p["simplex"]))
        if s not in X.index:
            raise ValidationError(f"piece over unknown simplex {s}")
        pieces.append(NormalCyclePiece(s, _cell_from_dict(p["cell"], n), int(p["mult"])))
    return NormalCycle(X, tuple(pieces))


# --- files --------------------------------------------------------------------


def read_json(path) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: invalid JSON ({exc})") from exc


def load_complex(path) -> SimplicialComplex:
    path = Path(path)
    if path.suffix.lower() == ".off":
        return read_off(path)
    return complex_from_dict(read_json(path))


def detect_kind(d: dict) -> str:
    if "pieces" in d:
        return "normal_cycle"
    if "weights" in d:
        return "constructible_function"
    if "vertices" in d:
        return "complex"
    if "atoms" in d and "xi" in d:
        return "slice"
    if "atoms" in d:
        return "jump"
    if "op" in d:
        return "manifest"
    raise ValidationError("unrecognized JSON document")


def load_any(path):
    """Load a complex (JSON or OFF), constructible function, normal cycle,
    slice or jump measure, dispatching on the document's keys."""
    path = Path(path)
    if path.suffix.lower() == ".off":
        return read_off(path)
    d = read_json(path)
    kind = detect_kind(d)
    if kind == "complex":
        return complex_from_dict(d)
    if kind == "constructible_function":
        return cf_from_dict(d, path.parent)
    if kind == "normal_cycle":
        return normal_cycle_from_dict(d)
    if kind == "slice":
        return slice_from_dict(d)
    if kind == "jump":
        return jump_from_dict(d)
    return d
