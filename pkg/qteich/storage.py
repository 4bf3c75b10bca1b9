"""
    qteich.storage
    ~~~~~~~~~~~~~~

    Reading and writing descriptor files.

    Documents are json (or yaml, by suffix). Output is dumped with sorted
    keys and complex numbers as [re, im] rounded to 12 decimals, so that
    identical inputs give byte-identical files.

    :copyright: 2020 by qteich Authors, see AUTHORS for more details.
    :license: BSD, see LICENSE for more details.
"""

import dataclasses
import json
import pathlib

import numpy as np
import yaml

from .common import DEFAULT_MAX_DIM, InputError, SchemaError, complex_to_pair, pair_to_complex
from .qalgebra import QParams
from .representation import LocalRep, local_rep
from .schema import RepFile, TriangulationFile, WeightsFile, build
from .surface import Triangulation
from .transport import EdgeWeights

#: Decimals kept for floats in output documents.
DIGITS = 12


def _retrieve(path):
    """Read a json or yaml file from disk into a dict.

    Parameters
    ----------
    path : str or pathlib.Path

    Returns
    -------
    dict
    """
    path = pathlib.Path(path)
    try:
        with path.open("r", encoding="utf-8") as fi:
            if path.suffix in (".yaml", ".yml"):
                return yaml.safe_load(fi)
            return json.load(fi)
    except OSError as ex:
        raise InputError(f"cannot read {path}: {ex.strerror}")
    except (ValueError, yaml.YAMLError) as ex:
        raise SchemaError(f"cannot parse {path}: {ex}")


def _store(path, data):
    """Store data as a deterministic json file."""
    path = pathlib.Path(path)
    with path.open("w", encoding="utf-8") as fo:
        fo.write(dumps(data))


def jsonable(obj):
    """Plain json types for reports: complex as [re, im], arrays as lists."""
    if isinstance(obj, (bool, str)) or obj is None:
        return obj
    if isinstance(obj, (complex, np.complexfloating)):
        return complex_to_pair(obj, DIGITS)
    if isinstance(obj, (float, np.floating)):
        if not np.isfinite(obj):
            return str(float(obj))
        return round(float(obj), DIGITS) + 0.0
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return [jsonable(v) for v in obj.tolist()]
    if dataclasses.is_dataclass(obj):
        return {f.name: jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set, frozenset)):
        return [jsonable(v) for v in obj]
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(data):
    return json.dumps(jsonable(data), sort_keys=True, indent=2) + "\n"


def _as_pairs(values, where):
    """Normalize complex entries to [re, im] float pairs before validation."""
    if not isinstance(values, list):
        raise SchemaError(f"{where}: expected a list of complex numbers")
    return [complex_to_pair(pair_to_complex(v), 17) for v in values]


#################
# Triangulations
#################


def triangulation_from_dict(content, where="triangulation") -> Triangulation:
    """Build a triangulation from its 1-based document.

    Parameters
    ----------
    content : dict
        {"faces": m, "gluing": [[[j, s], [k, r]], ...], "labels": optional}.

    Returns
    -------
    Triangulation
    """
    doc = build(TriangulationFile, content, where)
    gluing = [[(j - 1, s - 1) for j, s in pair] for pair in doc.gluing]
    labels = None
    if doc.labels is not None:
        labels = [[e - 1 for e in face] for face in doc.labels]
        if any(len(face) != 3 for face in labels):
            raise SchemaError(f"{where}: every face has exactly three labels")
    return Triangulation.from_gluing(doc.faces, gluing, labels)


def triangulation_to_dict(t: Triangulation):
    return {
        "faces": t.face_count,
        "gluing": [[[j + 1, s + 1] for j, s in pair] for pair in t.gluing()],
        "labels": [[e + 1 for e in face] for face in t.faces],
    }


def load_triangulation_file(path) -> Triangulation:
    return triangulation_from_dict(_retrieve(path), str(path))


#################
# Weights
#################


def weights_from_dict(content, where="weights") -> EdgeWeights:
    if isinstance(content, dict) and "weights" in content:
        content = dict(content, weights=_as_pairs(content["weights"], where))
    doc = build(WeightsFile, content, where)
    return EdgeWeights.of(pair_to_complex(v) for v in doc.weights)


def weights_to_dict(x: EdgeWeights):
    return {"weights": [complex_to_pair(v, DIGITS) for v in x.values]}


def load_weights(path) -> EdgeWeights:
    return weights_from_dict(_retrieve(path), str(path))


def parse_weights(text) -> EdgeWeights:
    """Weights from a comma separated list, complex literals accepted ("1,2j,1+1j")."""
    try:
        return EdgeWeights.of(complex(v.strip().replace(" ", "")) for v in text.split(","))
    except ValueError:
        raise SchemaError(f"cannot read weights from {text!r}")


#################
# Representations
#################


def rep_from_dict(
    content, t: Triangulation = None, max_dim=DEFAULT_MAX_DIM, where="representation"
) -> LocalRep:
    """Build a local representation from its document.

    The triangulation is taken from the document when it embeds one,
    otherwise from the argument.

    Raises
    ------
    SchemaError
    LoadMismatchError
    """
    if isinstance(content, dict) and isinstance(content.get("faces"), list):
        faces = []
        for i, face in enumerate(content["faces"]):
            if not isinstance(face, dict) or "w" not in face or "h" not in face:
                raise SchemaError(f"{where}: face {i + 1} needs 'w' and 'h'")
            faces.append(
                dict(face, w=_as_pairs(face["w"], where), h=_as_pairs([face["h"]], where)[0])
            )
        content = dict(content, faces=faces)
    doc = build(RepFile, content, where)

    if doc.triangulation is not None:
        t = triangulation_from_dict(content["triangulation"], where)
    if t is None:
        raise SchemaError(f"{where}: no triangulation given")
    if len(doc.faces) != t.face_count:
        raise SchemaError(f"{where}: {len(doc.faces)} faces for a triangulation of {t.face_count}")

    data = []
    for i, face in enumerate(doc.faces):
        if len(face.w) != 3:
            raise SchemaError(f"{where}: face {i + 1} needs three side weights")
        data.append((tuple(pair_to_complex(w) for w in face.w), pair_to_complex(face.h)))
    q = QParams(doc.q.N, doc.q.c)
    return local_rep(t, q, data, max_dim)


def rep_to_dict(r: LocalRep):
    return {
        "q": r.q.to_dict(),
        "faces": [
            {"w": [complex_to_pair(w, DIGITS) for w in face.w], "h": complex_to_pair(face.h, DIGITS)}
            for face in r.faces
        ],
        "triangulation": triangulation_to_dict(r.triangulation),
    }


def load_rep(path, t: Triangulation = None, max_dim=DEFAULT_MAX_DIM) -> LocalRep:
    return rep_from_dict(_retrieve(path), t, max_dim, str(path))


def store_rep(path, r: LocalRep):
    _store(path, rep_to_dict(r))


#################
# Command line values
#################


def parse_indices(text, what="edge"):
    """0-based indices from a 1-based comma separated list ("1,3,1")."""
    text = (text or "").strip()
    if not text:
        return []
    try:
        values = [int(v) for v in text.split(",")]
    except ValueError:
        raise SchemaError(f"cannot read {what} list {text!r}")
    if any(v < 1 for v in values):
        raise SchemaError(f"{what} numbers are 1-based")
    return [v - 1 for v in values]
