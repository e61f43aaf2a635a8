"""Self-describing JSON documents.

Every file is an object ``{"kind", "dim", "payload", "metadata"}``. Complex
numbers are ``[re, im]`` pairs, matrices are row-major nested lists, and
floats use Python's shortest round-trip representation, so
``load(save(doc))`` reproduces every number bit for bit.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from .errors import DimMismatch, ParseError
from .linalg import PVM, DensityMatrix, OrthonormalBasis, Projector
from .quasiprob import KirkwoodTable
from .sampling import JointCountTable

__all__ = ["KINDS", "Document", "encode", "decode", "dumps", "loads", "save", "load"]

KINDS = ("state", "basis", "pvm", "kirkwood_table", "joint_counts", "report")


@dataclass
class Document:
    kind: str
    dim: int
    payload: Any
    metadata: dict = field(default_factory=dict)


def _complex_list(a) -> list:
    a = np.asarray(a, dtype=np.complex128)
    if a.ndim == 0:
        return [float(a.real), float(a.imag)]
    return [_complex_list(x) for x in a]


def _pvm_payload(pvm: PVM) -> dict:
    return {
        "projectors": [_complex_list(p.matrix) for p in pvm.projectors],
        "labels": None if pvm.labels is None else list(pvm.labels),
    }


def encode(doc: Document) -> dict:
    """Plain JSON-ready dict for a document."""
    p = doc.payload
    if doc.kind == "state":
        payload = {"matrix": _complex_list(p.matrix)}
    elif doc.kind == "basis":
        payload = {"vectors": _complex_list(p.vectors)}
    elif doc.kind == "pvm":
        payload = _pvm_payload(p)
    elif doc.kind == "kirkwood_table":
        payload = {"entries": _complex_list(p.entries),
                   "a_pvm": _pvm_payload(p.a_pvm), "b_pvm": _pvm_payload(p.b_pvm)}
    elif doc.kind == "joint_counts":
        payload = {"counts": np.asarray(p.counts).tolist(), "trials": int(p.trials),
                   "seed": int(p.seed)}
    elif doc.kind == "report":
        payload = p
    else:
        raise ParseError(f"unknown kind {doc.kind!r}", field="kind")
    return {"kind": doc.kind, "dim": int(doc.dim), "payload": payload,
            "metadata": doc.metadata}


def _get(obj: dict, key: str, path: str):
    if not isinstance(obj, dict) or key not in obj:
        raise ParseError("missing field", field=f"{path}.{key}" if path else key)
    return obj[key]


def _number(x, path: str) -> float:
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise ParseError(f"expected a number, got {x!r}", field=path)
    return float(x)


def _complex_array(x, path: str, ndim: int) -> np.ndarray:
    def walk(node, p, depth):
        if depth == 0:
            if not isinstance(node, list) or len(node) != 2:
                raise ParseError("expected an [re, im] pair", field=p)
            return complex(_number(node[0], p + "[0]"), _number(node[1], p + "[1]"))
        if not isinstance(node, list):
            raise ParseError("expected a list", field=p)
        return [walk(c, f"{p}[{i}]", depth - 1) for i, c in enumerate(node)]

    rows = walk(x, path, ndim)
    try:
        return np.array(rows, dtype=np.complex128).reshape(np.shape(rows))
    except ValueError as exc:
        raise ParseError("ragged array", field=path) from exc


def _decode_pvm(obj, path: str) -> PVM:
    projs = _get(obj, "projectors", path)
    if not isinstance(projs, list) or not projs:
        raise ParseError("expected a non-empty list of matrices", field=f"{path}.projectors")
    mats = [_complex_array(m, f"{path}.projectors[{i}]", 2) for i, m in enumerate(projs)]
    labels = obj.get("labels")
    if labels is not None:
        labels = tuple(_number(v, f"{path}.labels[{i}]") for i, v in enumerate(labels))
    return PVM(tuple(Projector(m) for m in mats), labels)


def decode(obj: dict) -> Document:
    """Rebuild a document, validating the payload against its type."""
    kind = _get(obj, "kind", "")
    if kind not in KINDS:
        raise ParseError(f"unknown kind {kind!r}", field="kind")
    dim = _get(obj, "dim", "")
    if isinstance(dim, bool) or not isinstance(dim, int) or dim < 1:
        raise ParseError(f"expected a positive integer, got {dim!r}", field="dim")
    raw = _get(obj, "payload", "")
    metadata = obj.get("metadata", {})
    if not isinstance(metadata, dict):
        raise ParseError("expected an object", field="metadata")

    if kind == "state":
        payload = DensityMatrix(_complex_array(_get(raw, "matrix", "payload"), "payload.matrix", 2))
        size = payload.dim
    elif kind == "basis":
        payload = OrthonormalBasis(_complex_array(_get(raw, "vectors", "payload"),
                                                  "payload.vectors", 2))
        size = payload.dim
    elif kind == "pvm":
        payload = _decode_pvm(raw, "payload")
        size = payload.dim
    elif kind == "kirkwood_table":
        entries = _complex_array(_get(raw, "entries", "payload"), "payload.entries", 2)
        payload = KirkwoodTable(entries, _decode_pvm(_get(raw, "a_pvm", "payload"), "payload.a_pvm"),
                                _decode_pvm(_get(raw, "b_pvm", "payload"), "payload.b_pvm"))
        size = payload.a_pvm.dim
    elif kind == "joint_counts":
        counts = _get(raw, "counts", "payload")
        trials = _get(raw, "trials", "payload")
        seed = _get(raw, "seed", "payload")
        for name, v in (("trials", trials), ("seed", seed)):
            if isinstance(v, bool) or not isinstance(v, int):
                raise ParseError(f"expected an integer, got {v!r}", field=f"payload.{name}")
        try:
            arr = np.array(counts, dtype=np.int64)
        except (TypeError, ValueError) as exc:
            raise ParseError("expected a table of integers", field="payload.counts") from exc
        payload = JointCountTable(arr, trials, seed)
        size = dim
    else:
        if not isinstance(raw, dict):
            raise ParseError("expected an object", field="payload")
        payload, size = raw, dim
    if size != dim:
        raise DimMismatch(f"document declares dim {dim} but its payload has dimension {size}")
    return Document(kind, dim, payload, metadata)


_NUMBER_LIST = re.compile(r"\[\s*((?:-?[0-9][0-9.eE+\-]*\s*,\s*)*-?[0-9][0-9.eE+\-]*)\s*\]")


def dumps(doc: Document) -> str:
    text = json.dumps(encode(doc), indent=2, allow_nan=False)
    # one line per innermost list of numbers keeps matrices diffable
    return _NUMBER_LIST.sub(lambda m: "[" + re.sub(r"\s+", " ", m.group(1)) + "]", text) + "\n"


def loads(text: str) -> Document:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"not valid JSON: {exc}") from exc
    if not isinstance(obj, dict):
        raise ParseError("top level must be an object")
    return decode(obj)


def save(doc: Document, path) -> None:
    Path(path).write_text(dumps(doc))


def load(path) -> Document:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from exc
    return loads(text)
