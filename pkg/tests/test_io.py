import json

import numpy as np
import pytest

from kirkwood.errors import DimMismatch, NotHermitian, ParseError
from kirkwood.generate import random_basis, random_density, random_pvm
from kirkwood.io import Document, dumps, load, loads, save
from kirkwood.linalg import DensityMatrix, pvm_from_observable
from kirkwood.quasiprob import kirkwood
from kirkwood.sampling import JointCountTable


def documents(rng):
    rho = random_density(3, rng)
    a, b = random_pvm(3, rng), random_pvm(3, rng)
    return [
        Document("state", 3, rho, {"seed": 1}),
        Document("basis", 3, random_basis(3, rng)),
        Document("pvm", 3, pvm_from_observable(np.diag([2.0, 2.0, -1.0]))),
        Document("pvm", 3, a),
        Document("kirkwood_table", 3, kirkwood(rho, a, b)),
        Document("joint_counts", 3, JointCountTable(np.array([[3, 0], [1, 6]]), 10, 2**63)),
        Document("report", 2, {"passed": True, "families": []}),
    ]


def payload_arrays(doc):
    p = doc.payload
    if doc.kind == "state":
        return [p.matrix]
    if doc.kind == "basis":
        return [p.vectors]
    if doc.kind == "pvm":
        return [p.stack]
    if doc.kind == "kirkwood_table":
        return [p.entries, p.a_pvm.stack, p.b_pvm.stack]
    if doc.kind == "joint_counts":
        return [p.counts, np.array([p.trials, p.seed], dtype=object)]
    return [np.array(json.dumps(p))]


def test_round_trip_bit_exact(rng, tmp_path):
    for i, doc in enumerate(documents(rng)):
        path = tmp_path / f"{i}.json"
        save(doc, path)
        back = load(path)
        assert (back.kind, back.dim, back.metadata) == (doc.kind, doc.dim, doc.metadata)
        for x, y in zip(payload_arrays(doc), payload_arrays(back)):
            np.testing.assert_array_equal(x, y)
        assert dumps(back) == dumps(doc)


def test_pvm_labels_survive(rng):
    doc = Document("pvm", 3, pvm_from_observable(np.diag([2.0, 2.0, -1.0])))
    assert loads(dumps(doc)).payload.labels == (-1.0, 2.0)


def test_complex_pairs_on_one_line():
    text = dumps(Document("state", 2, DensityMatrix.maximally_mixed(2)))
    assert "[0.5, 0.0]" in text.splitlines()[6]


def test_nan_rejected():
    with pytest.raises(ValueError):
        dumps(Document("report", 2, {"x": float("nan")}))


def encoded(rng):
    return json.loads(dumps(Document("state", 2, random_density(2, rng))))


@pytest.mark.parametrize("mutate, field", [
    (lambda o: o.pop("kind"), "kind"),
    (lambda o: o.__setitem__("kind", "tensor"), "kind"),
    (lambda o: o.__setitem__("dim", "two"), "dim"),
    (lambda o: o["payload"].pop("matrix"), "payload.matrix"),
    (lambda o: o["payload"]["matrix"][1].__setitem__(0, "x"), "payload.matrix[1][0]"),
    (lambda o: o["payload"]["matrix"][1][0].__setitem__(1, None), "payload.matrix[1][0][1]"),
    (lambda o: o["payload"]["matrix"][0].__setitem__(1, [1.0]), "payload.matrix[0][1]"),
    (lambda o: o.__setitem__("metadata", []), "metadata"),
])
def test_parse_error_names_field(rng, mutate, field):
    obj = encoded(rng)
    mutate(obj)
    with pytest.raises(ParseError) as exc:
        loads(json.dumps(obj))
    assert exc.value.field == field


def test_joint_counts_bad_trials():
    doc = Document("joint_counts", 2, JointCountTable(np.array([[1, 1]]), 2, 0))
    obj = json.loads(dumps(doc))
    obj["payload"]["trials"] = 2.5
    with pytest.raises(ParseError) as exc:
        loads(json.dumps(obj))
    assert exc.value.field == "payload.trials"


def test_invalid_json():
    with pytest.raises(ParseError):
        loads("{not json")
    with pytest.raises(ParseError):
        loads("[1, 2]")


def test_missing_file(tmp_path):
    with pytest.raises(ParseError):
        load(tmp_path / "absent.json")


def test_payload_validated(rng):
    obj = encoded(rng)
    obj["payload"]["matrix"][0][1] = [0.3, 0.0]
    obj["payload"]["matrix"][1][0] = [0.0, 0.0]
    with pytest.raises(NotHermitian):
        loads(json.dumps(obj))


def test_declared_dim_checked(rng):
    obj = encoded(rng)
    obj["dim"] = 3
    with pytest.raises(DimMismatch):
        loads(json.dumps(obj))
