import json

import pytest

from pwnoise import symtensor as sym
from pwnoise.chaos import ChaosVector
from pwnoise.cli import _json, main
from pwnoise.model import CellModel

MODEL_A = {"cells": [{"id": "c1", "nu": 0.5, "w": 2.0}, {"id": "c2", "nu": 0.3, "w": 4.0}]}


@pytest.fixture
def files(tmp_path):
    def write(name, obj):
        p = tmp_path / name
        p.write_text(obj if isinstance(obj, str) else json.dumps(obj))
        return str(p)

    return write


def run(capsys, argv):
    code = main(argv)
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip() else None)


def test_validate(files, capsys):
    code, rep = run(capsys, ["validate", "--model", files("m.json", MODEL_A)])
    assert code == 0 and rep["pass"] and rep["schema_version"] == 1
    assert len(rep["inputs"][0]["sha256"]) == 64


def test_validate_weight_one_fails(files, capsys):
    bad = {"cells": [{"id": "c1", "nu": 0.5, "w": 1.0}, {"id": "c2", "nu": 0.3, "w": 4.0}]}
    code, rep = run(capsys, ["validate", "--model", files("m.json", bad)])
    assert code == 1 and not rep["pass"]
    assert "c1" in json.dumps(rep["outputs"])


def test_malformed_json_is_usage_error(files, capsys):
    code, rep = run(capsys, ["validate", "--model", files("m.json", "{not json")])
    assert code == 2 and rep["schema_version"] == 1


def test_missing_arguments(capsys):
    assert main(["eval", "--model", "x.json"]) == 2


def test_eval_example(files, capsys):
    m = CellModel.from_dict(MODEL_A)
    phi = ChaosVector.monomial(sym.power(m, m.indicator("c1"), 2))
    code, rep = run(
        capsys,
        [
            "eval",
            "--model", files("m.json", MODEL_A),
            "--chaos", files("f.json", phi.to_dict()),
            "--config", files("x.json", {"counts": {"c1": 3}}),
        ],
    )
    assert code == 0
    assert rep["outputs"]["recursion"] == pytest.approx(3.25)
    assert rep["outputs"]["factorized"] == pytest.approx(3.25)


def test_eval_vacuum_with_density_config(files, capsys):
    m = CellModel.from_dict(MODEL_A)
    code, rep = run(
        capsys,
        [
            "eval",
            "--model", files("m.json", MODEL_A),
            "--chaos", files("f.json", ChaosVector.vacuum(m, 2.5).to_dict()),
            "--config", files("x.json", {"density": {"c1": 0.1, "c2": -4}}),
        ],
    )
    assert code == 0 and rep["outputs"]["recursion"] == 2.5


def test_eval_model_mismatch(files, capsys):
    other = CellModel.from_cells([("zz", 1.0, 2.0)])
    phi = ChaosVector(other, [None, sym.SymKernel.vector(other, [1.0])])
    code, rep = run(
        capsys,
        [
            "eval",
            "--model", files("m.json", MODEL_A),
            "--chaos", files("f.json", phi.to_dict()),
            "--config", files("x.json", {"counts": {}}),
        ],
    )
    assert code == 1 and not rep["pass"]


def test_eval_rejects_negative_counts(files, capsys):
    m = CellModel.from_dict(MODEL_A)
    code, _ = run(
        capsys,
        [
            "eval",
            "--model", files("m.json", MODEL_A),
            "--chaos", files("f.json", ChaosVector.vacuum(m).to_dict()),
            "--config", files("x.json", {"counts": {"c1": -1}}),
        ],
    )
    assert code == 2


@pytest.mark.parametrize("argv", [["exp-compare"], ["delta-profile"], ["delta-profile", "--kappa", "1"], ["growth-bound"]])
def test_suites(files, capsys, argv):
    code, rep = run(capsys, ["suite", *argv, "--model", files("m.json", MODEL_A)])
    assert code == 0, rep
    assert rep["command"].startswith("suite:") and rep["pass"]


def test_product_bound_suite(files, capsys):
    code, rep = run(capsys, ["suite", "product-bound", "--model", files("m.json", MODEL_A), "--trunc", "3"])
    assert code == 0 and rep["outputs"]["q"] == 3


def test_unknown_suite(files, capsys):
    code, rep = run(capsys, ["suite", "nope", "--model", files("m.json", MODEL_A)])
    assert code == 2 and "error" in rep


def test_json_float_format():
    assert _json({"a": 0.1, "b": [1, True, None, float("nan")]}) == '{"a": 0.10000000000000001, "b": [1, true, null, null]}'
