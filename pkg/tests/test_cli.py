import io
import json

import pytest

from ladderlab.cli import load_ladder, run
from ladderlab.errors import ParseError, ValidationError
from ladderlab.webs import Ladder, Rung, Tilt


def invoke(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), out=out, err=err)
    return code, out.getvalue(), err.getvalue()


def test_qnum():
    code, out, _ = invoke("qnum", "--k", "2")
    assert code == 0 and out.strip() == "q + q^-1"


def test_qbinom():
    code, out, _ = invoke("qbinom", "--m", "4", "--k", "2")
    assert code == 0 and out.strip() == "q^4 + q^2 + 2 + q^-2 + q^-4"


def test_paths_count():
    code, out, _ = invoke(
        "paths", "--n", "2", "--word", "1,1,1,1,1,1", "--target", "0", "--count"
    )
    assert code == 0 and out.strip() == "5"


def test_paths_listing_json():
    code, out, _ = invoke("paths", "--n", "3", "--word", "1,2")
    assert code == 0
    rows = json.loads(out)
    assert [r["endpoint"] for r in rows] == ["1,1", "0,0"]


def test_kappa_all_methods(tmp_path):
    code, out, _ = invoke(
        "kappa",
        "--n", "3", "--lambda", "1,1", "--mu", "001",
        "--method", "all", "--cache-dir", str(tmp_path),
    )
    assert code == 0
    row = json.loads(out)[0]
    assert row["agree"] is True
    assert row["kappa_matrix"] == row["kappa_conjecture"] == row["kappa_recursive"]


def test_weyldim():
    code, out, _ = invoke("weyldim", "--n", "4", "--lambda", "1,0,1")
    assert code == 0 and out.strip() == "15"


def test_dims():
    code, out, _ = invoke("dims", "--n", "2", "--word", "1,1", "--target", "1,1")
    assert code == 0
    assert json.loads(out)[0]["agree"] is True


def test_relcheck_exit_zero():
    code, out, _ = invoke("relcheck", "--n", "2", "--relation", "circle", "--format", "csv")
    assert code == 0
    assert "relation" in out.splitlines()[0]


def test_clasp_summary(tmp_path):
    code, out, _ = invoke(
        "clasp", "--n", "2", "--lambda", "2", "--cache-dir", str(tmp_path),
        "--out", str(tmp_path / "mat.json"),
    )
    assert code == 0
    data = json.loads(out)
    assert data["rank"] == 3 == data["weyl_dim"]
    mat = json.loads((tmp_path / "mat.json").read_text())
    assert mat["rows"] == mat["cols"] == 4


def test_gamma_cli(tmp_path):
    code, out, _ = invoke(
        "gamma", "--n", "3", "--lambda", "1,1", "--mu", "001", "--nu", "110",
        "--cache-dir", str(tmp_path),
    )
    assert code == 0
    assert json.loads(out)[0]["gamma"] == "1"


def test_conjecture_sweep_cli(tmp_path):
    code, out, _ = invoke(
        "conjecture", "--n", "2", "--level-bound", "2",
        "--cache-dir", str(tmp_path), "--format", "csv",
    )
    assert code == 0
    lines = out.strip().splitlines()
    assert len(lines) > 1 and "agree" in lines[0]


def test_conjecture_sweep_deterministic(tmp_path):
    args = ("conjecture", "--n", "2", "--level-bound", "2", "--cache-dir", str(tmp_path))
    _, out1, _ = invoke(*args)
    _, out2, _ = invoke(*args)
    assert out1 == out2


def test_usage_errors():
    code, _, err = invoke("kappa", "--n", "1", "--lambda", "", "--mu", "0")
    assert code == 2
    code, _, _ = invoke("nonsense")
    assert code == 2
    code, _, err = invoke("paths", "--n", "3", "--word", "1,x")
    assert code == 2 and "error" in err


def test_eval_command(tmp_path):
    lad = Ladder(2, (1, 1), (Rung(0, Tilt.NE, 1),))
    path = tmp_path / "ladder.json"
    path.write_text(lad.dumps())
    code, out, _ = invoke("eval", "--ladder", str(path))
    assert code == 0
    data = json.loads(out)
    assert data["rows"] == 1 and data["cols"] == 4
    code, out, _ = invoke("eval", "--ladder", str(path), "--at", "q=2")
    assert code == 0
    data = json.loads(out)
    assert data["at"] == "2"


def test_load_ladder_validation(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"n": 2, "bottom": [1, 1], "rungs": [{"pos": 0, "tilt": "NE", "s": 2}]}')
    with pytest.raises(Exception):
        load_ladder(path)
    path.write_text("{not json")
    with pytest.raises(ParseError):
        load_ladder(path)
    good = tmp_path / "good.json"
    lad = Ladder(3, (1, 2), ())
    good.write_text(lad.dumps())
    assert load_ladder(good) == lad
    assert load_ladder(good).dumps() == lad.dumps()
