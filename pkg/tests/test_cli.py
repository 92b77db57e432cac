import json

import pytest

from sumnorm.cli import main
from sumnorm.operators import product_op
from sumnorm.seqclass import LP, WEAK
from sumnorm.summing import SummingProblem


def write(path, obj):
    path.write_text(obj if isinstance(obj, str) else json.dumps(obj))
    return str(path)


def test_norm_lp(tmp_path, capsys):
    spec = write(tmp_path / "s.json", {"kind": "LP", "p": 2})
    seq = write(tmp_path / "x.json", [[1, 0], [0, 1]])
    out = tmp_path / "o.json"
    assert main(["norm", "--spec", spec, "--seq", seq, "--output", str(out)]) == 0
    text = capsys.readouterr().out
    assert text.startswith("seed 0") and "1.4142135" in text
    res = json.loads(out.read_text())["result"]
    assert res["mode"] == "EXACT" and res["value"] == pytest.approx(2 ** 0.5)


def test_norm_weak_json_has_functional(tmp_path):
    spec = write(tmp_path / "s.json", {"kind": "WEAK", "p": 1})
    seq = write(tmp_path / "x.json", {"space": {"dim": 2, "exponent": "inf"}, "entries": [[1, 0], [0, 1]]})
    out = tmp_path / "o.json"
    assert main(["norm", "--spec", spec, "--seq", seq, "--output", str(out), "--seed", "3"]) == 0
    data = json.loads(out.read_text())
    assert data["seed"] == 3 and data["result"]["value"] == pytest.approx(1.0)
    assert len(data["result"]["witness"]["coefficients"]) == 2


def test_estimate_I2(tmp_path, capsys):
    prob = SummingProblem(product_op(2), (WEAK(2), WEAK(2)), LP(2), (3, 3))
    path = write(tmp_path / "p.json", prob.to_json())
    out = tmp_path / "e.json"
    assert main(["estimate", "--problem", path, "--output", str(out)]) == 0
    value = json.loads(out.read_text())["estimate"]["value"]
    assert 0.999 <= value <= 1 + 1e-9


def test_verify_unit_norm(capsys):
    assert main(["verify", "--suite", "UNIT_NORM"]) == 0
    assert "UNIT_NORM" in capsys.readouterr().out


def test_verify_failure_exit_code(tmp_path, monkeypatch):
    from sumnorm.verify import MUTANTS

    cfg = write(tmp_path / "c.json", {"samples": 4, "families": ["summing"]})
    with MUTANTS["strong_exponent_one"]():
        assert main(["verify", "--suite", "MULT1", "--config", cfg]) == 1


@pytest.mark.parametrize("payload,fragment", [
    ('{"kind": "LP", "p": 2,', "line 1 column"),
    ('{"kind": "LP"}', "exponent"),
    ('{"kind": "LP", "p": 2, "extra": 1}', "extra"),
])
def test_bad_spec_exits_2(tmp_path, capsys, payload, fragment):
    spec = write(tmp_path / "s.json", payload)
    seq = write(tmp_path / "x.json", [[1.0]])
    assert main(["norm", "--spec", spec, "--seq", seq]) == 2
    err = capsys.readouterr().err
    assert "s.json" in err and fragment in err


def test_missing_file_and_bad_config(tmp_path, capsys):
    assert main(["norm", "--spec", str(tmp_path / "none.json"), "--seq", "x"]) == 2
    cfg = write(tmp_path / "c.json", {"samples": 0})
    assert main(["verify", "--config", cfg]) == 2
    assert "samples" in capsys.readouterr().err


def test_argparse_errors_exit_2():
    with pytest.raises(SystemExit) as e:
        main(["norm", "--spec"])
    assert e.value.code == 2


def test_output_is_deterministic(tmp_path):
    cfg = write(tmp_path / "c.json", {"samples": 2})
    outs = []
    for k in range(2):
        out = tmp_path / f"r{k}.json"
        assert main(["verify", "--suite", "CH4", "--config", cfg, "--seed", "4", "--output", str(out)]) == 0
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]
