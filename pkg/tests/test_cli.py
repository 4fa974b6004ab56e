import json
import subprocess
import sys

import pytest

from charsums.cli import main


def run(capsys, *argv):
    rc = main(list(argv))
    out, err = capsys.readouterr()
    return rc, out, err


def write_config(tmp_path, **kw):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(kw))
    return str(path)


def test_eval(capsys):
    rc, out, _ = run(capsys, "eval", "--q", "7", "--chi", "3", "--n", "1", "3", "14")
    data = json.loads(out)
    assert rc == 0 and data["conductor"] == 7 and data["order"] == 2
    assert [v["value"] for v in data["values"]] == ["Root(0/1)", "Root(1/2)", "Zero"]


def test_sum(capsys):
    rc, out, _ = run(capsys, "sum", "--q", "7", "--chi", "3", "--N", "0", "--h", "5")
    data = json.loads(out)
    assert rc == 0 and data["S"] == pytest.approx([1, 0])
    assert data["dyadic_sum"] == pytest.approx([1, 0]) and data["dyadic_pieces"] == [[0, 4], [4, 1]]
    assert data["max_h"] == 2 and data["max_abs"] == pytest.approx(2)


def test_moments(capsys):
    rc, out, _ = run(capsys, "moments", "--q", "101", "--chi", "50", "--H", "10", "--r", "2", "--points", "0", "30", "60")
    data = json.loads(out)
    assert rc == 0 and len(data["reports"]) == 3
    assert data["polya_vinogradov"]["max"] <= data["polya_vinogradov"]["sqrt_q_log_q"]


def test_lattice(capsys):
    rc, out, _ = run(capsys, "lattice", "--ell", "5", "--mj", "2", "--mk", "1", "--B", "2")
    data = json.loads(out)
    assert rc == 0 and data["det"] == 5 and data["points_in_box"] == 25


def test_theorem_and_fit(tmp_path, capsys):
    cfg = write_config(tmp_path, q_range=[1000, 100000], r=2, J=3, max_moduli=12)
    out = tmp_path / "t.csv"
    rc, _, _ = run(capsys, "theorem", "--config", cfg, "--out", str(out))
    assert rc == 0 and out.read_text().startswith("q,chi,r,H,P,J,lhs")
    rc, text, _ = run(capsys, "fit", "--input", str(out))
    fit = json.loads(text)
    assert rc == 0 and fit["slope"] <= fit["theoretical_exponent"] + 0.1
    rc, text, _ = run(capsys, "fit", "--config", cfg, "--stat", "burgess")
    assert rc == 0 and json.loads(text)["theoretical_exponent"] == pytest.approx(3 / 16)


def test_chain_json(tmp_path, capsys):
    cfg = write_config(tmp_path, q_range=[100, 400], r=2, J=2, max_moduli=3)
    rc, out, _ = run(capsys, "chain", "--config", cfg, "--format", "json", "--seed", "5")
    rows = json.loads(out)
    assert rc == 0 and len(rows) == 3
    assert all(row["P"] > 0 and "HARD_FAIL" not in row["flags"] for row in rows)


def test_config_errors_exit_2(tmp_path, capsys):
    rc, _, err = run(capsys, "theorem")
    assert rc == 2 and "config" in err
    rc, _, _ = run(capsys, "theorem", "--config", str(tmp_path / "nope.json"))
    assert rc == 2
    rc, _, _ = run(capsys, "theorem", "--config", write_config(tmp_path, q_range=[5, 2]))
    assert rc == 2
    rc, _, _ = run(capsys, "fit", "--input", str(tmp_path / "nope.csv"))
    assert rc == 2
    rc, _, _ = run(capsys, "eval", "--q", "7", "--chi", "9", "--n", "1")
    assert rc == 2
    rc, _, _ = run(capsys, "lattice", "--ell", "9", "--mj", "1", "--mk", "1")
    assert rc == 2
    rc, _, _ = run(capsys, "theorem", "--config", write_config(tmp_path), "--out", str(tmp_path / "x" / "y.csv"))
    assert rc == 2


def test_usage_error_exit_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["sum", "--q", "7"])
    assert exc.value.code == 2


def test_module_entry_point(tmp_path):
    cfg = write_config(tmp_path, moduli_family="explicit_list", moduli=[7], characters=[3], r=1, H_rule="3", J=1, points=[0])
    proc = subprocess.run(
        [sys.executable, "-m", "charsums", "theorem", "--config", cfg], capture_output=True, text=True, check=True
    )
    lines = proc.stdout.splitlines()
    assert lines[1].startswith("7,3,1,3,0,1,8.0,")


def test_chain_hard_failure_exit_1(tmp_path, capsys, monkeypatch):
    import dataclasses

    import charsums.experiments as ex

    real = ex.verify_chain

    def broken(*args, **kw):
        return dataclasses.replace(real(*args, **kw), hard_ok=False)

    monkeypatch.setattr(ex, "verify_chain", broken)
    cfg = write_config(tmp_path, q_range=[100, 400], r=2, J=2, max_moduli=2)
    rc, out, _ = run(capsys, "chain", "--config", cfg, "--format", "json")
    assert rc == 1 and all("HARD_FAIL" in row["flags"] for row in json.loads(out))
