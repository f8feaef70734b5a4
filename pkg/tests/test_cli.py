import json
import subprocess
import sys

import numpy as np
import pytest

from ckfscreen.cli import main
from ckfscreen.dataio import load_dataset
from ckfscreen.errors import DatasetParseError
from ckfscreen.filters import screen_all
from ckfscreen.simgen import ModelSpec, generate


def write(path, text):
    path.write_text(text)
    return path


class TestLoadDataset:
    def test_happy_path(self, tmp_path):
        d = load_dataset(write(tmp_path / "a.csv", "resp,a,b\n1,2,3\n4,5,6\n7,8,9.5\n"))
        assert (d.n, d.p) == (3, 2)
        assert list(d.feature_names) == ["a", "b"] and d.response_name == "resp"
        assert d.y.tolist() == [1, 4, 7] and d.x[2].tolist() == [8, 9.5]

    def test_comments_and_blank_lines(self, tmp_path):
        d = load_dataset(write(tmp_path / "a.csv", "# note\ny,x1\n\n1,2\n3,4\n"))
        assert (d.n, d.p) == (2, 1)

    def test_missing_cell_names_row(self, tmp_path):
        with pytest.raises(DatasetParseError) as info:
            load_dataset(write(tmp_path / "a.csv", "y,a,b\n1,2,3\n4,5\n"))
        # rows are file line numbers, header included
        assert info.value.row == 3
        assert "row 3" in str(info.value)

    @pytest.mark.parametrize("cell", ["abc", "nan", "inf", ""])
    def test_bad_cells_name_location(self, tmp_path, cell):
        with pytest.raises(DatasetParseError) as info:
            load_dataset(write(tmp_path / "a.csv", f"y,a,b\n1,2,3\n4,{cell},6\n"))
        assert (info.value.row, info.value.column) == (3, 2)

    def test_header_only(self, tmp_path):
        with pytest.raises(DatasetParseError, match="empty dataset"):
            load_dataset(write(tmp_path / "a.csv", "y,a,b\n"))

    def test_missing_file(self, tmp_path):
        with pytest.raises(DatasetParseError):
            load_dataset(tmp_path / "none.csv")


def test_simulate_screen_round_trip(tmp_path, capsys):
    assert main(["simulate", "--model", "5", "--n", "60", "--p", "25", "--seed", "8", "--output-dir", str(tmp_path)]) == 0
    path = tmp_path / "model5_seed8.csv"
    lines = path.read_text().splitlines()
    assert lines[0] == "# ckfscreen simulate"
    assert lines[2] == "# true_set 0,1,2,3,4,5,6,7,8,9"
    inst = generate(ModelSpec(5, 60, 25, 8))
    for method in ("ckf", "fkf", "kf", "sis", "dcs"):
        assert np.array_equal(screen_all(load_dataset(path), method).scores, screen_all(inst.data, method).scores)

    capsys.readouterr()
    out = tmp_path / "screen"
    assert main(["screen", str(path), "--method", "ckf", "--d", "10", "--output-dir", str(out)]) == 0
    printed = capsys.readouterr().out.strip().splitlines()
    assert len(printed) == 10
    assert all(line.startswith("x") and "np." not in line for line in printed)
    sel = json.loads((out / "selected.json").read_text())
    expected = screen_all(inst.data, "ckf")
    assert sel["indices"] == sorted(expected.ranking()[:10].tolist())
    rows = (out / "scores.csv").read_text().splitlines()
    assert rows[2] == "feature,index,score,rank,selected"
    assert len(rows) == 3 + 25
    assert float(rows[3].split(",")[2]) == expected.scores[0]


def test_screen_fkf_with_knots(tmp_path):
    path = tmp_path / "d.csv"
    main(["simulate", "--model", "1", "--n", "40", "--p", "6", "--output-dir", str(tmp_path)])
    src = tmp_path / "model1_seed0.csv"
    assert main(["screen", str(src), "--method", "fkf", "--knots", "3,4,5,6", "--d", "2", "--output-dir", str(tmp_path)]) == 0
    sel = json.loads((tmp_path / "selected.json").read_text())
    assert sel["method"] == "fkf" and len(sel["features"]) == 2
    assert not path.exists()


def test_usage_errors_exit_1(tmp_path, capsys):
    src = write(tmp_path / "a.csv", "y,a\n1,2\n3,4\n")
    with pytest.raises(SystemExit) as info:
        main(["screen", str(src), "--method", "lasso"])
    assert info.value.code == 1
    with pytest.raises(SystemExit) as info:
        main(["bogus"])
    assert info.value.code == 1
    assert main(["screen", str(src), "--d", "5", "--output-dir", str(tmp_path)]) == 1
    assert main(["simulate", "--model", "12", "--output-dir", str(tmp_path)]) == 1


def test_data_errors_exit_2(tmp_path, capsys):
    src = write(tmp_path / "a.csv", "y,a\n1,2\n3\n")
    assert main(["screen", str(src), "--d", "1", "--output-dir", str(tmp_path)]) == 2
    assert "row 3" in capsys.readouterr().err


def test_config_file_precedence(tmp_path):
    cfg = write(tmp_path / "c.json", json.dumps({"models": [1], "methods": ["ckf"], "n": 30, "p": 5, "reps": 2, "seed": 4}))
    assert main(["table1", "--config", str(cfg), "--reps", "1", "--output-dir", str(tmp_path)]) == 0
    summary = json.loads((tmp_path / "table1_summary.json").read_text())
    assert summary["cells"]["1"]["ckf"]["reps"] == 1
    assert '"seed": 4' in summary["provenance"][1]

    bad = write(tmp_path / "bad.json", json.dumps({"repz": 3}))
    assert main(["table1", "--config", str(bad), "--output-dir", str(tmp_path)]) == 1


def test_output_dir_env(tmp_path, monkeypatch):
    monkeypatch.setenv("CKFSCREEN_OUTPUT_DIR", str(tmp_path / "env"))
    assert main(["simulate", "--model", "toy", "--n", "10", "--beta", "0.3"]) == 0
    assert (tmp_path / "env" / "modeltoy_seed0.csv").exists()


def test_table1_byte_identical_across_threads(tmp_path):
    outs = []
    for threads in (1, 2):
        out = tmp_path / f"t{threads}"
        args = ["table1", "--models", "1,7", "--reps", "5", "--seed", "42", "--n", "60", "--p", "50"]
        assert main(args + ["--threads", str(threads), "--output-dir", str(out)]) == 0
        outs.append({f.name: f.read_bytes() for f in out.iterdir()})
    assert outs[0] == outs[1]
    assert set(outs[0]) == {"table1_records.csv", "table1_summary.json"}


def test_lemma_check_passes(capsys):
    assert main(["lemma-check"]) == 0
    out = capsys.readouterr().out
    assert "all checks passed" in out
    assert len(out.splitlines()) == 2 + 11 * 5


def test_lemma_check_reports_broken_derivative(monkeypatch, capsys):
    from ckfscreen import copula_oracle

    monkeypatch.setattr(copula_oracle, "lemma_kj_drho", lambda rho, x=None: 1.0)
    assert main(["lemma-check", "--rhos", "0.3,0.6", "--xs", "0"]) == 3
    assert "FAILED: derivative" in capsys.readouterr().err


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "ckfscreen", "--help"], capture_output=True, text=True)
    assert proc.returncode == 0 and "sure-screening" in proc.stdout
