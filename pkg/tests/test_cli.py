import csv
import io

import numpy as np
import pytest

from polyshell.cli import run
from polyshell.geometry import build_polygon


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_indent_csv():
    code, out, _ = call("indent", "--n", "10", "--f", "0.25")
    assert code == 0
    assert out.splitlines()[0] == "index,x_ref,y_ref,x_def,y_def,in_contact"
    data = rows(out)
    assert len(data) == 10
    assert [int(r["index"]) for r in data] == list(range(1, 11))
    assert sum(int(r["in_contact"]) for r in data) == 3
    assert min(float(r["y_def"]) for r in data) >= -1e-9


def test_indent_zero_is_reference():
    code, out, _ = call("indent", "--n", "10", "--f", "0")
    assert code == 0
    data = rows(out)
    ref = build_polygon(10).vertices
    got = np.array([[float(r["x_def"]), float(r["y_def"])] for r in data])
    np.testing.assert_array_equal(got, ref)
    np.testing.assert_array_equal(got, [[float(r["x_ref"]), float(r["y_ref"])] for r in data])


def test_total_force_mode():
    _, a, _ = call("indent", "--f", "2.25", "--force-mode", "total")
    _, b, _ = call("indent", "--f", "0.25")
    assert a == b


def test_deterministic_output():
    for args in (["indent", "--n", "13", "--f", "0.4"], ["sweep", "--f-grid", "0:1:11"]):
        assert call(*args)[1] == call(*args)[1]


def test_verify_passes():
    code, out, _ = call("verify", "--seed", "42")
    assert code == 0
    assert "FAIL" not in out and out.count("PASS") == 5


def test_out_directory(tmp_path):
    code, out, _ = call("relax", "--f", "0.5", "--out", str(tmp_path))
    assert code == 0
    assert "contacts: 5" in out
    for name in ("vertices.csv", "summary.txt", "indent.svg", "relax.svg"):
        assert (tmp_path / name).is_file()
    assert (tmp_path / "vertices.csv").read_bytes().count(b"\r") == 0


@pytest.mark.parametrize(
    "cmd, csv_name, header",
    [
        ("sweep", "sweep.csv", "f,height,height_drop,contacts"),
        ("table1", "table1.csv", "contacts,f_used,R_over_R0,rms"),
        ("converge", "converge.csv", "n,apex_height,discrepancy"),
    ],
)
def test_table_commands(tmp_path, cmd, csv_name, header):
    code, _, _ = call(cmd, "--out", str(tmp_path))
    assert code == 0
    text = (tmp_path / csv_name).read_text(encoding="utf-8")
    assert text.splitlines()[0] == header
    assert (tmp_path / f"{cmd}.svg").is_file()


def test_sweep_values():
    _, out, _ = call("sweep", "--f-grid", "0,0.25,1.2")
    data = rows(out)
    assert [int(r["contacts"]) for r in data] == [1, 3, 10]
    assert float(data[0]["height"]) == 2.0


def test_config_file_and_override(tmp_path):
    cfg = tmp_path / "exp.cfg"
    cfg.write_text("# decagon\nn = 10\nf = 0.6\nk = 1.0\n", encoding="utf-8")
    _, a, _ = call("indent", "--config", str(cfg))
    _, b, _ = call("indent", "--n", "10", "--f", "0.6")
    assert a == b
    _, c, _ = call("indent", "--config", str(cfg), "--f", "0.25")
    assert c == call("indent", "--f", "0.25")[1]


@pytest.mark.parametrize(
    "args, field",
    [
        (["indent", "--n", "2"], "n"),
        (["indent", "--kappa", "0"], "kappa"),
        (["indent", "--f", "-1"], "f"),
        (["sweep", "--f-grid", "0.5,0.1"], "f_grid"),
        (["indent", "--force-mode", "weird"], "force_mode"),
        (["converge", "--n-list", "20,10"], "n_list"),
    ],
)
def test_config_errors(args, field):
    code, _, err = call(*args)
    assert code == 2
    assert field in err


def test_bad_config_file(tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("n = 10\nbogus = 3\n", encoding="utf-8")
    code, _, err = call("indent", "--config", str(cfg))
    assert code == 2 and "bogus" in err
    cfg.write_text("n = ten\n", encoding="utf-8")
    code, _, err = call("indent", "--config", str(cfg))
    assert code == 2 and "'n'" in err


def test_unknown_flag_exit_code():
    assert call("indent", "--no-such-flag")[0] == 2


def test_solver_failure_exit_code():
    assert call("indent", "--f", "0.8", "--max-iters", "1")[0] == 1
