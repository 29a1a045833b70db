import json
import subprocess
import sys

import pytest

from admmlp.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_project_vector(capsys):
    code, out, _ = run(capsys, "project", "--dim", "3", "--vector", "1,1,1", "--oracle")
    assert code == 0
    assert "projection: 0.666667 0.666667 0.666667" in out
    assert "facet:      111" in out
    gap = float(out.split("linf_gap:")[1].split()[0])
    assert gap <= 1e-9


def test_project_identity(capsys):
    code, out, _ = run(capsys, "project", "--dim", "3", "--vector", "0,0,0")
    assert code == 0 and "projection: 0 0 0" in out


def test_project_random_deterministic(capsys):
    a = run(capsys, "project", "--dim", "5", "--random", "4", "--seed", "2", "--oracle")
    b = run(capsys, "project", "--dim", "5", "--random", "4", "--seed", "2", "--oracle")
    assert a == b and a[1].count("input:") == 4


@pytest.mark.parametrize("argv", [
    ["project", "--dim", "1", "--vector", "1"],
    ["project", "--dim", "3", "--vector", "1,1"],
    ["project", "--dim", "3", "--vector", "a,b,c"],
    ["project", "--dim", "3"],
    ["project", "--dim", "3", "--random", "0"],
    ["decode", "--code", "hamming74"],
    ["frobnicate"],
    ["project", "--dim", "3", "--vector", "1,1,1", "--bogus"],
])
def test_usage_errors_exit_one(capsys, argv):
    with pytest.raises(SystemExit) as exc:
        code = main(argv)
        raise SystemExit(code)
    assert exc.value.code == 1
    assert "error" in capsys.readouterr().err


def test_decode_strong_llrs(capsys, tmp_path):
    f = tmp_path / "llr.txt"
    f.write_text("\n".join(["10"] * 7))
    for dec in ("admm", "bp", "admm-fixed"):
        code, out, _ = run(capsys, "decode", "--code", "hamming74", "--llr", str(f), "--decoder", dec)
        assert code == 0
        assert "hard:          0000000" in out


def test_decode_nonconvergence_exit_two(capsys, tmp_path):
    f = tmp_path / "llr.txt"
    f.write_text("\n".join(["-1", "1", "1", "1", "1", "1", "1"]))
    code, out, _ = run(capsys, "decode", "--code", "hamming74", "--llr", str(f), "--max-iters", "1")
    assert code == 2 and "converged:     False" in out


def test_decode_tanner_fixed_channel(capsys):
    code, out, _ = run(capsys, "decode", "--code", "tanner", "--channel", "4", "--seed", "1",
                       "--decoder", "admm-fixed", "--w-llr", "8", "--w-msg", "11")
    assert code == 0 and "bit_errors:    0" in out


def test_decode_bad_inputs(capsys, tmp_path):
    code, _, err = run(capsys, "decode", "--code", str(tmp_path / "none.alist"), "--channel", "3")
    assert code == 1 and "not found" in err
    f = tmp_path / "llr.txt"
    f.write_text("1\n2\n")
    code, _, err = run(capsys, "decode", "--code", "hamming74", "--llr", str(f))
    assert code == 1 and "expected 7" in err
    code, _, err = run(capsys, "decode", "--code", "hamming74", "--channel", "3",
                       "--decoder", "admm-fixed", "--w-llr", "8", "--w-msg", "8")
    assert code == 1


def _sweep(tmp_path, workers):
    spec = {"code": "hamming74", "decoders": [{"type": "admm_double"}, {"type": "admm_fixed"}],
            "ebn0_db": [2.0, 3.0], "min_frame_errors": 20, "seed": 3, "batch_size": 8,
            "name": "s"}
    sp = tmp_path / "spec.json"
    sp.write_text(json.dumps(spec))
    out = tmp_path / f"out{workers}"
    return main(["fer", "--spec", str(sp), "--out", str(out), "--workers", str(workers)]), out


def test_fer_worker_invariant_csv(capsys, tmp_path):
    c1, o1 = _sweep(tmp_path, 1)
    c2, o2 = _sweep(tmp_path, 2)
    assert c1 == c2 == 0
    assert (o1 / "s.csv").read_text() == (o2 / "s.csv").read_text()
    assert "errors=20" in capsys.readouterr().out


def test_fer_schema_error(capsys, tmp_path):
    sp = tmp_path / "spec.json"
    sp.write_text(json.dumps({"code": "hamming74", "decoders": [{"type": "bp"}], "ebn0_db": [1],
                              "max_iterations": -3}))
    code, _, err = run(capsys, "fer", "--spec", str(sp), "--out", str(tmp_path))
    assert code == 1 and "max_iterations" in err
    sp.write_text("{not json")
    code, _, err = run(capsys, "fer", "--spec", str(sp), "--out", str(tmp_path))
    assert code == 1 and "JSON" in err


def test_fer_unwritable_output(capsys, tmp_path):
    sp = tmp_path / "spec.json"
    sp.write_text(json.dumps({"code": "hamming74", "decoders": [{"type": "bp"}], "ebn0_db": [1]}))
    blocker = tmp_path / "file"
    blocker.write_text("")
    code, _, err = run(capsys, "fer", "--spec", str(sp), "--out", str(blocker / "sub"))
    assert code == 1


def test_info(capsys):
    code, out, _ = run(capsys, "info", "--code", "tanner")
    assert code == 0 and "n=155 m=93 k=64" in out and "check degrees:    5x93" in out
    code, out, _ = run(capsys, "info")
    assert "wigig" in out


def test_help_and_entry_point():
    r = subprocess.run([sys.executable, "-m", "admmlp.cli", "--help"], capture_output=True, text=True)
    assert r.returncode == 0 and "project" in r.stdout
    r = subprocess.run([sys.executable, "-m", "admmlp.cli", "decode", "--help"], capture_output=True, text=True)
    assert r.returncode == 0 and "--w-msg" in r.stdout
