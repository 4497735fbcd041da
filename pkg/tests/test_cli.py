from pathlib import Path

import pytest

from blockforge.cli import main
from blockforge.designs import Design, develop, write_design
from blockforge.groups import cyclic, psl2, symmetric, wreath_imprimitive, write_group

GOLDEN = Path(__file__).parent / "golden"


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def files(tmp_path):
    write_group(cyclic(21), tmp_path / "c21.grp")
    write_group(psl2(8), tmp_path / "psl28.grp")
    write_group(wreath_imprimitive(symmetric(4), 4), tmp_path / "w44.grp")
    write_design(develop(cyclic(21), (1, 2, 5, 15, 17)), tmp_path / "a.dsn")
    write_design(develop(cyclic(21), (3, 6, 7, 12, 14)), tmp_path / "b.dsn")
    write_design(Design(21, [(1, 2, 3, 4, 5)]), tmp_path / "bad.dsn")
    (tmp_path / "broken.grp").write_text("9\n(1,2,10)\n")
    return tmp_path


def test_feasible(capsys):
    code, out, _ = run(capsys, "feasible", "--k", "5")
    assert code == 0
    rows = out.splitlines()
    assert len(rows) == 4 and rows[-1].endswith("(81,9,9)")
    assert out == (GOLDEN / "feasible_k5.tsv").read_text()


@pytest.mark.parametrize("c, d, line", [("3", "7", "b=11340 lambda=540"), ("4", "4", "b=1728 lambda=144"),
                                        ("7", "3", "b=5145 lambda=245")])
def test_wreath(capsys, c, d, line):
    code, out, _ = run(capsys, "wreath", "--c", c, "--d", d)
    assert code == 0 and out.strip() == line


def test_wreath_out_and_verify(capsys, tmp_path):
    path = tmp_path / "w.dsn"
    assert run(capsys, "wreath", "--c", "4", "--d", "4", "--out", str(path))[0] == 0
    code, out, _ = run(capsys, "verify", "--design", str(path))
    assert code == 0 and out.strip() == "2-design lambda=144"


def test_wreath_stream_refuses_out(capsys, tmp_path):
    code, _, err = run(capsys, "wreath", "--c", "4", "--d", "4", "--stream", "--out", str(tmp_path / "x"))
    assert code == 2 and "streamed" in err


def test_wreath_infeasible(capsys):
    code, _, err = run(capsys, "wreath", "--c", "5", "--d", "5")
    assert code == 2 and "not a feasible triple" in err


def test_develop(capsys, files):
    code, out, _ = run(capsys, "develop", "--group", str(files / "c21.grp"), "--base", "1,2,5,15,17",
                       "--out", str(files / "dev.dsn"))
    assert code == 0 and out.strip() == "v=21 b=21 k=5 lambda=1"
    assert (files / "dev.dsn").read_text() == (files / "a.dsn").read_text()
    code, out, _ = run(capsys, "develop", "--group", str(files / "c21.grp"), "--base", "1,2,3,4,5")
    assert code == 1 and "lambda=none" in out


def test_verify_bad(capsys, files):
    code, out, _ = run(capsys, "verify", "--design", str(files / "bad.dsn"))
    assert code == 1
    assert out.strip() == "NOT a 2-design: pair (1,6) count=0 vs pair (1,2) count=1"


def test_verify_t1(capsys, files):
    code, out, _ = run(capsys, "verify", "--design", str(files / "a.dsn"), "--t", "1")
    assert code == 0 and out.strip() == "1-design lambda=5"


def test_iso(capsys, files):
    code, out, _ = run(capsys, "iso", "--a", str(files / "a.dsn"), "--b", str(files / "b.dsn"))
    assert code == 0 and out.startswith("(")
    code, out, _ = run(capsys, "iso", "--a", str(files / "a.dsn"), "--b", str(files / "bad.dsn"))
    assert code == 1 and out.startswith("non-isomorphic (parameters differ")


def test_dedupe(capsys, files):
    a, b = str(files / "a.dsn"), str(files / "b.dsn")
    code, out, _ = run(capsys, "dedupe", a, b, a)
    assert code == 0
    assert out.splitlines() == ["class\trepresentative\tmultiplicity\tmembers", f"1\t{a}\t3\t{a},{b},{a}"]


@pytest.mark.parametrize("name, expect", [
    ("c21.grp", "degree=21 order=21 transitive primitive=false systems=3x7,7x3 subdegrees=" + ",".join(["1"] * 21)),
    ("psl28.grp", "degree=9 order=504 transitive primitive=true subdegrees=1,8"),
    ("w44.grp", "degree=16 order=7962624 transitive primitive=false systems=4x4 subdegrees=1,3,12"),
])
def test_group_info(capsys, files, name, expect):
    code, out, _ = run(capsys, "group-info", "--group", str(files / name))
    assert code == 0 and out.strip() == expect


def test_parse_error_exit(capsys, files):
    code, _, err = run(capsys, "group-info", "--group", str(files / "broken.grp"))
    assert code == 2 and "line 2" in err


def test_missing_file_exit(capsys, tmp_path):
    code, _, err = run(capsys, "verify", "--design", str(tmp_path / "none.dsn"))
    assert code == 2 and err.startswith("error:")


def test_usage_error():
    with pytest.raises(SystemExit) as exc:
        main(["nosuchcommand"])
    assert exc.value.code == 2


def test_budget_exit(capsys, monkeypatch):
    monkeypatch.setenv("BLOCKFORGE_BUDGET_ORBIT", "100")
    code, _, err = run(capsys, "wreath", "--c", "4", "--d", "4")
    assert code == 3 and "budget" in err


def test_solve_rank3(capsys):
    code, out, _ = run(capsys, "solve-rank3")
    assert code == 0 and out == (GOLDEN / "solve_rank3.tsv").read_text()


@pytest.mark.parametrize("v0", [7, 9])
def test_phi_psi_check(capsys, v0):
    code, out, _ = run(capsys, "phi-psi", "--v0", str(v0), "--all", "--check")
    assert code == 0 and "MISMATCH" not in out
    assert out == (GOLDEN / f"phi_psi_v{v0}.tsv").read_text()


def test_phi_psi_single(capsys):
    code, out, _ = run(capsys, "phi-psi", "--v0", "9", "--case", "7")
    assert code == 0 and out.splitlines()[1] == "7\t1680\t420"


def test_phi_psi_over_cap(capsys):
    code, _, err = run(capsys, "phi-psi", "--v0", "19", "--case", "17", "--check")
    assert code == 3


def test_product_psl27(capsys):
    code, out, _ = run(capsys, "product", "--family", "psl27", "--top", "wr2")
    assert code == 0 and out.strip() == "lambda=none"


def test_product_list_golden(capsys):
    code, out, _ = run(capsys, "product", "--family", "psl28", "--top", "wr2", "--list")
    assert code == 0
    assert out == (GOLDEN / "product_psl28_wr2.tsv").read_text()
    assert out.splitlines()[-1] == "lambda=392,784,1568"


def test_classify_cli(capsys, tmp_path):
    write_group(cyclic(21), tmp_path / "deg21_n3.grp")
    (tmp_path / "PROVENANCE").write_text("hand-made test catalog\n")
    out_path = tmp_path / "report.tsv"
    code, _, err = run(capsys, "classify", "--catalog", str(tmp_path), "--v", "21", "--out", str(out_path),
                       "--jobs", "1")
    assert code == 0 and "hand-made test catalog" in err
    assert out_path.read_text().splitlines() == [
        "catalog_index\tbase_block\tlambda\tiso_class", "3\t1,2,5,15,17\t1\t1", "3\t1,2,7,9,19\t1\t1"]


def test_classify_jobs_identical(capsys, tmp_path):
    write_group(cyclic(21), tmp_path / "deg21_n3.grp")
    write_group(wreath_imprimitive(symmetric(7), 3), tmp_path / "deg21_n8.grp")
    outs = [run(capsys, "classify", "--catalog", str(tmp_path), "--v", "21", "--jobs", j)[1]
            for j in ("1", "2")]
    assert outs[0] == outs[1]


def test_help_texts(capsys):
    for cmd in ("feasible", "wreath", "develop", "verify", "classify", "iso", "dedupe", "product",
                "phi-psi", "solve-rank3", "group-info"):
        with pytest.raises(SystemExit) as exc:
            main([cmd, "--help"])
        assert exc.value.code == 0
        assert "usage" in capsys.readouterr().out
