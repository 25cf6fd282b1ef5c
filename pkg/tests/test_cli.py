import subprocess
import sys

import pytest

from conftest import CORPUS, corpus_files
from sortpoint.cli import main
from sortpoint.codec import parse_solution, read_instance
from sortpoint.instance_model import validate_solution

WORKED_RSPP = str(CORPUS / "worked_rspp.yaml")
WORKED_SPP = str(CORPUS / "worked_spp.yaml")


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_solve_writes_valid_solution(capsys, tmp_path):
    sol = tmp_path / "sol.yaml"
    code, out, _ = run(capsys, "solve", WORKED_RSPP, "--algo", "t1", "--out", str(sol))
    assert (code, out.strip()) == (0, "YES")
    inst = read_instance(CORPUS / "worked_rspp.yaml")
    assert validate_solution(inst, parse_solution(sol.read_text(), inst)).valid
    code, out, _ = run(capsys, "validate", WORKED_RSPP, str(sol))
    assert (code, out.strip()) == (0, "valid")


def test_solve_no_exit_code(capsys):
    code, out, _ = run(capsys, "solve", WORKED_SPP, "--target", "1")
    assert (code, out.strip()) == (1, "NO")


def test_validate_shipped_and_rejected(capsys):
    shipped = str(CORPUS / "solutions" / "worked_spp_T2.yaml")
    assert run(capsys, "validate", WORKED_SPP, shipped)[0] == 0
    inst = read_instance(CORPUS / "worked_spp.yaml")
    assert not validate_solution(inst.with_target(1), parse_solution(open(shipped).read(), inst)).valid


def test_malformed_instance(capsys, tmp_path):
    bad = tmp_path / "bad.yaml"
    bad.write_text("problem: RSPP\nvertices: [a, b]\nedges: [[a, c]]\ncommodities: []\ntarget: 1\n")
    code, _, err = run(capsys, "solve", str(bad))
    assert code == 2 and "c" in err and "sortpoint:" in err
    bad.write_text("problem: RSPP\nvertices: [a, b]\nedges: [[a, b]]\ncommodities: []\ntarget: x\n")
    code, _, err = run(capsys, "solve", str(bad))
    assert code == 2 and "target" in err
    assert run(capsys, "solve", str(tmp_path / "missing.yaml"))[0] == 2
    assert run(capsys, "bogus")[0] == 2
    assert run(capsys)[0] == 2


def test_solve_output_repeatable(capsys):
    args = ("solve", WORKED_RSPP, "--target", "2", "--coloring", "random", "--seed", "7")
    first = run(capsys, *args)
    assert first == run(capsys, *args)
    assert "seed: 7" in first[1]


def test_generate_repeatable(capsys, tmp_path):
    for kind in ("random", "bounded"):
        a = run(capsys, "generate", kind, "--seed", "3", "--n", "7")
        assert a[0] == 0 and a == run(capsys, "generate", kind, "--seed", "3", "--n", "7")


def test_generate_reduction_with_witness(capsys, tmp_path):
    src = tmp_path / "src.yaml"
    src.write_text("3partition: {m: 2, B: 38, ints: [10, 11, 12, 13, 14, 16]}\n")
    inst_path, wit = tmp_path / "inst.yaml", tmp_path / "wit.yaml"
    code, _, _ = run(capsys, "generate", "3partition", "--source", str(src), "--out", str(inst_path), "--witness", str(wit))
    assert code == 0
    assert "structural-checks: pass" in inst_path.read_text()
    assert run(capsys, "validate", str(inst_path), str(wit))[0] == 0
    code, _, _ = run(capsys, "generate", "sat22-spp", "--vars", "3", "--out", str(inst_path), "--witness", str(wit))
    assert code == 0
    assert run(capsys, "validate", str(inst_path), str(wit))[0] == 0
    assert run(capsys, "generate", "3partition")[0] == 2


def test_min_target(capsys):
    assert run(capsys, "min-target", WORKED_SPP)[1].strip() == "2"
    assert run(capsys, "min-target", WORKED_RSPP)[1].strip() == "1"
    assert run(capsys, "min-target", WORKED_SPP, "--algo", "oracle")[1].strip() == "2"


def test_bench_tsv(capsys):
    code, out, _ = run(capsys, "bench", WORKED_SPP, WORKED_RSPP, "--algos", "auto,t1,oracle", "--no-time")
    assert code == 0
    rows = [line.split("\t") for line in out.strip().splitlines()]
    assert rows[0] == ["instance", "algo", "decision", "target"]
    assert ["worked_spp.yaml", "t1", "n/a", "2"] in rows
    assert ["worked_rspp.yaml", "t1", "YES", "1"] in rows
    assert run(capsys, "bench", WORKED_SPP, "--algos", "nope")[0] == 2


def test_bench_budget_exit(capsys):
    code, out, _ = run(capsys, "bench", str(CORPUS / "sat22_sample_pl.yaml"), "--algos", "oracle", "--budget", "1", "--no-time")
    assert code == 3 and "BUDGET" in out


def test_console_entry_point():
    res = subprocess.run([sys.executable, "-m", "sortpoint.cli", "--version"], capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout.startswith("sortpoint ")


@pytest.mark.parametrize("path", corpus_files(), ids=lambda p: p.stem)
def test_corpus_solve_validates(capsys, tmp_path, path):
    sol = tmp_path / "sol.yaml"
    code, out, _ = run(capsys, "solve", str(path), "--out", str(sol))
    assert code in (0, 1)
    if code == 0:
        assert run(capsys, "validate", str(path), str(sol))[0] == 0


def test_validate_reports_reasons(capsys, tmp_path):
    from sortpoint.codec import dump_instance

    tight = tmp_path / "tight.yaml"
    tight.write_text(dump_instance(read_instance(CORPUS / "worked_spp.yaml").with_target(1)))
    code, out, _ = run(capsys, "validate", str(tight), str(CORPUS / "solutions" / "worked_spp_T2.yaml"))
    assert code == 1
    assert out.startswith("invalid") and "outdegree above 1" in out
