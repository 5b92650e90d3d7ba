import io

import pytest

from rangeenc.cli import main
from rangeenc.topk_enc import TopKEncoding
from conftest import MINMAX_EXAMPLE, TOPK_EXAMPLE


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out)
    return code, out.getvalue()


@pytest.fixture
def example_file(tmp_path):
    path = tmp_path / "a.txt"
    path.write_text("\n".join(map(str, TOPK_EXAMPLE)) + "\n")
    return path


def test_encode_topk(tmp_path, example_file):
    out = tmp_path / "a.rctk"
    code, text = run("encode", "--input", str(example_file), "--output", str(out), "--mode", "topk", "-k", "2")
    assert code == 0
    assert text.splitlines()[0] == "mode,n,k,B,payload_bits,bound_bits,ratio"
    assert text.splitlines()[1].startswith("topk,9,2,,19,")
    assert str(TopKEncoding.from_bytes(out.read_bytes()).bits) == "1100110010001100101"


def test_encode_minmax(tmp_path):
    single = tmp_path / "one.txt"
    single.write_text("7\n")
    code, text = run("encode", "--input", str(single), "--output", str(tmp_path / "o"), "--mode", "minmax")
    assert code == 0 and text.splitlines()[1].startswith("minmax,1,,,2,3")
    mm = tmp_path / "mm.txt"
    mm.write_text("\n".join(map(str, MINMAX_EXAMPLE)))
    code, text = run("encode", "--input", str(mm), "--output", str(tmp_path / "f"), "--mode", "minmax")
    payload = int(text.splitlines()[1].split(",")[4])
    assert code == 0 and payload <= 33


@pytest.mark.parametrize("mode,extra", [("topk", []), ("ds", ["-B", "4"]), ("ds", [])])
def test_query_roundtrip(tmp_path, example_file, mode, extra):
    enc = tmp_path / "enc"
    assert run("encode", "--input", str(example_file), "--output", str(enc), "--mode", mode, "-k", "2", *extra)[0] == 0
    q = tmp_path / "q.txt"
    q.write_text("4 9\n1 1\n1 9 1\n")
    code, text = run("query", "--input", str(enc), "--queries", str(q))
    assert code == 0 and text == "6 8\n1\n3\n"
    res = tmp_path / "res.txt"
    assert run("query", "--input", str(enc), "--queries", str(q), "--output", str(res))[0] == 0
    assert res.read_text() == text


def test_query_minmax(tmp_path):
    mm = tmp_path / "mm.txt"
    mm.write_text("\n".join(map(str, MINMAX_EXAMPLE)))
    enc = tmp_path / "mm"
    run("encode", "--input", str(mm), "--output", str(enc), "--mode", "minmax")
    q = tmp_path / "q.txt"
    q.write_text("1 11\n6 9\n")
    assert run("query", "--input", str(enc), "--queries", str(q)) == (0, "1 2\n9 8\n")


def test_query_errors(tmp_path, example_file, capsys):
    enc = tmp_path / "enc"
    run("encode", "--input", str(example_file), "--output", str(enc), "--mode", "topk")
    q = tmp_path / "q.txt"
    q.write_text("1 2\nfoo bar\n")
    assert run("query", "--input", str(enc), "--queries", str(q))[0] == 2
    assert ":2:" in capsys.readouterr().err
    q.write_text("1 2\n3 12\n")
    assert run("query", "--input", str(enc), "--queries", str(q))[0] == 2
    assert "query 2" in capsys.readouterr().err


def test_bad_inputs(tmp_path, capsys):
    bad = tmp_path / "bad.txt"
    bad.write_text("1\n2\nthree\n")
    assert run("encode", "--input", str(bad), "--output", str(tmp_path / "x"))[0] == 2
    assert ":3:" in capsys.readouterr().err
    assert run("encode", "--input", str(tmp_path / "missing.txt"), "--output", "x")[0] == 2
    junk = tmp_path / "junk.bin"
    junk.write_bytes(b"JUNKJUNK")
    assert run("decode", "--input", str(junk))[0] == 2
    assert run("frobnicate")[0] == 2
    assert run("verify", "no-such-suite")[0] == 2
    assert run("verify", "minmax", "--budget", "99")[0] == 2


def test_decode(tmp_path, example_file):
    for mode in ("topk", "minmax", "ds"):
        enc = tmp_path / mode
        run("encode", "--input", str(example_file), "--output", str(enc), "--mode", mode, "-k", "2")
        code, text = run("decode", "--input", str(enc))
        assert code == 0
        if mode == "topk":
            assert text.splitlines()[-1] == "9,2 2 0 2 2 0 2 0 0"


def test_determinism(tmp_path, example_file):
    a, b = tmp_path / "a", tmp_path / "b"
    for path in (a, b):
        run("encode", "--input", str(example_file), "--output", str(path), "--mode", "ds", "-k", "2", "-B", "3")
    assert a.read_bytes() == b.read_bytes()
    assert run("count", "--budget", "3") == run("count", "--budget", "3")


@pytest.mark.parametrize("suite", ["minmax", "topk-enc", "topk-ds", "combinatorics"])
def test_verify_suites(suite):
    code, text = run("verify", suite, "--budget", "4", "--seed", "1")
    assert code == 0, text
    rows = [line.split(",") for line in text.splitlines()[1:]]
    assert rows and all(r[4] == "pass" and int(r[2]) > 0 for r in rows)


def test_verify_empty_budget():
    code, text = run("verify", "topk-enc", "--budget", "0")
    assert code == 0
    assert all(line.split(",")[2] == "0" for line in text.splitlines()[1:])


def test_verify_reports_failure(monkeypatch):
    from rangeenc import verify, topk_enc
    real = topk_enc.query_many
    monkeypatch.setattr(topk_enc, "query_many", lambda e, rs: [r[:0] for r in real(e, rs)])
    code, text = run("verify", "topk-enc", "--budget", "2")
    assert code == 1
    failed = [line for line in text.splitlines() if "FAIL" in line]
    assert failed and "A=(1,)" in failed[0]


def test_bench_columns():
    code, text = run("bench", "--mode", "topk", "-n", "64", "-k", "1,2", "--num-queries", "5")
    lines = text.splitlines()
    assert code == 0
    assert lines[0] == "mode,n,k,B,build_us,query_us,payload_bits,bound_bits,ratio"
    for line in lines[1:]:
        row = line.split(",")
        assert int(row[6]) <= (int(row[2]) + 1) * 64
    code, text = run("bench", "--mode", "minmax", "-n", "100")
    assert int(text.splitlines()[1].split(",")[6]) <= 300
    code, text = run("bench", "--mode", "ds", "-n", "200", "-k", "2", "-B", "8,auto", "--num-queries", "5")
    assert code == 0 and len(text.splitlines()) == 3


def test_count_csv():
    code, text = run("count", "--budget", "4")
    assert code == 0 and text.startswith("table,params,exact,bound,ratio\n")
    assert "baxter,n=4,22," in text
