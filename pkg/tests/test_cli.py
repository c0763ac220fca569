"""Command-line surface: outputs, formats and exit codes."""

import json

import pytest
from importlib import resources

from pgf.cli import dispatch


def fixture_path(name):
    return str(resources.files("pgf").joinpath("data", name))


def test_build_prints_order_rank_dl(capsys):
    assert dispatch(["build", "W(C(2,1),C(2,1))"]) == 0
    assert capsys.readouterr().out == "order=8 rank=2 dl=2\n"


def test_build_cyclic(capsys):
    assert dispatch(["build", "C(3,2)"]) == 0
    assert capsys.readouterr().out == "order=9 rank=1 dl=1\n"


def test_build_invalid_certificate_exits_1(capsys):
    assert dispatch(["build", "C(6,1)"]) == 1
    err = capsys.readouterr().err
    assert err.startswith("error:")
    assert "6" in err


def test_build_cap_violation_exits_1(capsys):
    assert dispatch(["build", "W(C(3,2),C(3,2))"]) == 1
    assert "error:" in capsys.readouterr().err


def test_missing_subcommand_is_usage_error():
    with pytest.raises(SystemExit) as exc:
        dispatch([])
    assert exc.value.code == 2


def test_unknown_flag_is_usage_error():
    with pytest.raises(SystemExit) as exc:
        dispatch(["census", fixture_path("o8.pc"), "--format", "yaml"])
    assert exc.value.code == 2


def test_help_documents_grammar_and_examples(capsys):
    with pytest.raises(SystemExit) as exc:
        dispatch(["--help"])
    assert exc.value.code == 0
    out = capsys.readouterr().out
    for needle in (
        "C(l,k)",
        "D(a,b)",
        "W(a,b)",
        "Q(c;w1,...,wn)",
        'pgf build "W(C(2,1),C(2,1))"',
        "pgf semiabelian",
        "pgf verify",
    ):
        assert needle in out


def test_semiabelian_certificate_with_witness(capsys):
    assert dispatch(["semiabelian", "W(C(2,1),C(2,1))"]) == 0
    out = capsys.readouterr().out
    assert "semiabelian=true" in out
    assert "step 1:" in out
    assert "A abelian normal" in out


def test_semiabelian_from_pcfile_index(capsys):
    assert dispatch(["semiabelian", fixture_path("o8.pc") + "#5"]) == 0
    out = capsys.readouterr().out
    assert "#5" in out
    assert "semiabelian=true" in out


def test_semiabelian_bad_index_exits_1(capsys):
    assert dispatch(["semiabelian", fixture_path("o8.pc") + "#99"]) == 1
    err = capsys.readouterr().err
    assert "99" in err and "o8.pc" in err


def test_census_csv_output(tmp_path, capsys):
    rc = dispatch(
        [
            "census",
            fixture_path("o8.pc"),
            "--format",
            "csv",
            "--cache",
            str(tmp_path),
            "--jobs",
            "1",
        ]
    )
    assert rc == 0
    lines = capsys.readouterr().out.splitlines()
    assert len(lines) == 6
    assert lines[0] == "order,index,provenance,rank,dl,semiabelian,screen,elapsed_ms"


def test_census_json_output(capsys):
    assert dispatch(["census", fixture_path("o8.pc"), "--jobs", "1"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["summary"]["total"] == 5
    assert doc["summary"]["non_semiabelian"] == 0


def test_census_failure_exits_1(tmp_path, capsys):
    big = tmp_path / "o2048.pc"
    big.write_text("GROUP 2048 1\nPRIME 2\nNGENS 11\nEND\n")
    rc = dispatch(["census", str(big), "--jobs", "1"])
    assert rc == 1
    captured = capsys.readouterr()
    assert "(2048,1)" in captured.err
    doc = json.loads(captured.out)
    assert doc["summary"]["total"] == 0
    assert len(doc["summary"]["failures"]) == 1


def test_ramification_report(capsys):
    assert dispatch(["ramification", "W(C(2,1),C(2,1))"]) == 0
    out = capsys.readouterr().out
    assert "minimal ramified primes: 2" in out
    assert "rank: 2" in out


def test_bounds_table(capsys):
    assert dispatch(["bounds", "W(C(5,1),C(5,1))"]) == 0
    out = capsys.readouterr().out
    assert out.splitlines()[0].split()[0] == "certificate"
    assert "15625" in out


def test_bounds_multiple_certificates(capsys):
    assert dispatch(["bounds", "C(2,1)", "W(C(2,1),C(2,1))"]) == 0
    out = capsys.readouterr().out
    assert len(out.splitlines()) == 3


def test_verify_prints_one_line_per_criterion(capsys):
    assert dispatch(["verify"]) == 0
    lines = capsys.readouterr().out.splitlines()
    tags = [ln.split(":")[0] for ln in lines]
    assert tags == [f"CRITERION {i}" for i in range(1, 9)]
    for ln in lines:
        assert any(s in ln for s in (": PASS", ": FAIL", ": SKIPPED"))
