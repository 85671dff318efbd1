import json
from pathlib import Path

import pytest

from ramlab import cli
from ramlab.errors import ParseError

ROOT = Path(__file__).resolve().parent.parent
JOBS = ROOT / "jobs"
GOLDEN = sorted(p for p in JOBS.glob("*.job") if (JOBS / "expected" / f"{p.stem}.json").exists())


def _run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.mark.parametrize("job", GOLDEN, ids=lambda p: p.stem)
def test_golden_job_is_byte_deterministic(capsys, job):
    code1, out1, _ = _run(capsys, "run", str(job))
    code2, out2, _ = _run(capsys, "run", str(job))
    assert out1 == out2
    assert code1 == code2
    assert out1 == (JOBS / "expected" / f"{job.stem}.json").read_text()


def test_worked_job_report(capsys):
    code, out, _ = _run(capsys, "run", str(JOBS / "nf_as_worked.job"))
    rep = json.loads(out)
    assert code == 0 and rep["status"] == "ok"
    assert rep["result"]["g"] == "t^(-3/2) + t^-1*z"
    assert rep["verification"] and all(rep["verification"].values())
    assert "timings" not in rep


def test_malformed_job_exit_2(capsys):
    code, out, err = _run(capsys, "run", str(JOBS / "malformed.job"))
    assert code == 2 and out == ""
    assert "malformed.job:6:" in err and "column" in err


def test_missing_job_file(capsys, tmp_path):
    code, _, err = _run(capsys, "run", str(tmp_path / "nope.job"))
    assert code == 2 and "cannot read" in err


def test_computation_error_exit_3(capsys):
    code, out, _ = _run(capsys, "run", str(JOBS / "kummer_not_one_unit.job"))
    rep = json.loads(out)
    assert code == 3 and rep["status"] == "error"
    assert rep["error"]["reason"] == "precondition"


def test_verification_failure_exit_4(capsys, monkeypatch):
    def broken(f, at, S):
        return {"g": "?"}, {"identity": False}

    monkeypatch.setattr(cli, "_as_payload", broken)
    code, out, _ = _run(capsys, "run", str(JOBS / "nf_as_worked.job"))
    rep = json.loads(out)
    assert code == 4 and rep["status"] == "verification-failed"


def test_json_flag_writes_same_bytes(capsys, tmp_path):
    target = tmp_path / "r.json"
    code, out, _ = _run(capsys, "run", str(JOBS / "ext_tame.job"), "--json", str(target))
    assert code == 0 and target.read_text() == out


@pytest.mark.parametrize("suite", ["delta", "oneunit", "asnf", "kummer", "ext"])
def test_verify_suites_pass(capsys, suite):
    code, out, _ = _run(capsys, "verify", "--suite", suite, "--seed", "3", "--size", "10")
    rep = json.loads(out)
    assert code == 0
    assert rep["result"]["passed"] == rep["result"]["total"] > 0


def test_verify_is_deterministic(capsys):
    a = _run(capsys, "verify", "--suite", "delta", "--seed", "1", "--size", "100")
    b = _run(capsys, "verify", "--suite", "delta", "--seed", "1", "--size", "100")
    assert a == b
    assert json.loads(a[1])["result"]["passed"] == 100


def test_verify_unknown_suite(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["verify", "--suite", "nope"])
    assert exc.value.code == 2


def test_bad_confirmations(capsys):
    code, _, err = _run(capsys, "run", str(JOBS / "nf_as_worked.job"), "--confirmations", "0")
    assert code == 2 and "confirmations" in err


def test_parse_job_blocks():
    job = cli.parse_job("# c\n[model]\nkind = padic\np = 2\n[task]\nname = hensel\n")
    assert job.blocks["model"]["kind"] == ("padic", 3)
    with pytest.raises(ParseError) as exc:
        cli.parse_job("[model]\nkind padic\n", "x.job")
    assert "x.job:2" in str(exc.value)


def test_unknown_suite_in_job(capsys, tmp_path):
    job = tmp_path / "v.job"
    job.write_text("[task]\nname = verify\nsuite = nope\n")
    code, _, err = _run(capsys, "run", str(job))
    assert code == 2 and "nope" in err
