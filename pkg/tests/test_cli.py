import json

import pytest

from fltcheck import runner
from fltcheck.cli import main
from fltcheck.runner import RunConfig, read_checkpoint, run_verify


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_coeffs_examples(capsys):
    assert run(capsys, "coeffs", "--p", 5, "--mode", "exact", "--which", "W")[1] == "0\t5\n1\t-5\n"
    assert run(capsys, "coeffs", "--p", 7, "--mode", "exact", "--which", "H")[1] == "0\t1\n"
    code, out, _ = run(capsys, "coeffs", "--p", 11, "--mode", "mod-p2", "--which", "H")
    assert code == 0 and out.splitlines() == [f"{i}\t{c}" for i, c in enumerate((1, 3, 7, 9, 7, 3, 1))]
    assert run(capsys, "coeffs", "--p", 5, "--mode", "mod-p", "--which", "G")[1] == "0\t1\n1\t1\n2\t1\n"
    assert run(capsys, "coeffs", "--p", 7, "--mode", "mod-p", "--which", "W")[1] == "0\t0\n1\t0\n2\t0\n"
    assert len(run(capsys, "coeffs", "--p", 2437, "--mode", "mod-p", "--which", "H")[1].splitlines()) == 2437 - 3 - 2 * 2 + 1


@pytest.mark.parametrize("argv", [
    ("--p", 103, "--mode", "exact", "--which", "G"),
    ("--p", 9, "--mode", "mod-p", "--which", "H"),
    ("--p", 3, "--mode", "exact", "--which", "H"),
    ("--p", 9, "--mode", "mod-p2", "--which", "W"),
])
def test_coeffs_invalid_p(capsys, argv):
    code, out, err = run(capsys, "coeffs", *argv)
    assert code == 1 and out == "" and "error" in err


def test_identity(capsys):
    code, out, _ = run(capsys, "identity", "--max-n", 25)
    assert code == 0 and len(out.splitlines()) == 12 and "FAIL" not in out
    assert run(capsys, "identity", "--max-n", 3)[0] == 0
    code, _, err = run(capsys, "identity", "--max-n", 4)
    assert code == 1 and "n must be odd" in err
    assert run(capsys, "identity", "--max-n", 103)[0] == 1


def test_wieferich(capsys):
    assert run(capsys, "wieferich", "--to", 100)[:2] == (0, "")
    assert run(capsys, "wieferich", "--to", 2)[:2] == (0, "")
    assert run(capsys, "wieferich", "--to", 5000)[:2] == (0, "1093\t2\n3511\t2\n")
    assert run(capsys, "wieferich", "--to", 10**7 + 1)[0] == 1


def test_oracle(capsys):
    code, out, _ = run(capsys, "oracle", "--max-p", 7)
    assert code == 0 and "FAIL" not in out
    assert "PASS\tcrosscheck p=7 k=2" in out
    assert run(capsys, "oracle", "--max-p", 62)[0] == 1


def test_usage_errors_exit_1(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["verify", "--conjecture", "3", "--from", "5", "--to", "7"])
    assert exc.value.code == 1
    assert run(capsys, "verify", "--conjecture", 1, "--from", 3, "--to", 50)[0] == 1
    assert run(capsys, "verify", "--conjecture", 1, "--from", 50, "--to", 5)[0] == 1
    assert run(capsys, "verify", "--conjecture", 1, "--from", 5, "--to", 50, "--jobs", 0)[0] == 1


def test_verify_small_range(capsys, tmp_path):
    report = tmp_path / "r.jsonl"
    code, out, _ = run(capsys, "verify", "--conjecture", 1, "--from", 5, "--to", 100, "--report", report)
    assert code == 0 and "all verified" in out
    lines = report.read_text().splitlines()
    recs = [json.loads(line) for line in lines]
    assert [r["p"] for r in recs] == [p for p in range(5, 101) if all(p % d for d in range(2, p))]
    assert list(recs[0]) == ["schema", "p", "conjecture", "status", "suspicious", "lift"]
    assert all(r["schema"] == 1 and r["status"] == "verified" and r["lift"] is None for r in recs)
    assert lines[0] == '{"schema":1,"p":5,"conjecture":1,"status":"verified","suspicious":[],"lift":null}'


def test_env_var_sets_jobs(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv(runner.JOBS_ENV, "0")
    assert run(capsys, "verify", "--conjecture", 2, "--from", 5, "--to", 50)[0] == 1
    monkeypatch.setenv(runner.JOBS_ENV, "lots")
    assert run(capsys, "verify", "--conjecture", 2, "--from", 5, "--to", 50)[0] == 1
    monkeypatch.setenv(runner.JOBS_ENV, "2")
    assert run(capsys, "verify", "--conjecture", 2, "--from", 5, "--to", 50)[0] == 0


def test_checkpoint_idempotent(tmp_path):
    ckpt = tmp_path / "c.jsonl"
    first = run_verify(RunConfig(2, 5, 500, checkpoint_path=ckpt))
    assert first.new == len(first.records) == 93
    again = run_verify(RunConfig(2, 5, 500, checkpoint_path=ckpt))
    assert again.new == 0 and again.exit_code == 0
    assert [r["p"] for r in again.records] == [r["p"] for r in first.records]
    ps = [json.loads(line)["p"] for line in ckpt.read_text().splitlines()]
    assert ps == sorted(ps) and len(set(ps)) == len(ps)
    assert all("ms" in json.loads(line) for line in ckpt.read_text().splitlines())


def test_resume_after_torn_line(tmp_path):
    full, part = tmp_path / "full.jsonl", tmp_path / "part.jsonl"
    run_verify(RunConfig(1, 5, 800, checkpoint_path=tmp_path / "a", report_path=full))
    lines = (tmp_path / "a").read_text().splitlines(keepends=True)
    # out-of-order prefix plus a half-written line, as a killed parallel run leaves it
    (tmp_path / "b").write_text("".join(lines[10:40] + lines[:5]) + lines[50][:17])
    summary = run_verify(RunConfig(1, 5, 800, checkpoint_path=tmp_path / "b", report_path=part))
    assert summary.new == len(lines) - 35
    assert full.read_bytes() == part.read_bytes()
    assert len(read_checkpoint(tmp_path / "b")) == len(lines)


def test_corrupt_checkpoint_is_an_error(capsys, tmp_path):
    ckpt = tmp_path / "c.jsonl"
    ckpt.write_text('garbage\n{"schema":1,"p":5,"conjecture":1,"status":"verified","suspicious":[],"lift":null,"ms":1}\n')
    assert run(capsys, "verify", "--conjecture", 1, "--from", 5, "--to", 50, "--checkpoint", ckpt)[0] == 1
    ckpt.write_text('{"schema":1,"p":5,"conjecture":2,"status":"verified","suspicious":[],"lift":null,"ms":1}\n')
    code, _, err = run(capsys, "verify", "--conjecture", 1, "--from", 5, "--to", 50, "--checkpoint", ckpt)
    assert code == 1 and "conjecture 2" in err
    ckpt.write_text('{"schema":9,"p":5}\n{"schema":9,"p":7}\n')
    assert run(capsys, "verify", "--conjecture", 1, "--from", 5, "--to", 50, "--checkpoint", ckpt)[0] == 1


def test_report_outside_checkpoint_range(tmp_path):
    ckpt, report = tmp_path / "c", tmp_path / "r"
    run_verify(RunConfig(2, 5, 300, checkpoint_path=ckpt))
    summary = run_verify(RunConfig(2, 100, 200, checkpoint_path=ckpt, report_path=report))
    assert summary.new == 0
    ps = [json.loads(line)["p"] for line in report.read_text().splitlines()]
    assert ps[0] == 101 and ps[-1] == 199


def test_counterexample_exits_2(capsys, tmp_path, monkeypatch):
    # no real counterexample exists in reach, so force stage 2 to report one
    def fake_lift(p, suspicious, conjecture):
        return suspicious[0].X + p if p == 59 else None

    monkeypatch.setattr(runner, "stage2_lift", fake_lift)
    report = tmp_path / "r.jsonl"
    code, out, _ = run(capsys, "verify", "--conjecture", 1, "--from", 5, "--to", 100, "--report", report)
    assert code == 2
    assert 'COUNTEREXAMPLE {"schema":1,"p":59,"conjecture":1,"status":"counterexample"' in out
    recs = [json.loads(line) for line in report.read_text().splitlines()]
    assert [r["p"] for r in recs if r["status"] == "counterexample"] == [59]
    assert recs[-1]["p"] == 97  # kept scanning after the counterexample


def test_jobs_and_chunking_do_not_change_report(tmp_path):
    paths = []
    for jobs, chunk, largest in ((1, runner.DEFAULT_CHUNK, False), (3, 7, True), (2, 1000, False)):
        path = tmp_path / f"r{jobs}.jsonl"
        run_verify(RunConfig(1, 5, 600, jobs=jobs, report_path=path, chunk=chunk, largest_first=largest))
        paths.append(path.read_bytes())
    assert paths[0] == paths[1] == paths[2]
