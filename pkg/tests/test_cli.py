import json

import pytest

from broac.cli import main

from conftest import FIXTURES

VIEW = "view TextDocument.body"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    return code, capsys.readouterr()


def test_run_prints_outputs(capsys):
    code, out = run(capsys, "run", FIXTURES / "ex1_board_review.scn")
    assert code == 0
    assert out.out == (FIXTURES / "ex1_board_review.golden").read_text()


def test_run_reports_unmet_expectations(tmp_path, capsys):
    path = tmp_path / "bad.scn"
    path.write_text('agent a\nitem d type=Document\ncheck a d "view Item.name" expect=allow\n')
    code, out = run(capsys, "run", path)
    assert code == 1 and "!! expectation not met" in out.out


def test_exit_codes_for_errors(tmp_path, capsys):
    bad = tmp_path / "syntax.scn"
    bad.write_text("agent\n")
    code, out = run(capsys, "run", bad)
    assert code == 2 and ":1:" in out.err or "line 1" in out.err
    code, _ = run(capsys, "run", FIXTURES / "guarded_failure.scn")
    assert code == 3
    code, _ = run(capsys, "run", tmp_path / "missing.scn")
    assert code == 2


def test_check_exit_code_is_verdict(capsys):
    args = ["--item", "review_memo", "--ability", VIEW]
    code, out = run(capsys, "check", FIXTURES / "ex1_board_review.scn", "--agent", "director", *args)
    assert (code, out.out.split()[0]) == (1, "DENIED")
    code, _ = run(capsys, "check", FIXTURES / "ex1_board_review.scn", "--agent", "trustee", *args)
    assert code == 0


def test_explain_lists_candidates(capsys):
    code, out = run(capsys, "explain", FIXTURES / "ex4_salaries.scn",
                    "--agent", "manager", "--item", "salary_sheet", "--ability", VIEW)
    assert code == 0
    assert out.out.splitlines()[1:] == [
        '    [2] permit agent:manager collection:salaries "view TextDocument.body" allow',
        '    [5] permit group:staff collection:salaries "view TextDocument.body" deny',
    ]


def test_lint_scans_world(tmp_path, capsys):
    path = tmp_path / "l.scn"
    path.write_text(
        "agent eve\nitem notes type=TextDocument\n"
        f'permit agent:eve item:notes "{VIEW}" deny\n'
        f'permit all item:notes "{VIEW}" allow\n'
    )
    code, out = run(capsys, "lint", path)
    assert code == 1
    assert out.out.startswith(f'eve notes "{VIEW}": LOOPHOLE')
    code, _ = run(capsys, "lint", FIXTURES / "ex1_board_review.scn")
    assert code == 0


def test_deme_types_flag(tmp_path, capsys):
    path = tmp_path / "t.scn"
    path.write_text('agent a\nitem s type=Site\ncheck a s "view Site.hostname"\n')
    assert run(capsys, "run", path)[0] == 2
    assert run(capsys, "run", "--deme-types", path)[0] == 0


def test_bench_and_json(tmp_path, capsys):
    report = tmp_path / "bench.json"
    code, out = run(capsys, "bench", "--sizes", "2,4", "--reps", "2", "--json", report)
    assert code == 0 and "overhead ratio" in out.out
    data = json.loads(report.read_text())
    assert [p["users"] for p in data["points"]] == [2, 4]
    assert set(data["points"][0]) >= {"item_count", "t_filtered_ns", "t_unfiltered_ns"}


def test_bench_rejects_bad_sizes(capsys):
    with pytest.raises(SystemExit):
        main(["bench", "--sizes", "ten"])
    assert main(["bench", "--sizes", "5,3"]) == 2


def test_fuzz(capsys):
    code, out = run(capsys, "fuzz", "--trials", "5", "--seed", "3")
    assert code == 0 and "0 divergence(s)" in out.out
