import json

import pytest

from nilharm.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    report = json.loads(out.out) if out.out.strip() else None
    return code, report, out.err


def names(report):
    return {c["name"]: c for c in report["checks"]}


def test_eigen_task(capsys):
    code, rep, _ = run(capsys, "run", "eigen", "--group", "heisenberg-1", "--lambda", "1", "--alpha", "0")
    assert code == 0
    assert names(rep)["eigen_residual"]["value"] <= 1e-5


def test_chain_growth_is_expected(capsys):
    code, rep, _ = run(capsys, "run", "chain", "--group", "heisenberg-1", "--term", "2;0;1")
    checks = names(rep)
    assert code == 0
    assert checks["growth_ratio"]["expected"] == 2.0 and checks["growth_ratio"]["pass"]
    assert checks["expected_growth"]["pass"] and "bounded" not in checks


def test_chain_bounded(capsys):
    code, rep, _ = run(capsys, "chain", "--group", "heisenberg-1", "--term", "1|0|1", "--term=-1|0|0.5,1")
    assert code == 0 and names(rep)["bounded"]["value"] <= 1.01


@pytest.mark.parametrize("argv", [
    ("eigen", "--group", "heisenberg-1", "--lambda", "1;2"),
    ("eigen", "--group", "nosuchgroup-1", "--lambda", "1"),
    ("eigen", "--lambda", "1"),
    ("chain", "--group", "heisenberg-1", "--term", "1|0|1|2"),
    ("chain", "--group", "heisenberg-1", "--term", "1;0"),
    ("probe", "--group", "heisenberg-1", "--term", "2|0|1", "--phi", "1|x", "--psi", "1|1"),
    ("frobnicate", "--group", "heisenberg-1"),
])
def test_input_errors_exit_2(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2 and err


def test_group_file_diagnostic(capsys, tmp_path):
    path = tmp_path / "bad.grp"
    path.write_text("dims 2 1\nbracket 1 2 1 1\nbracket 2 1 1 1\n")
    code, _, err = run(capsys, "verify-group", "--group-file", str(path))
    assert code == 2 and "line 3" in err


def test_group_file_task(capsys, tmp_path):
    path = tmp_path / "h1.grp"
    path.write_text("# Heisenberg\ndims 2 1\nbracket 1 2 1 1\n")
    code, rep, _ = run(capsys, "verify-group", "--group-file", str(path))
    assert code == 0 and rep["data"]["is_mw"] is True


def test_degenerate_lambda_is_named_failure(capsys):
    code, rep, _ = run(capsys, "symplectic", "--group", "free2step-4", "--lambda", "1;0;0;0;0;0")
    assert code == 1
    assert names(rep)["nondegeneracy"]["pass"] is False


def test_embed_task(capsys):
    code, rep, _ = run(capsys, "embed", "--group", "free2step-3", "--term", "0.6;0;0.8|0|1")
    checks = names(rep)
    assert code == 0
    assert checks["child_is_mw"]["pass"] and checks["embedded_parent_relation"]["value"] <= 1e-4


def test_spec_file_and_out(capsys, tmp_path):
    spec = tmp_path / "spec.json"
    spec.write_text(json.dumps({"task": "chain", "group": "heisenberg-1", "terms": ["1|0|1"], "seed": 3,
                                "config": {"sup_budget": 256}}))
    out = tmp_path / "rep.json"
    code, rep, _ = run(capsys, "run", "--spec", str(spec), "--out", str(out))
    assert code == 0
    saved = json.loads(out.read_text())
    assert saved["environment"]["config"]["sup_budget"] == 256
    assert saved["environment"]["config"]["seed"] == 3


def test_spec_file_unknown_field(capsys, tmp_path):
    spec = tmp_path / "spec.json"
    spec.write_text(json.dumps({"task": "chain", "colour": "blue"}))
    code, _, err = run(capsys, "--spec", str(spec))
    assert code == 2 and "colour" in err


def test_reports_are_deterministic(capsys):
    argv = ("probe", "--group", "heisenberg-1", "--term", "1|0|1", "--phi=-1|0.4", "--psi=-1|0.45",
            "--R", "20", "--l-max", "3")
    reports = []
    for _ in range(2):
        code, rep, _ = run(capsys, *argv)
        assert code == 0
        rep.pop("wall_time")
        reports.append(json.dumps(rep, sort_keys=True))
    assert reports[0] == reports[1]
