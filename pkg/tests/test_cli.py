import json
from pathlib import Path

import pytest
from click.testing import CliRunner

from crossedhc.cli import main
from crossedhc.corpus import PROBLEMS

CORPUS = Path(__file__).resolve().parent.parent / "corpus"


def run(*args, env=None):
    return CliRunner(env=env).invoke(main, [str(a) for a in args])


def write(tmp_path, name, data):
    p = tmp_path / name
    p.write_text(json.dumps(data))
    return p


def test_validate_ok():
    r = run("validate", CORPUS / "q_z2.json")
    assert r.exit_code == 0, r.stderr
    assert json.loads(r.stdout)["ok"]


def test_validate_non_associative_table(tmp_path):
    table = [[0, 1, 2, 3, 4], [1, 0, 3, 4, 2], [2, 4, 0, 1, 3], [3, 2, 4, 0, 1], [4, 3, 1, 2, 0]]
    spec = write(tmp_path, "bad.json", {"group": {"elements": list("abcde"), "table": table},
                                        "algebra": {"field": True}})
    r = run("validate", spec)
    assert r.exit_code == 1
    diag = json.loads(r.stderr)
    assert diag["error"] == "NotAssociative" and len(diag["witness"]) == 3


def test_validate_non_automorphism(tmp_path):
    spec = write(tmp_path, "bad.json", {"group": {"cyclic": 2}, "algebra": {"functions": 2},
                                        "action": {"g1": [[2, -1], [-1, 2]]}})
    r = run("validate", spec)
    assert r.exit_code == 1
    diag = json.loads(r.stderr)
    assert diag["error"] == "NotAnAutomorphism" and diag["witness"]


def test_schema_error_carries_path(tmp_path):
    spec = write(tmp_path, "bad.json", {"group": {"cyclic": 2}, "algebra": {"functions": 2},
                                        "action": {"g7": [[1, 0], [0, 1]]}})
    r = run("validate", spec)
    assert r.exit_code == 2
    assert json.loads(r.stderr)["path"] == "action.g7"


def test_truncation_guard():
    r = run("hc", CORPUS / "q_z2.json", "-N", 7)
    assert r.exit_code == 3
    diag = json.loads(r.stderr)
    assert diag["error"] == "ResourceGuard" and "predicted" in diag["message"]


def test_hc_table_for_group_ring():
    r = run("hc", CORPUS / "q_z2.json")
    assert r.exit_code == 0
    reports = json.loads(r.stdout)["reports"]
    assert {rep["class"]: rep["hc_dims"] for rep in reports} == {"1": [1, 0, 1], "g1": [1, 0, 1]}


def test_hc_compare_swap():
    r = run("hc", CORPUS / "q2_swap.json", "--compare")
    assert r.exit_code == 0, r.stderr
    reports = {rep["class"]: rep for rep in json.loads(r.stdout)["reports"]}
    assert reports["g1"]["hc_direct"] == [0, 0, 0]
    assert reports["1"]["hc_direct"] == [1, 0, 1]


def test_ss_usage_error_for_sigma_on_finite_problem():
    r = run("ss", CORPUS / "q_z2.json", "--which", "sigma")
    assert r.exit_code == 2


def test_ss_pages_converge():
    r = run("ss", CORPUS / "q_z2.json", "--class", "g1", "--which", "I")
    assert r.exit_code == 0
    ss = json.loads(r.stdout)["reports"][0]["ss"]
    assert ss["converges"] and ss["matches_direct"]


def test_ss_trivial_group_degenerates_at_e2(tmp_path):
    spec = write(tmp_path, "one.json", {"group": {"cyclic": 1}, "algebra": {"field": True}, "truncation": 4})
    r = run("ss", spec, "--which", "II", "--pages", 3)
    assert r.exit_code == 0, r.stderr
    ss = json.loads(r.stdout)["reports"][0]["ss"]
    reliable = lambda entries: sorted(e for e in entries if e[0] + e[1] < 4)
    assert reliable(ss["pages"][2]["entries"]) == reliable(ss["infinity"]["entries"])


def test_ss_sigma_on_infinite_problem():
    r = run("ss", CORPUS / "z_period2.json", "--which", "sigma")
    assert r.exit_code == 0, r.stderr


def test_hkr_check_compare():
    r = run("hkr-check", CORPUS / "poly_sign.json", "--compare")
    assert r.exit_code == 0, r.stderr


def test_split_and_hp_run():
    for cmd in ("split", "hp"):
        r = run(cmd, CORPUS / "q2_swap.json")
        assert r.exit_code == 0, r.stderr


def test_outputs_are_deterministic(tmp_path):
    for fmt in ("json", "csv"):
        a, b = tmp_path / f"a{fmt}", tmp_path / f"b{fmt}"
        assert run("hc", CORPUS / "q2_swap.json", "--format", fmt, "--out", a).exit_code == 0
        env = {"CROSSEDHC_THREADS": "2"}
        assert run("hc", CORPUS / "q2_swap.json", "--format", fmt, "--out", b, env=env).exit_code == 0
        fa, fb = sorted(a.iterdir()), sorted(b.iterdir())
        assert [f.name for f in fa] == [f.name for f in fb] and fa
        for x, y in zip(fa, fb):
            assert x.read_bytes() == y.read_bytes()


def test_shipped_corpus_is_reproducible(tmp_path):
    assert run("write-corpus", tmp_path).exit_code == 0
    for name in PROBLEMS:
        assert (tmp_path / f"{name}.json").read_bytes() == (CORPUS / f"{name}.json").read_bytes()
