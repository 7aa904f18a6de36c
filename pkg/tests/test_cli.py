import json

import pytest

from gridreason import cli
from gridreason.harness.mock import scripted_transport


def run(*argv):
    return cli.main([str(a) for a in argv])


@pytest.fixture(scope="module")
def small_data(tmp_path_factory):
    d = tmp_path_factory.mktemp("data")
    assert run("gen", "nav", "--k", "2..4", "--seed", 7, "--out", d) == 0
    assert run("gen", "nlnav", "--count", 5, "--seed", 1, "--out", d) == 0
    assert run("gen", "ring", "--count", 5, "--size", 12, "--seed", 1, "--out", d) == 0
    return d


def test_gen_nav_stats(tmp_path, capsys):
    assert run("gen", "nav", "--k", "2..6", "--seed", 7, "--out", tmp_path) == 0
    stats = json.loads((tmp_path / "nav_stats.json").read_text())
    assert [stats[str(k)]["maps"] for k in range(2, 7)] == [8, 16, 32, 64, 128]
    assert [stats[str(k)]["next_step"] for k in range(2, 7)] == [8, 32, 96, 256, 640]
    out = capsys.readouterr().out
    assert "| Route Planning | 8 | 16 | 32 | 64 | 128 |" in out


def test_gen_counts(tmp_path):
    assert run("gen", "nlnav", "--count", 200, "--seed", 1, "--out", tmp_path) == 0
    assert len((tmp_path / "nlnav.jsonl").read_text().splitlines()) == 200
    assert run("gen", "ring", "--count", 200, "--size", 12, "--seed", 1, "--out", tmp_path) == 0
    assert len((tmp_path / "ring.jsonl").read_text().splitlines()) == 200


def test_gen_is_idempotent(tmp_path):
    for sub in ("a", "b"):
        assert run("gen", "nlnav", "--count", 20, "--seed", 3, "--out", tmp_path / sub) == 0
    assert (tmp_path / "a" / "nlnav.jsonl").read_bytes() == (tmp_path / "b" / "nlnav.jsonl").read_bytes()


@pytest.mark.parametrize(
    "argv",
    [
        ["gen", "nav", "--k", "0..3", "--seed", 1],
        ["gen", "nav", "--k", "x", "--seed", 1],
        ["gen", "tiling", "--mask-counts", "4", "--seed", 1],
        ["gen", "nlnav", "--count", "5"],  # seed is required
        ["gen", "nlnav", "--count", "0", "--seed", 1],
        ["gen", "nav", "--seed", 1, "--bogus"],
        ["run", "--out", "x"],
        ["frobnicate"],
        [],
    ],
)
def test_usage_errors_exit_1(argv, tmp_path):
    with pytest.raises(SystemExit) as e:
        run(*argv, *([] if not argv or argv[0] != "gen" else ["--out", tmp_path]))
    assert e.value.code == 1


def test_help_lists_flags(capsys):
    with pytest.raises(SystemExit) as e:
        run("gen", "tiling", "--help")
    assert e.value.code == 0
    out = capsys.readouterr().out
    for flag in ("--seed", "--out", "--palette", "--mask-counts"):
        assert flag in out


def test_score_missing_or_empty_run_dir(tmp_path):
    assert run("score", "--run", tmp_path / "missing") == 1
    (tmp_path / "empty" / "runs").mkdir(parents=True)
    (tmp_path / "empty" / "manifest.json").write_text("{}")
    assert run("score", "--run", tmp_path / "empty") == 1


def test_mock_end_to_end(small_data, tmp_path):
    data = sorted(str(p) for p in small_data.glob("*.jsonl"))
    rd = tmp_path / "run"
    assert run("run", "--data", *data, "--out", rd, "--mock", "oracle", "--settings", "CoT,VoT") == 0
    assert run("report", "--run", rd) == 0
    report = (rd / "report.md").read_text()
    assert "## Task performance" in report and "## Visual state tracking" in report
    scores = json.loads((rd / "scores" / "scores.json").read_text())
    for setting in ("CoT", "VoT"):
        row = scores[setting]
        assert row["route_planning"]["completing_rate"] == 100.0
        assert row["route_planning"]["success_rate"] == 100.0
        for task in ("next_step", "nlnav", "ring"):
            assert row[task]["accuracy"] == 100.0
    grades_table = (rd / "scores" / "grades.md").read_text()
    assert "| Visual Navigation | 100.00 | 100.00 | 100.00 |" in grades_table
    # score and analyze are byte-stable
    before = {p.name: p.read_bytes() for p in (rd / "scores").iterdir()}
    assert run("score", "--run", rd) == 0 and run("analyze", "--run", rd) == 0
    assert before == {p.name: p.read_bytes() for p in (rd / "scores").iterdir()}


def test_analyze_fixture_rates(tmp_path):
    grid = "oox\nooo\nooo"

    def transcript(before, after):
        return "\n".join([f"Step.\n{grid}"] * before + ["The answer is jay."] + [grid] * after)

    recs = [
        {"id": f"f{i}", "task": "nlnav", "num_instructions": ls, "gold_object": "jay", "landmarks": ["jay"]}
        for i, ls in enumerate((2, 3, 2))
    ]
    data = tmp_path / "fixture.jsonl"
    data.write_text("".join(json.dumps(r) + "\n" for r in recs))
    rd = tmp_path / "run"
    (rd / "runs").mkdir(parents=True)
    (rd / "manifest.json").write_text(json.dumps({"datasets": [str(data)]}))
    lines = []
    for r, (b, a) in zip(recs, ((2, 0), (1, 2), (0, 1))):
        lines.append(json.dumps({
            "id": r["id"], "task": "nlnav", "setting": "VoT", "payload_hash": "", "transcript": transcript(b, a),
            "latency": 0.0, "retries": 0, "cache_hit": False, "template_version": "", "provider": {},
        }))
    (rd / "runs" / "nlnav.VoT.jsonl").write_text("\n".join(lines) + "\n")
    assert run("analyze", "--run", rd) == 0
    csv = (rd / "scores" / "tracking.csv").read_text().splitlines()
    assert csv[1] == "nlnav,VoT,3,33.33,66.67"
    rows = [json.loads(x) for x in (rd / "scores" / "analysis.jsonl").read_text().splitlines()]
    assert [(r["l_v"], r["l_s"]) for r in rows] == [(2, 2), (1, 3), (0, 2)]


def test_bad_config_exit_3(tmp_path, small_data):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"provider": {"temperature": 0.5}}))
    data = str(small_data / "nlnav.jsonl")
    assert run("--config", cfg, "run", "--data", data, "--out", tmp_path / "r", "--mock", "oracle") == 3
    (tmp_path / "broken.json").write_text("{nope")
    assert run("--config", tmp_path / "broken.json", "gen", "nlnav", "--seed", 1, "--out", tmp_path) == 3


def test_missing_key_exit_3(tmp_path, small_data, monkeypatch):
    monkeypatch.delenv("GRIDREASON_ABSENT_KEY", raising=False)
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"provider": {"endpoint": "http://127.0.0.1:9", "api_key_env": "GRIDREASON_ABSENT_KEY"}}))
    data = str(small_data / "nlnav.jsonl")
    assert run("--config", cfg, "run", "--data", data, "--out", tmp_path / "r") == 3


def test_partial_failure_exit_2(tmp_path, small_data, monkeypatch):
    monkeypatch.setattr(cli, "canned_transport", lambda text: scripted_transport([500] * 1000, text))
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"provider": {"max_retries": 0}}))
    data = str(small_data / "nlnav.jsonl")
    code = run("--config", cfg, "run", "--data", data, "--out", tmp_path / "r", "--mock", "canned", "--settings", "CoT")
    assert code == 2
    manifest = json.loads((tmp_path / "r" / "manifest.json").read_text())
    assert len(manifest["failures"]) == 5
