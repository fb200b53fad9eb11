import json

import pytest

from ghostpic.cli import dispatch


def run(capsys, *argv):
    code = dispatch(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestGhostsCommand:
    def test_torsion4_ghost_listing(self, capsys):
        code, out, _ = run(
            capsys, "ghosts", "--type-a", "3", "--orient", "LL", "--class", "S1,P3,I2,S3"
        )
        assert code == 0
        doc = json.loads(out)
        names = {g["display"] for g in doc["ghosts"]}
        assert {"Gh(P2;P3)", "Gh(S2;I2)"} <= names
        assert doc["bifurcations"] == [
            {
                "child": ["subobject", "P2", "P3", "S3"],
                "parent": ["subobject", "S2", "I2", "S3"],
                "case": 3,
                "splitting_wall": "S1",
                "wall_kind": "subobject-splitting",
            }
        ]


class TestMgsCommand:
    def test_all_sequences(self, capsys):
        code, out, _ = run(
            capsys,
            "mgs",
            "--type-a", "3", "--orient", "LL",
            "--class", "S1,P3,I2,S3",
            "--all",
        )
        assert code == 0
        doc = json.loads(out)
        seqs = [tuple(s["mgs"]) for s in doc["sequences"]]
        assert ("S1", "S3", "I2") in seqs
        assert ("I2", "S3", "P3", "S1") in seqs
        for s in doc["sequences"]:
            assert s["linear_realization"] is not None

    def test_count_only(self, capsys):
        code, out, _ = run(
            capsys, "mgs", "--type-a", "3", "--orient", "LL", "--class", "S1,P3,I2,S3"
        )
        assert code == 0
        assert json.loads(out)["mgs_count"] == 7


class TestPictureCommand:
    def test_rank_two_is_usage_error(self, capsys):
        code, _, err = run(capsys, "picture", "--builtin", "kronecker")
        assert code == 2
        assert "--report" in err

    def test_rank_two_report_fallback(self, capsys):
        code, out, _ = run(capsys, "picture", "--builtin", "kronecker", "--report")
        assert code == 0
        assert json.loads(out)["schema"] == "ghostpic-report/1"

    def test_same_argv_same_bytes(self, capsys, tmp_path):
        out1 = tmp_path / "a.svg"
        out2 = tmp_path / "b.svg"
        argv = ["picture", "--type-a", "3", "--orient", "LL", "--class", "S1,P3,I2,S3"]
        assert dispatch(argv + ["--out", str(out1)]) == 0
        assert dispatch(argv + ["--out", str(out2)]) == 0
        assert out1.read_bytes() == out2.read_bytes()


class TestPathCommand:
    def test_schedule_tokens(self, capsys):
        code, out, _ = run(
            capsys,
            "path",
            "--type-a", "3", "--orient", "LL",
            "--class", "P2,I2,P3,S2,S3",
            "--h", "0,3,1",
            "--k", "1,1,1",
        )
        assert code == 0
        doc = json.loads(out)
        assert doc["tokens"] == [
            "S2", "(I2)", "P2", "(P3)", "S3", "Gh(S1;P3)", "Gh(S1;P2)"
        ]

    def test_non_generic_is_usage_error(self, capsys):
        code, _, err = run(
            capsys,
            "path",
            "--type-a", "3", "--orient", "LL",
            "--class", "S1,P3,I2,S3",
            "--h", "0,0,0",
            "--k", "1,1,1",
        )
        assert code == 2
        assert "non-generic" in err


class TestHnCommand:
    def test_layers(self, capsys):
        code, out, _ = run(
            capsys,
            "hn",
            "--type-a", "3", "--orient", "LL",
            "--class", "S1,P3,I2,S3",
            "--mgs", "S1,S3,I2",
            "--module", "P3",
        )
        assert code == 0
        doc = json.loads(out)
        assert doc["layers"] == [
            {"brick": "S1", "index": 1, "multiplicity": 1},
            {"brick": "I2", "index": 3, "multiplicity": 1},
        ]


class TestCatalogCommand:
    def test_file_round_trip(self, capsys, tmp_path):
        out = tmp_path / "cat.json"
        assert dispatch(["catalog", "--type-a", "3", "--orient", "LL", "--out", str(out)]) == 0
        code, stdout, _ = run(capsys, "catalog", "--catalog", str(out))
        assert code == 0
        assert stdout.strip() == out.read_text().strip()

    def test_chambers_from_file(self, capsys, tmp_path):
        out = tmp_path / "cat.json"
        dispatch(["catalog", "--type-a", "3", "--orient", "LL", "--out", str(out)])
        code, stdout, _ = run(
            capsys, "chambers", "--catalog", str(out), "--class", "S1,P3,I2,S3"
        )
        assert code == 0
        assert len(json.loads(stdout)["chambers"]) == 10


class TestUsageErrors:
    def test_missing_source(self, capsys):
        code, _, err = run(capsys, "chambers", "--class", "S1")
        assert code == 2

    def test_two_sources(self, capsys):
        code, _, _ = run(
            capsys, "chambers", "--type-a", "3", "--orient", "LL", "--builtin", "kronecker"
        )
        assert code == 2

    def test_unknown_brick(self, capsys):
        code, _, err = run(
            capsys, "chambers", "--type-a", "3", "--orient", "LL", "--class", "X9"
        )
        assert code == 2

    def test_unknown_subcommand(self, capsys):
        assert dispatch(["frobnicate"]) == 2


class TestGuards:
    def test_env_guard_aborts_with_count_summary(self, capsys, monkeypatch):
        monkeypatch.setenv("GHOSTPIC_GUARD", "5")
        code, _, err = run(
            capsys,
            "mgs",
            "--type-a", "3", "--orient", "LL",
            "--class", "S1,P3,I2,S3",
            "--all",
        )
        assert code == 1
        summary = json.loads(err.strip().splitlines()[-1])
        assert summary["error"] == "guard-exceeded"
        assert summary["count"] == 7

    def test_env_guard_can_raise_limits(self, capsys, monkeypatch):
        monkeypatch.setenv("GHOSTPIC_GUARD", "10000000")
        code, out, _ = run(
            capsys, "mgs", "--type-a", "3", "--orient", "LL", "--class", "S1,P3,I2,S3"
        )
        assert code == 0
        assert json.loads(out)["mgs_count"] == 7


class TestVerifyCommand:
    def test_reduced_run_passes(self, capsys):
        code, out, _ = run(capsys, "verify", "--paths", "20")
        assert code == 0
        assert "FAIL" not in out
        lines = [l for l in out.splitlines() if l.startswith("[")]
        assert len(lines) >= 12
