from __future__ import annotations

import json

import pytest

from byztrim.cli import main
from byztrim.digraph import parse_graph


@pytest.fixture
def k5_file(tmp_path):
    path = tmp_path / "k5.json"
    assert main(["gen", "--kind", "counterexample-k5", "--out", str(path)]) == 0
    return path


@pytest.fixture
def k6_file(tmp_path):
    path = tmp_path / "k6.json"
    assert main(["gen", "--kind", "complete", "--n", "6", "--out", str(path)]) == 0
    return path


class TestGen:
    def test_writes_parseable_graph(self, k6_file):
        g = parse_graph(k6_file.read_text())
        assert g.n == 6 and len(g.edges) == 30

    def test_random_uniform_deterministic(self, tmp_path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        args = ["gen", "--kind", "random-uniform", "--n", "8", "--p", "0.7", "--seed", "7"]
        assert main(args + ["--out", str(a)]) == 0
        assert main(args + ["--out", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_missing_n(self, tmp_path, capsys):
        rc = main(["gen", "--kind", "cycle", "--out", str(tmp_path / "c.json")])
        assert rc == 2
        assert "--n is required" in capsys.readouterr().err


class TestCheck:
    def test_k5_async_fails_with_witness(self, k5_file, capsys):
        rc = main(["check", str(k5_file), "--f", "1", "--mode", "async"])
        out = json.loads(capsys.readouterr().out)
        assert rc == 1
        assert out["verdict"] == "fail"
        assert set(out["witness"]) == {"F", "L", "C", "R"}

    def test_k6_async_passes(self, k6_file, capsys):
        rc = main(["check", str(k6_file), "--f", "1", "--mode", "async"])
        assert rc == 0
        assert json.loads(capsys.readouterr().out)["verdict"] == "pass"

    def test_reduced_graph_oracle(self, k6_file, capsys):
        rc = main(["check", str(k6_file), "--f", "1", "--mode", "sync", "--oracle", "reduced-graph"])
        out = json.loads(capsys.readouterr().out)
        assert rc == 0
        assert out["check"] == "reduced-graph"
        assert out["examined"] > 0

    def test_reduced_graph_oracle_requires_sync(self, k6_file, capsys):
        rc = main(["check", str(k6_file), "--f", "1", "--mode", "async", "--oracle", "reduced-graph"])
        assert rc == 2

    def test_source_size_flag(self, k6_file, capsys):
        rc = main(["check", str(k6_file), "--f", "1", "--mode", "sync", "--source-size"])
        out = json.loads(capsys.readouterr().out)
        assert rc == 0
        assert out["source_size"]["verdict"] == "pass"

    def test_malformed_graph(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text('{"n":2,"edges":[[0,0]]}')
        rc = main(["check", str(bad), "--f", "0", "--mode", "sync"])
        assert rc == 2
        assert "self-loop" in capsys.readouterr().err


class TestEquiv:
    def test_exhaustive_n2(self, capsys):
        rc = main(["equiv", "--n", "2", "--f", "1", "--exhaustive"])
        out = json.loads(capsys.readouterr().out)
        assert rc == 0
        assert out["agreement"] is True
        assert out["total"] == 4

    def test_sampled(self, capsys):
        rc = main(["equiv", "--n", "4", "--f", "1", "--samples", "30", "--seed", "3"])
        out = json.loads(capsys.readouterr().out)
        assert rc == 0
        assert out["total"] == 30 and out["agreement"] is True

    def test_exhaustive_capped(self, capsys):
        assert main(["equiv", "--n", "6", "--f", "0", "--exhaustive"]) == 2


class TestRunVerify:
    def test_round_trip(self, tmp_path, k6_file, capsys):
        config = {
            "graph": json.loads(k6_file.read_text()),
            "f": 1,
            "fault_set": [5],
            "inputs": [0.0, 0.2, 0.4, 0.6, 0.8, 0.5],
            "scheduler": {"kind": "random"},
            "byzantine": {"kind": "random", "params": {"low": -3, "high": 3}},
            "seed": 11,
            "max_rounds": 10000,
            "epsilon": 1e-7,
        }
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text(json.dumps(config))
        trace_path = tmp_path / "trace.csv"
        rc = main(["run", str(cfg_path), "--out", str(trace_path)])
        summary = json.loads(capsys.readouterr().out)
        assert rc == 0
        assert summary["outcome"] == "converged"
        assert trace_path.exists()
        assert (tmp_path / "trace.metrics.csv").exists()

        rc = main(["verify", str(trace_path), "--graph", str(k6_file), "--f", "1"])
        report = json.loads(capsys.readouterr().out)
        assert rc == 0
        assert report["validity_ok"] is True
        assert report["contraction"]["ok"] is True

    def test_verify_rejects_failing_graph(self, tmp_path, k5_file, capsys):
        trace_path = tmp_path / "atk.csv"
        rc = main(["attack", str(k5_file), "--f", "1", "--rounds", "20", "--out", str(trace_path)])
        assert rc == 0
        capsys.readouterr()
        rc = main(["verify", str(trace_path), "--graph", str(k5_file), "--f", "1"])
        assert rc == 2
        assert "does not apply" in capsys.readouterr().err


class TestAttack:
    def test_k5_attack_blocks_convergence(self, tmp_path, k5_file, capsys):
        out = tmp_path / "atk.csv"
        rc = main(["attack", str(k5_file), "--f", "1", "--rounds", "50", "--out", str(out)])
        summary = json.loads(capsys.readouterr().out)
        assert rc == 0
        assert summary["outcome"] == "max-rounds-hit"
        assert summary["spread_constant"] is True
        assert summary["final_spread"] == 1.0

    def test_passing_graph_has_no_attack(self, tmp_path, k6_file, capsys):
        rc = main(["attack", str(k6_file), "--f", "1", "--rounds", "10", "--out", str(tmp_path / "x.csv")])
        assert rc == 1
        assert "no violating partition" in capsys.readouterr().err

    def test_custom_value_range(self, tmp_path, k5_file, capsys):
        out = tmp_path / "atk.csv"
        rc = main([
            "attack", str(k5_file), "--f", "1", "--m", "-2.0", "--M", "6.0",
            "--rounds", "10", "--out", str(out),
        ])
        summary = json.loads(capsys.readouterr().out)
        assert rc == 0
        assert summary["final_spread"] == 8.0
