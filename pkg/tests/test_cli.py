import json
import os
import subprocess
import sys

import pytest

from icn_cache_lab.cli import EXIT_DATA, EXIT_OK, EXIT_USAGE, main
from icn_cache_lab.workload import load_trace, split_chunk_id


def write_config(path, **overrides):
    cfg = {
        "workload": {"kind": "zipf", "contents": 300, "alpha": 0.8, "requests": 3000, "seed": 1},
        "policies": ["fifo", "clock", "compact-car", "opt"],
        "capacities": [10, 100, 1000],
        "output": "out",
    }
    cfg.update(overrides)
    path.write_text(json.dumps(cfg))
    return path


def test_generate_zipf(tmp_path, capsys):
    out = tmp_path / "z.csv"
    rc = main(["generate", "zipf", "--alpha", "1.0", "--contents", "10000", "--requests", "100000", "--seed", "42", "-o", str(out)])
    assert rc == EXIT_OK
    assert len(out.read_text().splitlines()) == 100_001
    assert "100000 requests" in capsys.readouterr().out


def test_generate_pattern_loop(tmp_path):
    out = tmp_path / "l.csv"
    assert main(["generate", "pattern", "--kind", "loop", "--period", "3", "--reps", "2", "-o", str(out)]) == 0
    assert load_trace(out).ids() == [1, 2, 3, 1, 2, 3]


def test_generate_fickle_needs_seed(tmp_path):
    rc = main(["generate", "pattern", "--kind", "fickle", "--phases", "2", "--phase-length", "5", "--alphabet", "4", "-o", str(tmp_path / "f.csv")])
    assert rc == EXIT_USAGE


def test_generate_chunked_rate(tmp_path, capsys):
    out = tmp_path / "c.csv"
    rc = main([
        "generate", "chunked", "--alpha", "1.2", "--contents", "100", "--requests", "5",
        "--seed", "3", "--chunk-kb", "15", "--bitrate-kbps", "600", "-o", str(out),
    ])
    assert rc == 0
    assert "5 chunks/s" in capsys.readouterr().out
    ids = load_trace(out).ids()
    assert len(ids) == 5 * 40
    assert max(split_chunk_id(x)[1] for x in ids) == 39


def test_generate_profile(tmp_path):
    out = tmp_path / "p.csv"
    assert main(["generate", "profile", "--row", "1.5KB", "--scale", "1e-4", "--seed", "2", "-o", str(out)]) == 0
    assert len(load_trace(out)) == 1796


def test_missing_seed_is_usage_error(tmp_path):
    with pytest.raises(SystemExit) as exc:
        main(["generate", "zipf", "--alpha", "1", "--contents", "5", "--requests", "5", "-o", str(tmp_path / "x")])
    assert exc.value.code == EXIT_USAGE


def test_bad_spec_is_usage_error(tmp_path):
    rc = main(["generate", "zipf", "--alpha", "-1", "--contents", "5", "--requests", "5", "--seed", "1", "-o", str(tmp_path / "x")])
    assert rc == EXIT_USAGE


def test_simulate_cross_product_and_determinism(tmp_path):
    cfg = write_config(tmp_path / "cfg.json")
    assert main(["simulate", str(cfg)]) == 0
    out = tmp_path / "out"
    jsons = sorted(p for p in os.listdir(out) if p.endswith(".json"))
    assert len(jsons) == 12
    first = {p: (out / p).read_bytes() for p in os.listdir(out)}
    assert main(["simulate", str(cfg), "--jobs", "2"]) == 0
    assert {p: (out / p).read_bytes() for p in os.listdir(out)} == first
    report = json.loads((out / "compact-car_c100_single.json").read_text())
    assert report["schema_version"] == 1


def test_simulate_line_columns(tmp_path):
    cfg = write_config(tmp_path / "cfg.json", policies=["clock"], capacities=[10])
    assert main(["simulate", str(cfg), "--topology", "line:10"]) == 0
    header = (tmp_path / "out" / "summary.csv").read_text().splitlines()[0].split(",")
    assert header[-10:] == [f"node{i}" for i in range(1, 11)]
    assert (tmp_path / "out" / "clock_c10_line_10.csv").exists()


def test_simulate_dynamics_and_seeds(tmp_path):
    cfg = write_config(
        tmp_path / "cfg.json", policies=[{"name": "cfr", "q": 0.5}], capacities=[10], window=500, seeds=[1, 2]
    )
    assert main(["simulate", str(cfg)]) == 0
    names = set(os.listdir(tmp_path / "out"))
    assert "cfr_q_0.5_c10_single_s1_dynamics.csv" in names
    assert "cfr_q_0.5_c10_single_s2.json" in names


def test_simulate_from_trace(tmp_path):
    main(["generate", "pattern", "--kind", "loop", "--period", "4", "--reps", "3", "-o", str(tmp_path / "t.csv")])
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"trace": "t.csv", "policies": ["lru"], "capacities": [4]}))
    assert main(["simulate", str(cfg)]) == 0
    report = json.loads((tmp_path / "results" / "lru_c4_single.json").read_text())
    assert report["nodes"][0]["hits"] == 8


def test_simulate_input_errors(tmp_path):
    assert main(["simulate", str(tmp_path / "nope.json")]) == EXIT_DATA
    cfg = write_config(tmp_path / "cfg.json", bogus=1)
    assert main(["simulate", str(cfg)]) == EXIT_DATA
    cfg = tmp_path / "t.json"
    cfg.write_text(json.dumps({"trace": "missing.csv", "policies": ["lru"], "capacities": [4]}))
    assert main(["simulate", str(cfg)]) == EXIT_DATA
    assert not (tmp_path / "results").exists()


def test_analyze_overhead(capsys):
    assert main(["analyze", "overhead", "--policy", "compact-car", "--entries", "20000000", "--pointer-bits", "25"]) == 0
    assert capsys.readouterr().out.strip() == "20000225"
    assert main(["analyze", "overhead", "--entries", "1024", "--counter-bits", "8", "--ghosts", "64"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].startswith("policy,bits,order")
    assert len(lines) == 11
    assert main(["analyze", "overhead", "--policy", "fifo", "--entries", "1024", "--pointer-bits", "3"]) == EXIT_USAGE


def test_analyze_rd_cdf_on_scan(tmp_path):
    main(["generate", "pattern", "--kind", "scan", "--length", "9", "-o", str(tmp_path / "s.csv")])
    out = tmp_path / "cdf.csv"
    assert main(["analyze", "rd-cdf", str(tmp_path / "s.csv"), "-o", str(out)]) == 0
    assert out.read_text() == "reuse_distance,cumulative_fraction\n"


def test_analyze_beta_gamma(tmp_path, capsys):
    (tmp_path / "a.csv").write_text("0,7\n1,7\n2,7\n")
    assert main(["analyze", "beta-gamma", str(tmp_path / "a.csv"), "--window", "3"]) == 0
    cap = capsys.readouterr()
    assert "beta=1 gamma=1" in cap.err
    assert cap.out.splitlines()[1] == "0,1,1,1,1.0,1.0"
    assert main(["analyze", "beta-gamma", str(tmp_path / "a.csv"), "--window", "4"]) == EXIT_DATA


def test_analyze_popularity_and_bad_trace(tmp_path, capsys):
    (tmp_path / "a.csv").write_text("0,7\n1,8\n2,7\n")
    assert main(["analyze", "popularity", str(tmp_path / "a.csv")]) == 0
    assert capsys.readouterr().out.splitlines()[1] == "1,7,2"
    (tmp_path / "b.csv").write_text("0,7\nzz\n")
    assert main(["analyze", "popularity", str(tmp_path / "b.csv")]) == EXIT_DATA
    assert main(["analyze", "rd-cdf", str(tmp_path / "missing.csv")]) == EXIT_DATA


def test_console_script_entry(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "icn_cache_lab.cli", "analyze", "overhead", "--policy", "car", "--entries", "20000000", "--pointer-bits", "25"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert proc.stdout.strip() == "2020000225"
    proc = subprocess.run([sys.executable, "-m", "icn_cache_lab.cli", "frobnicate"], capture_output=True, text=True)
    assert proc.returncode == EXIT_USAGE


def test_window_skips_policies_without_q(tmp_path):
    cfg = write_config(tmp_path / "cfg.json", policies=["lru", "compact-car"], capacities=[10], window=500)
    assert main(["simulate", str(cfg)]) == 0
    names = set(os.listdir(tmp_path / "out"))
    assert "compact-car_c10_single_dynamics.csv" in names
    assert not any(n.startswith("lru") and n.endswith("_dynamics.csv") for n in names)
