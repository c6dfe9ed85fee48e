import json
import subprocess
import sys

import numpy as np
import pytest

from evoqrl.evolution import AgentKind, Evaluation, Strategy
from evoqrl.harness import AGGREGATE_HEADER, main, parse_config, run_experiment
from evoqrl.metrics import GenerationRecord

SMALL = ["--population", "10", "--generations", "3", "--tau", "2", "--seeds", "0,1"]


def test_defaults():
    plan = parse_config([])
    c = plan.config
    assert (c.population_size, c.generations, c.episode_steps, c.truncation) == (250, 200, 50, 5)
    assert c.mutation_power == 0.01
    assert c.strategy is Strategy.MU and c.agent_kind is AgentKind.VQC
    assert (c.n_layers, c.n_qubits) == (8, 6)
    assert c.evaluation is Evaluation.FRESH
    assert plan.seeds == (0, 1, 2, 3, 4)


def test_shape_flags_set_parameter_counts():
    assert parse_config(["--agent", "nn", "--hidden", "3,4"]).config.param_count == 147
    assert parse_config(["--agent", "nn", "--hidden", "64,64"]).config.param_count == 6788
    assert parse_config(["--agent", "vqc", "--layers", "4"]).config.param_count == 76


@pytest.mark.parametrize("argv", [
    ["--strategy", "crossover"], ["--agent", "tree"], ["--tau", "250"], ["--sigma", "-0.1"],
    ["--hidden", "3"], ["--seeds", "a,b"], ["--agent", "nn", "--strategy", "laremu"], ["--workers", "0"],
])
def test_usage_errors_exit_nonzero(argv, capsys):
    with pytest.raises(SystemExit) as exc:
        parse_config(argv)
    assert exc.value.code != 0
    assert capsys.readouterr().err


def test_config_file_precedence(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# experiment\nagent = nn\nhidden = 64,64\nsigma = 0.05\nepisode-steps = 20\nseeds = 3,4\n")
    plan = parse_config(["--config", str(cfg), "--sigma", "0.02"])
    assert plan.config.agent_kind is AgentKind.NN and plan.config.hidden_dims == (64, 64)
    assert plan.config.mutation_power == 0.02
    assert plan.config.episode_steps == 20
    assert plan.seeds == (3, 4)


def test_config_file_errors(tmp_path, capsys):
    bad = tmp_path / "bad.cfg"
    bad.write_text("colour = red\n")
    with pytest.raises(SystemExit):
        parse_config(["--config", str(bad)])
    with pytest.raises(SystemExit):
        parse_config(["--config", str(tmp_path / "missing.cfg")])


def read(path):
    return path.read_bytes()


def test_outputs_and_schema(tmp_path):
    out = tmp_path / "run"
    assert main(SMALL + ["--out", str(out), "--trace"]) == 0
    lines = (out / "seed_0.csv").read_text().split("\n")
    assert lines[0] == ",".join(GenerationRecord.CSV_HEADER)
    assert lines[0] == "seed,generation,mean_score,max_score,mean_total_coins,mean_own_coins,own_coin_rate"
    assert len([l for l in lines if l]) == 4 and lines[-1] == ""
    assert b"\r" not in read(out / "seed_0.csv")
    first = lines[1].split(",")
    assert first[:2] == ["0", "0"] and all(len(x.split(".")[1]) == 6 for x in first[2:])
    agg = (out / "aggregate.csv").read_text().splitlines()
    assert agg[0] == ",".join(AGGREGATE_HEADER) and len(agg) == 4
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["seeds"] == [0, 1]
    assert manifest["config"]["population_size"] == 10
    assert len(manifest["elites"]["1"]) == manifest["param_count"] == 148
    assert "duration_seconds" in manifest
    trace = (out / "trace_seed_0.txt").read_text().splitlines()
    assert len(trace) == 50 and trace[0].startswith("00 agent=0 action=")


def test_manifest_config_reproduces_csv(tmp_path):
    first = tmp_path / "a"
    assert main(SMALL + ["--agent", "nn", "--out", str(first)]) == 0
    manifest = json.loads((first / "manifest.json").read_text())
    cfg = tmp_path / "from_manifest.cfg"
    c = manifest["config"]
    cfg.write_text("\n".join([
        f"agent = {c['agent_kind']}", f"strategy = {c['strategy']}", f"layers = {c['n_layers']}",
        f"qubits = {c['n_qubits']}", f"hidden = {','.join(map(str, c['hidden_dims']))}",
        f"population = {c['population_size']}", f"generations = {c['generations']}",
        f"tau = {c['truncation']}", f"sigma = {c['mutation_power']!r}", f"episode_steps = {c['episode_steps']}",
        f"evaluation = {c['evaluation']}", f"seeds = {','.join(map(str, manifest['seeds']))}",
    ]))
    second = tmp_path / "b"
    assert main(["--config", str(cfg), "--out", str(second)]) == 0
    for name in ("seed_0.csv", "seed_1.csv", "aggregate.csv"):
        assert read(first / name) == read(second / name)
    m2 = json.loads((second / "manifest.json").read_text())
    assert m2["elites"] == manifest["elites"]


@pytest.mark.parametrize("agent", ["vqc", "nn", "random"])
def test_rerun_and_parallel_runs_are_byte_identical(tmp_path, agent):
    args = SMALL + ["--agent", agent, "--strategy", "raremu" if agent == "vqc" else "mu"]
    assert main(args + ["--out", str(tmp_path / "one")]) == 0
    assert main(args + ["--out", str(tmp_path / "two")]) == 0
    assert main(args + ["--out", str(tmp_path / "par"), "--workers", "2"]) == 0
    for name in ("seed_0.csv", "seed_1.csv", "aggregate.csv"):
        assert read(tmp_path / "one" / name) == read(tmp_path / "two" / name) == read(tmp_path / "par" / name)


def test_random_agent_scores_hover_around_zero(tmp_path):
    out = tmp_path / "rand"
    assert main(["--agent", "random", "--population", "50", "--generations", "10", "--out", str(out)]) == 0
    rows = (out / "aggregate.csv").read_text().splitlines()[1:]
    scores = [float(r.split(",")[1]) for r in rows]
    assert abs(np.mean(scores)) < 0.5


def test_unwritable_output_returns_nonzero(tmp_path, capsys):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    plan = parse_config(SMALL)
    assert run_experiment(plan.config, plan.seeds, blocker / "sub") == 1
    assert "cannot create output directory" in capsys.readouterr().err


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "evoqrl", "--population", "4", "--generations", "1",
                           "--tau", "1", "--seeds", "0", "--out", str(tmp_path / "cli")],
                          capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert (tmp_path / "cli" / "seed_0.csv").exists()
    bad = subprocess.run([sys.executable, "-m", "evoqrl", "--strategy", "nope"], capture_output=True, text=True)
    assert bad.returncode == 2 and "invalid choice" in bad.stderr
