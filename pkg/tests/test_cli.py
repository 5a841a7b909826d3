import numpy as np
import pytest

from boolsynth.benchmark import load_reference, reference_specs, sample_profiles, select_biomarkers
from boolsynth.cli import main
from boolsynth.io import parse_network, serialize_graph, serialize_network, serialize_profiles, serialize_signatures

WORKED = "x1,x2,x3,x4\n1,1,0,1\n0,1,1,0\n1,0,-,0\n"
GRAPH = "x2 -> x1 +\nx3 -> x1 -\nx4 -> x1 ?\n"


@pytest.fixture
def worked(tmp_path):
    (tmp_path / "p.csv").write_text(WORKED)
    (tmp_path / "g.txt").write_text(GRAPH)
    return tmp_path


def synth_inputs(tmp_path, name="ref2_7.txt", p=0.5, s=0.5):
    ref = load_reference(name)
    d = tmp_path / "prof"
    d.mkdir()
    for t, prof in sample_profiles(ref, p, np.random.default_rng(0)).items():
        (d / f"{t}.csv").write_text(serialize_profiles(prof))
    (tmp_path / "graph.txt").write_text(serialize_graph(reference_specs(ref)))
    (tmp_path / "sig.csv").write_text(serialize_signatures(select_biomarkers(ref, s)))
    (tmp_path / "ref.txt").write_text(serialize_network(ref))
    return ref


def test_infer_local_stdout_and_files(worked, capsys):
    assert main(["infer-local", "--profiles", str(worked / "p.csv"), "--graph", str(worked / "g.txt")]) == 0
    out = capsys.readouterr().out
    assert out.count("x1 = ") == 3
    assert main(["infer-local", "--profiles", str(worked / "p.csv"), "--graph", str(worked / "g.txt"),
                 "--out-dir", str(worked / "pools"), "--dimacs-dir", str(worked / "cnf")]) == 0
    assert (worked / "pools" / "x1.txt").read_text().count("x1 = ") == 3
    assert "p cnf" in (worked / "cnf" / "x1.cnf").read_text()


def test_infer_local_infeasible_exit(tmp_path, capsys):
    (tmp_path / "p.csv").write_text("t,a\n1,0\n0,1\n")
    (tmp_path / "g.txt").write_text("a -> t +\n")
    assert main(["infer-local", "--profiles", str(tmp_path / "p.csv"), "--graph", str(tmp_path / "g.txt")]) == 3


def test_usage_and_input_errors(worked, capsys):
    assert main(["infer-local", "--profiles", str(worked / "p.csv")]) == 1
    assert main([]) == 1
    with pytest.raises(SystemExit) as err:
        main(["nope"])
    assert err.value.code == 1
    (worked / "bad.txt").write_text("x2 -> x1 *\n")
    assert main(["infer-local", "--profiles", str(worked / "p.csv"), "--graph", str(worked / "bad.txt")]) == 2
    assert main(["stable-states", "--network", str(worked / "missing.txt")]) == 2
    (worked / "net.txt").write_text("x1 = &x2\n")
    assert main(["stable-states", "--network", str(worked / "net.txt")]) == 2
    assert "column 6" in capsys.readouterr().err


def test_config_file_and_flag_override(worked, capsys):
    cfg = worked / "run.cfg"
    cfg.write_text(f"profiles = {worked / 'p.csv'}\ngraph = {worked / 'g.txt'}\nmax-formulas = 2\n")
    assert main(["infer-local", "--config", str(cfg)]) == 0
    assert capsys.readouterr().out.count("x1 = ") == 2
    assert main(["infer-local", "--config", str(cfg), "--max-formulas", "10"]) == 0
    assert capsys.readouterr().out.count("x1 = ") == 3
    cfg.write_text("colour = blue\n")
    assert main(["infer-local", "--config", str(cfg)]) == 1


def test_synthesize_score_distance(tmp_path, capsys):
    ref = synth_inputs(tmp_path)
    k = "2"
    args = ["synthesize", "--profiles", str(tmp_path / "prof"), "--graph", str(tmp_path / "graph.txt"),
            "--signatures", str(tmp_path / "sig.csv"), "--ref-stable-count", k, "--seed", "3",
            "--out", str(tmp_path / "net.txt"), "--trace", str(tmp_path / "trace.csv")]
    assert main(args) == 0
    text = (tmp_path / "net.txt").read_text()
    assert text.startswith("# seed: 3\n") and "# score: " in text
    net = parse_network(text)
    assert net.variables == ref.variables
    assert (tmp_path / "trace.csv").read_text().startswith("iteration,")
    capsys.readouterr()
    assert main(["score", "--network", str(tmp_path / "net.txt"), "--signatures", str(tmp_path / "sig.csv"), "--ref-stable-count", k]) == 0
    header, values = capsys.readouterr().out.splitlines()
    assert header.endswith("non_monotone,stable_gap") and set(values.split(",")) == {"0"}
    assert main(["distance", "--network", str(tmp_path / "net.txt"), "--reference", str(tmp_path / "ref.txt"), "--per-variable"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert len(lines) == len(ref) + 1 and 0 <= float(lines[-1]) <= 1


def test_synthesize_failure_bound_exit(tmp_path):
    synth_inputs(tmp_path)
    args = ["synthesize", "--profiles", str(tmp_path / "prof"), "--graph", str(tmp_path / "graph.txt"),
            "--signatures", str(tmp_path / "sig.csv"), "--ref-stable-count", "9", "--failure-bound", "5",
            "--out", str(tmp_path / "net.txt")]
    assert main(args) == 4


def test_stable_states_and_centrality(tmp_path, capsys):
    (tmp_path / "n.txt").write_text("a = !b\nb = !a\n")
    assert main(["stable-states", "--network", str(tmp_path / "n.txt"), "--method", "sat"]) == 0
    assert capsys.readouterr().out == "a,b\n0,1\n1,0\n"
    assert main(["centrality", "--network", str(tmp_path / "n.txt")]) == 0
    assert capsys.readouterr().out == "a,0.500000\nb,0.500000\n"
    (tmp_path / "g.txt").write_text(GRAPH)
    assert main(["centrality", "--graph", str(tmp_path / "g.txt")]) == 0
    assert capsys.readouterr().out.splitlines()[0].startswith("x2,")


def test_benchmark_and_plot_data(tmp_path, capsys):
    plan = tmp_path / "plan.cfg"
    plan.write_text("profile_percents = 0.5, 1\nsignature_percents = 0, 50%\ntrials = 2\nseed = 7\n")
    out = tmp_path / "res.csv"
    assert main(["benchmark", "--reference", "ref1_6.txt", "--plan", str(plan), "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "profile_pct,signature_pct,trial,distance,score,iterations,model_space_log10,seconds,status"
    assert len(lines) == 1 + 2 * 2 * 2
    assert main(["plot-data", "--results", str(out)]) == 0
    agg = capsys.readouterr().out.splitlines()
    assert agg[0].startswith("profile_pct,signature_pct,trials,distance_mean") and len(agg) == 5
    assert main(["benchmark", "--reference", "nope.txt", "--plan", str(plan), "--out", str(out)]) == 2
