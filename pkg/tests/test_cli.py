import json

import pytest
from click.testing import CliRunner

from rsdlab import validate_instance
from rsdlab import io as rio
from rsdlab.cli import main
from rsdlab.generators import sample_permutation, substream
from rsdlab.market import Permutation, run_rsd

ALL_PREFER = dict(n=3, m=2, capacities=[1, 1], preferences=[[0, 1]] * 3)


@pytest.fixture
def runner():
    return CliRunner()


def _write(path, obj):
    path.write_text(json.dumps(obj))
    return str(path)


def test_io_roundtrip(tmp_path):
    inst = validate_instance(ALL_PREFER)
    rio.write_instance(inst, tmp_path / "i.json")
    assert rio.read_instance(tmp_path / "i.json") == inst
    pi = sample_permutation(3, substream(1, "x"))
    assert rio.permutation_from_json(rio.permutation_to_json(pi)) == pi
    a = rio.assignment_to_json(run_rsd(inst, Permutation.identity(3)))
    assert a == {"school_of": [0, 1, -1], "seats_filled": [1, 1], "exhaustion_rank": [0, 1]}
    assert rio.config_hash({"a": 1, "b": 2}) == rio.config_hash({"b": 2, "a": 1})


def test_generate(runner, tmp_path):
    cfg = _write(tmp_path / "g.json", {"generator": {"kind": "Block", "n": 4, "m": 2}})
    res = runner.invoke(main, ["generate", "--config", cfg, "--out", str(tmp_path / "o")])
    assert res.exit_code == 0
    inst = rio.read_instance(tmp_path / "o" / "instance.json")
    assert inst.preferences == [[0], [0], [1], [1]]


def test_simulate_hand_instance_and_determinism(runner, tmp_path):
    path = _write(tmp_path / "inst.json", ALL_PREFER)
    outs = []
    for d in ("a", "b"):
        res = runner.invoke(main, ["simulate", "--instance", path, "--seed", "3",
                                   "--out", str(tmp_path / d)])
        assert res.exit_code == 0, res.output
        outs.append(tmp_path / d)
    cut = json.loads((outs[0] / "cutoffs.json").read_text())
    assert cut["gamma"] == pytest.approx([1 / 3, 2 / 3])
    assert cut["master_seed"] == 3 and cut["replications"] == 1 and "config_hash" in cut
    for name in ("cutoffs.json", "assignment.json", "permutation.json", "trajectories.csv"):
        assert (outs[0] / name).read_bytes() == (outs[1] / name).read_bytes()
    traj = (outs[0] / "trajectories.csv").read_text().splitlines()
    assert traj[3] == "t,school_0,school_1" and traj[-1] == "3,3,2"


def test_seed_from_environment(runner, tmp_path):
    path = _write(tmp_path / "inst.json", ALL_PREFER)
    res = runner.invoke(main, ["simulate", "--instance", path, "--out", str(tmp_path / "e")],
                        env={"RSD_LAB_SEED": "41"})
    assert res.exit_code == 0
    assert json.loads((tmp_path / "e" / "assignment.json").read_text())["master_seed"] == 41


def test_missing_instance(runner, tmp_path):
    res = runner.invoke(main, ["simulate", "--instance", str(tmp_path / "nope.json")])
    assert res.exit_code == 2
    assert res.output.strip().startswith("error: FileNotFound:")


def test_invalid_instance(runner, tmp_path):
    path = _write(tmp_path / "bad.json", dict(n=1, m=2, capacities=[1, 1], preferences=[[0]]))
    res = runner.invoke(main, ["simulate", "--instance", path])
    assert res.exit_code == 2
    assert "MoreSchoolsThanStudents" in res.output


def test_phase_transition_smoke(runner, tmp_path):
    import math

    cfg = _write(tmp_path / "p.json", {"experiment": "phase-transition", "m": 2,
                                       "alpha": math.log(2) / 2, "replications": 20000})
    res = runner.invoke(main, ["experiment", "--config", cfg, "--out", str(tmp_path)])
    assert res.exit_code == 0, res.output
    rows = (tmp_path / "phase_transition.csv").read_text().splitlines()
    assert any(r.startswith("min_cutoff_survival,,0.5,") and ",0.5625," in r for r in rows)


def test_tail_rows_per_school_and_epsilon(runner, tmp_path):
    inst = _write(tmp_path / "i.json", dict(n=4, m=2, capacities=[1, 1],
                                            preferences=[[0, 1], [0, 1], [1, 0], [1, 0]]))
    cfg = _write(tmp_path / "t.json", {"experiment": "tail", "instance": inst,
                                       "epsilon_grid": [0.1, 0.2, 0.5]})
    res = runner.invoke(main, ["experiment", "--config", cfg, "--reps", "500", "--out", str(tmp_path)])
    assert res.exit_code == 0, res.output
    tails = [r for r in (tmp_path / "tail.csv").read_text().splitlines() if r.startswith("tail,")]
    assert len(tails) == 2 * 3


def test_toy_law_summary_reports_reference_cdf(runner, tmp_path):
    cfg = _write(tmp_path / "t.json", {"experiment": "toy-law", "n": 20, "m": 10})
    res = runner.invoke(main, ["experiment", "--config", cfg, "--format", "text",
                               "--reps", "2000", "--out", str(tmp_path)])
    assert res.exit_code == 0, res.output
    text = (tmp_path / "toy_law_summary.txt").read_text()
    assert "cdf,0,0.5," in text and ",0.25,true" in text
    assert not (tmp_path / "toy_law.csv").exists()


def test_experiment_outputs_byte_identical(runner, tmp_path):
    cfg = _write(tmp_path / "t.json", {"experiment": "lottery",
                                       "generator": {"kind": "UniformFull", "n": 6, "m": 2, "seed": 2}})
    for d in ("a", "b"):
        assert runner.invoke(main, ["experiment", "--config", cfg, "--reps", "300",
                                    "--out", str(tmp_path / d)]).exit_code == 0
    for name in ("lottery.csv", "lottery_summary.txt"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_experiment_bound_failure_exit_code(runner, tmp_path):
    # with one replication an empirical cdf of 0 or 1 misses some 3-s.e. band
    cfg = _write(tmp_path / "t.json", {"experiment": "toy-law", "n": 20, "m": 10})
    res = runner.invoke(main, ["experiment", "--config", cfg, "--reps", "1", "--out", str(tmp_path)])
    assert res.exit_code == 3
    assert "failing:" in res.output


def test_verify_self_test(runner, tmp_path):
    res = runner.invoke(main, ["verify", "--suite", "lipschitz", "--trials", "200",
                               "--self-test", "--out", str(tmp_path)])
    assert res.exit_code == 4
    text = (tmp_path / "verdicts.txt").read_text()
    assert "witness:" in text and "master_seed: 0" in text and "config_hash:" in text


def test_verify_differences_pass(runner, tmp_path):
    res = runner.invoke(main, ["verify", "--suite", "differences", "--out", str(tmp_path)])
    assert res.exit_code == 0


def test_verify_oracle_too_large(runner, tmp_path):
    cfg = _write(tmp_path / "v.json", {"suite": "oracle",
                                       "generator": {"kind": "UniformFull", "n": 12, "m": 3}})
    res = runner.invoke(main, ["verify", "--config", cfg])
    assert res.exit_code == 2
    assert res.output.startswith("error: InstanceTooLarge:")


def test_unknown_experiment(runner, tmp_path):
    cfg = _write(tmp_path / "x.json", {"experiment": "bogus"})
    res = runner.invoke(main, ["experiment", "--config", cfg])
    assert res.exit_code == 2
