import json

import numpy as np
import pytest

from schedsim.aco import TspInstance
from schedsim.cli import main
from schedsim.harness import read_csv
from schedsim.io import (
    InputFormatError,
    read_pool,
    read_tsp_instance,
    read_workload,
    write_pool,
    write_workload,
)
from schedsim.model import ResourcePool, Workload

from conftest import random_instance

CONFIG = {"task_counts": [6], "num_resources": 3, "seeds": [0, 1],
          "aco": {"num_ants": 3, "max_iterations": 4}, "hybrid": {"csa_generations_per_iteration": 2}}


@pytest.fixture
def config_path(tmp_path):
    path = tmp_path / "config.json"
    path.write_text(json.dumps(CONFIG))
    return path


def test_workload_and_pool_round_trip(tmp_path):
    w, p = random_instance(7, 3, 1)
    p = ResourcePool.from_mips(p.mips, [True, False, True])
    write_workload(w, tmp_path / "w.csv")
    write_pool(p, tmp_path / "p.csv")
    assert read_workload(tmp_path / "w.csv") == w
    assert read_pool(tmp_path / "p.csv") == p


@pytest.mark.parametrize("text", ["id,len\n0,5\n", "task_id,length_mi\n1,5\n", "task_id,length_mi\n0,abc\n",
                                  "task_id,length_mi\n0,-5\n"])
def test_bad_workload_files(tmp_path, text):
    (tmp_path / "w.csv").write_text(text)
    with pytest.raises(InputFormatError):
        read_workload(tmp_path / "w.csv")


def test_bad_pool_availability(tmp_path):
    (tmp_path / "p.csv").write_text("vm_id,mips,available\n0,100,yes\n")
    with pytest.raises(InputFormatError):
        read_pool(tmp_path / "p.csv")


def test_tsp_instance_formats(tmp_path):
    d = np.array([[0, 2, 3], [2, 0, 4], [3, 4, 0]], dtype=float)
    (tmp_path / "m.csv").write_text("\n".join(",".join(str(x) for x in row) for row in d))
    (tmp_path / "e.csv").write_text("i,j,distance\n0,1,2\n0,2,3\n1,2,4\n")
    assert np.array_equal(read_tsp_instance(tmp_path / "m.csv").dist, d)
    assert np.array_equal(read_tsp_instance(tmp_path / "e.csv").dist, d)
    (tmp_path / "bad.csv").write_text("0,1\n2,0\n")
    with pytest.raises(InputFormatError):
        read_tsp_instance(tmp_path / "bad.csv")


def test_cli_run_with_trace_and_plot(tmp_path, config_path, capsys):
    out = tmp_path / "r.csv"
    assert main(["run", "--config", str(config_path), "--algo", "hybrid", "--seed", "1", "--trace",
                 "--plot", "--out", str(out)]) == 0
    recs = read_csv(out)
    assert [r.iteration for r in recs] == [0, 1, 2, 3, 4]
    assert {r.algo for r in recs} == {"hybrid"} and {r.seed for r in recs} == {1}
    assert (tmp_path / "r_summary.csv").exists() and (tmp_path / "r.svg").exists()


def test_cli_sweep(tmp_path, config_path, capsys):
    assert main(["sweep", "--config", str(config_path), "--out", str(tmp_path / "sw")]) == 0
    assert len(read_csv(tmp_path / "sw" / "results.csv")) == 3 * 2
    assert "hybrid" in capsys.readouterr().out


def test_cli_oracle(tmp_path, capsys):
    write_workload(Workload.from_lengths([100, 100, 100]), tmp_path / "w.csv")
    write_pool(ResourcePool.from_mips([100, 200]), tmp_path / "p.csv")
    assert main(["oracle", "--workload", str(tmp_path / "w.csv"), "--pool", str(tmp_path / "p.csv")]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out == {"optimal_makespan": 1.0, "placement": [0, 1, 1]}


def test_cli_tsp(tmp_path, config_path, capsys):
    pts = np.random.default_rng(0).uniform(0, 10, (5, 2))
    d = np.linalg.norm(pts[:, None] - pts[None], axis=2)
    (tmp_path / "t.csv").write_text("\n".join(",".join(repr(float(x)) for x in row) for row in d))
    assert main(["tsp", "--instance", str(tmp_path / "t.csv"), "--config", str(config_path), "--seed", "2"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert sorted(out["tour"]) == list(range(5))
    assert out["length"] >= out["optimal_length"] - 1e-9
    assert out["length"] == pytest.approx(TspInstance(d).tour_length(out["tour"]))


def test_cli_exit_codes(tmp_path, config_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"aco": {"rho": 5}}')
    assert main(["run", "--config", str(bad), "--out", str(tmp_path / "x.csv")]) == 2
    assert "rho" in capsys.readouterr().err
    assert main(["run", "--config", str(tmp_path / "missing.json"), "--out", str(tmp_path / "x.csv")]) == 3
    assert main(["run", "--config", str(config_path), "--algo", "rr",
                 "--out", str(tmp_path / "no" / "such" / "dir.csv")]) == 3
    (tmp_path / "w.csv").write_text("wrong\n")
    (tmp_path / "p.csv").write_text("vm_id,mips,available\n0,1,1\n")
    assert main(["oracle", "--workload", str(tmp_path / "w.csv"), "--pool", str(tmp_path / "p.csv")]) == 2
    with pytest.raises(SystemExit):
        main(["run", "--config", str(config_path), "--algo", "sa", "--out", "x"])
