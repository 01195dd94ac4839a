import json
import os
import subprocess
import sys

import numpy as np
import pytest
from click.testing import CliRunner

from oscmult.cli import main
from oscmult.grid import SampledFunction
from oscmult.suite import EXPERIMENTS, parallel_map


@pytest.fixture
def runner():
    return CliRunner()


def write_config(path, doc):
    path.write_text(json.dumps(doc))
    return str(path)


def test_list_names_every_experiment(runner):
    res = runner.invoke(main, ["--list"])
    assert res.exit_code == 0
    names = [line.split()[0] for line in res.output.strip().splitlines()]
    assert names == list(EXPERIMENTS)


def test_version(runner):
    res = runner.invoke(main, ["--version"])
    assert res.exit_code == 0 and "0.1.0" in res.output


def test_run_missing_file(runner, tmp_path):
    res = runner.invoke(main, ["run", str(tmp_path / "nope.json")])
    assert res.exit_code == 2


@pytest.mark.parametrize("doc,where", [
    ({"experiment": "lambda"}, "seed"),
    ({"experiment": "lambda", "seed": 0, "bogus": 1}, "bogus"),
    ({"experiment": "nope", "seed": 0}, "experiment"),
    ({"experiment": "lambda", "seed": 0, "params": {"x": 1}}, "params.x"),
    ({"experiment": "kernel", "seed": 0, "multiplier": {"kind": "oscillating", "theta": 1.0, "beta": 0.0}},
     "multiplier"),
])
def test_run_validation_errors(runner, tmp_path, doc, where):
    res = runner.invoke(main, ["run", write_config(tmp_path / "c.json", doc)])
    assert res.exit_code == 2
    assert where in res.output


def test_run_rejects_non_json(runner, tmp_path):
    p = tmp_path / "c.json"
    p.write_text("{not json")
    assert runner.invoke(main, ["run", str(p)]).exit_code == 2


def test_run_writes_outputs_and_manifest(runner, tmp_path):
    doc = {"experiment": "lambda", "seed": 3, "params": {"j": 4, "L": -3},
           "output": {"dir": str(tmp_path / "out"), "prefix": "lam"}}
    res = runner.invoke(main, ["run", write_config(tmp_path / "c.json", doc)])
    assert res.exit_code == 0, res.output
    out = tmp_path / "out"
    header = (out / "lam.csv").read_text().splitlines()[0]
    assert header == "experiment,keys,value,tolerance,pass"
    summary = json.loads((out / "lam.json").read_text())
    assert set(summary) == {"experiment", "params", "metrics", "pass"} and summary["pass"] is True
    manifest = json.loads((out / "lam.manifest.json").read_text())
    assert manifest["seed"] == 3 and manifest["params"]["j"] == 4 and manifest["params"]["L"] == -3
    assert "version" in manifest


def test_failed_assertion_exits_one(runner, tmp_path):
    res = runner.invoke(main, ["lambda", "--set", "j=2", "--set", "L=-2", "--set", 'regime="N2"',
                               "--out", str(tmp_path)])
    assert res.exit_code == 1
    assert "FAIL" in res.output


def test_flags_override_config(runner, tmp_path):
    cfg = write_config(tmp_path / "c.json", {"experiment": "lambda", "seed": 0, "params": {"j": 2, "L": -2}})
    res = runner.invoke(main, ["lambda", "--config", cfg, "--j", "4", "--L", "-3", "--out", str(tmp_path)])
    assert res.exit_code == 0, res.output
    manifest = json.loads((tmp_path / "lambda.manifest.json").read_text())
    assert manifest["params"]["j"] == 4


def test_kernel_binary_dump_is_readable(runner, tmp_path):
    res = runner.invoke(main, ["kernel", "--theta", "0.5", "--beta", "1", "--lam-max", "64", "--out", str(tmp_path)])
    assert res.exit_code == 0, res.output
    K = SampledFunction.from_bytes((tmp_path / "kernel.kernel.bin").read_bytes())
    assert K.grid.d == 1 and np.all(np.isfinite(K.values))


def test_csv_is_byte_identical_across_runs(runner, tmp_path):
    blobs = []
    for k in range(2):
        d = tmp_path / str(k)
        assert runner.invoke(main, ["cz", "--cases", "50", "--seed", "11", "--out", str(d)]).exit_code == 0
        blobs.append((d / "cz.csv").read_bytes())
    assert blobs[0] == blobs[1]


def test_csv_is_independent_of_thread_count(tmp_path):
    blobs = []
    for threads in ("1", "4"):
        d = tmp_path / threads
        env = {**os.environ, "OSCMULT_THREADS": threads}
        proc = subprocess.run([sys.executable, "-m", "oscmult.cli", "paper-suite", "--criteria", "[1, 2, 10]",
                               "--out", str(d)], env=env, capture_output=True, text=True)
        assert proc.returncode == 0, proc.stderr
        blobs.append((d / "paper-suite.csv").read_bytes())
    assert blobs[0] == blobs[1]


def test_parallel_map_preserves_order():
    assert parallel_map(lambda k: k * k, range(20)) == [k * k for k in range(20)]
