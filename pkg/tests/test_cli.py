"""End-to-end tests of the command-line interface and experiment
orchestration: artifacts, exit codes, determinism, manifest round-trip."""

from __future__ import annotations

import csv
import json

import numpy as np
import pytest

from betaplane.cli import main
from betaplane.config import parse_config
from betaplane.run import (
    EXIT_CONFIG,
    EXIT_INSTABILITY,
    EXIT_OK,
    run_experiment,
)
from betaplane.snapshot import read_snapshot

SMALL_RUN = """
[grid]
nx = 32
ny = 32
lx = 6.283185307179586
ly = 6.283185307179586

[model]
beta = 1.5
dt = 0.005
steps = 20
raw_gamma = 0.05

[ic]
k0 = 4
amplitude = 1.0
seed = 1

[output]
snapshot_every = 10
spectrum_every = 10
"""

UNSTABLE_RUN = """
[grid]
nx = 32
ny = 32
lx = 6.283185307179586
ly = 6.283185307179586

[model]
beta = 0.0
dt = 5.0
steps = 50

[dissipation]
kind = classical
n = 2
nu = 10.0

[ic]
k0 = 4
amplitude = 100.0
seed = 1
"""


@pytest.fixture
def config_file(tmp_path):
    path = tmp_path / "run.ini"
    path.write_text(SMALL_RUN)
    return path


def test_run_writes_artifact_set(config_file, tmp_path):
    out = tmp_path / "out"
    assert main(["run", str(config_file), "--out-dir", str(out)]) == EXIT_OK
    assert (out / "diagnostics.csv").exists()
    assert (out / "manifest.json").exists()
    assert (out / "snapshot_000000.bpf").exists()
    assert (out / "snapshot_000020.bpf").exists()
    assert (out / "spectrum_000010.csv").exists()

    with open(out / "diagnostics.csv") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["time", "energy", "enstrophy", "circulation",
                      "x_momentum"]
    assert len(rows) == 22  # header + initial state + 20 steps
    assert float(rows[1][0]) == 0.0
    assert float(rows[-1][0]) == pytest.approx(20 * 0.005)


def test_manifest_round_trip_reproduces_run(config_file, tmp_path):
    out1 = tmp_path / "a"
    main(["run", str(config_file), "--out-dir", str(out1)])
    manifest = json.loads((out1 / "manifest.json").read_text())
    assert manifest["status"] == "ok"
    assert manifest["steps_completed"] == 20

    # the echoed config reruns to byte-identical artifacts
    cfg2 = parse_config(manifest["config"])
    out2 = tmp_path / "b"
    run_experiment(cfg2, out_dir=out2)
    assert (out1 / "diagnostics.csv").read_bytes() == (
        out2 / "diagnostics.csv"
    ).read_bytes()
    assert (out1 / "snapshot_000020.bpf").read_bytes() == (
        out2 / "snapshot_000020.bpf"
    ).read_bytes()


def test_run_determinism_byte_identical(config_file, tmp_path):
    out1, out2 = tmp_path / "r1", tmp_path / "r2"
    main(["run", str(config_file), "--out-dir", str(out1)])
    main(["run", str(config_file), "--out-dir", str(out2)])
    for name in ("diagnostics.csv", "snapshot_000020.bpf",
                 "spectrum_000020.csv"):
        assert (out1 / name).read_bytes() == (out2 / name).read_bytes()


def test_unstable_run_exit_code_and_lastgood(tmp_path):
    path = tmp_path / "bad.ini"
    path.write_text(UNSTABLE_RUN)
    out = tmp_path / "out"
    assert main(["run", str(path), "--out-dir", str(out)]) == EXIT_INSTABILITY
    assert (out / "snapshot_lastgood.bpf").exists()
    psi, _ = read_snapshot(out / "snapshot_lastgood.bpf")
    assert np.all(np.isfinite(psi.values))
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["status"] == "instability"
    assert manifest["steps_completed"] < manifest["steps_requested"]


def test_config_error_exit_code(tmp_path):
    path = tmp_path / "bad.ini"
    path.write_text("[model]\nstepz = 5\n")
    assert main(["run", str(path)]) == EXIT_CONFIG


def test_missing_file_exit_code(tmp_path):
    assert main(["run", str(tmp_path / "nope.ini")]) == EXIT_CONFIG


def test_ic_subcommand(config_file, tmp_path, capsys):
    out = tmp_path / "ic"
    assert main(["ic", str(config_file), "--out-dir", str(out)]) == EXIT_OK
    psi, time = read_snapshot(out / "ic.bpf")
    assert time == 0.0
    assert psi.grid.nx == 32
    assert str(out / "ic.bpf") in capsys.readouterr().out


def test_equivariance_subcommand(config_file, tmp_path, capsys):
    out = tmp_path / "eq"
    rc = main([
        "equivariance", str(config_file), "--eps1", "1.0",
        "--out-dir", str(out),
    ])
    assert rc == EXIT_OK
    assert "field_rel_err" in capsys.readouterr().out
    with open(out / "equivariance.csv") as fh:
        rows = list(csv.reader(fh))
    assert rows[0][0] == "eps1"
    assert float(dict(zip(rows[0], rows[1]))["field_rel_err"]) < 1e-10


def test_equivariance_spec_override(config_file, tmp_path):
    out = tmp_path / "eq2"
    rc = main([
        "equivariance", str(config_file), "--eps1", "1.0",
        "--spec", "classical", "--out-dir", str(out),
    ])
    # classical with nu = 0 is still exactly equivariant (no closure term)
    assert rc == EXIT_OK
    with open(out / "equivariance.csv") as fh:
        rows = list(csv.reader(fh))
    assert dict(zip(rows[0], rows[1]))["spec"] == "classical"


def test_certify_invariants_subcommand(tmp_path, capsys):
    out = tmp_path / "cert"
    rc = main([
        "certify-invariants", "--out-dir", str(out),
        "--fields", "3", "--points", "3", "--seed", "0",
    ])
    assert rc == EXIT_OK
    with open(out / "invariant_identities.csv") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["identity", "seed", "point", "residual"]
    residuals = [float(r[3]) for r in rows[1:]]
    assert residuals and max(residuals) <= 1e-6


def test_certify_conservation_subcommand(tmp_path):
    out = tmp_path / "cert"
    rc = main([
        "certify-conservation", "--out-dir", str(out),
        "--fields", "2", "--points", "2",
    ])
    assert rc == EXIT_OK
    with open(out / "conservation_identities.csv") as fh:
        rows = list(csv.reader(fh))
    assert max(float(r[3]) for r in rows[1:]) <= 1e-6
    with open(out / "conservation_budgets.csv") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["spec", "N", "dE", "dZ", "dGamma", "dM"]
    assert len(rows) == 1 + 2 * 3  # two closures x three resolutions


def test_snapshot_contents_match_state(config_file, tmp_path):
    out = tmp_path / "out"
    run_experiment(parse_config(SMALL_RUN), out_dir=out)
    psi0, t0 = read_snapshot(out / "snapshot_000000.bpf")
    assert t0 == 0.0
    assert abs(psi0.values.mean()) < 1e-13
