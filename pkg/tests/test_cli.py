import csv
import json

import numpy as np
import pytest

from ghost_duality.io_cli import SUMMARY_KEYS, run

CONFIG = """\
sigma = 4
omega = 50
epsilon = 0.2
z0 = 6
lambda = 0.1
L1 = 360
L2 = 20
z2_min = -15
z2_max = 15
z2_points = 1024
"""


@pytest.fixture
def cfg_path(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text(CONFIG)
    return path


def _read_pattern(path):
    lines = path.read_text().splitlines()
    assert lines[0] == "z2,intensity"
    return np.array([[float(x) for x in line.split(",")] for line in lines[1:]])


def test_pattern_zero_overlap(cfg_path, tmp_path):
    out = tmp_path / "p0"
    assert run(["pattern", "--config", str(cfg_path), "--out", str(out)]) == 0
    summary = json.loads((out / "summary.json").read_text())
    assert set(summary) == set(SUMMARY_KEYS)
    assert summary["measured_visibility"] <= 1e-6
    assert summary["distinguishability"] == 1.0
    assert summary["duality_margin"] >= 0
    assert summary["fringe_spacing"] is None
    data = _read_pattern(out / "pattern.csv")
    assert data.shape == (1024, 2)
    run_meta = json.loads((out / "run.json").read_text())
    assert run_meta["seed"] == 0


def test_pattern_with_overlap_and_seed(cfg_path, tmp_path):
    out = tmp_path / "p"
    args = ["pattern", "--config", str(cfg_path), "--out", str(out), "--set", "overlap_magnitude=0.5", "--seed", "7"]
    assert run(args) == 0
    summary = json.loads((out / "summary.json").read_text())
    assert summary["peak_visibility"] == 0.5
    assert summary["measured_visibility"] == pytest.approx(0.5, abs=1e-2)
    assert summary["fringe_spacing"] == pytest.approx(3.3334, rel=5e-3)
    assert json.loads((out / "run.json").read_text())["seed"] == 7


def test_output_is_deterministic(cfg_path, tmp_path):
    for name in ("a", "b"):
        assert run(["pattern", "--config", str(cfg_path), "--out", str(tmp_path / name), "--set", "overlap_magnitude=0.3"]) == 0
    assert (tmp_path / "a" / "pattern.csv").read_bytes() == (tmp_path / "b" / "pattern.csv").read_bytes()
    assert (tmp_path / "a" / "summary.json").read_bytes() == (tmp_path / "b" / "summary.json").read_bytes()


def test_eraser_sum_rule_through_files(cfg_path, tmp_path):
    assert run(["eraser", "--config", str(cfg_path), "--out", str(tmp_path / "e")]) == 0
    assert run(["pattern", "--config", str(cfg_path), "--out", str(tmp_path / "p")]) == 0
    plus = _read_pattern(tmp_path / "e" / "eraser_plus.csv")
    minus = _read_pattern(tmp_path / "e" / "eraser_minus.csv")
    ref = _read_pattern(tmp_path / "p" / "pattern.csv")
    np.testing.assert_array_equal(plus[:, 0], ref[:, 0])
    assert np.abs(plus[:, 1] + minus[:, 1] - ref[:, 1]).max() <= 1e-12 * ref[:, 1].max()
    s = json.loads((tmp_path / "e" / "summary_plus.json").read_text())
    assert s["measured_visibility"] >= 0.99


def test_eraser_single_basis(cfg_path, tmp_path):
    assert run(["eraser", "--config", str(cfg_path), "--out", str(tmp_path), "--basis", "minus"]) == 0
    assert (tmp_path / "eraser_minus.csv").exists()
    assert not (tmp_path / "eraser_plus.csv").exists()


def test_sweep_over_overlap(cfg_path, tmp_path):
    args = [
        "sweep", "--config", str(cfg_path), "--out", str(tmp_path),
        "--parameter", "overlap_magnitude", "--values", "0,0.25,0.5,0.75,1", "--workers", "3",
    ]
    assert run(args) == 0
    with open(tmp_path / "sweep.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert [int(r["index"]) for r in rows] == [0, 1, 2, 3, 4]
    assert [float(r["overlap_magnitude"]) for r in rows] == [0, 0.25, 0.5, 0.75, 1]
    assert all(float(r["duality_margin"]) >= -1e-9 for r in rows)


def test_sweep_order_independent_of_workers(cfg_path, tmp_path):
    base = ["sweep", "--config", str(cfg_path), "--parameter", "z0", "--values", "6,4,5"]
    assert run(base + ["--out", str(tmp_path / "one"), "--workers", "1"]) == 0
    assert run(base + ["--out", str(tmp_path / "many"), "--workers", "3"]) == 0
    assert (tmp_path / "one" / "sweep.csv").read_bytes() == (tmp_path / "many" / "sweep.csv").read_bytes()


def test_validate_passes(cfg_path, tmp_path, capsys):
    assert run(["validate", "--config", str(cfg_path), "--out", str(tmp_path), "--set", "overlap_magnitude=0.8"]) == 0
    report = json.loads((tmp_path / "validate.json").read_text())
    assert report["ok"] and all(c["pass"] for c in report["checks"])
    assert "PASS pattern_max_rel_error" in capsys.readouterr().out


def test_validate_failure_exit_code(cfg_path, tmp_path, monkeypatch):
    from ghost_duality.io_cli import commands

    monkeypatch.setattr(commands, "pattern_from_oracle", lambda ob, det, *a, **k: _perturbed(ob, det))
    assert run(["validate", "--config", str(cfg_path), "--out", str(tmp_path)]) == 3


def _perturbed(ob, det):
    from ghost_duality.experiment import Pattern

    amp = ob.amplitudes["d1"]
    return Pattern(ob.z2, 1.01 * (np.abs(amp) ** 2 + np.abs(ob.amplitudes["d2"]) ** 2), {"normalization_mode": "raw"})


@pytest.mark.parametrize(
    "args,code",
    [
        (["pattern", "--set", "sigma=-1"], 2),
        (["pattern", "--set", "bogus=1"], 1),
        (["pattern", "--set", "z0=abc"], 1),
        (["sweep"], 2),
        (["pattern", "--set", "overlap_magnitude=2"], 2),
    ],
)
def test_exit_codes(cfg_path, tmp_path, args, code):
    assert run(args[:1] + ["--config", str(cfg_path), "--out", str(tmp_path)] + args[1:]) == code


def test_usage_errors_exit_one(tmp_path):
    assert run(["launch"]) == 1
    assert run(["pattern"]) == 1
    assert run(["pattern", "--config", str(tmp_path / "missing.cfg")]) == 1
