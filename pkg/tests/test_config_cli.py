import json
import subprocess
import sys

import numpy as np
import pytest

from ergolab.averaging import square_trajectory
from ergolab.config import format_config, parse_config
from ergolab.errors import ValidationError
from ergolab.observables import Observable
from ergolab.runner import run_experiment
from ergolab.seminorms import hk_seminorm
from ergolab.systems import cat_map

BASE_CFG = """
[system]
kind = rotation
alpha = 0.61803398874989479

[observables]
f1 = 1,0:1
f2 = 1,0:-1

[run]
mode = average
scheme = square
checkpoints = 1000 10000 100000
start = 0.25
out_csv = sq.csv
"""


def run_cli(*args):
    return subprocess.run([sys.executable, "-m", "ergolab", *args],
                          capture_output=True, text=True)


# ---------------------------------------------------------------------------
# Config round trips and validation


def test_roundtrip_identity():
    cfg = parse_config(BASE_CFG)
    assert parse_config(format_config(cfg)) == cfg


def test_roundtrip_every_mode():
    texts = [
        BASE_CFG,
        """[system]
kind = heisenberg
alpha = 0.41421356237309515
beta = 0.73205080756887719
[run]
mode = certify
search_bound = 25
""",
        """[system]
kind = automorphism
matrix = 2 1 1 1
[observables]
f1 = 1,0:1,0
[run]
mode = seminorm
order = 2
outer_h = 30
start = 0.5 0.5
""",
        """[system]
kind = rotation
alpha = 0.61803398874989479
[run]
mode = vdc
vdc_family = quadratic
inner_n = 1000
outer_h = 50
""",
        """[system]
kind = skew
base_alpha = 0.61803398874989479
cocycle_linear = 1
cocycle_const = 0
[observables]
f1 = 1,0:1,1
[run]
mode = average
scheme = birkhoff
checkpoints = 100 1000
start = haar
seed = 5
tol_oracle = 1e-09
""",
    ]
    for text in texts:
        cfg = parse_config(text)
        assert parse_config(format_config(cfg)) == cfg


def test_missing_seed_is_validation_error():
    bad = BASE_CFG.replace("start = 0.25", "start = haar")
    with pytest.raises(ValidationError):
        parse_config(bad)


def test_unknown_keys_rejected():
    with pytest.raises(ValidationError):
        parse_config(BASE_CFG + "\nwat = 7\n")


def test_comments_and_blank_lines_ignored():
    cfg = parse_config("# leading comment\n" +
                       BASE_CFG.replace("[run]", "# note\n\n[run]"))
    assert cfg.mode == "average"


# ---------------------------------------------------------------------------
# Runner behavior (library level)


def test_average_csv_shape(tmp_path):
    cfg = parse_config(BASE_CFG)
    summary = run_experiment(cfg, tmp_path)
    rows = (tmp_path / "sq.csv").read_text().strip().splitlines()
    assert rows[0] == "scheme,N,value_re,value_im,oscillation"
    assert len(rows) == 4      # header + one row per checkpoint
    assert summary["checkpoints"] == 3


def test_csv_matches_direct_library_call(tmp_path):
    # the CLI layer is a thin adapter: values equal the library's output
    cfg = parse_config(BASE_CFG)
    run_experiment(cfg, tmp_path)
    rows = (tmp_path / "sq.csv").read_text().strip().splitlines()[1:]
    fs = [Observable.character(1), Observable.character(-1)]
    traj = square_trajectory(cfg.system, fs, np.array([0.25]),
                             (1000, 10000, 100000))
    for row, (n, v) in zip(rows, traj.checkpoints):
        _, ncol, re, im, _ = row.split(",")
        assert int(ncol) == n
        assert float(re) == v.real and float(im) == v.imag


def test_seminorm_json_fields(tmp_path):
    text = """[system]
kind = automorphism
matrix = 2 1 1 1
[observables]
f1 = 1,0:1,0
[run]
mode = seminorm
order = 2
outer_h = 30
start = 0.5 0.5
"""
    cfg = parse_config(text)
    run_experiment(cfg, tmp_path)
    payload = json.loads((tmp_path / "seminorms.json").read_text())
    assert payload[0]["exact"] is True
    assert payload[0]["value"] == hk_seminorm(
        cat_map(), Observable.character((1, 0)), 2, 30).value
    assert set(payload[0]) == {"order", "value", "H", "N", "exact", "system",
                               "observable"}


def test_identical_runs_are_byte_identical(tmp_path):
    text = """[system]
kind = rotation
alpha = 0.61803398874989479
[run]
mode = joining
d = 2
sample_count = 40
checkpoints = 60
seed = 11
freq_box = 1
"""
    cfg = parse_config(text)
    run_experiment(cfg, tmp_path / "a")
    run_experiment(cfg, tmp_path / "b")
    assert (tmp_path / "a/joining.json").read_bytes() == \
        (tmp_path / "b/joining.json").read_bytes()


def test_orbit_mode(tmp_path):
    text = """[system]
kind = heisenberg
alpha = 0.41421356237309515
beta = 0.73205080756887719
[run]
mode = orbit
checkpoints = 25
start = 0 0 0
"""
    run_experiment(parse_config(text), tmp_path)
    rows = (tmp_path / "orbit.csv").read_text().strip().splitlines()
    assert rows[0] == "n,x1,x2,x3"
    assert len(rows) == 26


# ---------------------------------------------------------------------------
# CLI process behavior


def test_cli_runs_and_exits_zero(tmp_path):
    cfg = tmp_path / "avg.cfg"
    cfg.write_text(BASE_CFG)
    proc = run_cli("average", "--config", str(cfg), "--out", str(tmp_path))
    assert proc.returncode == 0, proc.stderr
    assert (tmp_path / "sq.csv").exists()


def test_cli_validation_exit_code(tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text(BASE_CFG.replace("start = 0.25", "start = haar"))
    proc = run_cli("average", "--config", str(cfg), "--out", str(tmp_path))
    assert proc.returncode == 2
    assert "seed" in proc.stderr


def test_cli_resource_cap_exit_code(tmp_path):
    text = """[system]
kind = rotation
alpha = 0.61803398874989479
[observables]
f1 = 1,0:1
f2 = 1,0:1
f3 = 1,0:1
f4 = 1,0:1
f5 = 1,0:1
f6 = 1,0:1
f7 = 1,0:1
f8 = 1,0:1
f9 = 1,0:1
f10 = 1,0:1
f11 = 1,0:1
f12 = 1,0:1
f13 = 1,0:1
f14 = 1,0:1
f15 = 1,0:1
f16 = 1,0:1
f17 = 1,0:1
f18 = 1,0:1
f19 = 1,0:1
f20 = 1,0:1
f21 = 1,0:1
f22 = 1,0:1
f23 = 1,0:1
f24 = 1,0:1
f25 = 1,0:1
f26 = 1,0:1
f27 = 1,0:1
f28 = 1,0:1
f29 = 1,0:1
f30 = 1,0:1
f31 = 1,0:1
[run]
mode = average
scheme = cube
order = 5
checkpoints = 4
start = 0.25
"""
    cfg = tmp_path / "cube5.cfg"
    cfg.write_text(text)
    proc = run_cli("average", "--config", str(cfg), "--out", str(tmp_path))
    assert proc.returncode == 3
    assert "cube order" in proc.stderr or "cap" in proc.stderr


def test_cli_seed_override(tmp_path):
    text = """[system]
kind = rotation
alpha = 0.61803398874989479
[observables]
f1 = 1,0:1
[run]
mode = average
scheme = birkhoff
checkpoints = 50 200
start = haar
seed = 3
out_csv = b.csv
"""
    cfg = tmp_path / "b.cfg"
    cfg.write_text(text)
    p1 = run_cli("average", "--config", str(cfg), "--out", str(tmp_path / "1"))
    p2 = run_cli("average", "--config", str(cfg), "--out", str(tmp_path / "2"),
                 "--seed", "4")
    assert p1.returncode == 0 and p2.returncode == 0
    assert (tmp_path / "1/b.csv").read_text() != \
        (tmp_path / "2/b.csv").read_text()


def test_cli_batch_threads(tmp_path):
    texts = []
    for i, k in enumerate((1, 2)):
        t = f"""[system]
kind = rotation
alpha = 0.61803398874989479
[observables]
f1 = 1,0:{k}
[run]
mode = average
scheme = birkhoff
checkpoints = 100
start = 0.25
out_csv = out{i}.csv
"""
        p = tmp_path / f"c{i}.cfg"
        p.write_text(t)
        texts.append(str(p))
    proc = run_cli("average", "--config", texts[0], "--config", texts[1],
                   "--out", str(tmp_path), "--threads", "2")
    assert proc.returncode == 0, proc.stderr
    assert (tmp_path / "out0.csv").exists() and (tmp_path / "out1.csv").exists()


def test_cli_wrong_mode_for_subcommand(tmp_path):
    cfg = tmp_path / "avg.cfg"
    cfg.write_text(BASE_CFG)
    proc = run_cli("seminorm", "--config", str(cfg))
    assert proc.returncode == 2


def test_cli_suite_command():
    proc = run_cli("suite", "folner")
    assert proc.returncode == 0, proc.stderr
    assert "criterion 9" in proc.stdout
    assert "PASS" in proc.stdout and "FAIL" not in proc.stdout
