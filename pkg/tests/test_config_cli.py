import csv
import json
import shutil
from pathlib import Path

import numpy as np
import pytest

from brinklab.brinkman import BrinkmanRunConfig
from brinklab.cli import main
from brinklab.config import ConfigError, build_configs, load_config
from brinklab.darcy import DarcyRunConfig
from brinklab.grid import read_field
from brinklab.initial import Gaussian
from brinklab.runner import execute, load_snapshots

CONFIGS = Path(__file__).resolve().parents[1] / "configs"

SMALL = """
model = "{model}"
run_id = "{run_id}"
T_final = 0.2

[grid]
L = 20.0
N = 256

[brinkman]
nu = {nu}
epsilon = {eps}
mode = "{mode}"

[growth.1]
kind = "linear"
alpha = 1.0
n_bar = 1.0

[growth.2]
kind = "linear"
alpha = 0.5
n_bar = 0.8

[[init.1]]
kind = "gaussian"
center = -1.5
width = 0.8

[[init.1]]
kind = "indicator"
center = -4.0
half_width = 0.5
height = 0.2

[init.2]
kind = "gaussian"
center = 1.5
width = 0.8

[output]
dt = 0.02
dir = "{out}"
"""


def write_config(tmp_path, name="run.toml", model="brinkman", run_id="r", nu=0.01, eps=0.0,
                 mode="self_consistent"):
    p = tmp_path / name
    p.write_text(SMALL.format(model=model, run_id=run_id, nu=nu, eps=eps, mode=mode, out=tmp_path / "runs"))
    return p


def test_parse_brinkman_config(tmp_path):
    cfg, opts = build_configs(load_config(write_config(tmp_path)))
    assert isinstance(cfg, BrinkmanRunConfig)
    assert cfg.nu == 0.01 and cfg.grid.N == 256 and cfg.output_dt == 0.02
    assert isinstance(cfg.init[0], list) and len(cfg.init[0]) == 2
    assert cfg.init[1] == Gaussian(1.5, 0.8, 1.0)
    assert cfg.growth[1].n_bar == 0.8 and cfg.n_bar == 1.0
    assert opts.run_dir == tmp_path / "runs" / "r"


def test_parse_darcy_config(tmp_path):
    cfg, _ = build_configs(load_config(write_config(tmp_path, model="darcy")))
    assert isinstance(cfg, DarcyRunConfig)


def test_shipped_configs_parse():
    for p in sorted(CONFIGS.glob("*.toml")):
        build_configs(load_config(p))


@pytest.mark.parametrize("edit,msg", [
    (lambda s: s.replace('model = "brinkman"', 'model = "stokes"'), "model"),
    (lambda s: s.replace('kind = "linear"', 'kind = "cubic"', 1), "growth"),
    (lambda s: s.replace('mode = "self_consistent"', 'mode = "bogus"'), "mode"),
    (lambda s: s.replace("[growth.2]", "[growth.3]"), "species"),
    (lambda s: s.replace("[grid]", "[grd]"), "grid"),
])
def test_config_errors(tmp_path, edit, msg):
    p = write_config(tmp_path)
    p.write_text(edit(p.read_text()))
    with pytest.raises(ConfigError, match=msg):
        build_configs(load_config(p))


def test_frozen_request_builds_reference(tmp_path):
    cfg, _ = build_configs(load_config(write_config(tmp_path, eps=1e-3, mode="frozen_coefficient")))
    r = execute(cfg)
    assert r.params["mode"] == "frozen_coefficient" and r.params["epsilon"] == 1e-3


def test_cli_run_writes_outputs(tmp_path, capsys):
    p = write_config(tmp_path)
    assert main(["run", "--config", str(p)]) == 0
    d = tmp_path / "runs" / "r"
    with open(d / "diagnostics.csv") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["t", "mass1", "mass2", "entropy", "abs_entropy", "m2", "dissip", "neg_nlapW", "gradW2",
                       "gap2", "overlap", "linf", "h1"]
    assert len(rows) == 1 + 11
    meta = json.loads((d / "meta.json").read_text())
    assert meta["model"] == "brinkman" and len(meta["times"]) == 11
    f, t, name = read_field(d / "n1_000010.fld")
    assert name == "n1" and t == pytest.approx(0.2) and f.grid.N == 256
    assert (d / "profiles.png").stat().st_size > 0 and (d / "diagnostics.png").stat().st_size > 0
    assert "brinkman run" in capsys.readouterr().out


def test_cli_sweep_compare_plot(tmp_path):
    p = write_config(tmp_path)
    out = tmp_path / "sweep"
    assert main(["sweep", "--config", str(p), "--param", "nu", "--values", "1e-1,1e-2,1e-3",
                 "--save-runs", "--out", str(out)]) == 0
    with open(out / "sweep.csv") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["param", "l2_n", "l2_W", "h1_W", "gap2", "energy_diff"] and len(rows) == 4
    report = (out / "sweep_report.txt").read_text()
    assert "gap2" in report and "slope" in report
    assert (out / "sweep.svg").read_text().lstrip().startswith("<?xml")

    assert main(["compare", "--ref", str(out / "darcy"), "--runs", str(out)]) == 0
    with open(out / "compare.csv") as fh:
        cmp_rows = list(csv.DictReader(fh))
    assert [float(r["param"]) for r in cmp_rows] == [0.1, 0.01, 0.001]
    # compare recomputes the sweep distances from snapshots
    for r, s in zip(cmp_rows, rows[1:]):
        assert float(r["l2_n"]) == pytest.approx(float(s[1]), rel=1e-12)

    fig = tmp_path / "fig.svg"
    assert main(["plot", str(out / "sweep.csv"), "--out", str(fig)]) == 0
    assert "<svg" in fig.read_text()


def test_cli_epsilon_sweep(tmp_path):
    p = write_config(tmp_path)
    out = tmp_path / "eps"
    assert main(["sweep", "--config", str(p), "--param", "epsilon", "--values", "1e-2 1e-3 1e-4",
                 "--out", str(out)]) == 0
    with open(out / "sweep.csv") as fh:
        assert next(csv.reader(fh)) == ["param", "l1", "l2", "sqrt_eps_grad"]


def test_cli_darcy_run_and_snapshots_load(tmp_path):
    p = write_config(tmp_path, model="darcy", run_id="d")
    assert main(["run", "--config", str(p)]) == 0
    meta, times, totals, pots = load_snapshots(tmp_path / "runs" / "d")
    assert meta["model"] == "darcy"
    assert all(np.array_equal(n.values, W.values) for n, W in zip(totals, pots))


def test_cli_bad_config_exits(tmp_path):
    p = write_config(tmp_path)
    p.write_text(p.read_text().replace("[grid]", "[grd]"))
    with pytest.raises(SystemExit):
        main(["run", "--config", str(p)])
