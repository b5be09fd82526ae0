import math
import os
import subprocess

import numpy as np
import pytest

import hhdyn


def test_presets_listed():
    names = hhdyn.preset_names()
    assert "fig2-gauss" in names
    assert "fig7d-mask-e2-2d" in names
    assert len(names) == 12


def test_potentials():
    assert hhdyn.v_pp(100.0) == pytest.approx(0.01)
    assert hhdyn.v_ee(1.0, 1.0, 1e-4) == pytest.approx(100.0)
    assert hhdyn.v_ep(-50.0, 100.0, 1.995) == pytest.approx(-0.71800, abs=1e-5)
    with pytest.raises(ValueError):
        hhdyn.v_pp(0.0)


def test_pulse_from_preset():
    c = hhdyn.preset_config("fig2-gauss")
    ea, eb = c.pulse.effective_amplitudes()
    assert ea == pytest.approx(0.125, abs=1e-3)
    assert eb == pytest.approx(0.088, abs=1e-3)
    assert c.pulse.cycle_count() == pytest.approx(32.9, abs=0.1)
    t = np.linspace(0.0, c.pulse.duration, 2001)
    e = c.pulse.electric_field(t)
    assert e.shape == t.shape
    assert abs(e[0]) < 1e-12 and abs(e[-1]) < 1e-12


def test_config_errors():
    with pytest.raises(hhdyn.ConfigError, match="grid.nz"):
        hhdyn.parse_config("[grid]\nnz = 3\n")
    with pytest.raises(hhdyn.ConfigError, match="available presets"):
        hhdyn.preset_config("nope")


def test_single_atom():
    assert hhdyn.single_atom_ground_state() == pytest.approx(-0.5, abs=2e-3)


def test_small_run(tmp_path):
    c = hhdyn.parse_config(
        "preset = fig2-narrow-2d\n[grid]\nn_z = 96\n[initial]\ntolerance = 1e-6\n"
        "[propagation]\nduration = 20\noutput_stride = 100\n"
        f"[output]\ndir = {tmp_path}\n"
    )
    psi, energy, steps = hhdyn.relax(c)
    assert steps > 0
    assert psi.amplitudes.shape == (1, 96, 96)
    assert psi.norm() == pytest.approx(1.0)
    cols = hhdyn.run_scenario(c)
    assert list(cols)[0] == "t_au"
    assert cols["t_au"][-1] == pytest.approx(20.0, abs=0.03)
    assert (tmp_path / "run_record.csv").exists()
    back = hhdyn.read_snapshot(str(tmp_path / "final_state.hhwf"))
    assert back.amplitudes.shape == (1, 96, 96)


@pytest.mark.skipif("HHDYN_CLI" not in os.environ, reason="CLI path not provided")
def test_cli_exit_codes(tmp_path):
    cli = os.environ["HHDYN_CLI"]
    bad = subprocess.run([cli, "validate", "--preset", "bogus"], capture_output=True, text=True)
    assert bad.returncode == 2
    assert "fig2-gauss" in bad.stdout
    ok = subprocess.run([cli, "validate", "--preset", "fig2-narrow-2d", "--duration-fs", "1"],
                        capture_output=True, text=True)
    assert ok.returncode == 0
    assert "frozen_r = true" in ok.stdout
    cfg = tmp_path / "bad.ini"
    cfg.write_text("[propagation]\ndt = 0\n")
    r = subprocess.run([cli, "run", "--config", str(cfg), "--out", str(tmp_path / "o")], capture_output=True, text=True)
    assert r.returncode == 2
    assert '"kind":"config"' in r.stdout
    assert (tmp_path / "o" / "error.json").exists()


def test_grid_arrays():
    g = hhdyn.Grid1D.equidistant(hhdyn.Axis.Z1, -1.0, 1.0, 9)
    assert np.allclose(g.nodes, np.linspace(-1.0, 1.0, 9))
    assert np.allclose(g.weights, 0.25)
    h = hhdyn.Grid1D.hermite(hhdyn.Axis.Z2, 40, 2.0)
    assert np.all(np.diff(h.nodes) > 0)
    assert h.weights.sum() > 0
