import os
import subprocess
import sys

import numpy as np
import pytest

from zenolab import cli, config
from zenolab.config import ConfigError, load

STABLE = """\
[params]
E_A = -1.0
E_B = -1.0
Omega = 0.04
sigma = 0.11
mu = 0.30
omega_0 = 2.10
"""


def read_csv(path):
    with open(path, "rb") as fh:
        raw = fh.read()
    text = raw.decode()
    comments = [l for l in text.splitlines() if l.startswith("#")]
    body = [l for l in text.splitlines() if not l.startswith("#")]
    header = body[0].split(",")
    rows = [r.split(",") for r in body[1:]]
    return raw, comments, header, rows


@pytest.fixture
def run(tmp_path, monkeypatch, capsys):
    monkeypatch.chdir(tmp_path)

    def go(*argv):
        code = cli.main(list(argv))
        out = capsys.readouterr()
        return code, out.out, out.err

    return go


class TestConfig:
    def test_preset_and_override(self):
        cfg = load("survival", [("preset", config.PRESETS["paper-figure-3"]),
                                ("cli", "[run]\nt_max = 20\n")])
        assert cfg.t_max == 20.0 and cfg.tau_antizeno == 46.0
        assert cfg.params.Omega == 0.04 and cfg.initial == "A"

    def test_figure_4_preset(self):
        cfg = load("survival", [("p", config.PRESETS["paper-figure-4"])])
        assert cfg.params.Omega == 0.0 and cfg.initial == "B" and cfg.tau_antizeno is None

    def test_resolved_covers_every_field(self):
        cfg = load("zeno-scan", [("s", STABLE)])
        keys = [k for _, k, _ in cfg.resolved()]
        assert keys[:8] == ["E_A", "E_B", "Omega", "sigma", "mu", "omega_0", "omega_max", "eps_tol"]
        assert "tau_min" in keys and "N" in keys and "source" not in keys

    @pytest.mark.parametrize("text,needle", [
        (STABLE.replace("mu = 0.30", "mu = zero"), "s:6 [params] mu"),
        (STABLE.replace("mu = 0.30", "mu = -1"), "s:6 [params] mu"),
        (STABLE + "[run]\nn_times = 1\n", "s:9 [run] n_times"),
        (STABLE + "[run]\nn_times = 2.5\n", "s:9 [run] n_times"),
        (STABLE + "[run]\ninitial = C\n", "s:9 [run] initial"),
        (STABLE + "[run]\nspeed = 3\n", "s:9 [run] speed: unknown key"),
        (STABLE + "[other]\nx = 1\n", "unknown section"),
        (STABLE.replace("sigma = 0.11\n", ""), "missing required keys: sigma"),
        (STABLE + "[run]\nexperiment = spectrum\n", "names experiment 'spectrum'"),
        (STABLE + "[run]\nplot = maybe\n", "s:9 [run] plot"),
        (STABLE + "[run]\nt_max = inf\n", "s:9 [run] t_max"),
        ("no section header\n", "no section"),
    ])
    def test_diagnostics(self, text, needle):
        with pytest.raises(ConfigError) as info:
            load("survival", [("s", text)])
        assert needle.lower() in str(info.value).lower()

    def test_unknown_experiment(self):
        with pytest.raises(ConfigError):
            load("fourier", [("s", STABLE)])


class TestOutputs:
    def test_survival_preset(self, run, tmp_path):
        code, out, _ = run("survival", "--preset", "paper-figure-3")
        assert code == 0
        raw, comments, header, rows = read_csv(tmp_path / "survival.csv")
        assert header == ["t", "P", "P_zeno", "P_antizeno"]
        assert rows[0][:2] == ["0", "1"]
        assert len(rows) == 301
        assert b"\r" not in raw and raw.endswith(b"\n")
        assert comments[0] == "# zeno-lab survival"
        for key in ("E_A = 2", "Omega = 0.04", "tau_zeno = 1", "tau_antizeno = 46", "n_times = 301"):
            assert f"# {key}" in comments
        p = np.array([[float(x) for x in r] for r in rows])
        assert np.all(p[:, 1:] <= 1 + 1e-6) and np.all(p[:, 1:] >= 0)
        # frequent resets hold the population, late resets speed up decay
        assert p[-1, 2] > p[-1, 1] > p[-1, 3]

    def test_number_format(self, run, tmp_path):
        run("survival", "--preset", "paper-figure-3")
        _, _, _, rows = read_csv(tmp_path / "survival.csv")
        for r in rows[1:20]:
            for x in r:
                assert len(x.split("e")[0].replace("-", "").replace(".", "").lstrip("0")) <= 12
        assert rows[3][0] == "1.5"

    def test_deterministic(self, run, tmp_path):
        for _ in range(2):
            assert run("survival", "--preset", "paper-figure-3", "--plot")[0] == 0
            os.replace(tmp_path / "survival.csv", tmp_path / f"s{_}.csv")
            os.replace(tmp_path / "survival.svg", tmp_path / f"s{_}.svg")
        assert (tmp_path / "s0.csv").read_bytes() == (tmp_path / "s1.csv").read_bytes()
        assert (tmp_path / "s0.svg").read_bytes() == (tmp_path / "s1.svg").read_bytes()

    def test_plot_toggle(self, run, tmp_path):
        run("spectrum")
        assert not (tmp_path / "spectrum.svg").exists()
        code, out, _ = run("spectrum", "--plot", "--out", "figs")
        assert code == 0
        svg = (tmp_path / "figs" / "spectrum.svg").read_text()
        assert svg.lstrip().startswith("<?xml") and "<svg" in svg
        assert "figs/spectrum.svg" in out

    def test_spectrum(self, run, tmp_path):
        assert run("spectrum")[0] == 0
        _, _, header, rows = read_csv(tmp_path / "spectrum.csv")
        assert header == ["lambda", "density_A", "density_B"]
        v = np.array(rows, dtype=float)
        assert v[0, 0] == pytest.approx(1.0) and v[-1, 0] == pytest.approx(3.1)
        assert np.all(v[:, 1:] >= 0)

    def test_bound_states(self, run, tmp_path):
        (tmp_path / "stable.ini").write_text(STABLE)
        assert run("bound-states", "--config", "stable.ini")[0] == 0
        _, _, header, rows = read_csv(tmp_path / "bound-states.csv")
        assert header == ["Lambda", "norm", "mu_A", "mu_B"]
        assert len(rows) == 2
        lam = sorted(float(r[0]) for r in rows)
        assert lam[0] < -1 < lam[1]

    def test_bound_states_empty(self, run, tmp_path):
        assert run("bound-states")[0] == 0
        assert read_csv(tmp_path / "bound-states.csv")[3] == []

    def test_zeno_scan(self, run, tmp_path):
        assert run("zeno-scan", "--plot")[0] == 0
        _, _, header, rows = read_csv(tmp_path / "zeno-scan.csv")
        assert header == ["tau", "P_measured_T", "P_unmeasured_T", "gamma_eff", "classification"]
        kinds = {r[4] for r in rows}
        assert {"Zeno", "anti-Zeno"} <= kinds

    def test_interrupted(self, run, tmp_path):
        (tmp_path / "c.ini").write_text(STABLE.replace("E_A = -1.0", "E_A = 2.0").replace(
            "E_B = -1.0", "E_B = 2.1") + "[run]\ntau = 0.1\nt_max = 20\n")
        assert run("interrupted", "--config", "c.ini")[0] == 0
        _, _, header, rows = read_csv(tmp_path / "interrupted.csv")
        assert header == ["t", "P", "P_interrupted"]
        assert float(rows[-1][2]) > float(rows[-1][1])

    @pytest.mark.slow
    def test_oracle_compare(self, run, tmp_path):
        assert run("oracle-compare", "--t-max", "50")[0] == 0
        _, _, header, rows = read_csv(tmp_path / "oracle-compare.csv")
        assert header == ["t", "P_analytic", "P_matrix", "abs_dev"]
        assert rows[-1][0] == "max_abs_dev"
        assert float(rows[-1][3]) <= 1e-3
        assert float(rows[-2][0]) == 50.0

    def test_no_temp_files(self, run, tmp_path):
        run("bound-states")
        assert sorted(os.listdir(tmp_path)) == ["bound-states.csv"]


class TestExitCodes:
    def test_bad_config(self, run, tmp_path):
        (tmp_path / "bad.ini").write_text(STABLE.replace("mu = 0.30", "mu = -0.3"))
        code, _, err = run("survival", "--config", "bad.ini")
        assert code == 2
        assert "bad.ini:6 [params] mu" in err
        assert not (tmp_path / "survival.csv").exists()

    def test_missing_config(self, run):
        assert run("survival", "--config", "nope.ini")[0] == 2

    def test_unwritable_out_checked_first(self, run, tmp_path, monkeypatch):
        (tmp_path / "file").write_text("")
        called = []
        monkeypatch.setitem(cli.RUNNERS, "survival", lambda cfg: called.append(cfg))
        code, _, err = run("survival", "--out", "file/sub")
        assert code == 2 and not called

    def test_compute_error(self, run, tmp_path):
        code, _, err = run("survival", "--t-max", "1e6")
        assert code == 1
        assert "panels" in err
        assert not (tmp_path / "survival.csv").exists()

    def test_oracle_revival_guard(self, run):
        code, _, err = run("oracle-compare", "--t-max", "5000")
        assert code == 1 and "revival" in err

    def test_bad_experiment(self, run):
        with pytest.raises(SystemExit) as info:
            run("fourier")
        assert info.value.code == 2


def test_console_script(tmp_path):
    env = dict(os.environ, ZENO_LAB_THREADS="1")
    out = subprocess.run(["zeno-lab", "bound-states", "--out", str(tmp_path)],
                         capture_output=True, text=True, env=env, timeout=300)
    assert out.returncode == 0, out.stderr
    assert (tmp_path / "bound-states.csv").exists()


def test_thread_cap():
    code = "import zenolab, numba; print(numba.get_num_threads())"
    out = subprocess.run([sys.executable, "-c", code], capture_output=True, text=True,
                         env=dict(os.environ, ZENO_LAB_THREADS="1"), timeout=300, check=True)
    assert out.stdout.strip() == "1"
