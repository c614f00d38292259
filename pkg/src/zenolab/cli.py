"""``zeno-lab`` command line front end."""
import argparse
import io
import math
import os
import sys
import tempfile

import numpy as np

from . import evolution, oracle, spectral, zeno
from .config import EXPERIMENTS, PRESETS, ConfigError, load
from .errors import ZenoLabError


def fmt(x):
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if x == 0:
            return "0"
        return format(x, ".12g")
    return str(x)


def _atomic_write(path, data, mode="w"):
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".zeno-lab-", suffix=".tmp")
    try:
        kw = {"newline": "\n", "encoding": "utf-8"} if "b" not in mode else {}
        with os.fdopen(fd, mode, **kw) as fh:
            fh.write(data)
        umask = os.umask(0)
        os.umask(umask)
        os.chmod(tmp, 0o666 & ~umask)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def render_csv(cfg, header, rows):
    lines = [f"# zeno-lab {cfg.experiment}"]
    section = None
    for sec, key, value in cfg.resolved():
        if sec != section:
            lines.append(f"# [{sec}]")
            section = sec
        lines.append(f"# {key} = {fmt(value)}")
    lines.append(",".join(header))
    lines.extend(",".join(fmt(v) for v in row) for row in rows)
    return "\n".join(lines) + "\n"


# -- experiments ----------------------------------------------------------------

def _times(cfg):
    return np.linspace(0.0, cfg.t_max, cfg.n_times)


def run_survival(cfg):
    p, init = cfg.params, cfg.initial
    t = _times(cfg)
    cols = {"P": evolution.survival_curve(p, init, t).probabilities}
    if cfg.tau_zeno is not None:
        cols["P_zeno"] = zeno.interrupted_probability(p, init, cfg.tau_zeno, t)
    if cfg.tau_antizeno is not None:
        cols["P_antizeno"] = zeno.interrupted_probability(p, init, cfg.tau_antizeno, t)
    header = ["t"] + list(cols)
    rows = zip(t, *cols.values())
    plot = dict(kind="lines", x=t, ys=cols, xlabel="t", ylabel=f"P_{init}(t)", logy=cfg.log_p)
    return header, rows, plot


def run_interrupted(cfg):
    p, init = cfg.params, cfg.initial
    t = _times(cfg)
    unmeasured = evolution.survival_probability(p, init, t)
    measured = zeno.interrupted_probability(p, init, cfg.tau, t)
    cols = {"P": unmeasured, "P_interrupted": measured}
    plot = dict(kind="lines", x=t, ys=cols, xlabel="t", ylabel=f"P_{init}(t)", logy=cfg.log_p)
    return ["t", "P", "P_interrupted"], zip(t, unmeasured, measured), plot


def run_spectrum(cfg):
    p = cfg.params
    levels = [e for e in (p.E_A, p.E_B) if e > 0] or [p.omega_0]
    lo = cfg.lambda_min if cfg.lambda_min is not None else max(1e-3, min(levels) - 1.0)
    hi = cfg.lambda_max if cfg.lambda_max is not None else min(p.omega_max - 1e-3, max(levels) + 1.0)
    lam = np.linspace(lo, hi, cfg.n_lambda)
    ra, rb = spectral.density_A(p, lam), spectral.density_B(p, lam)
    plot = dict(kind="lines", x=lam, ys={"density_A": ra, "density_B": rb},
                xlabel="lambda", ylabel="spectral density", logy=False)
    return ["lambda", "density_A", "density_B"], zip(lam, ra, rb), plot


def run_zeno_scan(cfg):
    p, init = cfg.params, cfg.initial
    T = cfg.horizon if cfg.horizon is not None else zeno.default_horizon(p, init)
    tau_max = cfg.tau_max if cfg.tau_max is not None else T / 2
    grid = np.geomspace(cfg.tau_min, tau_max, cfg.n_tau)
    verdicts = zeno.tau_scan(p, init, grid, T)
    rows = [(v.tau, v.P_measured, v.P_unmeasured, v.gamma_eff, v.classification) for v in verdicts]
    taus = np.array([v.tau for v in verdicts])
    gam = np.array([v.gamma_eff for v in verdicts])
    ref = -math.log(verdicts[0].P_unmeasured) / T
    plot = dict(kind="lines", x=taus, ys={"gamma_eff": gam, "unmeasured": np.full_like(gam, ref)},
                xlabel="tau", ylabel="effective decay rate", logy=False, logx=True)
    return ["tau", "P_measured_T", "P_unmeasured_T", "gamma_eff", "classification"], rows, plot


def run_bound_states(cfg):
    rows = [(b.Lambda, b.norm, b.mu_A, b.mu_B) for b in spectral.find_bound_states(cfg.params)]
    return ["Lambda", "norm", "mu_A", "mu_B"], rows, None


def run_oracle_compare(cfg):
    p, init = cfg.params, cfg.initial
    dm = oracle.build(p, cfg.N)
    if cfg.t_max >= dm.revival_time:
        raise ZenoLabError(
            f"t_max={cfg.t_max} is past the discretisation revival horizon {dm.revival_time:.4g}"
        )
    t = _times(cfg)
    pm = oracle.matrix_survival(oracle.solve(dm), init, t).probabilities
    pa = evolution.survival_probability(p, init, t)
    dev = np.abs(pa - pm)
    rows = list(zip(t, pa, pm, dev)) + [("max_abs_dev", None, None, dev.max())]
    plot = dict(kind="lines", x=t, ys={"P_analytic": pa, "P_matrix": pm},
                xlabel="t", ylabel=f"P_{init}(t)", logy=cfg.log_p)
    return ["t", "P_analytic", "P_matrix", "abs_dev"], rows, plot


RUNNERS = {
    "spectrum": run_spectrum,
    "survival": run_survival,
    "zeno-scan": run_zeno_scan,
    "interrupted": run_interrupted,
    "oracle-compare": run_oracle_compare,
    "bound-states": run_bound_states,
}


def render_svg(plot, title):
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    matplotlib.rcParams["svg.hashsalt"] = "zeno-lab"
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    styles = ["-", "--", ":", "-."]
    for i, (name, y) in enumerate(plot["ys"].items()):
        ax.plot(plot["x"], y, styles[i % len(styles)], label=name)
    if plot.get("logy"):
        ax.set_yscale("log")
    if plot.get("logx"):
        ax.set_xscale("log")
    ax.set_xlabel(plot["xlabel"])
    ax.set_ylabel(plot["ylabel"])
    ax.set_title(title)
    ax.legend()
    fig.tight_layout()
    buf = io.StringIO()
    fig.savefig(buf, format="svg", metadata={"Date": None})
    plt.close(fig)
    return buf.getvalue()


# -- entry point -------------------------------------------------------------------

def build_parser():
    ap = argparse.ArgumentParser(prog="zeno-lab", description=__doc__)
    ap.add_argument("experiment", choices=EXPERIMENTS)
    ap.add_argument("--config", help="key = value config file with [params] / [run] sections")
    ap.add_argument("--preset", choices=sorted(PRESETS))
    ap.add_argument("--out", help="output directory (overrides [run] out)")
    ap.add_argument("--plot", action="store_true", help="also write an SVG plot")
    ap.add_argument("--t-max", type=float, help="override [run] t_max")
    ap.add_argument("--initial", choices=("A", "B"), help="override [run] initial")
    return ap


def _sources(args):
    sources = []
    if args.preset:
        sources.append((f"preset:{args.preset}", PRESETS[args.preset]))
    elif not args.config:
        sources.append(("preset:paper-figure-3", PRESETS["paper-figure-3"]))
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            sources.append((args.config, fh.read()))
    over = []
    if args.out is not None:
        over.append(f"out = {args.out}")
    if args.plot:
        over.append("plot = true")
    if args.t_max is not None:
        over.append(f"t_max = {args.t_max!r}")
    if args.initial is not None:
        over.append(f"initial = {args.initial}")
    if over:
        sources.append(("command line", "[run]\n" + "\n".join(over) + "\n"))
    return sources


def _check_writable(directory, names):
    os.makedirs(directory, exist_ok=True)
    if not os.access(directory, os.W_OK):
        raise ConfigError(f"output directory {directory!r} is not writable")
    for name in names:
        path = os.path.join(directory, name)
        if os.path.exists(path) and not os.access(path, os.W_OK):
            raise ConfigError(f"output file {path!r} is not writable")


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = load(args.experiment, _sources(args))
        stem = args.experiment
        names = [stem + ".csv"] + ([stem + ".svg"] if cfg.plot else [])
        _check_writable(cfg.out, names)
    except (ConfigError, OSError) as exc:
        print(f"zeno-lab: config error: {exc}", file=sys.stderr)
        return 2

    try:
        header, rows, plot = RUNNERS[args.experiment](cfg)
        csv_text = render_csv(cfg, header, rows)
        svg_text = render_svg(plot, stem) if cfg.plot and plot is not None else None
    except (ZenoLabError, ArithmeticError, ValueError) as exc:
        print(f"zeno-lab: {args.experiment} failed: {exc}", file=sys.stderr)
        return 1

    _atomic_write(os.path.join(cfg.out, names[0]), csv_text)
    print(os.path.join(cfg.out, names[0]))
    if svg_text is not None:
        _atomic_write(os.path.join(cfg.out, names[1]), svg_text)
        print(os.path.join(cfg.out, names[1]))
    return 0


if __name__ == "__main__":
    sys.exit(main())
